#pragma once

#include "pim/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pim {

enum class Shape { interval, rectangle, disk, spherical_cap };

std::string_view to_string(Shape shape);
Shape parse_shape(std::string_view name);

/// Built-in manifold and its sampling resolution.
///
/// - interval: [a, b] in R^1
/// - rectangle: [0, width_x] x [0, width_y] in R^2
/// - disk: unit disk in R^2
/// - spherical_cap: {|x| = 1, z >= z0} in R^3
///
/// `n` is a target point count. Interval clouds hit it exactly; the other
/// shapes round to the nearest grid that fits.
struct ManifoldSpec
{
    Shape shape = Shape::interval;
    double a = 0.0;
    double b = 1.0;
    double width_x = 1.0;
    double width_y = 1.0;
    double z0 = 0.0;
    Index n = 101;

    /// Randomized placement amplitude as a fraction of the local spacing
    /// (0 gives the regular grid). Weights stay exact for every jitter.
    double jitter = 0.0;
    std::uint64_t seed = 0;

    int ambient_dim() const;
    int intrinsic_dim() const;
};

void validate(const ManifoldSpec& spec);

double manifold_volume(const ManifoldSpec& spec);
double boundary_measure(const ManifoldSpec& spec);

/// Same manifold with the linear resolution multiplied by `factor`
/// (point count grows like factor^k).
ManifoldSpec refined(const ManifoldSpec& spec, int factor);

/// True when `x` satisfies the analytic boundary equation of `spec` to `tol`.
bool on_boundary(const ManifoldSpec& spec, const ConstVectorRef& x, double tol = 1e-12);

/// Sampled manifold (P, S, V, A) with intrinsic dimension k.
///
/// Immutable once constructed; the constructor enforces positivity of all
/// weights, distinct in-range boundary indices and 1 <= k <= d.
class PointCloud
{
public:
    PointCloud(PointMatrix points,
               int intrinsic_dim,
               std::vector<Index> boundary_indices,
               Vector volume_weights,
               Vector area_weights,
               std::optional<ManifoldSpec> origin = std::nullopt,
               std::optional<double> recorded_fill_distance = std::nullopt);

    Index size() const { return m_points.cols(); }
    int ambient_dim() const { return static_cast<int>(m_points.rows()); }
    int intrinsic_dim() const { return m_intrinsic_dim; }

    const PointMatrix& points() const { return m_points; }
    auto point(Index i) const { return m_points.col(i); }

    const std::vector<Index>& boundary_indices() const { return m_boundary; }
    Index boundary_size() const { return static_cast<Index>(m_boundary.size()); }

    const Vector& volume_weights() const { return m_volume; }
    const Vector& area_weights() const { return m_area; }

    /// Position of point i in the boundary list, or -1 for interior points.
    Index boundary_slot(Index i) const { return m_slot[static_cast<size_t>(i)]; }
    bool is_boundary(Index i) const { return boundary_slot(i) >= 0; }

    /// Generator parameters for built-in clouds; empty for loaded clouds.
    const std::optional<ManifoldSpec>& origin() const { return m_origin; }

    /// Fill distance computed at generation time, if any.
    std::optional<double> recorded_fill_distance() const { return m_fill_distance; }

    /// Gathers u at the boundary samples, in boundary order.
    Vector boundary_values(const DiscreteField& u) const;

private:
    PointMatrix m_points;
    int m_intrinsic_dim;
    std::vector<Index> m_boundary;
    Vector m_volume;
    Vector m_area;
    std::vector<Index> m_slot;
    std::optional<ManifoldSpec> m_origin;
    std::optional<double> m_fill_distance;
};

/// Builds the cloud for a built-in manifold with analytic quadrature weights.
/// Throws InvalidArgument when the resolution cannot hold an interior and a
/// boundary point.
PointCloud generate(const ManifoldSpec& spec);

/// Largest nearest-neighbor distance over the cloud, a surrogate for h.
double fill_distance(const PointCloud& cloud);

/// CSV with a `# intrinsic_dim=k` line followed by the header
/// `x1,...,xd,volume_weight,boundary_flag,area_weight`.
PointCloud load_cloud(const std::filesystem::path& path);
PointCloud parse_cloud(std::string_view text);
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path);
std::string format_cloud(const PointCloud& cloud);

} // namespace pim
