#include "pim/pointcloud.hpp"

#include "pim/csv.hpp"
#include "pim/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace pim {

using std::numbers::pi;

std::string_view to_string(Shape shape)
{
    switch (shape) {
    case Shape::interval: return "interval";
    case Shape::rectangle: return "rectangle";
    case Shape::disk: return "disk";
    case Shape::spherical_cap: return "spherical_cap";
    }
    return "unknown";
}

Shape parse_shape(std::string_view name)
{
    if (name == "interval") return Shape::interval;
    if (name == "rectangle") return Shape::rectangle;
    if (name == "disk" || name == "unit-disk" || name == "unit_disk") return Shape::disk;
    if (name == "spherical_cap" || name == "spherical-cap" || name == "cap") return Shape::spherical_cap;
    throw InvalidArgument("unknown shape '" + std::string(name) +
                          "' (expected interval, rectangle, disk or spherical_cap)");
}

int ManifoldSpec::ambient_dim() const
{
    switch (shape) {
    case Shape::interval: return 1;
    case Shape::rectangle:
    case Shape::disk: return 2;
    case Shape::spherical_cap: return 3;
    }
    return 0;
}

int ManifoldSpec::intrinsic_dim() const
{
    return shape == Shape::interval ? 1 : 2;
}

void validate(const ManifoldSpec& spec)
{
    if (spec.shape == Shape::interval && !(spec.a < spec.b)) {
        throw InvalidArgument("interval requires a < b");
    }
    if (spec.shape == Shape::rectangle && !(spec.width_x > 0.0 && spec.width_y > 0.0)) {
        throw InvalidArgument("rectangle widths must be positive");
    }
    if (spec.shape == Shape::spherical_cap && !(spec.z0 > -1.0 && spec.z0 < 1.0)) {
        throw InvalidArgument("spherical cap requires -1 < z0 < 1");
    }
    if (!(spec.jitter >= 0.0 && spec.jitter <= 0.5)) {
        throw InvalidArgument("jitter must lie in [0, 0.5]");
    }
}

double manifold_volume(const ManifoldSpec& spec)
{
    switch (spec.shape) {
    case Shape::interval: return spec.b - spec.a;
    case Shape::rectangle: return spec.width_x * spec.width_y;
    case Shape::disk: return pi;
    case Shape::spherical_cap: return 2.0 * pi * (1.0 - spec.z0);
    }
    return 0.0;
}

double boundary_measure(const ManifoldSpec& spec)
{
    switch (spec.shape) {
    case Shape::interval: return 2.0; // counting measure
    case Shape::rectangle: return 2.0 * (spec.width_x + spec.width_y);
    case Shape::disk: return 2.0 * pi;
    case Shape::spherical_cap: return 2.0 * pi * std::sqrt(1.0 - spec.z0 * spec.z0);
    }
    return 0.0;
}

namespace {

Index disk_rings(const ManifoldSpec& spec)
{
    return std::max<Index>(1, std::lround(std::sqrt(static_cast<double>(spec.n) / pi)));
}

double cap_angle(const ManifoldSpec& spec)
{
    return std::acos(spec.z0);
}

Index cap_rings(const ManifoldSpec& spec)
{
    const double rings =
        cap_angle(spec) * std::sqrt(static_cast<double>(spec.n) / (2.0 * pi * (1.0 - spec.z0)));
    return std::max<Index>(1, std::lround(rings));
}

std::pair<Index, Index> rectangle_grid(const ManifoldSpec& spec)
{
    const double n = static_cast<double>(spec.n);
    const Index nx = std::max<Index>(2, std::lround(std::sqrt(n * spec.width_x / spec.width_y)));
    const Index ny = std::max<Index>(2, std::lround(n / static_cast<double>(nx)));
    return {nx, ny};
}

} // namespace

ManifoldSpec refined(const ManifoldSpec& spec, int factor)
{
    if (factor < 1) throw InvalidArgument("refinement factor must be >= 1");
    ManifoldSpec out = spec;
    switch (spec.shape) {
    case Shape::interval: out.n = factor * (spec.n - 1) + 1; break;
    case Shape::rectangle: out.n = spec.n * factor * factor; break;
    case Shape::disk: {
        const double rings = static_cast<double>(factor * disk_rings(spec));
        out.n = std::lround(pi * rings * rings);
        break;
    }
    case Shape::spherical_cap: {
        const double rings = static_cast<double>(factor * cap_rings(spec)) / cap_angle(spec);
        out.n = std::lround(2.0 * pi * (1.0 - spec.z0) * rings * rings);
        break;
    }
    }
    return out;
}

bool on_boundary(const ManifoldSpec& spec, const ConstVectorRef& x, double tol)
{
    switch (spec.shape) {
    case Shape::interval: return std::abs(x[0] - spec.a) <= tol || std::abs(x[0] - spec.b) <= tol;
    case Shape::rectangle: {
        const bool inside = x[0] >= -tol && x[0] <= spec.width_x + tol && x[1] >= -tol &&
                            x[1] <= spec.width_y + tol;
        const bool edge = std::abs(x[0]) <= tol || std::abs(x[0] - spec.width_x) <= tol ||
                          std::abs(x[1]) <= tol || std::abs(x[1] - spec.width_y) <= tol;
        return inside && edge;
    }
    case Shape::disk: return std::abs(x.norm() - 1.0) <= tol;
    case Shape::spherical_cap:
        return std::abs(x[2] - spec.z0) <= tol && std::abs(x.norm() - 1.0) <= tol;
    }
    return false;
}

PointCloud::PointCloud(PointMatrix points,
                       int intrinsic_dim,
                       std::vector<Index> boundary_indices,
                       Vector volume_weights,
                       Vector area_weights,
                       std::optional<ManifoldSpec> origin,
                       std::optional<double> recorded_fill_distance)
    : m_points(std::move(points))
    , m_intrinsic_dim(intrinsic_dim)
    , m_boundary(std::move(boundary_indices))
    , m_volume(std::move(volume_weights))
    , m_area(std::move(area_weights))
    , m_origin(std::move(origin))
    , m_fill_distance(recorded_fill_distance)
{
    const Index n = m_points.cols();
    if (intrinsic_dim < 1 || intrinsic_dim > m_points.rows()) {
        throw InvalidArgument("intrinsic dimension " + std::to_string(intrinsic_dim) +
                              " must lie in [1, ambient dimension " +
                              std::to_string(m_points.rows()) + "]");
    }
    if (m_volume.size() != n) throw InvalidArgument("volume weight count does not match point count");
    if (m_area.size() != static_cast<Index>(m_boundary.size())) {
        throw InvalidArgument("area weight count does not match boundary point count");
    }
    for (Index i = 0; i < n; ++i) {
        if (!(m_volume[i] > 0.0)) throw InvalidArgument("non-positive volume weight at point " + std::to_string(i));
    }
    m_slot.assign(static_cast<size_t>(n), -1);
    for (size_t l = 0; l < m_boundary.size(); ++l) {
        const Index i = m_boundary[l];
        if (i < 0 || i >= n) throw InvalidArgument("boundary index out of range");
        if (m_slot[i] >= 0) throw InvalidArgument("duplicate boundary index " + std::to_string(i));
        if (!(m_area[static_cast<Index>(l)] > 0.0)) {
            throw InvalidArgument("non-positive area weight at boundary point " + std::to_string(i));
        }
        m_slot[i] = static_cast<Index>(l);
    }
}

Vector PointCloud::boundary_values(const DiscreteField& u) const
{
    if (u.size() != size()) throw InvalidArgument("field length does not match cloud size");
    Vector out(boundary_size());
    for (Index l = 0; l < boundary_size(); ++l) out[l] = u[m_boundary[l]];
    return out;
}

namespace {

// Nodes of [lo, hi] with optional interior jitter, plus trapezoid weights.
struct Grid1d
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

Grid1d trapezoid_grid(double lo, double hi, Index count, double jitter, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    Grid1d grid;
    grid.nodes.resize(static_cast<size_t>(count));
    const double spacing = (hi - lo) / static_cast<double>(count - 1);
    for (Index i = 0; i < count; ++i) {
        grid.nodes[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    grid.nodes.front() = lo;
    grid.nodes.back() = hi;
    if (jitter > 0.0) {
        for (Index i = 1; i + 1 < count; ++i) grid.nodes[i] += jitter * spacing * unit(rng);
    }
    grid.weights.resize(static_cast<size_t>(count));
    grid.weights.front() = 0.5 * (grid.nodes[1] - grid.nodes[0]);
    grid.weights.back() = 0.5 * (grid.nodes[count - 1] - grid.nodes[count - 2]);
    for (Index i = 1; i + 1 < count; ++i) grid.weights[i] = 0.5 * (grid.nodes[i + 1] - grid.nodes[i - 1]);
    return grid;
}

void too_coarse(const ManifoldSpec& spec)
{
    throw InvalidArgument("resolution n = " + std::to_string(spec.n) + " is too small for " +
                          std::string(to_string(spec.shape)) +
                          ": need at least one interior and one boundary point");
}

struct CloudBuilder
{
    int d;
    std::vector<double> coords;
    std::vector<double> volume;
    std::vector<Index> boundary;
    std::vector<double> area;

    Index add(std::initializer_list<double> x, double v)
    {
        coords.insert(coords.end(), x);
        volume.push_back(v);
        return static_cast<Index>(volume.size()) - 1;
    }

    void mark_boundary(Index i, double a)
    {
        boundary.push_back(i);
        area.push_back(a);
    }

    PointCloud finish(const ManifoldSpec& spec) const
    {
        const Index n = static_cast<Index>(volume.size());
        PointMatrix points = Eigen::Map<const PointMatrix>(coords.data(), d, n);
        Vector v = Eigen::Map<const Vector>(volume.data(), n);
        Vector a = Eigen::Map<const Vector>(area.data(), static_cast<Index>(area.size()));
        PointCloud provisional(points, spec.intrinsic_dim(), boundary, v, a);
        const double h = fill_distance(provisional);
        return PointCloud(std::move(points), spec.intrinsic_dim(), boundary, std::move(v), std::move(a), spec, h);
    }
};

PointCloud generate_interval(const ManifoldSpec& spec, std::mt19937_64& rng)
{
    if (spec.n < 3) too_coarse(spec);
    const Grid1d grid = trapezoid_grid(spec.a, spec.b, spec.n, spec.jitter, rng);
    CloudBuilder builder{1, {}, {}, {}, {}};
    for (Index i = 0; i < spec.n; ++i) builder.add({grid.nodes[i]}, grid.weights[i]);
    builder.mark_boundary(0, 1.0);
    builder.mark_boundary(spec.n - 1, 1.0);
    return builder.finish(spec);
}

PointCloud generate_rectangle(const ManifoldSpec& spec, std::mt19937_64& rng)
{
    const auto [nx, ny] = rectangle_grid(spec);
    if (nx < 3 || ny < 3) too_coarse(spec);
    const Grid1d gx = trapezoid_grid(0.0, spec.width_x, nx, spec.jitter, rng);
    const Grid1d gy = trapezoid_grid(0.0, spec.width_y, ny, spec.jitter, rng);
    CloudBuilder builder{2, {}, {}, {}, {}};
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            const Index id = builder.add({gx.nodes[i], gy.nodes[j]}, gx.weights[i] * gy.weights[j]);
            const bool x_edge = i == 0 || i == nx - 1;
            const bool y_edge = j == 0 || j == ny - 1;
            // Perimeter trapezoid: each edge contributes its own 1-D weight.
            double a = 0.0;
            if (y_edge) a += gx.weights[i];
            if (x_edge) a += gy.weights[j];
            if (x_edge || y_edge) builder.mark_boundary(id, a);
        }
    }
    return builder.finish(spec);
}

// Angular position of point m of M on ring `ring`, staggered on odd rings and
// jittered inside its own angular cell.
double ring_angle(Index m, Index count, Index ring, double jitter, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    double offset = (ring % 2 == 1) ? 0.5 : 0.0;
    if (jitter > 0.0) offset += jitter * unit(rng);
    return 2.0 * pi * (static_cast<double>(m) + offset) / static_cast<double>(count);
}

PointCloud generate_disk(const ManifoldSpec& spec, std::mt19937_64& rng)
{
    if (spec.n < 3) too_coarse(spec);
    const Index rings = disk_rings(spec);
    const double dr = 1.0 / static_cast<double>(rings);
    CloudBuilder builder{2, {}, {}, {}, {}};
    builder.add({0.0, 0.0}, pi * 0.25 * dr * dr);
    for (Index j = 1; j <= rings; ++j) {
        const bool boundary = j == rings;
        const Index count = std::max<Index>(6, std::lround(2.0 * pi * static_cast<double>(j)));
        const double radius = boundary ? 1.0 : static_cast<double>(j) * dr;
        const double inner = radius - 0.5 * dr;
        const double outer = boundary ? 1.0 : radius + 0.5 * dr;
        const double cell = pi * (outer * outer - inner * inner) / static_cast<double>(count);
        for (Index m = 0; m < count; ++m) {
            const double theta = ring_angle(m, count, j, spec.jitter, rng);
            const Index id = builder.add({radius * std::cos(theta), radius * std::sin(theta)}, cell);
            if (boundary) builder.mark_boundary(id, 2.0 * pi / static_cast<double>(count));
        }
    }
    return builder.finish(spec);
}

// Area of the sphere band between polar angles lo < hi.
double band_area(double lo, double hi)
{
    return 4.0 * pi * std::sin(0.5 * (lo + hi)) * std::sin(0.5 * (hi - lo));
}

PointCloud generate_cap(const ManifoldSpec& spec, std::mt19937_64& rng)
{
    if (spec.n < 3) too_coarse(spec);
    const double max_angle = cap_angle(spec);
    const Index rings = cap_rings(spec);
    const double dphi = max_angle / static_cast<double>(rings);
    const double rim = std::sqrt(1.0 - spec.z0 * spec.z0);
    CloudBuilder builder{3, {}, {}, {}, {}};
    builder.add({0.0, 0.0, 1.0}, band_area(0.0, 0.5 * dphi));
    for (Index j = 1; j <= rings; ++j) {
        const bool boundary = j == rings;
        const double phi = boundary ? max_angle : static_cast<double>(j) * dphi;
        const double ring_radius = boundary ? rim : std::sin(phi);
        const Index count = std::max<Index>(6, std::lround(2.0 * pi * ring_radius / dphi));
        const double lo = phi - 0.5 * dphi;
        const double hi = boundary ? max_angle : phi + 0.5 * dphi;
        const double cell = band_area(lo, hi) / static_cast<double>(count);
        const double z = boundary ? spec.z0 : std::cos(phi);
        for (Index m = 0; m < count; ++m) {
            const double theta = ring_angle(m, count, j, spec.jitter, rng);
            const Index id =
                builder.add({ring_radius * std::cos(theta), ring_radius * std::sin(theta), z}, cell);
            if (boundary) builder.mark_boundary(id, 2.0 * pi * rim / static_cast<double>(count));
        }
    }
    return builder.finish(spec);
}

} // namespace

PointCloud generate(const ManifoldSpec& spec)
{
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    switch (spec.shape) {
    case Shape::interval: return generate_interval(spec, rng);
    case Shape::rectangle: return generate_rectangle(spec, rng);
    case Shape::disk: return generate_disk(spec, rng);
    case Shape::spherical_cap: return generate_cap(spec, rng);
    }
    throw InvalidArgument("unsupported shape");
}

double fill_distance(const PointCloud& cloud)
{
    const Index n = cloud.size();
    if (n < 2) throw InvalidArgument("fill distance needs at least two points");
    const PointMatrix& points = cloud.points();
    const Vector extent = points.rowwise().maxCoeff() - points.rowwise().minCoeff();
    const double diameter = extent.norm();
    if (diameter == 0.0) return 0.0;

    // Grow the search radius until every point has found another point.
    std::vector<double> nearest(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<Index> pending(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) pending[i] = i;
    double radius = 2.0 * diameter / std::pow(static_cast<double>(n), 1.0 / cloud.intrinsic_dim());
    while (!pending.empty()) {
        radius = std::min(radius, diameter);
        const NeighborIndex index(points, radius);
        std::vector<Index> still_pending;
        for (const Index i : pending) {
            double best2 = std::numeric_limits<double>::infinity();
            index.for_each_within(points.col(i), [&](Index j, double d2) {
                if (j != i) best2 = std::min(best2, d2);
            });
            if (std::isfinite(best2)) {
                nearest[i] = std::sqrt(best2);
            } else {
                still_pending.push_back(i);
            }
        }
        pending.swap(still_pending);
        radius *= 2.0;
    }
    return *std::max_element(nearest.begin(), nearest.end());
}

std::string format_cloud(const PointCloud& cloud)
{
    const int d = cloud.ambient_dim();
    std::string out = "# intrinsic_dim=" + std::to_string(cloud.intrinsic_dim()) + "\n";
    for (int c = 0; c < d; ++c) out += "x" + std::to_string(c + 1) + ",";
    out += "volume_weight,boundary_flag,area_weight\n";
    for (Index i = 0; i < cloud.size(); ++i) {
        for (int c = 0; c < d; ++c) out += csv::format_real(cloud.points()(c, i)) + ",";
        out += csv::format_real(cloud.volume_weights()[i]);
        const Index slot = cloud.boundary_slot(i);
        if (slot >= 0) {
            out += ",1," + csv::format_real(cloud.area_weights()[slot]) + "\n";
        } else {
            out += ",0,\n";
        }
    }
    return out;
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path)
{
    csv::write_file(path, format_cloud(cloud));
}

PointCloud parse_cloud(std::string_view text)
{
    std::optional<int> intrinsic_dim;
    std::optional<int> ambient_dim;
    std::vector<double> coords;
    std::vector<double> volume;
    std::vector<Index> boundary;
    std::vector<double> area;

    Index line_number = 0;
    for (auto raw : csv::lines(text)) {
        ++line_number;
        const std::string where = "line " + std::to_string(line_number);
        const auto line = csv::trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = csv::trim(line.substr(1));
            constexpr std::string_view key = "intrinsic_dim=";
            if (body.substr(0, key.size()) == key) {
                intrinsic_dim = static_cast<int>(csv::parse_integer(body.substr(key.size()), where));
            }
            continue;
        }
        const auto fields = csv::split(line);
        if (!ambient_dim) {
            if (!intrinsic_dim) throw ParseError("missing '# intrinsic_dim=k' line before the header");
            if (fields.size() < 4) throw ParseError("header has too few columns");
            const int d = static_cast<int>(fields.size()) - 3;
            for (int c = 0; c < d; ++c) {
                if (csv::trim(fields[c]) != "x" + std::to_string(c + 1)) {
                    throw ParseError("unexpected header column '" + std::string(fields[c]) + "'");
                }
            }
            if (csv::trim(fields[d]) != "volume_weight" || csv::trim(fields[d + 1]) != "boundary_flag" ||
                csv::trim(fields[d + 2]) != "area_weight") {
                throw ParseError("header must end with volume_weight,boundary_flag,area_weight");
            }
            if (*intrinsic_dim < 1 || *intrinsic_dim > d) {
                throw ParseError("intrinsic_dim=" + std::to_string(*intrinsic_dim) +
                                 " exceeds ambient dimension " + std::to_string(d));
            }
            ambient_dim = d;
            continue;
        }
        const int d = *ambient_dim;
        if (static_cast<int>(fields.size()) != d + 3) {
            throw ParseError("malformed row at " + where + ": expected " + std::to_string(d + 3) + " fields");
        }
        for (int c = 0; c < d; ++c) coords.push_back(csv::parse_real(fields[c], where));
        const double v = csv::parse_real(fields[d], where);
        if (!(v > 0.0)) throw ParseError("non-positive volume weight at " + where);
        const auto flag = csv::trim(fields[d + 1]);
        const Index index = static_cast<Index>(volume.size());
        volume.push_back(v);
        if (flag == "1") {
            if (csv::trim(fields[d + 2]).empty()) {
                throw ParseError("boundary flag set without area weight at " + where);
            }
            const double a = csv::parse_real(fields[d + 2], where);
            if (!(a > 0.0)) throw ParseError("non-positive area weight at " + where);
            boundary.push_back(index);
            area.push_back(a);
        } else if (flag != "0") {
            throw ParseError("boundary flag must be 0 or 1 at " + where);
        }
    }
    if (!ambient_dim) throw ParseError("missing header line");
    if (volume.empty()) throw ParseError("cloud has no points");

    const Index n = static_cast<Index>(volume.size());
    return PointCloud(Eigen::Map<const PointMatrix>(coords.data(), *ambient_dim, n),
                      *intrinsic_dim,
                      std::move(boundary),
                      Eigen::Map<const Vector>(volume.data(), n),
                      Eigen::Map<const Vector>(area.data(), static_cast<Index>(area.size())));
}

PointCloud load_cloud(const std::filesystem::path& path)
{
    return parse_cloud(csv::read_file(path));
}

} // namespace pim
