#pragma once

#include "pim/kernel.hpp"
#include "pim/neighbors.hpp"
#include "pim/pointcloud.hpp"

#include <filesystem>
#include <utility>

namespace pim {

///
/// Smooth reconstruction of a discrete solution:
///
///   I(x) = [ sum_j R_t(x,p_j) u_j V_j
///            - (2t/beta) sum_l Rbar_t(x,s_l) (u_l - b_l) A_l
///            + t sum_j Rbar_t(x,p_j) f_j V_j ] / sum_j R_t(x,p_j) V_j
///
/// When u solves the assembled system, I(p_i) = u_i for every sample.
///
class Interpolant
{
public:
    Interpolant(PointCloud cloud, Kernel kernel, double beta, DiscreteField u, DiscreteField f, Vector b);

    double eval(const ConstVectorRef& x) const;

    /// Gradient of eval. Projected onto the tangent plane for built-in curved
    /// manifolds; the raw ambient gradient otherwise.
    Vector grad(const ConstVectorRef& x) const;

    std::pair<double, Vector> eval_with_grad(const ConstVectorRef& x) const;

    /// Denominator w_{t,h}(x) = sum_j R_t(x, p_j) V_j.
    double weight(const ConstVectorRef& x) const;

    const PointCloud& cloud() const { return m_cloud; }
    const Kernel& kernel() const { return m_kernel; }
    double beta() const { return m_beta; }
    const DiscreteField& u() const { return m_u; }
    const DiscreteField& f() const { return m_f; }
    const Vector& b() const { return m_b; }

private:
    PointCloud m_cloud;
    Kernel m_kernel;
    double m_beta;
    DiscreteField m_u;
    DiscreteField m_f;
    Vector m_b;
    NeighborIndex m_index;
    // Per-sample coefficients: u_j V_j, t f_j V_j and (2t/beta)(u_l - b_l) A_l.
    Vector m_value_weight;
    Vector m_source_weight;
    Vector m_boundary_weight;
};

/// Removes the component of `g` normal to the manifold at `x` when the cloud's
/// origin has an analytic normal (the sphere cap). Flat clouds pass through.
Vector project_to_tangent(const PointCloud& cloud, const ConstVectorRef& x, const Vector& g);

/// Query points: CSV with header `x1,...,xd`.
PointMatrix read_query_points(const std::filesystem::path& path, int ambient_dim);

/// Writes `x1..xd,value,g1..gd` rows for every query point.
void write_evaluations(const Interpolant& interpolant,
                       const PointMatrix& queries,
                       const std::filesystem::path& path);

} // namespace pim
