#pragma once

#include "pim/kernel.hpp"
#include "pim/pointcloud.hpp"

#include <string>
#include <vector>

namespace pim {

/// (L_{t,h} u)(p_i) = (1/t) sum_j R_t(p_i, p_j) (u_i - u_j) V_j.
double apply_Lth(const PointCloud& cloud, const Kernel& kernel, const DiscreteField& u, Index i);

/// (K_{t,h} u)(p_i) = (L_{t,h} u)(p_i) + (2/beta) sum_l Rbar_t(p_i, s_l) u(s_l) A_l.
double apply_Kth(const PointCloud& cloud, const Kernel& kernel, double beta, const DiscreteField& u, Index i);

/// Boundary part of K_{t,h} alone: (2/beta) sum_l Rbar_t(x, s_l) u(s_l) A_l.
double boundary_penalty(const PointCloud& cloud,
                        const Kernel& kernel,
                        double beta,
                        const DiscreteField& u,
                        const ConstVectorRef& x);

/// sum_i V_i u_i (L_{t,h} u)(p_i).
double weighted_energy(const PointCloud& cloud, const Kernel& kernel, const DiscreteField& u);

/// (1/2t) sum_{i,j} R_t(p_i, p_j) (u_i - u_j)^2 V_i V_j, the symmetric form of weighted_energy.
double dirichlet_form(const PointCloud& cloud, const Kernel& kernel, const DiscreteField& u);

/// Continuous L_t u(x) = (1/t) int R_t(x, y) (u(x) - u(y)) dmu_y by quadrature on
/// a cloud much finer than the working one.
template <typename Function>
double oracle_Lt(Function&& u, const ConstVectorRef& x, const PointCloud& fine, const Kernel& kernel)
{
    const double ux = u(x);
    double sum = 0.0;
    for (Index q = 0; q < fine.size(); ++q) {
        const auto y = fine.point(q);
        const double r = eval_Rt(x, y, kernel.params, kernel.profile);
        if (r != 0.0) sum += r * (ux - u(y)) * fine.volume_weights()[q];
    }
    return sum / kernel.t();
}

/// Kernel-weighted average v(x) = int R(|x-y|^2/4t) u(y) dmu_y / int R(|x-y|^2/4t) dmu_y,
/// discretized on `cloud`. Always lies in [min u, max u].
double oracle_v(const PointCloud& cloud, const Kernel& kernel, const DiscreteField& u, const ConstVectorRef& x);

/// One comparison from run_oracle_checks.
struct OracleCheck
{
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct OracleCheckOptions
{
    /// Fine-cloud resolution relative to the working cloud.
    int fineness = 8;
    Index working_points = 101;
    double t = 0.001;
};

/// Operator-level comparisons against quadrature oracles: constant
/// annihilation, odd symmetry, the quadratic identity L_t x^2 = -2 wbar_t,
/// weighted PSD, boundary locality of K - L and averaging bounds of v.
std::vector<OracleCheck> run_oracle_checks(const OracleCheckOptions& options = {});

} // namespace pim
