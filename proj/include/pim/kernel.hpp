#pragma once

#include "pim/common.hpp"

#include <cmath>
#include <numbers>
#include <string_view>

namespace pim {

enum class ProfileKind { cubic, truncated_gaussian };

///
/// Radial profile R on [0, inf) together with its tail integral
/// Rbar(r) = int_r^inf R(s) ds and derivative R'.
///
/// Every profile is C^2, nonnegative, vanishes for r >= 1 and is bounded below
/// by delta0() on [0, 1/2].
///
/// - cubic: R = (1 - r)^3, Rbar = (1 - r)^4 / 4.
/// - truncated_gaussian: R = exp(-alpha r) (1 - r)^3, a Gaussian in |x - y|^2
///   tapered to zero at r = 1 with matching first and second derivatives.
///
class KernelProfile
{
public:
    static KernelProfile cubic() { return KernelProfile(ProfileKind::cubic, 0.0); }
    static KernelProfile truncated_gaussian(double alpha = 4.0)
    {
        return KernelProfile(ProfileKind::truncated_gaussian, alpha);
    }

    /// Accepts the config names `cubic` and `truncated_gaussian`.
    static KernelProfile from_name(std::string_view name);

    ProfileKind kind() const { return m_kind; }
    std::string_view name() const;

    double R(double r) const
    {
        if (r >= 1.0) return 0.0;
        const double q = 1.0 - r;
        const double cubic = q * q * q;
        if (m_kind == ProfileKind::cubic) return cubic;
        return std::exp(-m_alpha * r) * cubic;
    }

    double Rbar(double r) const
    {
        if (r >= 1.0) return 0.0;
        const double q = 1.0 - r;
        if (m_kind == ProfileKind::cubic) return 0.25 * q * q * q * q;
        return gaussian_tail(q);
    }

    double Rprime(double r) const
    {
        if (r >= 1.0) return 0.0;
        const double q = 1.0 - r;
        if (m_kind == ProfileKind::cubic) return -3.0 * q * q;
        return -std::exp(-m_alpha * r) * q * q * (3.0 + m_alpha * q);
    }

    double delta0() const { return R(0.5); }

private:
    KernelProfile(ProfileKind kind, double alpha)
        : m_kind(kind)
        , m_alpha(alpha)
    {}

    // int_{1-q}^1 exp(-alpha s) (1 - s)^3 ds in closed form.
    double gaussian_tail(double q) const;

    ProfileKind m_kind;
    double m_alpha;
};

/// Bandwidth t, intrinsic dimension k and the normalizer C_t = (4 pi t)^(-k/2).
struct KernelParams
{
    double t = 0.0;
    int k = 1;
    double C_t = 0.0;
};

inline double normalizer(double t, int k)
{
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * k);
}

/// Throws InvalidArgument for t <= 0 or k < 1.
KernelParams make_kernel_params(double t, int k);

/// Profile and parameters travelling together through the solver.
struct Kernel
{
    KernelProfile profile = KernelProfile::cubic();
    KernelParams params;

    double t() const { return params.t; }
    /// Distance beyond which both kernels vanish: 2 sqrt(t).
    double support_radius() const { return 2.0 * std::sqrt(params.t); }
    /// Support radius padded by a relative 1e-12 so that rounding in
    /// radius^2 versus 4t never drops a pair with a nonzero kernel value.
    double search_radius() const { return support_radius() * (1.0 + 1e-12); }
};

Kernel make_kernel(const KernelProfile& profile, double t, int k);

/// s = |x - y|^2 / (4t).
template <typename DerivedX, typename DerivedY>
double scaled_distance(const Eigen::MatrixBase<DerivedX>& x,
                       const Eigen::MatrixBase<DerivedY>& y,
                       const KernelParams& params)
{
    return (x - y).squaredNorm() / (4.0 * params.t);
}

/// R_t(x, y) = C_t R(|x - y|^2 / 4t).
template <typename DerivedX, typename DerivedY>
double eval_Rt(const Eigen::MatrixBase<DerivedX>& x,
               const Eigen::MatrixBase<DerivedY>& y,
               const KernelParams& params,
               const KernelProfile& profile)
{
    return params.C_t * profile.R(scaled_distance(x, y, params));
}

/// Rbar_t(x, y) = C_t Rbar(|x - y|^2 / 4t).
template <typename DerivedX, typename DerivedY>
double eval_Rbar_t(const Eigen::MatrixBase<DerivedX>& x,
                   const Eigen::MatrixBase<DerivedY>& y,
                   const KernelParams& params,
                   const KernelProfile& profile)
{
    return params.C_t * profile.Rbar(scaled_distance(x, y, params));
}

/// Gradient of R_t(x, y) in x: C_t R'(s) (x - y) / 2t.
template <typename DerivedX, typename DerivedY>
Vector grad_Rt_x(const Eigen::MatrixBase<DerivedX>& x,
                 const Eigen::MatrixBase<DerivedY>& y,
                 const KernelParams& params,
                 const KernelProfile& profile)
{
    const double s = scaled_distance(x, y, params);
    return (params.C_t * profile.Rprime(s) / (2.0 * params.t)) * (x - y);
}

/// Gradient of Rbar_t(x, y) in x: -C_t R(s) (x - y) / 2t.
template <typename DerivedX, typename DerivedY>
Vector grad_Rbar_t_x(const Eigen::MatrixBase<DerivedX>& x,
                     const Eigen::MatrixBase<DerivedY>& y,
                     const KernelParams& params,
                     const KernelProfile& profile)
{
    const double s = scaled_distance(x, y, params);
    return (-params.C_t * profile.R(s) / (2.0 * params.t)) * (x - y);
}

} // namespace pim
