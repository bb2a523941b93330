#include "pim/kernel.hpp"

#include <string>

namespace pim {

KernelProfile KernelProfile::from_name(std::string_view name)
{
    if (name == "cubic") return cubic();
    if (name == "truncated_gaussian") return truncated_gaussian();
    throw InvalidArgument("unknown kernel profile '" + std::string(name) +
                          "' (expected cubic or truncated_gaussian)");
}

std::string_view KernelProfile::name() const
{
    return m_kind == ProfileKind::cubic ? "cubic" : "truncated_gaussian";
}

double KernelProfile::gaussian_tail(double q) const
{
    // exp(-alpha) * sum_m alpha^m q^(m+4) / (m! (m+4)); every term is positive,
    // so small q loses no precision.
    const double x = m_alpha * q;
    double power = q * q * q * q; // alpha^m q^(m+4) / m!
    double sum = 0.0;
    for (int m = 0; m < 60; ++m) {
        const double term = power / (m + 4);
        sum += term;
        if (term < 1e-18 * sum) break;
        power *= x / (m + 1);
    }
    return std::exp(-m_alpha) * sum;
}

KernelParams make_kernel_params(double t, int k)
{
    if (!(t > 0.0)) throw InvalidArgument("kernel bandwidth t must be positive");
    if (k < 1) throw InvalidArgument("intrinsic dimension must be at least 1");
    return KernelParams{t, k, normalizer(t, k)};
}

Kernel make_kernel(const KernelProfile& profile, double t, int k)
{
    return Kernel{profile, make_kernel_params(t, k)};
}

} // namespace pim
