#include "pim/interpolate.hpp"

#include "pim/csv.hpp"

#include <string>
#include <vector>

namespace pim {

Interpolant::Interpolant(PointCloud cloud, Kernel kernel, double beta, DiscreteField u, DiscreteField f, Vector b)
    : m_cloud(std::move(cloud))
    , m_kernel(std::move(kernel))
    , m_beta(beta)
    , m_u(std::move(u))
    , m_f(std::move(f))
    , m_b(std::move(b))
{
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    if (!(m_kernel.t() > 0.0)) throw InvalidArgument("t must be positive");
    const Index n = m_cloud.size();
    if (m_u.size() != n || m_f.size() != n) throw InvalidArgument("u and f must match the cloud size");
    if (m_b.size() != m_cloud.boundary_size()) throw InvalidArgument("b must match the boundary size");

    m_index = NeighborIndex(m_cloud.points(), m_kernel.search_radius());
    const double t = m_kernel.t();
    const Vector& V = m_cloud.volume_weights();
    m_value_weight = m_u.cwiseProduct(V);
    m_source_weight = t * m_f.cwiseProduct(V);
    m_boundary_weight = Vector::Zero(n);
    for (Index l = 0; l < m_cloud.boundary_size(); ++l) {
        const Index j = m_cloud.boundary_indices()[l];
        m_boundary_weight[j] = (2.0 * t / beta) * (m_u[j] - m_b[l]) * m_cloud.area_weights()[l];
    }
}

double Interpolant::weight(const ConstVectorRef& x) const
{
    double w = 0.0;
    const Vector& V = m_cloud.volume_weights();
    m_index.for_each_within(x, [&](Index j, double) {
        w += eval_Rt(x, m_cloud.point(j), m_kernel.params, m_kernel.profile) * V[j];
    });
    return w;
}

double Interpolant::eval(const ConstVectorRef& x) const
{
    const auto& params = m_kernel.params;
    const auto& profile = m_kernel.profile;
    const Vector& V = m_cloud.volume_weights();
    double numerator = 0.0;
    double w = 0.0;
    // Same arithmetic as eval_with_grad so both return identical values.
    m_index.for_each_within(x, [&](Index j, double d2) {
        const double s = d2 / (4.0 * params.t);
        const double R = profile.R(s);
        const double rbar_coeff = m_source_weight[j] - m_boundary_weight[j];
        numerator += params.C_t * (R * m_value_weight[j] + profile.Rbar(s) * rbar_coeff);
        w += params.C_t * R * V[j];
    });
    if (!(w > 0.0)) throw OutOfSupport("query point is outside the kernel support of every sample");
    return numerator / w;
}

std::pair<double, Vector> Interpolant::eval_with_grad(const ConstVectorRef& x) const
{
    const auto& params = m_kernel.params;
    const auto& profile = m_kernel.profile;
    const Vector& V = m_cloud.volume_weights();
    const double scale = params.C_t / (2.0 * params.t);
    double numerator = 0.0;
    double w = 0.0;
    Vector grad_numerator = Vector::Zero(x.size());
    Vector grad_w = Vector::Zero(x.size());
    // grad R_t = C_t R'(s) (x - y) / 2t and grad Rbar_t = -C_t R(s) (x - y) / 2t.
    m_index.for_each_within(x, [&](Index j, double d2) {
        const double s = d2 / (4.0 * params.t);
        const double R = profile.R(s);
        const double rbar_coeff = m_source_weight[j] - m_boundary_weight[j];
        numerator += params.C_t * (R * m_value_weight[j] + profile.Rbar(s) * rbar_coeff);
        w += params.C_t * R * V[j];
        const double Rprime = profile.Rprime(s);
        const auto offset = x - m_cloud.point(j);
        grad_numerator.noalias() += (scale * (Rprime * m_value_weight[j] - R * rbar_coeff)) * offset;
        grad_w.noalias() += (scale * Rprime * V[j]) * offset;
    });
    if (!(w > 0.0)) throw OutOfSupport("query point is outside the kernel support of every sample");
    const double value = numerator / w;
    Vector gradient = (grad_numerator - value * grad_w) / w;
    return {value, project_to_tangent(m_cloud, x, gradient)};
}

Vector Interpolant::grad(const ConstVectorRef& x) const
{
    return eval_with_grad(x).second;
}

Vector project_to_tangent(const PointCloud& cloud, const ConstVectorRef& x, const Vector& g)
{
    const auto& origin = cloud.origin();
    if (!origin || origin->shape != Shape::spherical_cap) return g;
    const Vector normal = x.normalized();
    return g - normal.dot(g) * normal;
}

PointMatrix read_query_points(const std::filesystem::path& path, int ambient_dim)
{
    const std::string text = csv::read_file(path);
    std::vector<double> coords;
    bool header_seen = false;
    Index line_number = 0;
    for (auto raw : csv::lines(text)) {
        ++line_number;
        const auto line = csv::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = csv::split(line);
        if (!header_seen) {
            header_seen = true;
            if (csv::trim(fields.front()) == "x1") continue;
        }
        if (static_cast<int>(fields.size()) != ambient_dim) {
            throw ParseError("query row at line " + std::to_string(line_number) + " needs " +
                             std::to_string(ambient_dim) + " coordinates");
        }
        for (const auto field : fields) coords.push_back(csv::parse_real(field, "query points"));
    }
    const Index count = static_cast<Index>(coords.size()) / ambient_dim;
    return Eigen::Map<const PointMatrix>(coords.data(), ambient_dim, count);
}

void write_evaluations(const Interpolant& interpolant, const PointMatrix& queries, const std::filesystem::path& path)
{
    const Index d = queries.rows();
    std::string out;
    for (Index c = 0; c < d; ++c) out += "x" + std::to_string(c + 1) + ",";
    out += "value";
    for (Index c = 0; c < d; ++c) out += ",g" + std::to_string(c + 1);
    out += "\n";
    for (Index q = 0; q < queries.cols(); ++q) {
        const auto [value, gradient] = interpolant.eval_with_grad(queries.col(q));
        for (Index c = 0; c < d; ++c) out += csv::format_real(queries(c, q)) + ",";
        out += csv::format_real(value);
        for (Index c = 0; c < d; ++c) out += "," + csv::format_real(gradient[c]);
        out += "\n";
    }
    csv::write_file(path, out);
}

} // namespace pim
