#include "pim/solve.hpp"

#include "pim/csv.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <string>

namespace pim {

std::string_view to_string(SolveMethod method)
{
    switch (method) {
    case SolveMethod::automatic: return "auto";
    case SolveMethod::dense_lu: return "dense-lu";
    case SolveMethod::iterative: return "iterative";
    }
    return "unknown";
}

SolveMethod parse_solve_method(std::string_view name)
{
    if (name == "auto" || name == "automatic") return SolveMethod::automatic;
    if (name == "dense-lu" || name == "dense_lu" || name == "lu") return SolveMethod::dense_lu;
    if (name == "iterative" || name == "gmres") return SolveMethod::iterative;
    throw InvalidArgument("unknown solver method '" + std::string(name) +
                          "' (expected auto, dense-lu or iterative)");
}

namespace {

constexpr double tiny = std::numeric_limits<double>::min();

double rhs_scale(const Vector& rhs)
{
    return std::max(rhs.norm(), tiny);
}

SolveReport solve_dense(const LinearSystem& system, const SolveOptions& options)
{
    const Matrix matrix = system.to_dense();
    const Index n = matrix.rows();
    SolveReport report;
    report.method = SolveMethod::dense_lu;
    if (n == 0) {
        report.solution = Vector(0);
        return report;
    }

    const Eigen::PartialPivLU<Matrix> lu(matrix);
    const double scale = matrix.cwiseAbs().maxCoeff();
    const double smallest_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(smallest_pivot > 1e-14 * scale)) {
        throw SingularMatrix("dense LU pivot " + csv::format_real(smallest_pivot) +
                             " is below 1e-14 x matrix scale " + csv::format_real(scale));
    }

    Vector x = lu.solve(system.rhs);
    double residual = relative_residual(system, x);
    // Up to two steps of iterative refinement on ill-conditioned systems.
    for (int step = 0; step < 2 && residual > options.tol; ++step) {
        x += lu.solve(system.rhs - system.multiply(x));
        residual = relative_residual(system, x);
        ++report.iterations;
    }
    report.solution = std::move(x);
    report.residual_norm = residual;
    report.estimated_residual = residual;
    if (!(residual <= options.tol)) {
        throw NoConvergence("dense LU residual " + csv::format_real(residual) + " exceeds tolerance " +
                            csv::format_real(options.tol));
    }
    return report;
}

Vector diagonal_of(const LinearSystem& system)
{
    if (const auto* dense = std::get_if<Matrix>(&system.matrix)) return dense->diagonal();
    return std::get<SparseMatrix>(system.matrix).diagonal();
}

// Restarted GMRES with right Jacobi preconditioning, modified Gram-Schmidt and
// Givens rotations. Converged restarts are confirmed against the true residual.
SolveReport solve_gmres(const LinearSystem& system, const SolveOptions& options)
{
    const Index n = system.size();
    SolveReport report;
    report.method = SolveMethod::iterative;
    report.solution = Vector::Zero(n);
    if (n == 0) return report;

    Vector inverse_diagonal = diagonal_of(system);
    for (Index i = 0; i < n; ++i) {
        const double d = inverse_diagonal[i];
        if (d == 0.0) throw SingularMatrix("zero diagonal entry in row " + std::to_string(i));
        inverse_diagonal[i] = 1.0 / d;
    }

    const double b_norm = rhs_scale(system.rhs);
    const Index max_iterations = std::max<Index>(1, static_cast<Index>(std::ceil(options.max_iter_factor * n)));
    const int restart = static_cast<int>(std::min<Index>(std::max(options.restart, 1), n));

    Vector& x = report.solution;
    Matrix basis(n, restart + 1);
    Matrix hessenberg = Matrix::Zero(restart + 1, restart);
    Vector cs(restart), sn(restart), g(restart + 1);

    Vector r = system.rhs - system.multiply(x);
    double residual = r.norm() / b_norm;
    Index iterations = 0;
    while (residual > options.tol && iterations < max_iterations) {
        const double beta = r.norm();
        basis.col(0) = r / beta;
        g.setZero();
        g[0] = beta;
        hessenberg.setZero();
        int k = 0;
        double estimate = residual;
        for (; k < restart && iterations < max_iterations; ++k) {
            ++iterations;
            Vector w = system.multiply(inverse_diagonal.cwiseProduct(basis.col(k)));
            for (int i = 0; i <= k; ++i) {
                hessenberg(i, k) = w.dot(basis.col(i));
                w -= hessenberg(i, k) * basis.col(i);
            }
            hessenberg(k + 1, k) = w.norm();
            const bool breakdown = !(hessenberg(k + 1, k) > 0.0);
            if (!breakdown) basis.col(k + 1) = w / hessenberg(k + 1, k);

            for (int i = 0; i < k; ++i) {
                const double temp = cs[i] * hessenberg(i, k) + sn[i] * hessenberg(i + 1, k);
                hessenberg(i + 1, k) = -sn[i] * hessenberg(i, k) + cs[i] * hessenberg(i + 1, k);
                hessenberg(i, k) = temp;
            }
            const double denom = std::hypot(hessenberg(k, k), hessenberg(k + 1, k));
            cs[k] = hessenberg(k, k) / denom;
            sn[k] = hessenberg(k + 1, k) / denom;
            hessenberg(k, k) = denom;
            hessenberg(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            estimate = std::abs(g[k + 1]) / b_norm;
            if (estimate <= 0.5 * options.tol || breakdown) {
                ++k;
                break;
            }
        }
        // Back substitution on the k x k upper triangle.
        Vector y = g.head(k);
        for (int i = k - 1; i >= 0; --i) {
            for (int j = i + 1; j < k; ++j) y[i] -= hessenberg(i, j) * y[j];
            y[i] /= hessenberg(i, i);
        }
        x += inverse_diagonal.cwiseProduct(basis.leftCols(k) * y);
        r = system.rhs - system.multiply(x);
        residual = r.norm() / b_norm;
        report.estimated_residual = estimate;
    }

    report.iterations = iterations;
    report.residual_norm = relative_residual(system, x);
    if (!(report.residual_norm <= options.tol)) {
        throw NoConvergence("GMRES stopped after " + std::to_string(iterations) + " iterations (cap " +
                            std::to_string(max_iterations) + ") with relative residual " +
                            csv::format_real(report.residual_norm) + " > " + csv::format_real(options.tol));
    }
    return report;
}

} // namespace

double relative_residual(const LinearSystem& system, const Vector& x)
{
    return (system.multiply(x) - system.rhs).norm() / rhs_scale(system.rhs);
}

SolveReport solve(const LinearSystem& system, const SolveOptions& options)
{
    const bool square = std::visit(
        [&](const auto& m) { return m.rows() == system.rhs.size() && m.cols() == system.rhs.size(); },
        system.matrix);
    if (!square) throw InvalidArgument("matrix and right-hand side sizes differ");
    SolveMethod method = options.method;
    if (method == SolveMethod::automatic) {
        method = system.size() <= options.dense_threshold ? SolveMethod::dense_lu : SolveMethod::iterative;
    }
    return method == SolveMethod::dense_lu ? solve_dense(system, options) : solve_gmres(system, options);
}

std::vector<std::string> GuardrailFlags::messages() const
{
    std::vector<std::string> out;
    if (beta_violated) {
        out.push_back("sqrt(t)/beta = " + csv::format_real(sqrt_t_over_beta) + " exceeds the guardrail");
    }
    if (h_violated) {
        out.push_back("h/t^(3/2) = " + csv::format_real(h_over_t_three_halves) + " exceeds the guardrail");
    }
    return out;
}

GuardrailFlags check_guardrails(double h, double t, double beta, const GuardrailThresholds& thresholds)
{
    GuardrailFlags flags;
    flags.sqrt_t_over_beta = std::sqrt(t) / beta;
    flags.h_over_t_three_halves = h / std::pow(t, 1.5);
    flags.beta_violated = flags.sqrt_t_over_beta > thresholds.sqrt_t_over_beta;
    flags.h_violated = flags.h_over_t_three_halves > thresholds.h_over_t_three_halves;
    return flags;
}

} // namespace pim
