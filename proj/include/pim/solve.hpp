#pragma once

#include "pim/assembly.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pim {

enum class SolveMethod { automatic, dense_lu, iterative };

std::string_view to_string(SolveMethod method);
/// Accepts `auto`, `dense-lu` and `iterative`.
SolveMethod parse_solve_method(std::string_view name);

struct SolveOptions
{
    SolveMethod method = SolveMethod::automatic;
    /// Relative residual target ||Ax - b|| / ||b||.
    double tol = 1e-10;
    /// Iteration cap is max_iter_factor * n.
    double max_iter_factor = 10.0;
    /// GMRES restart length.
    int restart = 60;
    /// Automatic method uses dense LU up to this many unknowns.
    Index dense_threshold = 512;
};

struct SolveReport
{
    DiscreteField solution;
    SolveMethod method = SolveMethod::dense_lu;
    Index iterations = 0;
    /// Recomputed after the solve from the returned solution.
    double residual_norm = 0.0;
    /// The residual the solver itself believed it reached.
    double estimated_residual = 0.0;
};

/// ||A x - b||_2 / max(||b||_2, tiny).
double relative_residual(const LinearSystem& system, const Vector& x);

/// Dense LU with partial pivoting for small systems, otherwise restarted
/// GMRES with Jacobi (diagonal) right preconditioning.
///
/// Throws SingularMatrix when an LU pivot drops below 1e-14 times the matrix
/// scale and NoConvergence when the iteration cap is reached or the final
/// residual misses the tolerance.
SolveReport solve(const LinearSystem& system, const SolveOptions& options = {});

/// Thresholds for the regime in which the method is known to be stable. The
/// true constants are not computable, so these defaults are empirical.
struct GuardrailThresholds
{
    double sqrt_t_over_beta = 1.0;
    double h_over_t_three_halves = 1000.0;
};

struct GuardrailFlags
{
    double sqrt_t_over_beta = 0.0;
    double h_over_t_three_halves = 0.0;
    bool beta_violated = false;
    bool h_violated = false;

    bool any() const { return beta_violated || h_violated; }
    /// Human-readable warning per violated guardrail.
    std::vector<std::string> messages() const;
};

GuardrailFlags check_guardrails(double h, double t, double beta, const GuardrailThresholds& thresholds = {});

} // namespace pim
