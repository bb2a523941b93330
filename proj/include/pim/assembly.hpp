#pragma once

#include "pim/kernel.hpp"
#include "pim/pointcloud.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <variant>

namespace pim {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Storage { automatic, dense, sparse };

struct AssemblyOptions
{
    Storage storage = Storage::automatic;
    /// Automatic storage is dense up to this many points.
    Index dense_threshold = 512;
    /// Brute-force O(n^2) pair scan when false; the result is identical.
    bool use_neighbor_index = true;
};

struct SystemMetadata
{
    double t = 0.0;
    double beta = 0.0;
    double h = 0.0;
    /// Stored nonzeros over n^2.
    double fill_ratio = 0.0;
    Index nonzeros = 0;
};

///
/// Discrete Robin-penalized Poisson system in positive (K_{t,h}) form.
///
/// Row i reads
///   L_{t,h}u(p_i) + (2/beta) sum_l Rbar_t(p_i, s_l) u(s_l) A_l
///     = (2/beta) sum_l Rbar_t(p_i, s_l) b_l A_l + sum_j Rbar_t(p_i, p_j) f_j V_j.
///
struct LinearSystem
{
    std::variant<Matrix, SparseMatrix> matrix;
    Vector rhs;
    SystemMetadata metadata;

    Index size() const { return rhs.size(); }
    bool is_dense() const { return std::holds_alternative<Matrix>(matrix); }

    Vector multiply(const Vector& x) const;
    Matrix to_dense() const;
    SparseMatrix to_sparse() const;
    /// Matrix entry (i, j); zero outside the kernel support.
    double coeff(Index i, Index j) const;
};

/// Builds the system for source samples f (length n) and boundary data b
/// (length m, boundary order). Throws InvalidArgument for beta <= 0, t <= 0
/// or mismatched lengths.
LinearSystem assemble(const PointCloud& cloud,
                      const Kernel& kernel,
                      double beta,
                      const DiscreteField& f,
                      const Vector& b,
                      const AssemblyOptions& options = {});

/// (2/beta) sum_l Rbar_t(p_i, s_l) A_l for every i: the matrix row sums.
Vector boundary_row_sums(const PointCloud& cloud, const Kernel& kernel, double beta);

/// MatrixMarket `coordinate real general` dump of the matrix.
void write_matrix_market(const LinearSystem& system, const std::filesystem::path& path);

} // namespace pim
