#include "pim/assembly.hpp"

#include "pim/csv.hpp"
#include "pim/neighbors.hpp"
#include "pim/parallel.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace pim {

Vector LinearSystem::multiply(const Vector& x) const
{
    return std::visit([&](const auto& m) -> Vector { return m * x; }, matrix);
}

Matrix LinearSystem::to_dense() const
{
    if (const auto* dense = std::get_if<Matrix>(&matrix)) return *dense;
    return Matrix(std::get<SparseMatrix>(matrix));
}

SparseMatrix LinearSystem::to_sparse() const
{
    if (const auto* sparse = std::get_if<SparseMatrix>(&matrix)) return *sparse;
    return std::get<Matrix>(matrix).sparseView(0.0, 0.0);
}

double LinearSystem::coeff(Index i, Index j) const
{
    if (const auto* dense = std::get_if<Matrix>(&matrix)) return (*dense)(i, j);
    return std::get<SparseMatrix>(matrix).coeff(i, j);
}

namespace {

struct RowEntries
{
    std::vector<Index> columns;
    std::vector<double> values;
    double rhs = 0.0;
};

// Row i from its ascending neighbor list. Every kernel value is computed by the
// same expression as a plain O(n^2) loop would use, so both paths agree bit for bit.
RowEntries build_row(const PointCloud& cloud,
                     const Kernel& kernel,
                     double beta,
                     const DiscreteField& f,
                     const Vector& b,
                     Index i,
                     const std::vector<Index>& neighbors)
{
    const double t = kernel.t();
    const Vector& V = cloud.volume_weights();
    const Vector& A = cloud.area_weights();
    const auto x = cloud.point(i);

    RowEntries row;
    row.columns.reserve(neighbors.size());
    row.values.reserve(neighbors.size());
    double diagonal = 0.0;
    double source = 0.0;
    double boundary_data = 0.0;
    Index diagonal_slot = -1;
    for (const Index j : neighbors) {
        const auto y = cloud.point(j);
        const double r = eval_Rt(x, y, kernel.params, kernel.profile);
        const double rbar = eval_Rbar_t(x, y, kernel.params, kernel.profile);
        source += rbar * f[j] * V[j];
        double value = 0.0;
        if (j != i) {
            diagonal += r * V[j];
            value = -r * V[j] / t;
        }
        if (const Index l = cloud.boundary_slot(j); l >= 0) {
            value += (2.0 / beta) * rbar * A[l];
            boundary_data += rbar * b[l] * A[l];
        }
        if (j == i) diagonal_slot = static_cast<Index>(row.columns.size());
        row.columns.push_back(j);
        row.values.push_back(value);
    }
    // The neighbor list always contains i itself.
    row.values[static_cast<size_t>(diagonal_slot)] += diagonal / t;
    row.rhs = (2.0 / beta) * boundary_data + source;
    return row;
}

} // namespace

LinearSystem assemble(const PointCloud& cloud,
                      const Kernel& kernel,
                      double beta,
                      const DiscreteField& f,
                      const Vector& b,
                      const AssemblyOptions& options)
{
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    if (!(kernel.t() > 0.0)) throw InvalidArgument("t must be positive");
    if (f.size() != cloud.size()) throw InvalidArgument("source length does not match cloud size");
    if (b.size() != cloud.boundary_size()) {
        throw InvalidArgument("boundary data has length " + std::to_string(b.size()) + ", expected " +
                              std::to_string(cloud.boundary_size()));
    }

    const Index n = cloud.size();
    const double radius = kernel.search_radius();
    std::vector<RowEntries> rows(static_cast<size_t>(n));
    if (options.use_neighbor_index) {
        const NeighborIndex index(cloud.points(), radius);
        parallel_for(n, [&](Index i) {
            rows[i] = build_row(cloud, kernel, beta, f, b, i, index.query(cloud.point(i)));
        });
    } else {
        std::vector<Index> everyone(static_cast<size_t>(n));
        std::iota(everyone.begin(), everyone.end(), Index{0});
        parallel_for(n, [&](Index i) { rows[i] = build_row(cloud, kernel, beta, f, b, i, everyone); });
    }

    LinearSystem system;
    system.rhs.resize(n);
    Index nonzeros = 0;
    for (Index i = 0; i < n; ++i) {
        system.rhs[i] = rows[i].rhs;
        for (const double value : rows[i].values) nonzeros += value != 0.0;
    }

    const bool dense = options.storage == Storage::dense ||
                       (options.storage == Storage::automatic && n <= options.dense_threshold);
    if (dense) {
        Matrix matrix = Matrix::Zero(n, n);
        for (Index i = 0; i < n; ++i) {
            const auto& row = rows[i];
            for (size_t e = 0; e < row.columns.size(); ++e) matrix(i, row.columns[e]) = row.values[e];
        }
        system.matrix = std::move(matrix);
    } else {
        SparseMatrix matrix(n, n);
        Eigen::VectorXi per_row(n);
        for (Index i = 0; i < n; ++i) per_row[i] = static_cast<int>(rows[i].columns.size());
        matrix.reserve(per_row);
        for (Index i = 0; i < n; ++i) {
            const auto& row = rows[i];
            for (size_t e = 0; e < row.columns.size(); ++e) {
                if (row.values[e] != 0.0) matrix.insert(i, row.columns[e]) = row.values[e];
            }
        }
        matrix.makeCompressed();
        system.matrix = std::move(matrix);
    }

    system.metadata.t = kernel.t();
    system.metadata.beta = beta;
    system.metadata.h = cloud.recorded_fill_distance().value_or(0.0);
    system.metadata.nonzeros = nonzeros;
    system.metadata.fill_ratio = static_cast<double>(nonzeros) / (static_cast<double>(n) * static_cast<double>(n));
    return system;
}

Vector boundary_row_sums(const PointCloud& cloud, const Kernel& kernel, double beta)
{
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    Vector sums(cloud.size());
    for (Index i = 0; i < cloud.size(); ++i) {
        double sum = 0.0;
        for (Index l = 0; l < cloud.boundary_size(); ++l) {
            sum += eval_Rbar_t(cloud.point(i), cloud.point(cloud.boundary_indices()[l]), kernel.params,
                               kernel.profile) *
                   cloud.area_weights()[l];
        }
        sums[i] = (2.0 / beta) * sum;
    }
    return sums;
}

void write_matrix_market(const LinearSystem& system, const std::filesystem::path& path)
{
    const SparseMatrix matrix = system.to_sparse();
    std::string out = "%%MatrixMarket matrix coordinate real general\n";
    out += std::to_string(matrix.rows()) + " " + std::to_string(matrix.cols()) + " " +
           std::to_string(matrix.nonZeros()) + "\n";
    for (Index i = 0; i < matrix.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(matrix, i); it; ++it) {
            out += std::to_string(it.row() + 1) + " " + std::to_string(it.col() + 1) + " " +
                   csv::format_real(it.value()) + "\n";
        }
    }
    csv::write_file(path, out);
}

} // namespace pim
