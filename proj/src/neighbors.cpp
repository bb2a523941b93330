#include "pim/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pim {

namespace {

// Keeps the linearized cell key inside int64 for tiny radii.
constexpr double max_cells_per_axis = 1e6;

} // namespace

NeighborIndex::NeighborIndex(const PointMatrix& points, double radius)
    : m_points(points)
    , m_radius(radius)
{
    if (!(radius > 0.0)) throw InvalidArgument("neighbor radius must be positive");
    const Index d = points.rows();
    const Index n = points.cols();
    m_counts.assign(static_cast<size_t>(d), 1);
    m_origin = Vector::Zero(d);
    if (n == 0) return;

    m_origin = points.rowwise().minCoeff();
    const Vector extent = points.rowwise().maxCoeff() - m_origin;
    m_cell = std::max(radius, extent.maxCoeff() / max_cells_per_axis);
    for (Index c = 0; c < d; ++c) {
        m_counts[c] = static_cast<std::int64_t>(std::floor(extent[c] / m_cell)) + 1;
    }

    std::vector<CellKey> keys(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) keys[i] = key_of(cell_coords(points.col(i)));
    m_order.resize(static_cast<size_t>(n));
    std::iota(m_order.begin(), m_order.end(), Index{0});
    std::stable_sort(m_order.begin(), m_order.end(), [&](Index lhs, Index rhs) {
        return keys[lhs] < keys[rhs];
    });

    Index begin = 0;
    while (begin < n) {
        const CellKey key = keys[m_order[begin]];
        Index end = begin + 1;
        while (end < n && keys[m_order[end]] == key) ++end;
        m_cells.emplace(key, std::make_pair(begin, end));
        begin = end;
    }
}

std::vector<std::int64_t> NeighborIndex::cell_coords(const ConstVectorRef& x) const
{
    const Index d = m_points.rows();
    std::vector<std::int64_t> coords(static_cast<size_t>(d));
    for (Index c = 0; c < d; ++c) {
        const double raw = std::floor((x[c] - m_origin[c]) / m_cell);
        // Anything beyond one cell outside the box has no neighbors; clamping
        // to [-2, count + 1] keeps the stencil empty for it.
        const double clamped = std::clamp(raw, -2.0, static_cast<double>(m_counts[c] + 1));
        coords[c] = static_cast<std::int64_t>(clamped);
    }
    return coords;
}

NeighborIndex::CellKey NeighborIndex::key_of(const std::vector<std::int64_t>& coords) const
{
    CellKey key = 0;
    for (size_t c = coords.size(); c-- > 0;) key = key * m_counts[c] + coords[c];
    return key;
}

std::vector<Index> NeighborIndex::query(const ConstVectorRef& x) const
{
    std::vector<Index> result;
    for_each_within(x, [&](Index j, double) { result.push_back(j); });
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<std::vector<Index>> NeighborIndex::all_neighbors() const
{
    std::vector<std::vector<Index>> lists(static_cast<size_t>(m_points.cols()));
    for (Index i = 0; i < m_points.cols(); ++i) lists[i] = query(m_points.col(i));
    return lists;
}

} // namespace pim
