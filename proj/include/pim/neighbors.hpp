#pragma once

#include "pim/common.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace pim {

///
/// Fixed-radius neighbor index on a uniform grid of cell size `radius`.
///
/// A query touches at most 3^d cells and reports exactly the points with
/// |p - x|^2 <= radius^2. Points are copied; the index is immutable and safe
/// for concurrent queries.
///
class NeighborIndex
{
public:
    NeighborIndex() = default;
    NeighborIndex(const PointMatrix& points, double radius);

    double radius() const { return m_radius; }
    Index size() const { return m_points.cols(); }
    const PointMatrix& points() const { return m_points; }

    /// Calls visit(j, squared_distance) for every point within the radius, in
    /// unspecified order.
    template <typename Visitor>
    void for_each_within(const ConstVectorRef& x, Visitor&& visit) const;

    /// Indices within the radius of x, ascending.
    std::vector<Index> query(const ConstVectorRef& x) const;

    /// Sorted neighbor lists of every indexed point (each list includes the point itself).
    std::vector<std::vector<Index>> all_neighbors() const;

private:
    using CellKey = std::int64_t;

    std::vector<std::int64_t> cell_coords(const ConstVectorRef& x) const;
    CellKey key_of(const std::vector<std::int64_t>& coords) const;

    PointMatrix m_points;
    double m_radius = 0.0;
    double m_cell = 1.0;
    Vector m_origin;
    std::vector<std::int64_t> m_counts;
    std::vector<Index> m_order;
    std::unordered_map<CellKey, std::pair<Index, Index>> m_cells;
};

template <typename Visitor>
void NeighborIndex::for_each_within(const ConstVectorRef& x, Visitor&& visit) const
{
    if (m_points.cols() == 0) return;
    const int d = static_cast<int>(m_points.rows());
    const std::vector<std::int64_t> center = cell_coords(x);
    const double r2 = m_radius * m_radius;

    std::vector<int> offset(static_cast<size_t>(d), -1);
    std::vector<std::int64_t> coords(static_cast<size_t>(d));
    while (true) {
        bool inside = true;
        for (int c = 0; c < d; ++c) {
            coords[c] = center[c] + offset[c];
            if (coords[c] < 0 || coords[c] >= m_counts[c]) {
                inside = false;
                break;
            }
        }
        if (inside) {
            if (auto it = m_cells.find(key_of(coords)); it != m_cells.end()) {
                for (Index slot = it->second.first; slot < it->second.second; ++slot) {
                    const Index j = m_order[static_cast<size_t>(slot)];
                    const double d2 = (m_points.col(j) - x).squaredNorm();
                    if (d2 <= r2) visit(j, d2);
                }
            }
        }
        int c = 0;
        while (c < d && offset[c] == 1) offset[c++] = -1;
        if (c == d) break;
        ++offset[c];
    }
}

} // namespace pim
