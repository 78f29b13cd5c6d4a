#ifndef COAG_GRID_HPP
#define COAG_GRID_HPP

#include <cstddef>
#include <memory>
#include <vector>

namespace coag {

// Geometric volume grid. Edges e_i = min * r^i with constant ratio r, pivots
// are arithmetic midpoints of the cells. The last edge is pinned to max
// exactly so grid support tests are reliable.
class Grid {
public:
    static std::shared_ptr<const Grid> geometric(double min_volume, double max_volume,
                                                 std::size_t cells);

    std::size_t cells() const { return widths_.size(); }
    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& pivots() const { return pivots_; }
    const std::vector<double>& widths() const { return widths_; }
    double ratio() const { return ratio_; }
    double min_volume() const { return edges_.front(); }
    double max_volume() const { return edges_.back(); }

    // index of the last pivot <= v; v below the first pivot returns npos
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t pivot_below(double v) const;

private:
    Grid() = default;
    std::vector<double> edges_, pivots_, widths_;
    double ratio_ = 0.0;
};

// Cell averages of a number density on a shared grid.
struct DistributionState {
    std::shared_ptr<const Grid> grid;
    double time = 0.0;
    std::vector<double> values;
};

// sum_i pivot_i^p * g_i * w_i  (midpoint quadrature of the p-th moment)
double weighted_norm(const DistributionState& s, double p);

// Exact L1 distance between the piecewise-constant densities the two states
// represent, integrated over the merged edge partition of the union of both
// supports. Works across unrelated grids; no interpolation involved.
double l1_distance(const DistributionState& a, const DistributionState& b);

}  // namespace coag

#endif
