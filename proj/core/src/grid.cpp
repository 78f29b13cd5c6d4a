#include "coag/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coag {

std::shared_ptr<const Grid> Grid::geometric(double min_volume, double max_volume,
                                            std::size_t cells) {
    if (!(min_volume > 0.0)) throw std::invalid_argument("grid min volume must be positive");
    if (!(max_volume > min_volume)) throw std::invalid_argument("grid max must exceed min");
    if (cells < 1) throw std::invalid_argument("grid needs at least one cell");

    auto g = std::shared_ptr<Grid>(new Grid());
    g->edges_.resize(cells + 1);
    double step = std::log(max_volume / min_volume) / static_cast<double>(cells);
    for (std::size_t i = 0; i <= cells; ++i)
        g->edges_[i] = min_volume * std::exp(static_cast<double>(i) * step);
    g->edges_.back() = max_volume;  // pin against accumulated rounding

    g->pivots_.resize(cells);
    g->widths_.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        g->pivots_[i] = 0.5 * (g->edges_[i] + g->edges_[i + 1]);
        g->widths_[i] = g->edges_[i + 1] - g->edges_[i];
    }
    g->ratio_ = std::exp(step);
    return g;
}

std::size_t Grid::pivot_below(double v) const {
    auto it = std::upper_bound(pivots_.begin(), pivots_.end(), v);
    if (it == pivots_.begin()) return npos;
    return static_cast<std::size_t>(it - pivots_.begin()) - 1;
}

double weighted_norm(const DistributionState& s, double p) {
    if (!s.grid || s.values.size() != s.grid->cells())
        throw std::invalid_argument("state does not match its grid");
    const auto& x = s.grid->pivots();
    const auto& w = s.grid->widths();
    double acc = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        acc += std::pow(x[i], p) * s.values[i] * w[i];
    return acc;
}

double l1_distance(const DistributionState& a, const DistributionState& b) {
    if (!a.grid || !b.grid) throw std::invalid_argument("state without grid");
    if (a.grid == b.grid || (a.grid->edges() == b.grid->edges())) {
        const auto& w = a.grid->widths();
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            acc += std::abs(a.values[i] - b.values[i]) * w[i];
        return acc;
    }
    // sweep the merged edge partition; each state is piecewise constant
    const auto& ea = a.grid->edges();
    const auto& eb = b.grid->edges();
    std::size_t ia = 0, ib = 0;
    double lo = std::min(ea.front(), eb.front());
    double acc = 0.0;
    auto value_in = [](const DistributionState& s, const std::vector<double>& e, std::size_t i,
                       double point) {
        return (i < s.values.size() && point >= e[i] && point < e[i + 1]) ? s.values[i] : 0.0;
    };
    while (lo < std::max(ea.back(), eb.back())) {
        while (ia < ea.size() - 1 && ea[ia + 1] <= lo) ++ia;
        while (ib < eb.size() - 1 && eb[ib + 1] <= lo) ++ib;
        double hi = std::max(ea.back(), eb.back());
        if (ia < ea.size() - 1 && ea[ia + 1] > lo) hi = std::min(hi, ea[ia + 1]);
        if (ib < eb.size() - 1 && eb[ib + 1] > lo) hi = std::min(hi, eb[ib + 1]);
        // the later-starting support opens mid-cell of the other grid
        if (ea.front() > lo) hi = std::min(hi, ea.front());
        if (eb.front() > lo) hi = std::min(hi, eb.front());
        if (!(hi > lo)) break;
        double mid = 0.5 * (lo + hi);
        double va = value_in(a, ea, ia, mid);
        double vb = value_in(b, eb, ib, mid);
        acc += std::abs(va - vb) * (hi - lo);
        lo = hi;
    }
    return acc;
}

}  // namespace coag
