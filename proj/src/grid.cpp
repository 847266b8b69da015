#include "rfde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfde {

Grid::Grid(std::vector<double> times) {
    if (times.empty()) throw std::invalid_argument("grid: no time points");
    min_spacing_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        if (!(dt > 0.0)) throw std::invalid_argument("grid: times must be strictly increasing");
        min_spacing_ = std::min(min_spacing_, dt);
    }
    if (times.size() == 1) min_spacing_ = 1.0;
    times_ = std::make_shared<const std::vector<double>>(std::move(times));
}

Grid Grid::uniform(double t0, double t1, std::size_t cells) {
    if (cells == 0 || !(t1 > t0)) throw std::invalid_argument("grid: bad uniform spec");
    std::vector<double> ts(cells + 1);
    const double h = (t1 - t0) / static_cast<double>(cells);
    for (std::size_t i = 0; i <= cells; ++i) ts[i] = t0 + h * static_cast<double>(i);
    ts.back() = t1;
    return Grid(std::move(ts));
}

std::size_t Grid::index_of(double t) const {
    const std::size_t i = floor_index(t);
    if (std::abs(time(i) - t) > tolerance())
        throw std::invalid_argument("grid: time point not on the grid");
    return i;
}

std::size_t Grid::floor_index(double t) const {
    const auto& ts = *times_;
    if (t + tolerance() < ts.front()) throw std::out_of_range("grid: time below range");
    auto it = std::upper_bound(ts.begin(), ts.end(), t + tolerance());
    return static_cast<std::size_t>(it - ts.begin()) - 1;
}

std::optional<std::size_t> Grid::shift_index(std::size_t i, double delay) const {
    const double q = time(i) - delay;
    if (q + tolerance() < front()) return std::nullopt;
    const std::size_t j = floor_index(q);
    if (std::abs(time(j) - q) > tolerance())
        throw std::invalid_argument("grid: delay does not map grid points onto grid points");
    return j;
}

bool Grid::same(const Grid& other) const {
    if (times_ == other.times_) return true;
    if (size() != other.size()) return false;
    return *times_ == *other.times_;
}

Grid Grid::restricted(std::size_t s, std::size_t t) const {
    check_range(s, t);
    std::vector<double> sub(times_->begin() + static_cast<std::ptrdiff_t>(s),
                            times_->begin() + static_cast<std::ptrdiff_t>(t) + 1);
    return Grid(std::move(sub));
}

void Grid::check_range(std::size_t s, std::size_t t) const {
    if (s > t || t >= size()) throw std::out_of_range("grid: bad index range");
}

}  // namespace rfde
