#include "rfde/sampled_path.hpp"

namespace rfde {

SampledPath::SampledPath(Grid grid, std::vector<Vec> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw std::invalid_argument("path: one value per grid point required");
    dim_ = static_cast<int>(values_.front().size());
    for (const auto& v : values_)
        if (v.size() != dim_) throw std::invalid_argument("path: inconsistent value dimension");
}

SampledPath SampledPath::constant(Grid grid, Vec value) {
    std::vector<Vec> vals(grid.size(), value);
    return SampledPath(std::move(grid), std::move(vals));
}

SampledPath SampledPath::scalar(Grid grid, std::vector<double> values) {
    std::vector<Vec> vals;
    vals.reserve(values.size());
    for (double v : values) vals.push_back(Vec::Constant(1, v));
    return SampledPath(std::move(grid), std::move(vals));
}

SampledPath SampledPath::sample(Grid grid, int dim, const std::function<Vec(double)>& f) {
    std::vector<Vec> vals;
    vals.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Vec v = f(grid.time(i));
        if (v.size() != dim) throw std::invalid_argument("path: sampler dimension mismatch");
        vals.push_back(std::move(v));
    }
    return SampledPath(std::move(grid), std::move(vals));
}

Vec SampledPath::increment(std::size_t s, std::size_t t) const {
    grid_.check_range(s, t);
    return values_[t] - values_[s];
}

SampledPath SampledPath::restricted(std::size_t s, std::size_t t) const {
    grid_.check_range(s, t);
    std::vector<Vec> sub(values_.begin() + static_cast<std::ptrdiff_t>(s),
                         values_.begin() + static_cast<std::ptrdiff_t>(t) + 1);
    return SampledPath(grid_.restricted(s, t), std::move(sub));
}

SampledPath SampledPath::component(int c) const {
    if (c < 0 || c >= dim_) throw std::out_of_range("path: component out of range");
    std::vector<Vec> vals;
    vals.reserve(values_.size());
    for (const auto& v : values_) vals.push_back(Vec::Constant(1, v[c]));
    return SampledPath(grid_, std::move(vals));
}

}  // namespace rfde
