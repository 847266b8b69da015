#include "rfde/rough_path.hpp"

namespace rfde {

RoughPath::RoughPath(SampledPath path, std::vector<Mat> cells)
    : RoughPath(std::make_shared<const SampledPath>(std::move(path)), std::move(cells)) {}

RoughPath::RoughPath(std::shared_ptr<const SampledPath> path, std::vector<Mat> cells)
    : path_(std::move(path)), cells_(std::move(cells)) {
    const int d = path_->dim();
    if (cells_.size() + 1 != path_->size()) throw std::invalid_argument("rough path: one cell per grid interval");
    for (const auto& c : cells_)
        if (c.rows() != d || c.cols() != d) throw std::invalid_argument("rough path: cell dimension mismatch");
}

RoughPath RoughPath::zero_cells(SampledPath path) {
    const int d = path.dim();
    std::vector<Mat> cells(path.size() - 1, Mat::Zero(d, d));
    return RoughPath(std::move(path), std::move(cells));
}

RoughPath RoughPath::exact_linear(const Grid& grid, const Vec& slope) {
    SampledPath path = SampledPath::sample(grid, static_cast<int>(slope.size()),
                                           [&](double t) { return Vec(slope * t); });
    const Mat outer = slope * slope.transpose();
    std::vector<Mat> cells;
    cells.reserve(grid.size() - 1);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double dt = grid.time(k + 1) - grid.time(k);
        cells.push_back(outer * (dt * dt / 2.0));
    }
    return RoughPath(std::move(path), std::move(cells));
}

Mat RoughPath::chen(std::size_t s, std::size_t t) const {
    grid().check_range(s, t);
    const int d = dim();
    Mat acc = Mat::Zero(d, d);
    for (std::size_t k = s; k < t; ++k) {
        acc += cells_[k];
        if (k > s) acc.noalias() += path_->increment(s, k) * path_->increment(k, k + 1).transpose();
    }
    return acc;
}

std::vector<Mat> RoughPath::chen_row(std::size_t s, std::size_t t) const {
    grid().check_range(s, t);
    const int d = dim();
    std::vector<Mat> row;
    row.reserve(t - s + 1);
    row.push_back(Mat::Zero(d, d));
    for (std::size_t k = s; k < t; ++k) {
        Mat next = row.back() + cells_[k];
        if (k > s) next.noalias() += path_->increment(s, k) * path_->increment(k, k + 1).transpose();
        row.push_back(std::move(next));
    }
    return row;
}

RoughPath RoughPath::restricted(std::size_t s, std::size_t t) const {
    grid().check_range(s, t);
    std::vector<Mat> sub(cells_.begin() + static_cast<std::ptrdiff_t>(s),
                         cells_.begin() + static_cast<std::ptrdiff_t>(t));
    return RoughPath(path_->restricted(s, t), std::move(sub));
}

}  // namespace rfde
