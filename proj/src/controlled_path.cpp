#include "rfde/controlled_path.hpp"

namespace rfde {

ControlledPath::ControlledPath(std::shared_ptr<const SampledPath> driver, int rows, int cols,
                               std::vector<Vec> values, std::vector<Mat> gubinelli)
    : driver_(std::move(driver)), rows_(rows), cols_(cols), values_(std::move(values)), gubinelli_(std::move(gubinelli)) {
    if (!driver_) throw std::invalid_argument("controlled path: missing driver");
    const std::size_t n = driver_->size();
    const int m = rows_ * cols_;
    const int d = driver_->dim();
    if (values_.size() != n || gubinelli_.size() != n)
        throw std::invalid_argument("controlled path: must share the driver grid");
    for (const auto& v : values_)
        if (v.size() != m) throw std::invalid_argument("controlled path: value dimension mismatch");
    for (const auto& g : gubinelli_)
        if (g.rows() != m || g.cols() != d) throw std::invalid_argument("controlled path: derivative dimension mismatch");
}

ControlledPath ControlledPath::constant(std::shared_ptr<const SampledPath> driver, const Vec& value) {
    const std::size_t n = driver->size();
    const int d = driver->dim();
    std::vector<Vec> vals(n, value);
    std::vector<Mat> gubs(n, Mat::Zero(value.size(), d));
    return ControlledPath(std::move(driver), static_cast<int>(value.size()), 1, std::move(vals), std::move(gubs));
}

ControlledPath ControlledPath::of_driver(std::shared_ptr<const SampledPath> driver) {
    const std::size_t n = driver->size();
    const int d = driver->dim();
    std::vector<Vec> vals;
    vals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) vals.push_back(driver->value(i));
    std::vector<Mat> gubs(n, Mat::Identity(d, d));
    return ControlledPath(std::move(driver), d, 1, std::move(vals), std::move(gubs));
}

Mat ControlledPath::value_shaped(std::size_t i) const {
    return Eigen::Map<const Mat>(values_[i].data(), rows_, cols_);
}

Vec ControlledPath::remainder(std::size_t s, std::size_t t) const {
    grid().check_range(s, t);
    return values_[t] - values_[s] - gubinelli_[s] * driver_->increment(s, t);
}

ControlledPath ControlledPath::restricted(std::size_t s, std::size_t t) const {
    grid().check_range(s, t);
    auto sub_driver = std::make_shared<const SampledPath>(driver_->restricted(s, t));
    std::vector<Vec> vals(values_.begin() + static_cast<std::ptrdiff_t>(s),
                          values_.begin() + static_cast<std::ptrdiff_t>(t) + 1);
    std::vector<Mat> gubs(gubinelli_.begin() + static_cast<std::ptrdiff_t>(s),
                          gubinelli_.begin() + static_cast<std::ptrdiff_t>(t) + 1);
    return ControlledPath(std::move(sub_driver), rows_, cols_, std::move(vals), std::move(gubs));
}

ControlledPath ControlledPath::truncated_after(std::size_t t) const {
    if (t >= size()) throw std::out_of_range("controlled path: truncation index");
    std::vector<Vec> vals = values_;
    std::vector<Mat> gubs = gubinelli_;
    for (std::size_t i = t + 1; i < vals.size(); ++i) {
        vals[i] = values_[t];
        gubs[i] = gubinelli_[t];
    }
    return ControlledPath(driver_, rows_, cols_, std::move(vals), std::move(gubs));
}

ControlledPath ControlledPath::with_driver(std::shared_ptr<const SampledPath> driver) const {
    return ControlledPath(std::move(driver), rows_, cols_, values_, gubinelli_);
}

Vec apply_operator(const Vec& flat_op, int rows, int cols, const Vec& x) {
    return Eigen::Map<const Mat>(flat_op.data(), rows, cols) * x;
}

Vec apply_second_order(const Mat& gub, int rows, int cols, const Mat& xx) {
    Vec out = Vec::Zero(rows);
    for (int c = 0; c < cols; ++c)
        for (int b = 0; b < static_cast<int>(xx.rows()); ++b) {
            const double w = xx(b, c);
            if (w == 0.0) continue;
            out += w * gub.col(b).segment(c * rows, rows);
        }
    return out;
}

}  // namespace rfde
