#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "rfde/grid.hpp"

namespace rfde {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A cadlag path observed on a grid. Between grid points the path is read as
/// piecewise constant, so the left limit at t_k is the value at t_{k-1} and
/// all jumps sit on grid points.
class SampledPath {
public:
    SampledPath(Grid grid, std::vector<Vec> values);

    static SampledPath constant(Grid grid, Vec value);
    static SampledPath scalar(Grid grid, std::vector<double> values);
    static SampledPath sample(Grid grid, int dim, const std::function<Vec(double)>& f);

    const Grid& grid() const { return grid_; }
    int dim() const { return dim_; }
    std::size_t size() const { return values_.size(); }

    const Vec& value(std::size_t i) const { return values_[i]; }
    const std::vector<Vec>& values() const { return values_; }

    /// X_t - X_s for grid indices s <= t.
    Vec increment(std::size_t s, std::size_t t) const;

    /// Left limit at index i (value at i-1; at i == 0 the value itself).
    const Vec& left_limit(std::size_t i) const { return values_[i == 0 ? 0 : i - 1]; }

    SampledPath restricted(std::size_t s, std::size_t t) const;
    SampledPath component(int c) const;

private:
    Grid grid_;
    std::vector<Vec> values_;
    int dim_ = 0;
};

}  // namespace rfde
