#pragma once

#include <memory>
#include <vector>

#include "rfde/sampled_path.hpp"

namespace rfde {

/// A path controlled by a driver X: values Y together with a Gubinelli
/// derivative Y', tied by Y_{s,t} = Y'_s X_{s,t} + R^Y_{s,t}.
///
/// Values may be vectors in R^k (shape k x 1) or operators in L(R^d; R^k)
/// (shape k x d). Either way they are stored flattened column-major as
/// m-vectors with m = rows * cols, and the Gubinelli derivative at each grid
/// point is an m x d matrix: entry (flat(a,c), b) is the sensitivity of value
/// component (a,c) to driver direction b. For operator values this realises
/// the identification of L(R^d; L(R^d; R^k)) with L(R^d (x) R^d; R^k).
class ControlledPath {
public:
    ControlledPath(std::shared_ptr<const SampledPath> driver, int rows, int cols,
                   std::vector<Vec> values, std::vector<Mat> gubinelli);

    /// Constant vector value, zero derivative.
    static ControlledPath constant(std::shared_ptr<const SampledPath> driver, const Vec& value);

    /// The driver itself: Y = X, Y' = identity.
    static ControlledPath of_driver(std::shared_ptr<const SampledPath> driver);

    const SampledPath& driver() const { return *driver_; }
    std::shared_ptr<const SampledPath> driver_ptr() const { return driver_; }
    const Grid& grid() const { return driver_->grid(); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int value_dim() const { return rows_ * cols_; }
    int driver_dim() const { return driver_->dim(); }
    std::size_t size() const { return values_.size(); }

    const Vec& value(std::size_t i) const { return values_[i]; }
    const std::vector<Vec>& values() const { return values_; }
    Mat value_shaped(std::size_t i) const;
    const Mat& gubinelli(std::size_t i) const { return gubinelli_[i]; }
    const std::vector<Mat>& gubinellis() const { return gubinelli_; }

    /// R^Y_{s,t} = Y_{s,t} - Y'_s X_{s,t}, flattened.
    Vec remainder(std::size_t s, std::size_t t) const;

    ControlledPath restricted(std::size_t s, std::size_t t) const;

    /// Values and derivative frozen at index t onwards (the stopped path
    /// used by non-anticipativity checks).
    ControlledPath truncated_after(std::size_t t) const;

    ControlledPath with_driver(std::shared_ptr<const SampledPath> driver) const;

private:
    std::shared_ptr<const SampledPath> driver_;
    int rows_ = 0, cols_ = 0;
    std::vector<Vec> values_;
    std::vector<Mat> gubinelli_;
};

/// Apply a flattened (rows x cols) operator to x in R^cols.
Vec apply_operator(const Vec& flat_op, int rows, int cols, const Vec& x);

/// Contract a Gubinelli derivative of an operator-valued path against a
/// level-2 matrix: result_a = sum_{b,c} gub(flat(a,c), b) * xx(b,c).
Vec apply_second_order(const Mat& gub, int rows, int cols, const Mat& xx);

}  // namespace rfde
