#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "rfde/sampled_path.hpp"

namespace rfde {

/// Declared C^k_b norms of a vector field. Boundedness is the caller's
/// contract; probe points only spot-check it.
struct SmoothnessBounds {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

/// A smooth map f from R^m into the k x d operators, with its derivative.
/// The derivative is handed over flattened: a (k*d) x m matrix whose entry
/// (flat(a,c), j) is the partial of f(x)(a,c) in state direction j, with
/// flat(a,c) = c*k + a (column-major, matching ControlledPath storage).
class VectorField {
public:
    using ValueFn = std::function<Mat(const Vec&)>;
    using DerivFn = std::function<Mat(const Vec&)>;
    using SecondDerivFn = std::function<Mat(const Vec&, const Vec&)>;  // directional: d/dh Df(x + h dir)

    VectorField(int input_dim, int out_rows, int out_cols, ValueFn f, DerivFn df, SmoothnessBounds bounds);

    int input_dim() const { return input_dim_; }
    int rows() const { return out_rows_; }
    int cols() const { return out_cols_; }
    const SmoothnessBounds& bounds() const { return bounds_; }

    Mat operator()(const Vec& x) const;
    Vec value_flat(const Vec& x) const;
    Mat derivative(const Vec& x) const;

    void set_second_derivative(SecondDerivFn d2f) { d2f_ = std::move(d2f); }
    const std::optional<SecondDerivFn>& second_derivative() const { return d2f_; }

private:
    int input_dim_, out_rows_, out_cols_;
    ValueFn f_;
    DerivFn df_;
    std::optional<SecondDerivFn> d2f_;
    SmoothnessBounds bounds_;
};

struct DerivativeCheckReport {
    double max_relative_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    double max_value_norm = 0.0;       ///< sup |f| over probes
    double max_derivative_norm = 0.0;  ///< sup |Df| over probes
    bool bounds_respected = false;     ///< declared bounds dominate the sampled norms
};

/// Central finite differences of f against the declared derivative on probe
/// points, plus a check that the declared bounds dominate sampled norms.
DerivativeCheckReport check_derivative(const VectorField& vf, std::span<const Vec> probes, double h);

/// Widen a field with operator values in L(R^e; R^k) to L(R^{blocks*e}; R^k)
/// by placing it at the given block and padding the rest with zeros.
VectorField extend_by_zero(VectorField vf, int block, int blocks);

// Built-in fields. Output entry (a, c) reads input component (a + c) mod m,
// which couples state and driver directions without complicating the
// derivative.
VectorField make_constant_field(int m, int k, int d, double value);
VectorField make_linear_field(int m, int k, int d, const Mat& coefficients);  // (k*d) x m
VectorField make_linear_field(int m, int k, int d, double scale);
VectorField make_sin_field(int m, int k, int d, double amp, double freq);
VectorField make_tanh_field(int m, int k, int d, double amp, double scale);

/// Registry lookup used by the CLI config: one of "constant", "linear",
/// "sin", "tanh-saturating".
VectorField make_field(const std::string& name, int m, int k, int d, double amp, double scale);

}  // namespace rfde
