#include "rfde/vector_field.hpp"

#include <cmath>
#include <stdexcept>

namespace rfde {

VectorField::VectorField(int input_dim, int out_rows, int out_cols, ValueFn f, DerivFn df, SmoothnessBounds bounds)
    : input_dim_(input_dim), out_rows_(out_rows), out_cols_(out_cols), f_(std::move(f)), df_(std::move(df)), bounds_(bounds) {
    if (input_dim_ <= 0 || out_rows_ <= 0 || out_cols_ <= 0)
        throw std::invalid_argument("vector field: bad dimensions");
}

Mat VectorField::operator()(const Vec& x) const {
    if (x.size() != input_dim_) throw std::invalid_argument("vector field: input dimension mismatch");
    Mat v = f_(x);
    if (v.rows() != out_rows_ || v.cols() != out_cols_)
        throw std::invalid_argument("vector field: value dimension mismatch");
    return v;
}

Vec VectorField::value_flat(const Vec& x) const {
    const Mat v = (*this)(x);
    return Eigen::Map<const Vec>(v.data(), v.size());
}

Mat VectorField::derivative(const Vec& x) const {
    if (x.size() != input_dim_) throw std::invalid_argument("vector field: input dimension mismatch");
    Mat d = df_(x);
    if (d.rows() != out_rows_ * out_cols_ || d.cols() != input_dim_)
        throw std::invalid_argument("vector field: derivative dimension mismatch");
    return d;
}

DerivativeCheckReport check_derivative(const VectorField& vf, std::span<const Vec> probes, double h) {
    DerivativeCheckReport rep;
    rep.tolerance = 100.0 * h * h + 1e-8;  // central differences: O(h^2) plus cancellation noise
    for (const Vec& x : probes) {
        const Mat df = vf.derivative(x);
        rep.max_value_norm = std::max(rep.max_value_norm, vf(x).norm());
        rep.max_derivative_norm = std::max(rep.max_derivative_norm, df.norm());
        for (int j = 0; j < vf.input_dim(); ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Vec fd = (vf.value_flat(xp) - vf.value_flat(xm)) / (2.0 * h);
            const double err = (fd - df.col(j)).norm() / (1.0 + df.col(j).norm());
            rep.max_relative_error = std::max(rep.max_relative_error, err);
        }
    }
    rep.passed = rep.max_relative_error <= rep.tolerance;
    rep.bounds_respected = rep.max_value_norm <= vf.bounds().c1 + 1e-12 &&
                           rep.max_derivative_norm <= vf.bounds().c2 + 1e-12;
    return rep;
}

VectorField extend_by_zero(VectorField vf, int block, int blocks) {
    if (block < 0 || block >= blocks) throw std::invalid_argument("extend_by_zero: bad block");
    const int k = vf.rows();
    const int e = vf.cols();
    const int d = e * blocks;
    const int m = vf.input_dim();
    auto base = std::make_shared<VectorField>(std::move(vf));
    auto f = [base, block, k, e, d](const Vec& x) {
        Mat out = Mat::Zero(k, d);
        out.block(0, block * e, k, e) = (*base)(x);
        return out;
    };
    auto df = [base, block, k, e, d, m](const Vec& x) {
        Mat out = Mat::Zero(k * d, m);
        const Mat inner = base->derivative(x);  // (k*e) x m
        for (int c = 0; c < e; ++c)
            out.middleRows((block * e + c) * k, k) = inner.middleRows(c * k, k);
        return out;
    };
    return VectorField(m, k, d, std::move(f), std::move(df), base->bounds());
}

namespace {
inline int wrap_index(int a, int c, int m) { return (a + c) % m; }
}  // namespace

VectorField make_constant_field(int m, int k, int d, double value) {
    SmoothnessBounds b;
    b.c1 = std::abs(value) * std::sqrt(double(k) * double(d));
    b.c2 = b.c1;
    b.c3 = b.c1;
    auto f = [k, d, value](const Vec&) { return Mat::Constant(k, d, value); };
    auto df = [k, d, m](const Vec&) { return Mat::Zero(k * d, m); };
    return VectorField(m, k, d, std::move(f), std::move(df), b);
}

VectorField make_linear_field(int m, int k, int d, const Mat& coefficients) {
    if (coefficients.rows() != k * d || coefficients.cols() != m)
        throw std::invalid_argument("linear field: coefficient shape must be (k*d) x m");
    SmoothnessBounds b;
    // unbounded; declared bounds describe the coefficient operator only
    b.c1 = coefficients.norm();
    b.c2 = b.c1;
    b.c3 = b.c1;
    Mat coeff = coefficients;
    auto f = [coeff, k, d](const Vec& x) {
        const Vec flat = coeff * x;
        return Mat(Eigen::Map<const Mat>(flat.data(), k, d));
    };
    auto df = [coeff](const Vec&) { return coeff; };
    return VectorField(m, k, d, std::move(f), std::move(df), b);
}

VectorField make_linear_field(int m, int k, int d, double scale) {
    Mat coeff = Mat::Zero(k * d, m);
    for (int a = 0; a < k; ++a)
        for (int c = 0; c < d; ++c) coeff(c * k + a, wrap_index(a, c, m)) = scale;
    return make_linear_field(m, k, d, coeff);
}

namespace {

VectorField make_pointwise_field(int m, int k, int d, double amp, double rate,
                                 double (*g)(double), double (*dg)(double), SmoothnessBounds b) {
    auto f = [m, k, d, amp, rate, g](const Vec& x) {
        Mat out(k, d);
        for (int a = 0; a < k; ++a)
            for (int c = 0; c < d; ++c) out(a, c) = amp * g(rate * x[wrap_index(a, c, m)]);
        return out;
    };
    auto df = [m, k, d, amp, rate, dg](const Vec& x) {
        Mat out = Mat::Zero(k * d, m);
        for (int a = 0; a < k; ++a)
            for (int c = 0; c < d; ++c)
                out(c * k + a, wrap_index(a, c, m)) = amp * rate * dg(rate * x[wrap_index(a, c, m)]);
        return out;
    };
    return VectorField(m, k, d, std::move(f), std::move(df), b);
}

double sin_fn(double x) { return std::sin(x); }
double cos_fn(double x) { return std::cos(x); }
double tanh_fn(double x) { return std::tanh(x); }
double dtanh_fn(double x) {
    const double t = std::tanh(x);
    return 1.0 - t * t;
}

}  // namespace

VectorField make_sin_field(int m, int k, int d, double amp, double freq) {
    const double entry = std::abs(amp) * std::sqrt(double(k) * double(d));
    const double r = std::abs(freq);
    SmoothnessBounds b;
    b.c1 = entry * (1.0 + r);
    b.c2 = entry * (1.0 + r + r * r);
    b.c3 = entry * (1.0 + r + r * r + r * r * r);
    return make_pointwise_field(m, k, d, amp, freq, sin_fn, cos_fn, b);
}

VectorField make_tanh_field(int m, int k, int d, double amp, double scale) {
    const double entry = std::abs(amp) * std::sqrt(double(k) * double(d));
    const double r = std::abs(scale);
    SmoothnessBounds b;
    b.c1 = entry * (1.0 + r);
    b.c2 = entry * (1.0 + r + r * r);
    b.c3 = entry * (1.0 + r + r * r + 2.0 * r * r * r);
    return make_pointwise_field(m, k, d, amp, scale, tanh_fn, dtanh_fn, b);
}

VectorField make_field(const std::string& name, int m, int k, int d, double amp, double scale) {
    if (name == "constant") return make_constant_field(m, k, d, amp);
    if (name == "linear") return make_linear_field(m, k, d, amp);
    if (name == "sin") return make_sin_field(m, k, d, amp, scale);
    if (name == "tanh-saturating") return make_tanh_field(m, k, d, amp, scale);
    throw std::invalid_argument("unknown vector field: " + name);
}

}  // namespace rfde
