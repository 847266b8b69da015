#include "rfde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfde/variation.hpp"

namespace rfde {

namespace {

// Declared growth constants carry a fixed headroom factor over ||f||_{C^2}:
// the lift estimates hold with C_F = ||f||_{C^2} only up to a multiplicative
// constant depending on p, and the declared value must dominate what
// validate_assumptions observes.
constexpr double kGrowthHeadroom = 8.0;

void require_vector_input(const ControlledPath& y) {
    if (y.cols() != 1) throw std::invalid_argument("coefficient: input must be vector-valued");
}

/// Shared skeleton for all lifts: per grid point, assemble the stacked state
/// x in R^m and its stacked derivative G in R^{m x d}, then compose
///   value = f(x),  derivative = Df(x) G.
class StackedLift : public CoefficientFunctional {
public:
    StackedLift(VectorField vf, double growth_factor, double lipschitz_factor) : vf_(std::move(vf)) {
        growth_ = kGrowthHeadroom * growth_factor * vf_.bounds().c2;
        lipschitz_scale_ = lipschitz_factor * vf_.bounds().c3;
    }

    ControlledPath evaluate(const ControlledPath& y) const final {
        require_vector_input(y);
        if (vf_.cols() != y.driver_dim())
            throw std::invalid_argument("coefficient: field operator width must match the driver");
        const auto stack = make_stacker(y);
        const std::size_t n = y.size();
        const int m = vf_.input_dim();
        const int d = y.driver_dim();
        std::vector<Vec> values;
        std::vector<Mat> gubs;
        values.reserve(n);
        gubs.reserve(n);
        Vec x(m);
        Mat g(m, d);
        for (std::size_t i = 0; i < n; ++i) {
            g.setZero();
            stack(i, x, g);
            values.push_back(vf_.value_flat(x));
            gubs.push_back(vf_.derivative(x) * g);
        }
        return ControlledPath(y.driver_ptr(), vf_.rows(), vf_.cols(), std::move(values), std::move(gubs));
    }

protected:
    using Stacker = std::function<void(std::size_t, Vec&, Mat&)>;

    /// Validate the input and build a per-evaluation closure filling (x, g)
    /// at each grid index; g arrives zeroed.
    virtual Stacker make_stacker(const ControlledPath& y) const = 0;

    VectorField vf_;
};

class VectorFieldLift final : public StackedLift {
public:
    explicit VectorFieldLift(VectorField vf) : StackedLift(std::move(vf), 1.0, 1.0) {}

private:
    Stacker make_stacker(const ControlledPath& y) const override {
        if (y.rows() != vf_.input_dim()) throw std::invalid_argument("coefficient: state dimension mismatch");
        return [&y](std::size_t i, Vec& x, Mat& g) {
            x = y.value(i);
            g = y.gubinelli(i);
        };
    }
};

class ControlledLift final : public StackedLift {
public:
    ControlledLift(VectorField vf, ControlledPath alpha)
        : StackedLift(std::move(vf), 1.0, 1.0), alpha_(std::move(alpha)) {
        require_vector_input(alpha_);
        const double anorm = 1.0 + controlled_norm(alpha_, 2.5);
        growth_ *= anorm * anorm;
        lipschitz_scale_ *= anorm;
    }

private:
    Stacker make_stacker(const ControlledPath& y) const override {
        if (!alpha_.grid().same(y.grid())) throw std::invalid_argument("controlled lift: grids differ");
        if (alpha_.driver_dim() != y.driver_dim()) throw std::invalid_argument("controlled lift: driver mismatch");
        if (vf_.input_dim() != alpha_.rows() + y.rows())
            throw std::invalid_argument("controlled lift: field input must take (alpha, y)");
        const int e = alpha_.rows();
        const int k = y.rows();
        return [this, &y, e, k](std::size_t i, Vec& x, Mat& g) {
            x.head(e) = alpha_.value(i);
            x.tail(k) = y.value(i);
            g.topRows(e) = alpha_.gubinelli(i);
            g.bottomRows(k) = y.gubinelli(i);
        };
    }

    ControlledPath alpha_;
};

class DiscreteTimeLift final : public StackedLift {
public:
    DiscreteTimeLift(VectorField vf, std::vector<double> stop_times)
        : StackedLift(std::move(vf), double(stop_times.size() + 1), double(stop_times.size() + 1)),
          stop_times_(std::move(stop_times)) {
        for (std::size_t j = 1; j < stop_times_.size(); ++j)
            if (!(stop_times_[j] > stop_times_[j - 1]))
                throw std::invalid_argument("discrete-time lift: stop times must increase");
    }

private:
    Stacker make_stacker(const ControlledPath& y) const override {
        const int copies = static_cast<int>(stop_times_.size()) + 1;
        if (vf_.input_dim() != y.rows() * copies)
            throw std::invalid_argument("discrete-time lift: field input must take the stacked copies");
        std::vector<std::size_t> stop_index;
        stop_index.reserve(stop_times_.size());
        for (double r : stop_times_) stop_index.push_back(y.grid().index_of(r));
        const int k = y.rows();
        return [&y, k, stop_index = std::move(stop_index)](std::size_t i, Vec& x, Mat& g) {
            x.head(k) = y.value(i);
            g.topRows(k) = y.gubinelli(i);
            for (std::size_t j = 0; j < stop_index.size(); ++j) {
                const int row0 = static_cast<int>(j + 1) * k;
                x.segment(row0, k) = y.value(std::min(i, stop_index[j]));
                if (i < stop_index[j]) g.middleRows(row0, k) = y.gubinelli(i);
            }
        };
    }

    std::vector<double> stop_times_;
};

class ConstantDelayLift final : public StackedLift {
public:
    ConstantDelayLift(VectorField vf, StackedShape shape, std::vector<DelaySegment> segments)
        : StackedLift(std::move(vf), double(shape.blocks()), double(shape.blocks())),
          shape_(std::move(shape)), segments_(std::move(segments)) {
        if (segments_.size() != shape_.delays.size())
            throw std::invalid_argument("constant-delay lift: one history segment per delay");
        for (std::size_t j = 1; j < shape_.delays.size(); ++j)
            if (!(shape_.delays[j] > shape_.delays[j - 1]))
                throw std::invalid_argument("constant-delay lift: delays must increase");
        for (double r : shape_.delays)
            if (!(r > 0.0)) throw std::invalid_argument("constant-delay lift: delays must be positive");
    }

private:
    Stacker make_stacker(const ControlledPath& y) const override {
        if (y.driver_dim() != shape_.stacked_dim())
            throw std::invalid_argument("constant-delay lift: driver is not in stacked form");
        if (vf_.input_dim() != y.rows() * shape_.blocks())
            throw std::invalid_argument("constant-delay lift: field input must take the stacked copies");
        for (const auto& seg : segments_) {
            if (seg.values.size() != y.size())
                throw std::invalid_argument("constant-delay lift: segment must live on the grid");
            if (!seg.gub.empty() && seg.gub.size() != y.size())
                throw std::invalid_argument("constant-delay lift: segment derivative length mismatch");
        }
        // resolve every delayed index up front; throws on misaligned delays
        const std::size_t n = y.size();
        const std::size_t miss = n;  // sentinel: history region
        std::vector<std::vector<std::size_t>> shifted(shape_.delays.size(), std::vector<std::size_t>(n, miss));
        for (std::size_t j = 0; j < shape_.delays.size(); ++j)
            for (std::size_t i = 0; i < n; ++i) {
                const auto idx = y.grid().shift_index(i, shape_.delays[j]);
                if (idx) shifted[j][i] = *idx;
            }
        const int k = y.rows();
        const int e = shape_.base_dim;
        return [this, &y, k, e, miss, shifted = std::move(shifted)](std::size_t i, Vec& x, Mat& g) {
            x.head(k) = y.value(i);
            g.topRows(k) = y.gubinelli(i);
            for (std::size_t j = 0; j < shifted.size(); ++j) {
                const int row0 = static_cast<int>(j + 1) * k;
                const int col0 = static_cast<int>(j + 1) * e;
                const std::size_t idx = shifted[j][i];
                if (idx != miss) {
                    x.segment(row0, k) = y.value(idx);
                    g.block(row0, col0, k, e) = y.gubinelli(idx).leftCols(e);
                } else {
                    x.segment(row0, k) = segments_[j].values[i];
                    if (!segments_[j].gub.empty()) g.block(row0, col0, k, e) = segments_[j].gub[i];
                }
            }
        };
    }

    StackedShape shape_;
    std::vector<DelaySegment> segments_;
};

class VariableDelayLift final : public StackedLift {
public:
    VariableDelayLift(VectorField vf, std::function<double(double)> eta, double eps, DelaySegment segment,
                      int base_dim)
        : StackedLift(std::move(vf), 2.0, 2.0),
          eta_(std::move(eta)), eps_(eps), segment_(std::move(segment)), base_dim_(base_dim) {
        if (!(eps_ > 0.0)) throw std::invalid_argument("variable-delay lift: eps must be positive");
    }

private:
    Stacker make_stacker(const ControlledPath& y) const override {
        if (y.driver_dim() != 2 * base_dim_)
            throw std::invalid_argument("variable-delay lift: driver is not in stacked form");
        if (vf_.input_dim() != 2 * y.rows())
            throw std::invalid_argument("variable-delay lift: field input must take (y, delayed y)");
        if (segment_.values.size() != y.size())
            throw std::invalid_argument("variable-delay lift: segment must live on the grid");
        const int k = y.rows();
        const int e = base_dim_;
        return [this, &y, k, e](std::size_t i, Vec& x, Mat& g) {
            x.head(k) = y.value(i);
            g.topRows(k) = y.gubinelli(i);
            const double t = y.grid().time(i);
            const double lag = eta_(t);
            if (lag < eps_) throw std::invalid_argument("variable-delay lift: eta dropped below its floor");
            const double q = t - lag;
            if (q + y.grid().tolerance() < y.grid().front()) {
                x.tail(k) = segment_.values[i];
                if (!segment_.gub.empty()) g.block(k, e, k, e) = segment_.gub[i];
            } else {
                const std::size_t idx = y.grid().floor_index(q);
                x.tail(k) = y.value(idx);
                g.block(k, e, k, e) = y.gubinelli(idx).leftCols(e);
            }
        };
    }

    std::function<double(double)> eta_;
    double eps_;
    DelaySegment segment_;
    int base_dim_;
};

}  // namespace

DelaySegment DelaySegment::constant(std::size_t n, Vec v) {
    DelaySegment seg;
    seg.values.assign(n, std::move(v));
    return seg;
}

DelaySegment DelaySegment::from_initial_path(const SampledPath& history, const Grid& grid, double delay) {
    DelaySegment seg;
    seg.values.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = grid.time(i) - delay;
        if (q + grid.tolerance() < grid.front())
            seg.values.push_back(history.value(history.grid().floor_index(q)));
        else
            seg.values.push_back(Vec::Zero(history.dim()));  // not read past the delay
    }
    return seg;
}

CoefficientPtr lift_vector_field(VectorField vf) {
    return std::make_shared<VectorFieldLift>(std::move(vf));
}

CoefficientPtr lift_controlled(VectorField vf, ControlledPath alpha) {
    return std::make_shared<ControlledLift>(std::move(vf), std::move(alpha));
}

CoefficientPtr lift_discrete_time(VectorField vf, std::vector<double> stop_times) {
    return std::make_shared<DiscreteTimeLift>(std::move(vf), std::move(stop_times));
}

CoefficientPtr lift_constant_delay(VectorField vf, StackedShape shape, std::vector<DelaySegment> segments) {
    return std::make_shared<ConstantDelayLift>(std::move(vf), std::move(shape), std::move(segments));
}

CoefficientPtr lift_variable_delay(VectorField vf, std::function<double(double)> eta, double eps,
                                   DelaySegment segment, int base_dim) {
    return std::make_shared<VariableDelayLift>(std::move(vf), std::move(eta), eps, std::move(segment), base_dim);
}

namespace {

std::vector<std::size_t> window_anchors(std::size_t n, std::size_t budget) {
    std::vector<std::size_t> idx;
    if (n == 0) return idx;
    const std::size_t count = std::min(n, budget);
    for (std::size_t i = 0; i < count; ++i)
        idx.push_back(count == 1 ? 0 : i * (n - 1) / (count - 1));
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

double ratio_of(double lhs, double rhs) { return lhs == 0.0 ? 0.0 : lhs / rhs; }

}  // namespace

AssumptionReport validate_assumptions(const CoefficientFunctional& cf, const RoughPath& rp,
                                      std::span<const ControlledPath> samples, double k_bound, double p) {
    AssumptionReport rep;
    rep.declared_growth = cf.growth_constant();
    rep.declared_lipschitz = cf.lipschitz_constant(k_bound);
    std::vector<ControlledPath> lifted;
    lifted.reserve(samples.size());
    for (const auto& y : samples) lifted.push_back(cf.evaluate(y));

    for (std::size_t si = 0; si < samples.size(); ++si) {
        const ControlledPath& y = samples[si];
        const ControlledPath& fy = lifted[si];
        const std::size_t last = y.size() - 1;
        const auto anchors = window_anchors(y.size(), 10);

        rep.growth_uniform = std::max(rep.growth_uniform, fy.value(0).norm());
        for (std::size_t t = 1; t <= last; ++t) {
            rep.growth_uniform = std::max(rep.growth_uniform, fy.value(t).norm());
            const double jump_lhs = (fy.value(t) - fy.value(t - 1)).norm();
            const double jump_rhs = 1.0 + (y.value(t) - y.value(t - 1)).norm();
            rep.growth_jump = std::max(rep.growth_jump, jump_lhs / jump_rhs);
        }

        for (std::size_t a = 0; a < anchors.size(); ++a)
            for (std::size_t b = a + 1; b < anchors.size(); ++b) {
                const std::size_t s = anchors[a], t = anchors[b];
                const double xvar = pvar(rp.path(), p, s, t);
                const double pv_lhs = value_pvar(fy, p, s, t);
                const double pv_rhs = 1.0 + (y.gubinelli(s).norm() + gubinelli_pvar(y, p, s, t)) * xvar +
                                      remainder_pvar(y, p, s, t);
                rep.growth_pvar = std::max(rep.growth_pvar, ratio_of(pv_lhs, pv_rhs));
                const double cn_lhs = controlled_norm(fy, p, s, t);
                const double yn = controlled_norm(y, p, s, t);
                const double cn_rhs = (1.0 + yn) * (1.0 + yn) * (1.0 + xvar) * (1.0 + xvar);
                rep.growth_controlled = std::max(rep.growth_controlled, ratio_of(cn_lhs, cn_rhs));
            }
    }

    for (std::size_t si = 0; si + 1 < samples.size(); ++si) {
        const ControlledPath& ya = samples[si];
        const ControlledPath& yb = samples[si + 1];
        if (controlled_norm(ya, p) > k_bound || controlled_norm(yb, p) > k_bound) continue;
        const ControlledPath& fa = lifted[si];
        const ControlledPath& fb = lifted[si + 1];
        const auto anchors = window_anchors(ya.size(), 8);
        for (std::size_t a = 0; a < anchors.size(); ++a)
            for (std::size_t b = a + 1; b < anchors.size(); ++b) {
                const std::size_t s = anchors[a], t = anchors[b];
                const double base = (ya.value(s) - yb.value(s)).norm();
                const double lp_lhs = value_distance_pvar(fa, fb, p, s, t);
                const double lp_rhs = base + value_distance_pvar(ya, yb, p, s, t);
                rep.lipschitz_pvar = std::max(rep.lipschitz_pvar, ratio_of(lp_lhs, lp_rhs));
                const double lc_lhs = controlled_distance(fa, fb, p, s, t);
                const double lc_rhs = base + controlled_distance(ya, yb, p, s, t);
                rep.lipschitz_controlled = std::max(rep.lipschitz_controlled, ratio_of(lc_lhs, lc_rhs));
            }
    }

    const double growth_observed =
        std::max({rep.growth_uniform, rep.growth_jump, rep.growth_pvar, rep.growth_controlled});
    rep.growth_violation = growth_observed > rep.declared_growth;
    rep.lipschitz_violation = std::max(rep.lipschitz_pvar, rep.lipschitz_controlled) > rep.declared_lipschitz;
    return rep;
}

bool non_anticipative_at(const CoefficientFunctional& cf, const ControlledPath& y, std::size_t t) {
    const ControlledPath full = cf.evaluate(y);
    const ControlledPath stopped = cf.evaluate(y.truncated_after(t));
    for (std::size_t i = 0; i <= t; ++i) {
        if ((full.value(i) - stopped.value(i)).norm() != 0.0) return false;
        if ((full.gubinelli(i) - stopped.gubinelli(i)).norm() != 0.0) return false;
    }
    return true;
}

}  // namespace rfde
