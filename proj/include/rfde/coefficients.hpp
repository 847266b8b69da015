#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rfde/controlled_path.hpp"
#include "rfde/rough_path.hpp"
#include "rfde/vector_field.hpp"

namespace rfde {

/// A non-anticipative functional (F, F'): controlled paths in R^k over a
/// driver X map to operator-valued controlled paths, with the value at time t
/// depending only on the input up to t. Carries growth and Lipschitz
/// metadata; the declared constants are the caller's contract and are only
/// spot-checked by validate_assumptions.
class CoefficientFunctional {
public:
    virtual ~CoefficientFunctional() = default;

    /// (F(Y), F'(Y, Y')) on the grid of Y.
    virtual ControlledPath evaluate(const ControlledPath& y) const = 0;

    double growth_constant() const { return growth_; }
    double lipschitz_constant(double k_bound) const { return lipschitz_scale_ * (1.0 + k_bound) * (1.0 + k_bound); }

protected:
    double growth_ = 0.0;
    double lipschitz_scale_ = 0.0;
};

using CoefficientPtr = std::shared_ptr<const CoefficientFunctional>;

/// Block structure of a driver stacked as (Z, Z shifted by r_1, ...,
/// Z shifted by r_ell) over R^{e(ell+1)}.
struct StackedShape {
    int base_dim = 1;
    std::vector<double> delays;  // ascending, positive

    int blocks() const { return static_cast<int>(delays.size()) + 1; }
    int stacked_dim() const { return base_dim * blocks(); }
};

/// History values feeding a delayed coordinate before its delay has elapsed,
/// together with an optional derivative against the matching delayed driver
/// block (zero when omitted; the driver block is frozen before the delay, so
/// this choice is immaterial at grid resolution).
struct DelaySegment {
    std::vector<Vec> values;  // one per grid point; read only where t < delay
    std::vector<Mat> gub;     // k x e, may be empty

    static DelaySegment constant(std::size_t n, Vec v);

    /// Values read off an initial path sampled on a grid covering [-r, 0).
    static DelaySegment from_initial_path(const SampledPath& history, const Grid& grid, double delay);
};

/// Pointwise composition with a vector field: (f(Y), Df(Y) Y').
CoefficientPtr lift_vector_field(VectorField vf);

/// Composition with a field on the stacked path (alpha, Y) for a fixed
/// controlled path alpha.
CoefficientPtr lift_controlled(VectorField vf, ControlledPath alpha);

/// f(Y_t, Y_{t ^ r_1}, ..., Y_{t ^ r_ell}): copies of Y stopped at fixed
/// times, which must lie on the evaluation grid.
CoefficientPtr lift_discrete_time(VectorField vf, std::vector<double> stop_times);

/// f(Y_t, Y_{t - r_1}, ..., Y_{t - r_ell}) against a driver stacked per
/// `shape`; before r_j the j-th coordinate reads its DelaySegment. The
/// delayed coordinates are controlled through the matching delayed driver
/// block: the derivative of Y_{t - r_j} places the base-block slice of
/// Y'_{t - r_j} into block j.
CoefficientPtr lift_constant_delay(VectorField vf, StackedShape shape, std::vector<DelaySegment> segments);

/// f(Y_t, Y_{t - eta(t)}) against a driver stacked as (Z, Z delayed by eta);
/// eta must stay >= eps on the grid and evaluation times round down to grid
/// points.
CoefficientPtr lift_variable_delay(VectorField vf, std::function<double(double)> eta, double eps,
                                   DelaySegment segment, int base_dim);

struct AssumptionReport {
    // observed worst-case constants, each the max over sampled windows of
    // lhs / rhs with the constant stripped from the rhs (0/0 counts as 0)
    double growth_uniform = 0.0;
    double growth_jump = 0.0;
    double growth_pvar = 0.0;
    double growth_controlled = 0.0;
    double lipschitz_pvar = 0.0;
    double lipschitz_controlled = 0.0;
    double declared_growth = 0.0;
    double declared_lipschitz = 0.0;
    bool growth_violation = false;
    bool lipschitz_violation = false;
};

/// Samples the growth and Lipschitz inequalities of the functional over the
/// given controlled paths (windows are taken from a bounded set of index
/// pairs) and compares observed constants with the declared metadata.
/// Report-only; never throws on a violation.
AssumptionReport validate_assumptions(const CoefficientFunctional& cf, const RoughPath& rp,
                                      std::span<const ControlledPath> samples, double k_bound, double p);

/// Exact agreement of evaluate(y) and evaluate(y stopped at t) on [0, t].
bool non_anticipative_at(const CoefficientFunctional& cf, const ControlledPath& y, std::size_t t);

}  // namespace rfde
