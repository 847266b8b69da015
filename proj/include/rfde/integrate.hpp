#pragma once

#include "rfde/controlled_path.hpp"
#include "rfde/rough_path.hpp"

namespace rfde {

struct RoughIntegral {
    Vec value;               ///< integral over [s, t]
    ControlledPath running;  ///< running integral on [s, t], Gubinelli derivative = integrand
};

/// Forward rough integral of an operator-valued controlled path against a
/// rough path, as the compensated left-point sum over the grid cells
///
///   sum_k ( V_{t_k} X_{t_k,t_{k+1}} + V'_{t_k} XX_{t_k,t_{k+1}} ).
///
/// At grid resolution this sum is exact: by Chen's relation, evaluating it
/// over any coarser sub-partition of the same grid gives the same value, so
/// no refinement limit is involved. Terms accumulate left to right.
RoughIntegral rough_integral(const ControlledPath& v, const RoughPath& rp, std::size_t s, std::size_t t);
RoughIntegral rough_integral(const ControlledPath& v, const RoughPath& rp);

/// One compensated step V_s X_{s,t} + V'_s XX_{s,t} (flattened into R^k).
Vec compensated_step(const ControlledPath& v, const RoughPath& rp, std::size_t s, std::size_t t);

struct LocalEstimateReport {
    double lhs = 0.0;         ///< |integral - V_s X_{s,t} - V'_s XX_{s,t}|
    double rhs_factor = 0.0;  ///< ||R^V||_{p/2,[s,t)} ||X||_{p,[s,t]} + ||V'||_{p,[s,t)} ||XX||_{p/2,[s,t]}
    double ratio = 0.0;       ///< lhs / rhs_factor, with 0/0 = 0
};

/// Empirical version of the local rough-integral estimate with the constant
/// removed; reports the observed ratio.
LocalEstimateReport check_local_estimate(const ControlledPath& v, const RoughPath& rp,
                                         std::size_t s, std::size_t t, double p);

struct RemainderEstimateReport {
    double lhs = 0.0;         ///< ||R^{int V dX}||_{p/2,[s,t]}
    double rhs_factor = 0.0;  ///< (1 + ||V,V'||_{X,p,[s,t]})^2 (1 + ||X||_{p,[s,t]})^2 ||XX bundle||_{p,[s,t]}
    double ratio = 0.0;
};

/// Empirical version of the remainder estimate for the rough integral, again
/// with the constant removed.
RemainderEstimateReport check_remainder_estimate(const ControlledPath& v, const RoughPath& rp,
                                                 std::size_t s, std::size_t t, double p);

}  // namespace rfde
