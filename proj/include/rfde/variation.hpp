#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "rfde/controlled_path.hpp"
#include "rfde/rough_path.hpp"

namespace rfde {

/// Exact p-variation seminorm of a sampled path over the closed index range
/// [s, t], computed as the supremum over all grid sub-partitions. Under the
/// piecewise-constant embedding this equals the supremum over all real
/// partitions. Requires p >= 1.
double pvar(const SampledPath& x, double p, std::size_t s, std::size_t t);
double pvar(const SampledPath& x, double p);

/// Exhaustive-enumeration oracle for pvar. Restricted to ranges of at most
/// 14 grid points; sums each candidate partition left to right, exactly like
/// the dynamic program, so agreement is exact.
double brute_force_pvar(const SampledPath& x, double p, std::size_t s, std::size_t t);

/// p/2-variation seminorm of the level-2 part, |XX_{u,v}| in Frobenius norm,
/// values rebuilt through Chen's relation. Requires p in (2, 3).
double pvar2(const RoughPath& rp, double p, std::size_t s, std::size_t t);
double pvar2(const RoughPath& rp, double p);

/// Enumeration oracle for pvar2 (ranges of at most 14 points).
double brute_force_pvar2(const RoughPath& rp, double p, std::size_t s, std::size_t t);

/// p-variation of the value path of a controlled path.
double value_pvar(const ControlledPath& y, double p, std::size_t s, std::size_t t);

/// p-variation of the difference of the two value paths.
double value_distance_pvar(const ControlledPath& a, const ControlledPath& b, double p,
                           std::size_t s, std::size_t t);

/// p-variation of the Gubinelli-derivative path of a controlled path.
double gubinelli_pvar(const ControlledPath& y, double p, std::size_t s, std::size_t t);

/// p/2-variation of the remainder R^Y over [s, t].
double remainder_pvar(const ControlledPath& y, double p, std::size_t s, std::size_t t);

/// |Y'_s| + ||Y'||_{p,[s,t]} + ||R^Y||_{p/2,[s,t]}.
double controlled_norm(const ControlledPath& y, double p, std::size_t s, std::size_t t);
double controlled_norm(const ControlledPath& y, double p);

/// |Y'_s - Z'_s| + ||Y' - Z'||_{p,[s,t]} + ||R^Y - R^Z||_{p/2,[s,t]}.
/// The two paths may live over different drivers on the same grid; each
/// remainder is taken against its own driver.
double controlled_distance(const ControlledPath& a, const ControlledPath& b, double p,
                           std::size_t s, std::size_t t);
double controlled_distance(const ControlledPath& a, const ControlledPath& b, double p);

/// Same three-term sum with the remainder term scaled by delta >= 1 (the
/// equivalent norm used by the solver's contraction argument).
double weighted_controlled_distance(const ControlledPath& a, const ControlledPath& b, double p,
                                    double delta, std::size_t s, std::size_t t);

/// ||X||_{p,[s,t]} + ||XX||_{p/2,[s,t]}.
double rough_norm(const RoughPath& rp, double p, std::size_t s, std::size_t t);
double rough_norm(const RoughPath& rp, double p);

/// ||X - Xt||_{p,[s,t]} + ||XX - XXt||_{p/2,[s,t]} on a shared grid.
double rough_distance(const RoughPath& a, const RoughPath& b, double p, std::size_t s, std::size_t t);
double rough_distance(const RoughPath& a, const RoughPath& b, double p);

/// The control function w(s,t) = ||X||_{p,[s,t]}^p + ||XX||_{p/2,[s,t]}^{p/2},
/// superadditive by construction. Queries are cached by index pair; the cache
/// is safe for concurrent use.
class ControlFunction {
public:
    ControlFunction(std::shared_ptr<const RoughPath> rp, double p);

    double operator()(std::size_t s, std::size_t t) const;

    const RoughPath& rough_path() const { return *rp_; }
    double p() const { return p_; }

private:
    std::shared_ptr<const RoughPath> rp_;
    double p_;
    mutable std::map<std::pair<std::size_t, std::size_t>, double> cache_;
    mutable std::mutex mutex_;
};

ControlFunction control_w(std::shared_ptr<const RoughPath> rp, double p);

/// Greedy partition 0 = tau_0 < tau_1 < ... < tau_M = N with
/// w(tau_i, tau_{i+1} - 1) < gamma for every piece (the half-open interval
/// [tau_i, tau_{i+1}) excludes the right endpoint, realised as the closed
/// index range ending one point earlier). Each tau_{i+1} is chosen maximal,
/// and singleton pieces guarantee progress for any gamma > 0.
std::vector<std::size_t> control_partition(const RoughPath& rp, double p, double gamma);

namespace detail {
/// Raw powered sums sup sum |X_{u,v}|^p and sup sum |XX_{u,v}|^{p/2}; these
/// are what the control function adds, without taking roots.
double pvar_pow_sum(const SampledPath& x, double p, std::size_t s, std::size_t t);
double pvar2_pow_sum(const RoughPath& rp, double p, std::size_t s, std::size_t t);
}  // namespace detail

}  // namespace rfde
