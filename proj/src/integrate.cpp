#include "rfde/integrate.hpp"

#include <stdexcept>

#include "rfde/variation.hpp"

namespace rfde {

namespace {

void require_integrand(const ControlledPath& v, const RoughPath& rp) {
    if (!v.grid().same(rp.grid())) throw std::invalid_argument("rough integral: integrand and driver grids differ");
    if (v.cols() != rp.dim() || v.driver_dim() != rp.dim())
        throw std::invalid_argument("rough integral: operator dimensions do not match the driver");
}

}  // namespace

Vec compensated_step(const ControlledPath& v, const RoughPath& rp, std::size_t s, std::size_t t) {
    Vec out = apply_operator(v.value(s), v.rows(), v.cols(), rp.path().increment(s, t));
    out += apply_second_order(v.gubinelli(s), v.rows(), v.cols(), rp.chen(s, t));
    return out;
}

RoughIntegral rough_integral(const ControlledPath& v, const RoughPath& rp, std::size_t s, std::size_t t) {
    require_integrand(v, rp);
    rp.grid().check_range(s, t);
    const int k = v.rows();
    std::vector<Vec> running;
    running.reserve(t - s + 1);
    running.push_back(Vec::Zero(k));
    Vec acc = Vec::Zero(k);
    for (std::size_t m = s; m < t; ++m) {
        acc += apply_operator(v.value(m), v.rows(), v.cols(), rp.path().increment(m, m + 1));
        acc += apply_second_order(v.gubinelli(m), v.rows(), v.cols(), rp.cell(m));
        running.push_back(acc);
    }
    // the running integral is controlled by X with derivative V
    auto sub_driver = std::make_shared<const SampledPath>(rp.path().restricted(s, t));
    std::vector<Mat> gubs;
    gubs.reserve(t - s + 1);
    for (std::size_t m = s; m <= t; ++m) gubs.push_back(v.value_shaped(m));
    ControlledPath result(std::move(sub_driver), k, 1, std::move(running), std::move(gubs));
    return RoughIntegral{acc, std::move(result)};
}

RoughIntegral rough_integral(const ControlledPath& v, const RoughPath& rp) {
    return rough_integral(v, rp, 0, rp.path().size() - 1);
}

LocalEstimateReport check_local_estimate(const ControlledPath& v, const RoughPath& rp,
                                         std::size_t s, std::size_t t, double p) {
    require_integrand(v, rp);
    rp.grid().check_range(s, t);
    LocalEstimateReport rep;
    if (s == t) return rep;
    const RoughIntegral integral = rough_integral(v, rp, s, t);
    rep.lhs = (integral.value - compensated_step(v, rp, s, t)).norm();
    const std::size_t open_end = t - 1;  // [s, t) realised as the closed range short of t
    const double rem = open_end > s ? remainder_pvar(v, p, s, open_end) : 0.0;
    const double gub = open_end > s ? gubinelli_pvar(v, p, s, open_end) : 0.0;
    rep.rhs_factor = rem * pvar(rp.path(), p, s, t) + gub * pvar2(rp, p, s, t);
    rep.ratio = rep.rhs_factor == 0.0 ? 0.0 : rep.lhs / rep.rhs_factor;
    return rep;
}

RemainderEstimateReport check_remainder_estimate(const ControlledPath& v, const RoughPath& rp,
                                                 std::size_t s, std::size_t t, double p) {
    require_integrand(v, rp);
    rp.grid().check_range(s, t);
    RemainderEstimateReport rep;
    if (s == t) return rep;
    const RoughIntegral integral = rough_integral(v, rp, s, t);
    rep.lhs = remainder_pvar(integral.running, p, 0, t - s);
    const double vnorm = controlled_norm(v, p, s, t);
    const double xnorm = pvar(rp.path(), p, s, t);
    rep.rhs_factor = (1.0 + vnorm) * (1.0 + vnorm) * (1.0 + xnorm) * (1.0 + xnorm) * rough_norm(rp, p, s, t);
    rep.ratio = rep.rhs_factor == 0.0 ? 0.0 : rep.lhs / rep.rhs_factor;
    return rep;
}

}  // namespace rfde
