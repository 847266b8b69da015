#include "rfde/variation.hpp"

#include <cmath>
#include <stdexcept>

#include "rfde/detail/partition_dp.hpp"

namespace rfde {

namespace {

void require_p(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("variation: p must be >= 1");
}

void require_level2_p(double p) {
    if (!(p > 2.0 && p < 3.0)) throw std::invalid_argument("variation: p must lie in (2, 3)");
}

void require_compatible_values(const ControlledPath& a, const ControlledPath& b) {
    if (!a.grid().same(b.grid())) throw std::invalid_argument("controlled distance: grids differ");
    if (a.value_dim() != b.value_dim() || a.driver_dim() != b.driver_dim())
        throw std::invalid_argument("controlled distance: dimension mismatch");
}

}  // namespace

namespace detail {

double pvar_pow_sum(const SampledPath& x, double p, std::size_t s, std::size_t t) {
    x.grid().check_range(s, t);
    const std::size_t n = t - s + 1;
    return max_partition_sum(n, [&](std::size_t i, std::size_t j) {
        return std::pow((x.value(s + j) - x.value(s + i)).norm(), p);
    });
}

double pvar2_pow_sum(const RoughPath& rp, double p, std::size_t s, std::size_t t) {
    rp.grid().check_range(s, t);
    const std::size_t n = t - s + 1;
    if (n <= 1) return 0.0;
    const auto& x = rp.path();
    const double half = p / 2.0;
    // Extend every row XX_{s+j, .} one cell to the right per step of k, per
    // Chen: XX_{j,k} = XX_{j,k-1} + cell_{k-1} + X_{j,k-1} (x) X_{k-1,k}.
    std::vector<Mat> row;
    row.reserve(n - 1);
    std::vector<double> m(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t gk = s + k;
        const Vec step = x.increment(gk - 1, gk);
        for (std::size_t j = 0; j + 1 < k; ++j) {
            row[j] += rp.cell(gk - 1);
            row[j].noalias() += x.increment(s + j, gk - 1) * step.transpose();
        }
        row.push_back(rp.cell(gk - 1));
        double best = std::pow(row[0].norm(), half);
        for (std::size_t j = 1; j < k; ++j) {
            const double cand = m[j] + std::pow(row[j].norm(), half);
            if (cand > best) best = cand;
        }
        m[k] = best;
    }
    return m[n - 1];
}

}  // namespace detail

double pvar(const SampledPath& x, double p, std::size_t s, std::size_t t) {
    require_p(p);
    const double sum = detail::pvar_pow_sum(x, p, s, t);
    return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
}

double pvar(const SampledPath& x, double p) { return pvar(x, p, 0, x.size() - 1); }

double brute_force_pvar(const SampledPath& x, double p, std::size_t s, std::size_t t) {
    require_p(p);
    x.grid().check_range(s, t);
    if (t - s + 1 > 14) throw std::invalid_argument("brute_force_pvar: range too long");
    if (t == s) return 0.0;
    const std::size_t interior = t - s - 1;
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << interior); ++mask) {
        double sum = 0.0;
        std::size_t prev = s;
        for (std::size_t b = 0; b < interior; ++b) {
            if (mask & (std::size_t{1} << b)) {
                const std::size_t cur = s + 1 + b;
                sum += std::pow((x.value(cur) - x.value(prev)).norm(), p);
                prev = cur;
            }
        }
        sum += std::pow((x.value(t) - x.value(prev)).norm(), p);
        if (sum > best) best = sum;
    }
    return best == 0.0 ? 0.0 : std::pow(best, 1.0 / p);
}

double pvar2(const RoughPath& rp, double p, std::size_t s, std::size_t t) {
    require_level2_p(p);
    const double sum = detail::pvar2_pow_sum(rp, p, s, t);
    return sum == 0.0 ? 0.0 : std::pow(sum, 2.0 / p);
}

double pvar2(const RoughPath& rp, double p) { return pvar2(rp, p, 0, rp.path().size() - 1); }

double brute_force_pvar2(const RoughPath& rp, double p, std::size_t s, std::size_t t) {
    require_level2_p(p);
    rp.grid().check_range(s, t);
    if (t - s + 1 > 14) throw std::invalid_argument("brute_force_pvar2: range too long");
    if (t == s) return 0.0;
    const double half = p / 2.0;
    const std::size_t interior = t - s - 1;
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << interior); ++mask) {
        double sum = 0.0;
        std::size_t prev = s;
        for (std::size_t b = 0; b < interior; ++b) {
            if (mask & (std::size_t{1} << b)) {
                const std::size_t cur = s + 1 + b;
                sum += std::pow(rp.chen(prev, cur).norm(), half);
                prev = cur;
            }
        }
        sum += std::pow(rp.chen(prev, t).norm(), half);
        if (sum > best) best = sum;
    }
    return best == 0.0 ? 0.0 : std::pow(best, 2.0 / p);
}

double value_pvar(const ControlledPath& y, double p, std::size_t s, std::size_t t) {
    require_p(p);
    y.grid().check_range(s, t);
    const double sum = detail::max_partition_sum(t - s + 1, [&](std::size_t i, std::size_t j) {
        return std::pow((y.value(s + j) - y.value(s + i)).norm(), p);
    });
    return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
}

double value_distance_pvar(const ControlledPath& a, const ControlledPath& b, double p,
                           std::size_t s, std::size_t t) {
    require_p(p);
    require_compatible_values(a, b);
    a.grid().check_range(s, t);
    const double sum = detail::max_partition_sum(t - s + 1, [&](std::size_t i, std::size_t j) {
        return std::pow(((a.value(s + j) - b.value(s + j)) - (a.value(s + i) - b.value(s + i))).norm(), p);
    });
    return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
}

double gubinelli_pvar(const ControlledPath& y, double p, std::size_t s, std::size_t t) {
    require_p(p);
    y.grid().check_range(s, t);
    const double sum = detail::max_partition_sum(t - s + 1, [&](std::size_t i, std::size_t j) {
        return std::pow((y.gubinelli(s + j) - y.gubinelli(s + i)).norm(), p);
    });
    return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
}

double remainder_pvar(const ControlledPath& y, double p, std::size_t s, std::size_t t) {
    require_p(p);
    y.grid().check_range(s, t);
    const double half = p / 2.0;
    const double sum = detail::max_partition_sum(t - s + 1, [&](std::size_t i, std::size_t j) {
        return std::pow(y.remainder(s + i, s + j).norm(), half);
    });
    return sum == 0.0 ? 0.0 : std::pow(sum, 2.0 / p);
}

double controlled_norm(const ControlledPath& y, double p, std::size_t s, std::size_t t) {
    return y.gubinelli(s).norm() + gubinelli_pvar(y, p, s, t) + remainder_pvar(y, p, s, t);
}

double controlled_norm(const ControlledPath& y, double p) { return controlled_norm(y, p, 0, y.size() - 1); }

double weighted_controlled_distance(const ControlledPath& a, const ControlledPath& b, double p,
                                    double delta, std::size_t s, std::size_t t) {
    require_p(p);
    require_compatible_values(a, b);
    a.grid().check_range(s, t);
    const std::size_t n = t - s + 1;
    const double gub0 = (a.gubinelli(s) - b.gubinelli(s)).norm();
    const double gub_sum = detail::max_partition_sum(n, [&](std::size_t i, std::size_t j) {
        return std::pow(((a.gubinelli(s + j) - b.gubinelli(s + j)) - (a.gubinelli(s + i) - b.gubinelli(s + i))).norm(), p);
    });
    const double half = p / 2.0;
    const double rem_sum = detail::max_partition_sum(n, [&](std::size_t i, std::size_t j) {
        return std::pow((a.remainder(s + i, s + j) - b.remainder(s + i, s + j)).norm(), half);
    });
    const double gub_var = gub_sum == 0.0 ? 0.0 : std::pow(gub_sum, 1.0 / p);
    const double rem_var = rem_sum == 0.0 ? 0.0 : std::pow(rem_sum, 2.0 / p);
    return gub0 + gub_var + delta * rem_var;
}

double controlled_distance(const ControlledPath& a, const ControlledPath& b, double p,
                           std::size_t s, std::size_t t) {
    return weighted_controlled_distance(a, b, p, 1.0, s, t);
}

double controlled_distance(const ControlledPath& a, const ControlledPath& b, double p) {
    return controlled_distance(a, b, p, 0, a.size() - 1);
}

double rough_norm(const RoughPath& rp, double p, std::size_t s, std::size_t t) {
    return pvar(rp.path(), p, s, t) + pvar2(rp, p, s, t);
}

double rough_norm(const RoughPath& rp, double p) { return rough_norm(rp, p, 0, rp.path().size() - 1); }

double rough_distance(const RoughPath& a, const RoughPath& b, double p, std::size_t s, std::size_t t) {
    require_level2_p(p);
    if (!a.grid().same(b.grid())) throw std::invalid_argument("rough distance: grids differ");
    if (a.dim() != b.dim()) throw std::invalid_argument("rough distance: dimension mismatch");
    a.grid().check_range(s, t);
    const std::size_t n = t - s + 1;
    const auto& xa = a.path();
    const auto& xb = b.path();
    const double level1_sum = detail::max_partition_sum(n, [&](std::size_t i, std::size_t j) {
        const Vec diff = (xa.value(s + j) - xb.value(s + j)) - (xa.value(s + i) - xb.value(s + i));
        return std::pow(diff.norm(), p);
    });
    // level-2 difference, both rows extended per Chen in lockstep
    const double half = p / 2.0;
    double level2_sum = 0.0;
    if (n > 1) {
        std::vector<Mat> rowa, rowb;
        rowa.reserve(n - 1);
        rowb.reserve(n - 1);
        std::vector<double> m(n, 0.0);
        for (std::size_t k = 1; k < n; ++k) {
            const std::size_t gk = s + k;
            const Vec stepa = xa.increment(gk - 1, gk);
            const Vec stepb = xb.increment(gk - 1, gk);
            for (std::size_t j = 0; j + 1 < k; ++j) {
                rowa[j] += a.cell(gk - 1);
                rowa[j].noalias() += xa.increment(s + j, gk - 1) * stepa.transpose();
                rowb[j] += b.cell(gk - 1);
                rowb[j].noalias() += xb.increment(s + j, gk - 1) * stepb.transpose();
            }
            rowa.push_back(a.cell(gk - 1));
            rowb.push_back(b.cell(gk - 1));
            double best = std::pow((rowa[0] - rowb[0]).norm(), half);
            for (std::size_t j = 1; j < k; ++j) {
                const double cand = m[j] + std::pow((rowa[j] - rowb[j]).norm(), half);
                if (cand > best) best = cand;
            }
            m[k] = best;
        }
        level2_sum = m[n - 1];
    }
    const double l1 = level1_sum == 0.0 ? 0.0 : std::pow(level1_sum, 1.0 / p);
    const double l2 = level2_sum == 0.0 ? 0.0 : std::pow(level2_sum, 2.0 / p);
    return l1 + l2;
}

double rough_distance(const RoughPath& a, const RoughPath& b, double p) {
    return rough_distance(a, b, p, 0, a.path().size() - 1);
}

ControlFunction::ControlFunction(std::shared_ptr<const RoughPath> rp, double p) : rp_(std::move(rp)), p_(p) {
    require_level2_p(p_);
    if (!rp_) throw std::invalid_argument("control function: missing rough path");
}

double ControlFunction::operator()(std::size_t s, std::size_t t) const {
    rp_->grid().check_range(s, t);
    if (s == t) return 0.0;
    const auto key = std::make_pair(s, t);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const double w = detail::pvar_pow_sum(rp_->path(), p_, s, t) + detail::pvar2_pow_sum(*rp_, p_, s, t);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(key, w);
    return w;
}

ControlFunction control_w(std::shared_ptr<const RoughPath> rp, double p) {
    return ControlFunction(std::move(rp), p);
}

std::vector<std::size_t> control_partition(const RoughPath& rp, double p, double gamma) {
    require_level2_p(p);
    if (!(gamma > 0.0)) throw std::invalid_argument("control partition: gamma must be positive");
    const std::size_t last = rp.path().size() - 1;
    std::vector<std::size_t> taus{0};
    if (last == 0) return taus;
    const auto& x = rp.path();
    std::size_t a = 0;
    while (a < last) {
        std::size_t b = last;  // default: final piece reaches the end
        std::vector<Mat> row;
        std::vector<double> mx{0.0}, mxx{0.0};
        for (std::size_t k = a + 1; k <= last; ++k) {
            const Vec step = x.increment(k - 1, k);
            for (std::size_t j = a; j + 1 < k; ++j) {
                row[j - a] += rp.cell(k - 1);
                row[j - a].noalias() += x.increment(j, k - 1) * step.transpose();
            }
            row.push_back(rp.cell(k - 1));
            double bx = std::pow(x.increment(a, k).norm(), p);
            double bxx = std::pow(row[0].norm(), p / 2.0);
            for (std::size_t j = a + 1; j < k; ++j) {
                bx = std::max(bx, mx[j - a] + std::pow(x.increment(j, k).norm(), p));
                bxx = std::max(bxx, mxx[j - a] + std::pow(row[j - a].norm(), p / 2.0));
            }
            mx.push_back(bx);
            mxx.push_back(bxx);
            if (bx + bxx >= gamma) {
                b = k;
                break;
            }
        }
        taus.push_back(b);
        a = b;
    }
    return taus;
}

}  // namespace rfde
