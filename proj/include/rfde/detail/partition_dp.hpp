#pragma once

#include <cstddef>
#include <vector>

namespace rfde::detail {

/// Maximum over all sub-partitions of the index range {0, ..., n-1}
/// (endpoints always included) of the left-to-right sum of pair weights
/// w(i, j), i < j. This is the exact supremum defining p-variation once the
/// weights are powered increments. Left-to-right accumulation is part of the
/// contract: the brute-force enumeration oracle sums partitions in the same
/// order, and floating-point max is monotone under a shared trailing addend,
/// so the two agree bit for bit.
template <class F>
double max_partition_sum(std::size_t n, F&& w) {
    if (n <= 1) return 0.0;
    std::vector<double> m(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        double best = w(0, k);
        for (std::size_t j = 1; j < k; ++j) {
            const double cand = m[j] + w(j, k);
            if (cand > best) best = cand;
        }
        m[k] = best;
    }
    return m[n - 1];
}

}  // namespace rfde::detail
