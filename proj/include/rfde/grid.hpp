#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rfde {

/// A strictly increasing finite set of time points. Immutable and cheap to
/// copy (copies share the underlying time vector). Grids may be non-uniform
/// (e.g. a uniform base mesh with inserted jump times) and may start at a
/// negative time when a driver carries history before 0.
class Grid {
public:
    Grid() = default;
    explicit Grid(std::vector<double> times);

    static Grid uniform(double t0, double t1, std::size_t cells);

    std::size_t size() const { return times_ ? times_->size() : 0; }
    bool empty() const { return size() == 0; }
    double time(std::size_t i) const { return (*times_)[i]; }
    const std::vector<double>& times() const { return *times_; }
    double front() const { return times_->front(); }
    double back() const { return times_->back(); }
    double span() const { return back() - front(); }

    /// Smallest spacing between consecutive points.
    double min_spacing() const { return min_spacing_; }

    /// Lookup tolerance used by index queries: well below the smallest cell,
    /// well above the rounding drift of shifted time values.
    double tolerance() const { return min_spacing_ * 1e-9; }

    /// Index of the point matching `t` within tolerance; throws if absent.
    std::size_t index_of(double t) const;

    /// Largest index i with time(i) <= t + tolerance; throws when t lies
    /// below the first point.
    std::size_t floor_index(double t) const;

    /// Index of time(i) - delay. Returns nullopt when the shifted time falls
    /// before the grid; throws when it lands between points (misaligned
    /// delay).
    std::optional<std::size_t> shift_index(std::size_t i, double delay) const;

    /// Same grid: shared storage or pointwise equal times.
    bool same(const Grid& other) const;

    Grid restricted(std::size_t s, std::size_t t) const;

    void check_range(std::size_t s, std::size_t t) const;

private:
    std::shared_ptr<const std::vector<double>> times_;
    double min_spacing_ = 0.0;
};

}  // namespace rfde
