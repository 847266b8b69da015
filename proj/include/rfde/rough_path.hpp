#pragma once

#include <memory>
#include <vector>

#include "rfde/sampled_path.hpp"

namespace rfde {

/// A level-2 rough path: a sampled path plus one d x d increment matrix per
/// grid cell. Values over wider index pairs are never stored; they are always
/// rebuilt through Chen's relation
///
///   XX_{s,t} = XX_{s,u} + XX_{u,t} + X_{s,u} (x) X_{u,t}
///
/// by left-to-right accumulation over the cells, so the relation holds by
/// construction and storage stays linear in the grid size.
class RoughPath {
public:
    RoughPath(SampledPath path, std::vector<Mat> cells);
    RoughPath(std::shared_ptr<const SampledPath> path, std::vector<Mat> cells);

    /// Lift with all cell matrices zero (the Ito lift of a piecewise-constant
    /// embedding; coarse-pair values become left-point sums via Chen).
    static RoughPath zero_cells(SampledPath path);

    /// Exact lift of the linear path t -> slope * t on the given grid.
    static RoughPath exact_linear(const Grid& grid, const Vec& slope);

    const SampledPath& path() const { return *path_; }
    std::shared_ptr<const SampledPath> path_ptr() const { return path_; }
    const Grid& grid() const { return path_->grid(); }
    int dim() const { return path_->dim(); }
    std::size_t cell_count() const { return cells_.size(); }
    const Mat& cell(std::size_t k) const { return cells_[k]; }
    const std::vector<Mat>& cells() const { return cells_; }

    /// XX_{s,t} for arbitrary grid indices s <= t (zero matrix when s == t).
    Mat chen(std::size_t s, std::size_t t) const;

    /// All of XX_{s,v} for v = s..t in one left-to-right sweep.
    std::vector<Mat> chen_row(std::size_t s, std::size_t t) const;

    RoughPath restricted(std::size_t s, std::size_t t) const;

private:
    std::shared_ptr<const SampledPath> path_;
    std::vector<Mat> cells_;
};

}  // namespace rfde
