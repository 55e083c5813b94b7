#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "mcs/geo.hpp"

namespace mcs {

/// Uniform grid over segment bounding boxes. Queries return a superset of the
/// true epsilon-neighbors: the three-part segment distance is bounded below by
/// the gap between the segments' point sets, which in turn is bounded below by
/// the gap between their bounding boxes, so pruning on boxes expanded by
/// epsilon never loses a neighbor. Callers filter with the exact distance.
class SegmentGridIndex {
 public:
  SegmentGridIndex(std::span<const TrajectorySegment> segments, double epsilon)
      : epsilon_(epsilon) {
    boxes_.reserve(segments.size());
    double extent_sum = 0.0;
    for (const TrajectorySegment& ts : segments) {
      Box b{std::min(ts.start.point.x, ts.end.point.x),
            std::min(ts.start.point.y, ts.end.point.y),
            std::max(ts.start.point.x, ts.end.point.x),
            std::max(ts.start.point.y, ts.end.point.y)};
      extent_sum += std::max(b.x1 - b.x0, b.y1 - b.y0);
      boxes_.push_back(b);
    }
    const double mean_extent = boxes_.empty() ? 0.0 : extent_sum / boxes_.size();
    cell_ = std::max({epsilon, mean_extent, 1e-12});
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      visit_cells(boxes_[i], 0.0, [&](std::int64_t cx, std::int64_t cy) {
        cells_[key(cx, cy)].push_back(i);
      });
    }
    seen_.assign(boxes_.size(), 0);
  }

  /// Indices whose bounding box lies within epsilon (per axis) of segment i's
  /// box. Sorted, includes i itself.
  std::vector<std::size_t> candidates(std::size_t i) const {
    std::vector<std::size_t> out;
    ++stamp_;
    visit_cells(boxes_[i], epsilon_, [&](std::int64_t cx, std::int64_t cy) {
      auto it = cells_.find(key(cx, cy));
      if (it == cells_.end()) return;
      for (std::size_t j : it->second) {
        if (seen_[j] == stamp_) continue;
        seen_[j] = stamp_;
        if (box_gap_within_epsilon(boxes_[i], boxes_[j])) out.push_back(j);
      }
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  double cell_size() const { return cell_; }

 private:
  struct Box {
    double x0, y0, x1, y1;
  };

  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^
           (static_cast<std::uint64_t>(cy) & 0xffffffffull);
  }

  template <typename F>
  void visit_cells(const Box& b, double pad, F&& f) const {
    const auto cx0 = static_cast<std::int64_t>(std::floor((b.x0 - pad) / cell_));
    const auto cx1 = static_cast<std::int64_t>(std::floor((b.x1 + pad) / cell_));
    const auto cy0 = static_cast<std::int64_t>(std::floor((b.y0 - pad) / cell_));
    const auto cy1 = static_cast<std::int64_t>(std::floor((b.y1 + pad) / cell_));
    for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
      for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
        f(cx, cy);
      }
    }
  }

  bool box_gap_within_epsilon(const Box& a, const Box& b) const {
    const double gx = std::max({a.x0 - b.x1, b.x0 - a.x1, 0.0});
    const double gy = std::max({a.y0 - b.y1, b.y0 - a.y1, 0.0});
    return gx <= epsilon_ && gy <= epsilon_;
  }

  double epsilon_;
  double cell_ = 1.0;
  std::vector<Box> boxes_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
  mutable std::vector<std::uint32_t> seen_;
  mutable std::uint32_t stamp_ = 0;
};

}  // namespace mcs
