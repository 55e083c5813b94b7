#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mcs/errors.hpp"
#include "mcs/geo.hpp"
#include "mcs/model.hpp"
#include "mcs/spatial_index.hpp"

namespace mcs {

struct ScoreWeights {
  double following = 1.0;
  double speed = 1.0;
  double direction = 1.0;
};

struct ClusteringParams {
  double epsilon = 0.002;
  std::size_t min_segments = 17;
  ScoreWeights weights{};
  double delta_t = 0.0;  // slot width in seconds; 0 derives the ping interval from the data
  // Whether the speed/direction statistics range over the whole neighborhood
  // (core included). The following score always excludes the core from its sum.
  bool scores_include_core = true;

  void validate() const {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (min_segments < 1) throw ValidationError("min segment count must be at least 1");
    if (weights.following < 0.0 || weights.speed < 0.0 || weights.direction < 0.0) {
      throw ValidationError("score weights must be non-negative");
    }
    if (delta_t < 0.0) throw ValidationError("slot width must be non-negative");
  }
};

/// All segments of the slot within epsilon of ts, ts itself included.
inline std::vector<TrajectorySegment> epsilon_neighborhood(
    const TrajectorySegment& ts, std::span<const TrajectorySegment> slot, double epsilon) {
  std::vector<TrajectorySegment> nbhd;
  for (const TrajectorySegment& other : slot) {
    if (segment_distance(ts, other) <= epsilon) nbhd.push_back(other);
  }
  return nbhd;
}

inline bool is_core(const TrajectorySegment& ts, std::span<const TrajectorySegment> slot,
                    const ClusteringParams& params) {
  std::size_t count = 0;
  for (const TrajectorySegment& other : slot) {
    if (segment_distance(ts, other) <= params.epsilon && ++count >= params.min_segments) {
      return true;
    }
  }
  return false;
}

/// |N| minus the sum of following degrees from the core to every other
/// member. Lower means the neighborhood follows the core more tightly.
inline double following_score(std::span<const TrajectorySegment> nbhd, std::size_t core_index) {
  double sum = 0.0;
  for (std::size_t j = 0; j < nbhd.size(); ++j) {
    if (j == core_index) continue;
    sum += following_degree(nbhd[core_index], nbhd[j]);
  }
  return static_cast<double>(nbhd.size()) - sum;
}

/// |core speed - mean speed| / (max speed - min speed); 0 when all equal.
inline double speed_score(std::span<const TrajectorySegment> nbhd, std::size_t core_index,
                          bool include_core = true) {
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (std::size_t j = 0; j < nbhd.size(); ++j) {
    if (!include_core && j == core_index) continue;
    const double sp = speed(nbhd[j]);
    sum += sp;
    lo = std::min(lo, sp);
    hi = std::max(hi, sp);
    ++n;
  }
  if (n == 0) return 0.0;
  const double range = hi - lo;
  if (range == 0.0) return 0.0;
  return std::abs(speed(nbhd[core_index]) - sum / static_cast<double>(n)) / range;
}

/// Same statistic over segment directions. Angles are unwrapped to the
/// representative nearest the core's direction before averaging, so a
/// neighborhood straddling the 0/360 seam is not torn apart. Members with no
/// direction (zero length) are excluded; all-degenerate neighborhoods score 0.
inline double direction_score(std::span<const TrajectorySegment> nbhd, std::size_t core_index,
                              bool include_core = true) {
  if (nbhd[core_index].spatially_degenerate()) return 0.0;
  const double core_dir = direction(nbhd[core_index]);
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (std::size_t j = 0; j < nbhd.size(); ++j) {
    if (!include_core && j == core_index) continue;
    if (nbhd[j].spatially_degenerate()) continue;
    double dir = direction(nbhd[j]);
    dir = core_dir + std::remainder(dir - core_dir, 360.0);
    sum += dir;
    lo = std::min(lo, dir);
    hi = std::max(hi, dir);
    ++n;
  }
  if (n == 0) return 0.0;
  const double range = hi - lo;
  if (range == 0.0) return 0.0;
  return std::abs(core_dir - sum / static_cast<double>(n)) / range;
}

/// Weighted sum of the three sub-scores. The best cluster seed is the core
/// with the lowest homogeneity score.
inline double homogeneity_score(std::span<const TrajectorySegment> nbhd, std::size_t core_index,
                                const ScoreWeights& w, bool include_core = true) {
  double hs = 0.0;
  if (w.following != 0.0) hs += w.following * following_score(nbhd, core_index);
  if (w.speed != 0.0) hs += w.speed * speed_score(nbhd, core_index, include_core);
  if (w.direction != 0.0) hs += w.direction * direction_score(nbhd, core_index, include_core);
  return hs;
}

/// Component-wise mean of the member displacement vectors, anchored at the
/// mean member start point and time.
inline ClusterCenter cluster_center(std::span<const TrajectorySegment> members) {
  if (members.empty()) throw EmptyClusterError("cluster center of an empty member set");
  double sx = 0.0, sy = 0.0, st = 0.0;
  double ax = 0.0, ay = 0.0, at = 0.0;
  for (const TrajectorySegment& ts : members) {
    sx += ts.dx();
    sy += ts.dy();
    st += ts.dt();
    ax += ts.start.point.x;
    ay += ts.start.point.y;
    at += ts.start.t;
  }
  const double n = static_cast<double>(members.size());
  return {sx / n, sy / n, st / n, {{ax / n, ay / n}, at / n}};
}

namespace detail {

inline bool canonical_less(const TrajectorySegment& a, const TrajectorySegment& b) {
  return std::tie(a.sensor_id, a.start.t) < std::tie(b.sensor_id, b.start.t);
}

}  // namespace detail

/// Clusters one time slot: every non-degenerate core segment whose
/// homogeneity score is the lowest among the core segments of its own
/// epsilon-neighborhood seeds a cluster made of that neighborhood. Ties go to
/// the larger neighborhood, then to the canonical (sensor_id, start time)
/// order. Emitted clusters may share members; output order and content do not
/// depend on the input order.
inline std::vector<Cluster> cluster_slot(std::span<const TrajectorySegment> slot,
                                         const ClusteringParams& params) {
  params.validate();
  std::vector<Cluster> clusters;
  if (slot.empty()) return clusters;

  std::vector<TrajectorySegment> segs(slot.begin(), slot.end());
  std::sort(segs.begin(), segs.end(), detail::canonical_less);

  const SegmentGridIndex index(segs, params.epsilon);
  std::vector<std::vector<std::size_t>> nbhd(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j : index.candidates(i)) {
      if (segment_distance(segs[i], segs[j]) <= params.epsilon) nbhd[i].push_back(j);
    }
  }

  // Core segments eligible to seed a cluster. Degenerate segments may appear
  // as neighbors but never seed.
  std::vector<bool> seed(segs.size(), false);
  std::vector<double> score(segs.size(), 0.0);
  std::vector<TrajectorySegment> scratch;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].spatially_degenerate() || nbhd[i].size() < params.min_segments) continue;
    seed[i] = true;
    scratch.clear();
    std::size_t core_index = 0;
    for (std::size_t j : nbhd[i]) {
      if (j == i) core_index = scratch.size();
      scratch.push_back(segs[j]);
    }
    score[i] = homogeneity_score(scratch, core_index, params.weights, params.scores_include_core);
  }

  const auto precedes = [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] < score[b];
    if (nbhd[a].size() != nbhd[b].size()) return nbhd[a].size() > nbhd[b].size();
    return detail::canonical_less(segs[a], segs[b]);
  };

  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!seed[i]) continue;
    bool lowest = true;
    for (std::size_t j : nbhd[i]) {
      if (j != i && seed[j] && precedes(j, i)) {
        lowest = false;
        break;
      }
    }
    if (!lowest) continue;
    Cluster c;
    c.core = segs[i];
    c.members.reserve(nbhd[i].size());
    for (std::size_t j : nbhd[i]) c.members.push_back(segs[j]);
    c.center = cluster_center(c.members);
    clusters.push_back(std::move(c));
  }
  return clusters;
}

/// Smallest positive gap between consecutive pings, used as the default slot
/// width when none is configured.
inline double detect_ping_interval(std::span<const SensorTrajectory> dataset) {
  double best = std::numeric_limits<double>::infinity();
  for (const SensorTrajectory& tr : dataset) {
    for (std::size_t i = 0; i + 1 < tr.points.size(); ++i) {
      const double gap = tr.points[i + 1].t - tr.points[i].t;
      if (gap > 0.0) best = std::min(best, gap);
    }
  }
  if (!std::isfinite(best)) {
    throw ValidationError("cannot derive a slot width: no consecutive pings in the dataset");
  }
  return best;
}

/// Full run: segmentize every trajectory, partition the segments into time
/// slots, cluster each slot independently.
inline std::map<std::int64_t, std::vector<Cluster>> run(
    std::span<const SensorTrajectory> dataset, ClusteringParams params, double t0 = 0.0) {
  params.validate();
  std::vector<TrajectorySegment> all;
  for (const SensorTrajectory& tr : dataset) {
    auto segs = segmentize(tr);
    all.insert(all.end(), std::make_move_iterator(segs.begin()),
               std::make_move_iterator(segs.end()));
  }
  std::map<std::int64_t, std::vector<Cluster>> result;
  if (all.empty()) return result;
  if (params.delta_t == 0.0) params.delta_t = detect_ping_interval(dataset);
  for (auto& [slot, segs] : slot_partition(all, params.delta_t, t0)) {
    result.emplace(slot, cluster_slot(segs, params));
  }
  return result;
}

}  // namespace mcs
