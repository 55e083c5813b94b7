#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcs/errors.hpp"
#include "mcs/geo.hpp"
#include "mcs/model.hpp"

namespace mcs {

/// Intra-cluster compactness: for each cluster, the full pairwise member
/// distance sum scaled by 1/(2|C|). Lower is tighter.
inline double sse(std::span<const Cluster> clusters) {
  double total = 0.0;
  for (const Cluster& c : clusters) {
    if (c.members.empty()) continue;
    double pairwise = 0.0;
    for (std::size_t k = 0; k < c.members.size(); ++k) {
      for (std::size_t l = k + 1; l < c.members.size(); ++l) {
        pairwise += segment_distance(c.members[k], c.members[l]);
      }
    }
    // Both orderings of each pair count; the 1/2 cancels the double counting.
    total += pairwise / static_cast<double>(c.members.size());
  }
  return total;
}

/// Compactness over separation, undefined for fewer than two clusters or
/// coincident centers.
struct TraXb {
  std::optional<double> value;
  std::string undefined_reason;
};

inline TraXb tra_xb(std::span<const Cluster> clusters) {
  if (clusters.size() < 2) {
    return {std::nullopt, "fewer than 2 clusters"};
  }
  std::vector<TrajectorySegment> center_segs;
  center_segs.reserve(clusters.size());
  for (const Cluster& c : clusters) center_segs.push_back(c.center.as_segment());

  double numerator = 0.0;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (const TrajectorySegment& ts : clusters[i].members) {
      numerator += segment_distance(ts, center_segs[i]);
    }
  }
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < center_segs.size(); ++i) {
    for (std::size_t j = i + 1; j < center_segs.size(); ++j) {
      min_sep = std::min(min_sep, segment_distance(center_segs[i], center_segs[j]));
    }
  }
  if (min_sep == 0.0) {
    return {std::nullopt, "coincident cluster centers"};
  }
  return {numerator / min_sep, {}};
}

/// Distance from the true arrival node to the closest cluster-center end
/// point (the estimated destination).
inline double spatial_error(const GeoPoint& true_arrival_node,
                            std::span<const ClusterCenter> centers) {
  if (centers.empty()) {
    throw NoEstimateError("no cluster centers available for a destination estimate");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const ClusterCenter& cc : centers) {
    best = std::min(best, euclidean_distance(true_arrival_node, cc.end_point()));
  }
  return best;
}

inline double spatial_error(const JourneyVehicle& vehicle, const JourneyService& service,
                            std::span<const ClusterCenter> centers) {
  if (vehicle.segment_index >= service.segments.size()) {
    throw ValidationError("vehicle route segment index out of range for service " + service.id);
  }
  return spatial_error(service.segments[vehicle.segment_index].arrival, centers);
}

/// Signed gap between the actual and the estimated average travel time.
inline double temporal_error(double actual_travel_time_s, double estimated_travel_time_s) {
  return actual_travel_time_s - estimated_travel_time_s;
}

}  // namespace mcs
