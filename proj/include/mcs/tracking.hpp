#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mcs/errors.hpp"
#include "mcs/geo.hpp"
#include "mcs/model.hpp"

namespace mcs {

struct TrackingParams {
  double assignment_gate = 0.01;     // max center-to-route distance, coordinate units
  double association_gate = 0.01;    // max predicted-position gap, coordinate units
  int max_missed_slots = 3;          // track expiry
  double direction_gate_deg = 90.0;  // center vs route-segment bearing compatibility
};

struct ServiceAssignment {
  std::size_t service_index = 0;
  std::size_t segment_index = 0;
  double distance = 0.0;
};

/// One vehicle hypothesis: the per-slot cluster centers attributed to it plus
/// the derived vehicle state.
struct VehicleTrack {
  int id = 0;
  JourneyVehicle vehicle;
  std::vector<std::pair<std::int64_t, ClusterCenter>> history;
  std::optional<ServiceAssignment> assignment;
  int missed_slots = 0;

  std::int64_t last_slot() const { return history.empty() ? 0 : history.back().first; }
};

/// Nearest direction-compatible route segment over all services, or nothing
/// when the closest match exceeds the gate. Ties break on (distance, service
/// order, segment order), so the result does not depend on list permutation
/// when service ids are unique.
inline std::optional<ServiceAssignment> assign_to_service(
    const ClusterCenter& center, std::span<const JourneyService> services,
    const TrackingParams& params = {}) {
  if (services.empty()) {
    throw ValidationError("service assignment requires at least one service");
  }
  const GeoPoint mid = center.midpoint();
  const bool has_direction = !(center.dx == 0.0 && center.dy == 0.0);
  double center_dir = 0.0;
  if (has_direction) {
    center_dir = rad_to_deg(std::atan2(center.dy, center.dx));
    if (center_dir < 0.0) center_dir += 360.0;
    if (center_dir >= 360.0) center_dir = 0.0;
  }

  std::vector<std::size_t> order(services.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return services[a].id < services[b].id; });

  std::optional<ServiceAssignment> best;
  for (std::size_t s : order) {
    const JourneyService& service = services[s];
    for (std::size_t k = 0; k < service.segments.size(); ++k) {
      const RouteSegment& rs = service.segments[k];
      if (rs.departure == rs.arrival) continue;
      if (has_direction) {
        const double seg_bearing = bearing(rs.departure, rs.arrival);
        if (angular_difference(center_dir, seg_bearing) > params.direction_gate_deg) continue;
      }
      const double d = point_to_segment_distance(mid, rs.departure, rs.arrival);
      if (d > params.assignment_gate) continue;
      if (!best || d < best->distance) best = ServiceAssignment{s, k, d};
    }
  }
  return best;
}

/// Appends a center observation and refreshes the vehicle state: location
/// moves to the center's end point and the next-stop arrival estimate is
/// recomputed kinematically from the remaining distance along the assigned
/// route segment. A stationary center leaves the previous estimate in place.
inline VehicleTrack update_track(VehicleTrack track, std::int64_t slot, const ClusterCenter& center,
                                 std::span<const JourneyService> services,
                                 const TrackingParams& params = {}) {
  if (!track.history.empty() && slot <= track.last_slot()) {
    throw ValidationError("track update slots must be strictly increasing");
  }
  std::optional<ServiceAssignment> assignment;
  if (!services.empty()) assignment = assign_to_service(center, services, params);
  if (assignment &&
      (!track.assignment || assignment->service_index != track.assignment->service_index ||
       assignment->segment_index != track.assignment->segment_index)) {
    track.vehicle.segment_departure_t = center.anchor.t;
  }
  if (assignment) {
    track.vehicle.service_id = services[assignment->service_index].id;
    track.vehicle.segment_index = assignment->segment_index;
  }
  track.assignment = assignment;

  track.history.emplace_back(slot, center);
  track.vehicle.location = center.end_point();
  track.missed_slots = 0;

  const double v = center.ground_speed();
  if (v > 0.0) {
    double remaining = 0.0;
    if (assignment) {
      const RouteSegment& rs =
          services[assignment->service_index].segments[assignment->segment_index];
      const TrajectorySegment route{{}, {rs.departure, 0.0}, {rs.arrival, 0.0}};
      const LineProjection proj = project_onto_line(track.vehicle.location, route);
      const double along = std::clamp(proj.offset, 0.0, route.length());
      remaining = route.length() - along;
    }
    track.vehicle.arrival_estimate_t = center.end_time() + remaining / v;
  }
  track.vehicle.arrival_estimate_t =
      std::max(track.vehicle.arrival_estimate_t, track.vehicle.segment_departure_t);
  return track;
}

struct Association {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track index, center index)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_centers;
};

/// Greedy gated nearest-neighbor matching between the tracks' predicted
/// positions (last location advanced by the last observed velocity) and the
/// centers' midpoints. Pairs are taken in ascending (distance, track id,
/// center index) order.
inline Association associate_across_slots(std::span<const VehicleTrack> tracks,
                                          std::span<const ClusterCenter> centers,
                                          std::int64_t slot, double slot_seconds,
                                          const TrackingParams& params = {}) {
  struct Pair {
    double distance;
    int track_id;
    std::size_t track_index;
    std::size_t center_index;
  };
  std::vector<Pair> pairs;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const VehicleTrack& track = tracks[t];
    GeoPoint predicted = track.vehicle.location;
    if (!track.history.empty()) {
      const ClusterCenter& last = track.history.back().second;
      const double horizon =
          static_cast<double>(slot - track.last_slot()) * slot_seconds;
      if (last.dt > 0.0 && horizon > 0.0) {
        predicted.x += last.dx / last.dt * horizon;
        predicted.y += last.dy / last.dt * horizon;
      }
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = euclidean_distance(predicted, centers[c].midpoint());
      if (d <= params.association_gate) pairs.push_back({d, track.id, t, c});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.distance, a.track_id, a.center_index) <
           std::tie(b.distance, b.track_id, b.center_index);
  });

  Association out;
  std::vector<bool> track_used(tracks.size(), false);
  std::vector<bool> center_used(centers.size(), false);
  for (const Pair& p : pairs) {
    if (track_used[p.track_index] || center_used[p.center_index]) continue;
    track_used[p.track_index] = true;
    center_used[p.center_index] = true;
    out.matches.emplace_back(p.track_index, p.center_index);
  }
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    if (!track_used[t]) out.unmatched_tracks.push_back(t);
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (!center_used[c]) out.unmatched_centers.push_back(c);
  }
  return out;
}

/// Owns the track set across slots: associates, updates, spawns and expires.
class Tracker {
 public:
  Tracker(std::vector<JourneyService> services, double slot_seconds, TrackingParams params = {})
      : services_(std::move(services)), slot_seconds_(slot_seconds), params_(params) {}

  const std::vector<VehicleTrack>& step(std::int64_t slot, std::span<const ClusterCenter> centers) {
    const Association assoc =
        associate_across_slots(tracks_, centers, slot, slot_seconds_, params_);
    for (const auto& [t, c] : assoc.matches) {
      tracks_[t] = update_track(std::move(tracks_[t]), slot, centers[c], services_, params_);
    }
    for (std::size_t t : assoc.unmatched_tracks) ++tracks_[t].missed_slots;
    std::erase_if(tracks_, [&](const VehicleTrack& tr) {
      return tr.missed_slots >= params_.max_missed_slots;
    });
    for (std::size_t c : assoc.unmatched_centers) {
      VehicleTrack track;
      track.id = next_id_++;
      track.vehicle.trip_departure = centers[c].anchor.t;
      track.vehicle.location = centers[c].anchor.point;
      track.vehicle.segment_departure_t = centers[c].anchor.t;
      track.vehicle.arrival_estimate_t = centers[c].end_time();
      tracks_.push_back(update_track(std::move(track), slot, centers[c], services_, params_));
    }
    return tracks_;
  }

  const std::vector<VehicleTrack>& tracks() const { return tracks_; }
  std::span<const JourneyService> services() const { return services_; }

 private:
  std::vector<JourneyService> services_;
  double slot_seconds_;
  TrackingParams params_;
  std::vector<VehicleTrack> tracks_;
  int next_id_ = 0;
};

}  // namespace mcs
