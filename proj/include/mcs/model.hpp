#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mcs/errors.hpp"
#include "mcs/geo.hpp"

namespace mcs {

/// Stop-to-stop link of a transit line.
struct RouteSegment {
  GeoPoint departure;      // n_d
  GeoPoint arrival;        // n_a
  double dist_m = 0.0;     // geodesic length, meters
  double speed_mps = 0.0;  // average travel speed, meters per second
  double travel_time_s = 0.0;  // average travel time, seconds
};

/// Directed transit line: chained route segments plus a schedule. Inbound and
/// outbound directions are distinct services.
struct JourneyService {
  std::string id;
  std::vector<RouteSegment> segments;
  std::vector<double> trip_departures;  // departure times of scheduled trips
  double headway_s = 0.0;               // optional average headway
};

/// Dynamic vehicle state estimated from cluster centers.
struct JourneyVehicle {
  std::string service_id;
  double trip_departure = 0.0;      // departure time from the journey start
  std::size_t segment_index = 0;    // current route segment
  GeoPoint location;
  double segment_departure_t = 0.0;  // t_d
  double arrival_estimate_t = 0.0;   // t_a, next-stop arrival estimate
};

/// Ordered pings of one crowdsourced sensor.
struct SensorTrajectory {
  std::string sensor_id;
  std::vector<TimestampedPoint> points;
};

/// Mean displacement vector of a cluster's member segments, anchored at the
/// mean member start.
struct ClusterCenter {
  double dx = 0.0;
  double dy = 0.0;
  double dt = 0.0;
  TimestampedPoint anchor;

  GeoPoint end_point() const { return {anchor.point.x + dx, anchor.point.y + dy}; }
  double end_time() const { return anchor.t + dt; }
  GeoPoint midpoint() const { return {anchor.point.x + dx / 2.0, anchor.point.y + dy / 2.0}; }
  double ground_speed() const { return dt > 0.0 ? std::hypot(dx, dy) / dt : 0.0; }

  TrajectorySegment as_segment(std::string id = "center") const {
    return {std::move(id), anchor, {end_point(), end_time()}};
  }
};

struct Cluster {
  TrajectorySegment core;
  std::vector<TrajectorySegment> members;
  ClusterCenter center;
};

/// Breaks a trajectory of L pings into its L-1 consecutive segments.
inline std::vector<TrajectorySegment> segmentize(const SensorTrajectory& tr) {
  std::vector<TrajectorySegment> segments;
  if (tr.points.size() < 2) return segments;
  segments.reserve(tr.points.size() - 1);
  for (std::size_t i = 0; i + 1 < tr.points.size(); ++i) {
    if (!(tr.points[i].t < tr.points[i + 1].t)) {
      throw MalformedTrajectoryError(tr.sensor_id, i + 1);
    }
    segments.push_back({tr.sensor_id, tr.points[i], tr.points[i + 1]});
  }
  return segments;
}

/// Assigns each segment to slot floor((start.t - t0) / delta_t).
inline std::map<std::int64_t, std::vector<TrajectorySegment>> slot_partition(
    std::span<const TrajectorySegment> segments, double delta_t, double t0 = 0.0) {
  if (!(delta_t > 0.0)) {
    throw ValidationError("slot width must be positive");
  }
  std::map<std::int64_t, std::vector<TrajectorySegment>> slots;
  for (const TrajectorySegment& ts : segments) {
    const auto slot = static_cast<std::int64_t>(std::floor((ts.start.t - t0) / delta_t));
    slots[slot].push_back(ts);
  }
  return slots;
}

/// Stop sequence of a service as a polyline.
inline std::vector<GeoPoint> route_polyline(const JourneyService& service) {
  std::vector<GeoPoint> polyline;
  if (service.segments.empty()) return polyline;
  polyline.reserve(service.segments.size() + 1);
  polyline.push_back(service.segments.front().departure);
  for (const RouteSegment& rs : service.segments) polyline.push_back(rs.arrival);
  return polyline;
}

/// Checks segment chaining and the dist/speed/att self-consistency bound.
inline void validate_service(const JourneyService& service) {
  for (std::size_t i = 0; i + 1 < service.segments.size(); ++i) {
    if (!(service.segments[i].arrival == service.segments[i + 1].departure)) {
      throw ValidationError("service " + service.id + ": route segment " +
                            std::to_string(i) + " does not chain into segment " +
                            std::to_string(i + 1));
    }
  }
  for (std::size_t i = 0; i < service.segments.size(); ++i) {
    const RouteSegment& rs = service.segments[i];
    if (rs.dist_m < 0.0 || rs.speed_mps < 0.0 || rs.travel_time_s < 0.0) {
      throw ValidationError("service " + service.id + ": negative attribute on segment " +
                            std::to_string(i));
    }
    if (rs.speed_mps > 0.0) {
      const double implied = rs.dist_m / rs.speed_mps;
      if (std::abs(implied - rs.travel_time_s) / std::max(rs.travel_time_s, 1.0) > 0.5) {
        throw ValidationError("service " + service.id + ": segment " + std::to_string(i) +
                              " travel time is inconsistent with dist/speed");
      }
    }
  }
}

}  // namespace mcs
