#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "mcs/errors.hpp"

namespace mcs {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEarthRadiusM = 6371000.0;  // mean spherical radius

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Planar point. x is the abscissa (longitude degrees or projected units),
/// y the ordinate (latitude degrees or projected units).
struct GeoPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct TimestampedPoint {
  GeoPoint point;
  double t = 0.0;  // seconds

  friend bool operator==(const TimestampedPoint&, const TimestampedPoint&) = default;
};

/// Directed edge between two consecutive pings of one sensor.
struct TrajectorySegment {
  std::string sensor_id;
  TimestampedPoint start;
  TimestampedPoint end;

  double dx() const { return end.point.x - start.point.x; }
  double dy() const { return end.point.y - start.point.y; }
  double dt() const { return end.t - start.t; }
  double length() const { return std::hypot(dx(), dy()); }
  double squared_length() const { return dx() * dx() + dy() * dy(); }
  bool spatially_degenerate() const { return dx() == 0.0 && dy() == 0.0; }

  friend bool operator==(const TrajectorySegment&, const TrajectorySegment&) = default;
};

inline double euclidean_distance(const GeoPoint& a, const GeoPoint& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

struct LineProjection {
  GeoPoint foot;   // orthogonal projection onto the infinite line
  double offset;   // signed position along the segment direction, 0 at start
};

/// Projects p onto the infinite line through seg.
inline LineProjection project_onto_line(const GeoPoint& p, const TrajectorySegment& seg) {
  if (seg.spatially_degenerate()) {
    throw DegenerateSegmentError("cannot project onto a zero-length segment");
  }
  const double len = seg.length();
  const double ux = seg.dx() / len;
  const double uy = seg.dy() / len;
  const double offset = (p.x - seg.start.point.x) * ux + (p.y - seg.start.point.y) * uy;
  return {{seg.start.point.x + offset * ux, seg.start.point.y + offset * uy}, offset};
}

/// Distance from p to the closed segment [a, b].
inline double point_to_segment_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  if (len2 == 0.0) return euclidean_distance(p, a);
  double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return euclidean_distance(p, {a.x + t * vx, a.y + t * vy});
}

/// Lehmer-mean combination of the perpendicular offsets of base_other's
/// endpoints from the line through base. 0 when both offsets vanish.
inline double perpendicular_distance(const TrajectorySegment& base, const TrajectorySegment& other) {
  const LineProjection ps = project_onto_line(other.start.point, base);
  const LineProjection pe = project_onto_line(other.end.point, base);
  const double a = euclidean_distance(other.start.point, ps.foot);
  const double b = euclidean_distance(other.end.point, pe.foot);
  const double sum = a + b;
  if (sum == 0.0) return 0.0;
  return (a * a + b * b) / sum;
}

/// min of the along-line gaps between base's endpoints and the projections of
/// other's endpoints (start against start, end against end).
inline double parallel_distance(const TrajectorySegment& base, const TrajectorySegment& other) {
  const LineProjection ps = project_onto_line(other.start.point, base);
  const LineProjection pe = project_onto_line(other.end.point, base);
  const double gap_start = std::abs(ps.offset);
  const double gap_end = std::abs(pe.offset - base.length());
  return std::min(gap_start, gap_end);
}

/// length(other) * sin(theta) with theta in [0, 180] between the directions.
inline double angle_distance(const TrajectorySegment& base, const TrajectorySegment& other) {
  if (base.spatially_degenerate()) {
    throw DegenerateSegmentError("angle distance needs a non-degenerate base segment");
  }
  // |cross| / |base| equals length(other) * sin(theta) without a trig call.
  const double cross = base.dx() * other.dy() - base.dy() * other.dx();
  return std::abs(cross) / base.length();
}

namespace detail {

inline std::array<double, 4> coordinate_key(const TrajectorySegment& ts) {
  return {ts.start.point.x, ts.start.point.y, ts.end.point.x, ts.end.point.y};
}

// Projection base selection: longer segment wins, exact length ties go to the
// lexicographically smaller coordinate tuple. Keeps the distance symmetric.
inline bool base_first(const TrajectorySegment& a, const TrajectorySegment& b) {
  const double la = a.squared_length();
  const double lb = b.squared_length();
  if (la != lb) return la > lb;
  return coordinate_key(a) <= coordinate_key(b);
}

}  // namespace detail

/// Three-part distance between trajectory segments: perpendicular + parallel +
/// angle, with the longer segment as projection base. Symmetric; zero for
/// identical segments. Two spatially degenerate segments fall back to the
/// distance between their start points.
inline double segment_distance(const TrajectorySegment& a, const TrajectorySegment& b) {
  if (a.start.point == b.start.point && a.end.point == b.end.point) {
    return 0.0;  // identical geometry, all three terms vanish exactly
  }
  const bool a_deg = a.spatially_degenerate();
  const bool b_deg = b.spatially_degenerate();
  if (a_deg && b_deg) return euclidean_distance(a.start.point, b.start.point);
  const TrajectorySegment* base = &a;
  const TrajectorySegment* other = &b;
  if (a_deg || (!b_deg && !detail::base_first(a, b))) std::swap(base, other);
  return perpendicular_distance(*base, *other) + parallel_distance(*base, *other) +
         angle_distance(*base, *other);
}

/// Convergence measure from the start-point gap d1 and end-point gap d2:
/// 1 when d1 == d2 (parallel), -1 when diverging (d1 < d2), d2/d1 otherwise.
inline double following_degree(const TrajectorySegment& a, const TrajectorySegment& b) {
  const double d1 = euclidean_distance(a.start.point, b.start.point);
  const double d2 = euclidean_distance(a.end.point, b.end.point);
  if (d1 == d2) return 1.0;
  if (d1 < d2) return -1.0;
  return d2 / d1;
}

/// Counterclockwise angle of (end - start) against the east-pointing axis,
/// normalized to [0, 360).
inline double direction(const TrajectorySegment& ts) {
  if (ts.spatially_degenerate()) {
    throw DegenerateSegmentError("direction of a zero-length segment is undefined");
  }
  double deg = rad_to_deg(std::atan2(ts.dy(), ts.dx()));
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

/// Planar displacement over elapsed time, in coordinate units per second.
inline double speed(const TrajectorySegment& ts) {
  const double elapsed = ts.dt();
  if (!(elapsed > 0.0)) {
    throw InvalidSegmentError("segment " + ts.sensor_id + ": non-positive time delta");
  }
  return ts.length() / elapsed;
}

/// Smallest absolute difference between two angles in degrees, in [0, 180].
inline double angular_difference(double a_deg, double b_deg) {
  double diff = std::fmod(std::abs(a_deg - b_deg), 360.0);
  if (diff > 180.0) diff = 360.0 - diff;
  return diff;
}

/// Planar bearing from one point to another, in [0, 360).
inline double bearing(const GeoPoint& from, const GeoPoint& to) {
  if (from == to) {
    throw DegenerateSegmentError("bearing between identical points is undefined");
  }
  double deg = rad_to_deg(std::atan2(to.y - from.y, to.x - from.x));
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

/// Great-circle distance in meters (haversine, spherical earth). Inputs are
/// geographic: y is latitude, x is longitude, both in degrees.
inline double geodesic_distance(const GeoPoint& a, const GeoPoint& b) {
  for (const GeoPoint& p : {a, b}) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.y < -90.0 || p.y > 90.0 ||
        p.x < -180.0 || p.x > 180.0) {
      throw InvalidCoordinateError("latitude/longitude out of range");
    }
  }
  const double lat1 = deg_to_rad(a.y);
  const double lat2 = deg_to_rad(b.y);
  const double dlat = lat2 - lat1;
  const double dlon = deg_to_rad(b.x - a.x);
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

}  // namespace mcs
