#pragma once

// Shared helpers for the test suites: an independently coded distance oracle,
// deterministic random generators and small fixture builders.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mcs/geo.hpp"
#include "mcs/model.hpp"

namespace testsupport {

inline mcs::TrajectorySegment seg(double x1, double y1, double x2, double y2, double t1 = 0.0,
                                  double t2 = 1.0, std::string id = "s") {
  return {std::move(id), {{x1, y1}, t1}, {{x2, y2}, t2}};
}

// Brute-force three-part distance, written against the definitions with a
// different algebraic route than the library (parametric projection, explicit
// angle via acos). Used as the oracle for the kernel tests.
inline double oracle_distance(const mcs::TrajectorySegment& a, const mcs::TrajectorySegment& b) {
  const double len_a = std::hypot(a.end.point.x - a.start.point.x, a.end.point.y - a.start.point.y);
  const double len_b = std::hypot(b.end.point.x - b.start.point.x, b.end.point.y - b.start.point.y);
  if (len_a == 0.0 && len_b == 0.0) {
    return std::hypot(b.start.point.x - a.start.point.x, b.start.point.y - a.start.point.y);
  }

  const mcs::TrajectorySegment* base = &a;
  const mcs::TrajectorySegment* other = &b;
  const auto key = [](const mcs::TrajectorySegment& s) {
    return std::array<double, 4>{s.start.point.x, s.start.point.y, s.end.point.x, s.end.point.y};
  };
  const bool swap = len_b > len_a || (len_b == len_a && key(b) < key(a));
  if (swap) std::swap(base, other);

  const double sx = base->start.point.x, sy = base->start.point.y;
  const double vx = base->end.point.x - sx, vy = base->end.point.y - sy;
  const double len2 = vx * vx + vy * vy;
  const double len = std::sqrt(len2);

  // parametric position of p along the base line, in [0, 1] on the segment
  const auto param = [&](const mcs::GeoPoint& p) {
    return ((p.x - sx) * vx + (p.y - sy) * vy) / len2;
  };
  const auto perp = [&](const mcs::GeoPoint& p) {
    const double t = param(p);
    const double fx = sx + t * vx, fy = sy + t * vy;
    return std::hypot(p.x - fx, p.y - fy);
  };

  const double lp1 = perp(other->start.point);
  const double lp2 = perp(other->end.point);
  const double d_perp = (lp1 + lp2) == 0.0 ? 0.0 : (lp1 * lp1 + lp2 * lp2) / (lp1 + lp2);

  const double par1 = std::abs(param(other->start.point)) * len;
  const double par2 = std::abs(param(other->end.point) - 1.0) * len;
  const double d_par = std::min(par1, par2);

  double d_angle = 0.0;
  const double owx = other->end.point.x - other->start.point.x;
  const double owy = other->end.point.y - other->start.point.y;
  const double olen = std::hypot(owx, owy);
  if (olen > 0.0) {
    double cos_theta = (vx * owx + vy * owy) / (len * olen);
    cos_theta = std::clamp(cos_theta, -1.0, 1.0);
    d_angle = olen * std::sin(std::acos(cos_theta));
  }
  return d_perp + d_par + d_angle;
}

class Random {
 public:
  explicit Random(std::uint64_t s) : engine_(s) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  double gaussian(double sigma) {
    double u1 = uniform(0.0, 1.0);
    while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
    const double u2 = uniform(0.0, 1.0);
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * mcs::kPi * u2);
  }

  std::uint64_t integer(std::uint64_t n) { return engine_() % n; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline mcs::TrajectorySegment random_segment(Random& rng, const std::string& id = "r") {
  const double t0 = rng.uniform(0.0, 100.0);
  return {id,
          {{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)}, t0},
          {{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)}, t0 + rng.uniform(0.1, 10.0)}};
}

// A straight-line fleet: `count` sensors riding a vehicle that moves from
// `origin` with per-slot displacement (step_x, step_y), pinging every
// `interval` seconds. Jitter sigma 0 gives identical co-located segments.
inline std::vector<mcs::SensorTrajectory> fleet(const std::string& prefix, std::size_t count,
                                                mcs::GeoPoint origin, double step_x, double step_y,
                                                std::size_t pings, double interval, double sigma,
                                                Random& rng) {
  std::vector<mcs::SensorTrajectory> sensors;
  sensors.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    mcs::SensorTrajectory tr;
    tr.sensor_id = prefix + std::to_string(s);
    for (std::size_t k = 0; k < pings; ++k) {
      mcs::GeoPoint p{origin.x + step_x * static_cast<double>(k),
                      origin.y + step_y * static_cast<double>(k)};
      if (sigma > 0.0) {
        p.x += rng.gaussian(sigma);
        p.y += rng.gaussian(sigma);
      }
      tr.points.push_back({p, interval * static_cast<double>(k)});
    }
    sensors.push_back(std::move(tr));
  }
  return sensors;
}

}  // namespace testsupport
