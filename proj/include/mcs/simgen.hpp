#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mcs/errors.hpp"
#include "mcs/geo.hpp"
#include "mcs/model.hpp"

namespace mcs {

struct SimulationConfig {
  std::size_t sensors_per_segment = 40;
  double position_jitter = 0.002 / 6.0;  // std-dev in coordinate units; 3*sigma ~ epsilon/2
  double ping_interval_s = 10.0;
  double off_route_fraction = 0.0;  // noise sensors as a fraction of the on-route count
  std::uint64_t rng_seed = 0;
  double prefilter_radius_m = 10.0;

  void validate() const {
    if (position_jitter < 0.0) throw ValidationError("position jitter must be non-negative");
    if (!(ping_interval_s > 0.0)) throw ValidationError("ping interval must be positive");
    if (off_route_fraction < 0.0 || off_route_fraction > 1.0) {
      throw ValidationError("off-route fraction must lie in [0, 1]");
    }
    if (prefilter_radius_m < 0.0) throw ValidationError("prefilter radius must be non-negative");
  }
};

/// Stop times of one scheduled trip, one entry per stop of the service.
struct TripSchedule {
  std::string service_id;
  std::vector<double> stop_times;

  double departure() const { return stop_times.front(); }
  double arrival() const { return stop_times.back(); }
};

struct Schedule {
  std::vector<JourneyService> services;
  std::vector<TripSchedule> trips;

  const JourneyService& service_of(const TripSchedule& trip) const {
    for (const JourneyService& s : services) {
      if (s.id == trip.service_id) return s;
    }
    throw ValidationError("trip references unknown service " + trip.service_id);
  }
};

namespace detail {

// Deterministic, platform-independent random layer. std distributions are
// implementation-defined, which would break byte-identical reruns.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
    // warm up so nearby seeds decorrelate
    for (int i = 0; i < 4; ++i) next();
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  return z ^ (z >> 31);
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

inline double parse_double(const std::string& tok, const std::string& source, std::size_t line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(source, line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size() || !std::isfinite(v)) {
    throw ParseError(source, line, "expected a finite number, got '" + tok + "'");
  }
  return v;
}

}  // namespace detail

/// Parses the schedule format: a version line, then per service a `service`
/// line, its ordered `stop <id> <lat> <lon>` lines, and one `trip <t...>` line
/// per scheduled trip with a strictly increasing time per stop. Route segment
/// distance comes from the geodesic stop gap, travel time from the timetable,
/// speed from their ratio.
inline Schedule load_schedule(std::istream& in, const std::string& source = "schedule") {
  Schedule schedule;
  std::string line;
  std::size_t line_no = 0;

  std::string version;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    version = line;
    break;
  }
  if (version != "# mcsschedule v1") {
    throw ParseError(source, line_no, "expected header '# mcsschedule v1'");
  }

  struct RawService {
    std::string id;
    std::size_t line_no;
    std::vector<std::string> stop_ids;
    std::vector<GeoPoint> stops;
    std::vector<std::pair<std::size_t, std::vector<double>>> trips;  // (line, times)
  };
  std::vector<RawService> raw;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tokens = detail::split_ws(line);
    if (tokens[0] == "service") {
      if (tokens.size() != 2) throw ParseError(source, line_no, "service line needs exactly an id");
      for (const RawService& s : raw) {
        if (s.id == tokens[1]) throw ParseError(source, line_no, "duplicate service id " + tokens[1]);
      }
      raw.push_back({tokens[1], line_no, {}, {}, {}});
    } else if (tokens[0] == "stop") {
      if (raw.empty()) throw ParseError(source, line_no, "stop before any service");
      if (tokens.size() != 4) {
        throw ParseError(source, line_no, "stop line needs id, latitude and longitude");
      }
      const double lat = detail::parse_double(tokens[2], source, line_no);
      const double lon = detail::parse_double(tokens[3], source, line_no);
      raw.back().stop_ids.push_back(tokens[1]);
      raw.back().stops.push_back({lon, lat});
    } else if (tokens[0] == "trip") {
      if (raw.empty()) throw ParseError(source, line_no, "trip before any service");
      std::vector<double> times;
      times.reserve(tokens.size() - 1);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        times.push_back(detail::parse_double(tokens[i], source, line_no));
      }
      raw.back().trips.emplace_back(line_no, std::move(times));
    } else {
      throw ParseError(source, line_no, "unknown record '" + tokens[0] + "'");
    }
  }

  for (const RawService& rs : raw) {
    if (rs.stops.size() < 2) {
      throw ParseError(source, rs.line_no, "service " + rs.id + " needs at least 2 stops");
    }
    JourneyService service;
    service.id = rs.id;
    const std::size_t n_segments = rs.stops.size() - 1;
    std::vector<double> att_sum(n_segments, 0.0);
    for (const auto& [trip_line, times] : rs.trips) {
      if (times.size() != rs.stops.size()) {
        throw ParseError(source, trip_line,
                         "trip has " + std::to_string(times.size()) + " times for " +
                             std::to_string(rs.stops.size()) + " stops");
      }
      for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        if (!(times[i] < times[i + 1])) {
          throw ParseError(source, trip_line, "trip times must be strictly increasing");
        }
        att_sum[i] += times[i + 1] - times[i];
      }
      service.trip_departures.push_back(times.front());
      schedule.trips.push_back({rs.id, times});
    }
    for (std::size_t i = 0; i < n_segments; ++i) {
      RouteSegment seg;
      seg.departure = rs.stops[i];
      seg.arrival = rs.stops[i + 1];
      seg.dist_m = geodesic_distance(rs.stops[i], rs.stops[i + 1]);
      seg.travel_time_s = rs.trips.empty() ? 0.0 : att_sum[i] / static_cast<double>(rs.trips.size());
      seg.speed_mps = seg.travel_time_s > 0.0 ? seg.dist_m / seg.travel_time_s : 0.0;
      service.segments.push_back(seg);
    }
    if (service.trip_departures.size() > 1) {
      const auto& d = service.trip_departures;
      service.headway_s = (d.back() - d.front()) / static_cast<double>(d.size() - 1);
    }
    validate_service(service);
    schedule.services.push_back(std::move(service));
  }
  return schedule;
}

inline Schedule load_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schedule file " + path);
  return load_schedule(in, path);
}

/// Timetable position of the trip's vehicle at time t (piecewise linear
/// between stops; clamped to the terminals).
inline GeoPoint vehicle_position(const JourneyService& service, const TripSchedule& trip,
                                 double t) {
  const std::vector<double>& times = trip.stop_times;
  if (t <= times.front()) return service.segments.front().departure;
  if (t >= times.back()) return service.segments.back().arrival;
  std::size_t i = 0;
  while (i + 2 < times.size() && t >= times[i + 1]) ++i;
  const double f = (t - times[i]) / (times[i + 1] - times[i]);
  const GeoPoint& a = service.segments[i].departure;
  const GeoPoint& b = service.segments[i].arrival;
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

/// Index of the route segment being traversed at time t.
inline std::size_t segment_at(const TripSchedule& trip, double t) {
  const std::vector<double>& times = trip.stop_times;
  std::size_t i = 0;
  while (i + 2 < times.size() && t >= times[i + 1]) ++i;
  return i;
}

/// Simulates the riders of one trip: sensors_per_segment sensors are allocated
/// per route segment and ride the whole trip, pinging on the global
/// ping-interval grid at the vehicle's timetable position plus isotropic
/// Gaussian jitter. Fully determined by (schedule, config, trip_index).
inline std::vector<SensorTrajectory> generate_sensors(const JourneyService& service,
                                                      const TripSchedule& trip,
                                                      std::size_t trip_index,
                                                      const SimulationConfig& config) {
  config.validate();
  std::vector<SensorTrajectory> sensors;
  const std::size_t total = config.sensors_per_segment * service.segments.size();
  if (total == 0) return sensors;

  // Pings sit on the global k * ping_interval grid so that sensors riding the
  // same vehicle land in the same time slots.
  const double pi_s = config.ping_interval_s;
  const auto first_k = static_cast<std::int64_t>(std::ceil(trip.departure() / pi_s - 1e-9));
  std::vector<double> ping_times;
  for (std::int64_t k = first_k; static_cast<double>(k) * pi_s <= trip.arrival() + 1e-9; ++k) {
    ping_times.push_back(static_cast<double>(k) * pi_s);
  }
  if (ping_times.empty()) return sensors;

  detail::Rng rng(detail::mix_seed(config.rng_seed, trip_index));
  sensors.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    SensorTrajectory tr;
    tr.sensor_id = service.id + "-t" + std::to_string(trip_index) + "-s" + std::to_string(k);
    tr.points.reserve(ping_times.size());
    for (const double t : ping_times) {
      GeoPoint p = vehicle_position(service, trip, t);
      if (config.position_jitter > 0.0) {
        p.x += config.position_jitter * rng.gaussian();
        p.y += config.position_jitter * rng.gaussian();
      }
      tr.points.push_back({p, t});
    }
    sensors.push_back(std::move(tr));
  }
  return sensors;
}

struct BoundingBox {
  GeoPoint min;
  GeoPoint max;

  bool empty() const { return !(min.x < max.x) || !(min.y < max.y); }
};

/// Random-walk wanderers inside the region, pinging on the same global grid
/// over [t_begin, t_end]. Step scale is 1% of the larger region extent.
inline std::vector<SensorTrajectory> generate_noise_sensors(const BoundingBox& region,
                                                            std::size_t count, double t_begin,
                                                            double t_end,
                                                            const SimulationConfig& config) {
  config.validate();
  if (region.empty()) throw ValidationError("noise region must have positive extent");
  std::vector<SensorTrajectory> sensors;
  const double pi_s = config.ping_interval_s;
  const auto first_k = static_cast<std::int64_t>(std::ceil(t_begin / pi_s - 1e-9));
  const double width = region.max.x - region.min.x;
  const double height = region.max.y - region.min.y;
  const double step = 0.01 * std::max(width, height);

  sensors.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    detail::Rng rng(detail::mix_seed(config.rng_seed ^ 0x6e6f697365ull, k));
    SensorTrajectory tr;
    tr.sensor_id = "noise-" + std::to_string(k);
    GeoPoint p{region.min.x + rng.uniform() * width, region.min.y + rng.uniform() * height};
    for (std::int64_t i = first_k; static_cast<double>(i) * pi_s <= t_end + 1e-9; ++i) {
      tr.points.push_back({p, static_cast<double>(i) * pi_s});
      p.x = std::clamp(p.x + step * rng.gaussian(), region.min.x, region.max.x);
      p.y = std::clamp(p.y + step * rng.gaussian(), region.min.y, region.max.y);
    }
    if (!tr.points.empty()) sensors.push_back(std::move(tr));
  }
  return sensors;
}

/// Geodesic distance in meters from a geographic point to a polyline.
inline double distance_to_polyline_m(const GeoPoint& p, std::span<const GeoPoint> polyline) {
  if (polyline.size() < 2) throw ValidationError("polyline needs at least 2 points");
  // Nearest point under a local equirectangular scaling, then haversine.
  const double scale = std::cos(deg_to_rad(p.y));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const GeoPoint& a = polyline[i];
    const GeoPoint& b = polyline[i + 1];
    const double vx = (b.x - a.x) * scale;
    const double vy = b.y - a.y;
    const double wx = (p.x - a.x) * scale;
    const double wy = p.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const GeoPoint nearest{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    best = std::min(best, geodesic_distance(p, nearest));
  }
  return best;
}

enum class PrefilterMode {
  kWholeTrajectories,  // keep a sensor only if every ping is inside the buffer
  kPerPing,            // drop out-of-buffer pings, keep the rest
};

/// Buffer prefilter: retains the sensors within radius_m meters of the route
/// polyline(s). The whole-trajectory mode keeps exactly those sensors all of
/// whose pings are inside the buffer.
inline std::vector<SensorTrajectory> prefilter(
    std::span<const SensorTrajectory> sensors, std::span<const std::vector<GeoPoint>> polylines,
    double radius_m, PrefilterMode mode = PrefilterMode::kWholeTrajectories) {
  if (polylines.empty()) throw ValidationError("prefilter needs at least one polyline");
  const auto within = [&](const GeoPoint& p) {
    for (const std::vector<GeoPoint>& line : polylines) {
      if (distance_to_polyline_m(p, line) <= radius_m) return true;
    }
    return false;
  };
  std::vector<SensorTrajectory> kept;
  for (const SensorTrajectory& tr : sensors) {
    if (mode == PrefilterMode::kWholeTrajectories) {
      bool all = true;
      for (const TimestampedPoint& tp : tr.points) {
        if (!within(tp.point)) {
          all = false;
          break;
        }
      }
      if (all) kept.push_back(tr);
    } else {
      SensorTrajectory filtered{tr.sensor_id, {}};
      for (const TimestampedPoint& tp : tr.points) {
        if (within(tp.point)) filtered.points.push_back(tp);
      }
      if (!filtered.points.empty()) kept.push_back(std::move(filtered));
    }
  }
  return kept;
}

inline std::vector<SensorTrajectory> prefilter(std::span<const SensorTrajectory> sensors,
                                               std::span<const GeoPoint> polyline, double radius_m,
                                               PrefilterMode mode = PrefilterMode::kWholeTrajectories) {
  const std::vector<std::vector<GeoPoint>> lines{{polyline.begin(), polyline.end()}};
  return prefilter(sensors, lines, radius_m, mode);
}

}  // namespace mcs
