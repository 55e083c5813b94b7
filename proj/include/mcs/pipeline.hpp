#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mcs/clustering.hpp"
#include "mcs/errors.hpp"
#include "mcs/io.hpp"
#include "mcs/metrics.hpp"
#include "mcs/model.hpp"
#include "mcs/simgen.hpp"
#include "mcs/tracking.hpp"

// The command pipeline behind the CLI: generate -> (filter) -> cluster ->
// track -> evaluate, all file based and deterministic for a fixed seed.

namespace mcs {

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOptions {
  std::string schedule_path;
  std::string pings_out;
  std::string truth_out;  // empty skips the ground-truth table
  SimulationConfig sim;
};

struct GenerateResult {
  std::size_t services = 0;
  std::size_t trips = 0;
  std::size_t sensors = 0;
  std::size_t pings = 0;
};

inline std::vector<TruthRecord> ground_truth(const Schedule& schedule, double ping_interval_s) {
  std::vector<TruthRecord> records;
  for (const TripSchedule& trip : schedule.trips) {
    const JourneyService& service = schedule.service_of(trip);
    const auto first_k =
        static_cast<std::int64_t>(std::ceil(trip.departure() / ping_interval_s - 1e-9));
    for (std::int64_t k = first_k;; ++k) {
      const double t = static_cast<double>(k) * ping_interval_s;
      if (t >= trip.arrival() - 1e-9) break;
      TruthRecord r;
      r.t = t;
      r.service_id = service.id;
      r.trip_departure = trip.departure();
      r.segment_index = segment_at(trip, t);
      r.location = vehicle_position(service, trip, t);
      r.segment_departure_t = trip.stop_times[r.segment_index];
      r.segment_arrival_t = trip.stop_times[r.segment_index + 1];
      r.arrival_node = service.segments[r.segment_index].arrival;
      r.travel_time_s = service.segments[r.segment_index].travel_time_s;
      records.push_back(std::move(r));
    }
  }
  return records;
}

inline BoundingBox stops_bounding_box(const Schedule& schedule, double margin_fraction = 0.1) {
  BoundingBox box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
                  {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const JourneyService& s : schedule.services) {
    for (const GeoPoint& p : route_polyline(s)) {
      box.min.x = std::min(box.min.x, p.x);
      box.min.y = std::min(box.min.y, p.y);
      box.max.x = std::max(box.max.x, p.x);
      box.max.y = std::max(box.max.y, p.y);
    }
  }
  const double mx = std::max((box.max.x - box.min.x) * margin_fraction, 1e-6);
  const double my = std::max((box.max.y - box.min.y) * margin_fraction, 1e-6);
  box.min.x -= mx;
  box.min.y -= my;
  box.max.x += mx;
  box.max.y += my;
  return box;
}

inline GenerateResult run_generate(const GenerateOptions& opt) {
  opt.sim.validate();
  const Schedule schedule = load_schedule_file(opt.schedule_path);

  std::vector<SensorTrajectory> sensors;
  for (std::size_t trip_index = 0; trip_index < schedule.trips.size(); ++trip_index) {
    const TripSchedule& trip = schedule.trips[trip_index];
    auto riders = generate_sensors(schedule.service_of(trip), trip, trip_index, opt.sim);
    sensors.insert(sensors.end(), std::make_move_iterator(riders.begin()),
                   std::make_move_iterator(riders.end()));
  }
  if (opt.sim.off_route_fraction > 0.0 && !sensors.empty()) {
    const auto noise_count = static_cast<std::size_t>(
        std::llround(opt.sim.off_route_fraction * static_cast<double>(sensors.size())));
    double t_begin = std::numeric_limits<double>::infinity();
    double t_end = -std::numeric_limits<double>::infinity();
    for (const TripSchedule& trip : schedule.trips) {
      t_begin = std::min(t_begin, trip.departure());
      t_end = std::max(t_end, trip.arrival());
    }
    auto noise = generate_noise_sensors(stops_bounding_box(schedule), noise_count, t_begin, t_end,
                                        opt.sim);
    sensors.insert(sensors.end(), std::make_move_iterator(noise.begin()),
                   std::make_move_iterator(noise.end()));
  }

  GenerateResult result;
  result.services = schedule.services.size();
  result.trips = schedule.trips.size();
  result.sensors = sensors.size();
  for (const SensorTrajectory& tr : sensors) result.pings += tr.points.size();

  auto out = open_output(opt.pings_out);
  write_pings(out, sensors);
  if (!opt.truth_out.empty()) {
    auto truth_out = open_output(opt.truth_out);
    write_truth(truth_out, ground_truth(schedule, opt.sim.ping_interval_s));
  }
  return result;
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

struct ClusterOptions {
  std::string pings_path;
  std::string clusters_out;
  ClusteringParams params;
  double t0 = 0.0;
  std::string schedule_path;  // non-empty enables the route-buffer prefilter
  double radius_m = 10.0;
  PrefilterMode prefilter_mode = PrefilterMode::kWholeTrajectories;
  std::string format = "text";
};

struct ClusterResult {
  std::size_t sensors_read = 0;
  std::size_t sensors_kept = 0;
  std::size_t segments = 0;
  std::size_t slots = 0;
  std::size_t clusters = 0;
  double delta_t = 0.0;
};

inline ClusterResult run_cluster(const ClusterOptions& opt) {
  opt.params.validate();
  auto in = open_input(opt.pings_path);
  std::vector<SensorTrajectory> sensors = read_pings(in, opt.pings_path);

  ClusterResult result;
  result.sensors_read = sensors.size();
  if (!opt.schedule_path.empty()) {
    const Schedule schedule = load_schedule_file(opt.schedule_path);
    std::vector<std::vector<GeoPoint>> polylines;
    polylines.reserve(schedule.services.size());
    for (const JourneyService& s : schedule.services) polylines.push_back(route_polyline(s));
    sensors = prefilter(sensors, polylines, opt.radius_m, opt.prefilter_mode);
  }
  result.sensors_kept = sensors.size();

  ClusteringParams params = opt.params;
  for (const SensorTrajectory& tr : sensors) {
    if (tr.points.size() > 1) result.segments += tr.points.size() - 1;
  }
  if (params.delta_t == 0.0 && result.segments > 0) {
    params.delta_t = detect_ping_interval(sensors);
  }
  result.delta_t = params.delta_t;

  ClustersDocument doc;
  doc.t0 = opt.t0;
  doc.delta_t = params.delta_t;
  doc.params = params;
  if (result.segments > 0) {
    const auto by_slot = run(sensors, params, opt.t0);
    for (const auto& [slot, clusters] : by_slot) {
      auto& records = doc.slots[slot];
      records.reserve(clusters.size());
      for (const Cluster& c : clusters) records.push_back(to_record(c));
      result.clusters += clusters.size();
    }
    result.slots = by_slot.size();
  }

  auto out = open_output(opt.clusters_out);
  write_clusters(out, doc, opt.format);
  return result;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateOptions {
  std::string clusters_path;
  std::string pings_path;
  std::string truth_path;
  std::string schedule_path;  // non-empty also runs the tracker
  std::string report_out;     // JSON report file
  std::string series_out;     // optional per-slot CSV series
  TrackingParams tracking;
};

struct VehicleSlotError {
  std::string service_id;
  double trip_departure = 0.0;
  std::size_t segment_index = 0;
  std::optional<double> spatial;
  std::optional<double> temporal;
};

struct SlotReport {
  std::int64_t slot = 0;
  std::size_t cluster_count = 0;
  double sse = 0.0;
  std::optional<double> tra_xb;
  std::string tra_xb_reason;
  std::vector<VehicleSlotError> vehicles;
};

/// Best destination estimate for one traversed route segment: the cluster
/// center (over all slots spent on the segment) whose end point is closest to
/// the segment's arrival node.
struct SegmentReport {
  std::string service_id;
  double trip_departure = 0.0;
  std::size_t segment_index = 0;
  double spatial_error = 0.0;
  double temporal_error = 0.0;
};

struct TrackStateRecord {
  std::int64_t slot = 0;
  int track_id = 0;
  std::string service_id;
  std::size_t segment_index = 0;
  GeoPoint location;
  double segment_departure_t = 0.0;
  double arrival_estimate_t = 0.0;
};

struct EvaluationReport {
  ClusteringParams params;
  double t0 = 0.0;
  double delta_t = 0.0;
  std::vector<SlotReport> slots;
  std::vector<SegmentReport> segments;
  std::vector<TrackStateRecord> tracks;
  std::vector<std::string> warnings;

  double sse_total = 0.0;
  std::optional<double> tra_xb_mean;
  std::optional<double> spatial_error_mean;
  std::optional<double> temporal_error_mean;
  std::optional<double> segment_spatial_error_mean;
  std::optional<double> segment_temporal_error_mean;
};

inline EvaluationReport run_evaluate(const EvaluateOptions& opt) {
  auto clusters_in = open_input(opt.clusters_path);
  const ClustersDocument doc = read_clusters(clusters_in, opt.clusters_path);
  if (!(doc.delta_t > 0.0)) {
    throw ValidationError(opt.clusters_path + ": clusters document has no slot width");
  }
  auto pings_in = open_input(opt.pings_path);
  const std::vector<SensorTrajectory> sensors = read_pings(pings_in, opt.pings_path);
  auto truth_in = open_input(opt.truth_path);
  const std::vector<TruthRecord> truth = read_truth(truth_in, opt.truth_path);

  std::unordered_map<std::string, TrajectorySegment> segment_by_id;
  for (const SensorTrajectory& tr : sensors) {
    for (TrajectorySegment& ts : segmentize(tr)) {
      segment_by_id.emplace(segment_id(ts), std::move(ts));
    }
  }
  const auto lookup = [&](const std::string& id) -> const TrajectorySegment& {
    const auto it = segment_by_id.find(id);
    if (it == segment_by_id.end()) {
      throw ValidationError(opt.clusters_path + ": member segment '" + id +
                            "' not present in the ping table");
    }
    return it->second;
  };

  std::map<std::int64_t, std::vector<Cluster>> clusters;
  for (const auto& [slot, records] : doc.slots) {
    auto& list = clusters[slot];
    list.reserve(records.size());
    for (const ClusterRecord& r : records) {
      Cluster c;
      c.core = lookup(r.core_id);
      c.members.reserve(r.member_ids.size());
      for (const std::string& id : r.member_ids) c.members.push_back(lookup(id));
      c.center = r.center;
      list.push_back(std::move(c));
    }
  }

  // Truth rows keyed by slot, earliest row per (vehicle, slot).
  struct VehicleKey {
    std::string service_id;
    double trip_departure;
    auto operator<=>(const VehicleKey&) const = default;
  };
  std::map<std::int64_t, std::map<VehicleKey, TruthRecord>> truth_by_slot;
  std::set<std::int64_t> truth_slots;
  for (const TruthRecord& r : truth) {
    const auto slot = static_cast<std::int64_t>(std::floor((r.t - doc.t0) / doc.delta_t));
    truth_slots.insert(slot);
    auto& per_vehicle = truth_by_slot[slot];
    const VehicleKey key{r.service_id, r.trip_departure};
    const auto it = per_vehicle.find(key);
    if (it == per_vehicle.end() || r.t < it->second.t) per_vehicle[key] = r;
  }

  if (!truth_slots.empty() && !clusters.empty()) {
    bool any_overlap = false;
    for (const std::int64_t s : truth_slots) {
      if (clusters.count(s)) {
        any_overlap = true;
        break;
      }
    }
    if (!any_overlap) {
      std::string missing;
      std::size_t shown = 0;
      for (const std::int64_t s : truth_slots) {
        if (shown++ == 10) {
          missing += " ...";
          break;
        }
        missing += ' ' + std::to_string(s);
      }
      throw ValidationError("truth and clusters share no slot; truth slots with no cluster data:" +
                            missing);
    }
  }

  EvaluationReport report;
  report.params = doc.params;
  report.t0 = doc.t0;
  report.delta_t = doc.delta_t;

  std::set<std::int64_t> all_slots;
  for (const auto& [slot, _] : clusters) all_slots.insert(slot);
  all_slots.insert(truth_slots.begin(), truth_slots.end());

  double tra_xb_sum = 0.0;
  std::size_t tra_xb_n = 0;
  double spatial_sum = 0.0;
  std::size_t spatial_n = 0;
  double temporal_sum = 0.0;
  std::size_t temporal_n = 0;

  for (const std::int64_t slot : all_slots) {
    SlotReport sr;
    sr.slot = slot;
    const auto cit = clusters.find(slot);
    const std::vector<Cluster>* slot_clusters = cit == clusters.end() ? nullptr : &cit->second;
    if (!slot_clusters && truth_by_slot.count(slot)) {
      report.warnings.push_back("slot " + std::to_string(slot) +
                                " has ground truth but no cluster data");
    }
    if (slot_clusters) {
      sr.cluster_count = slot_clusters->size();
      sr.sse = sse(*slot_clusters);
      const TraXb txb = tra_xb(*slot_clusters);
      sr.tra_xb = txb.value;
      sr.tra_xb_reason = txb.undefined_reason;
      report.sse_total += sr.sse;
      if (txb.value) {
        tra_xb_sum += *txb.value;
        ++tra_xb_n;
      }
    } else {
      sr.tra_xb_reason = "no cluster data for this slot";
    }

    if (const auto tit = truth_by_slot.find(slot); tit != truth_by_slot.end()) {
      for (const auto& [key, rec] : tit->second) {
        VehicleSlotError ve;
        ve.service_id = rec.service_id;
        ve.trip_departure = rec.trip_departure;
        ve.segment_index = rec.segment_index;
        if (slot_clusters && !slot_clusters->empty()) {
          double best = std::numeric_limits<double>::infinity();
          const ClusterCenter* best_center = nullptr;
          for (const Cluster& c : *slot_clusters) {
            const double d = euclidean_distance(rec.arrival_node, c.center.end_point());
            if (d < best) {
              best = d;
              best_center = &c.center;
            }
          }
          ve.spatial = best;
          ve.temporal = temporal_error(rec.travel_time_s,
                                       best_center->end_time() - rec.segment_departure_t);
          spatial_sum += *ve.spatial;
          ++spatial_n;
          temporal_sum += *ve.temporal;
          ++temporal_n;
        }
        sr.vehicles.push_back(std::move(ve));
      }
    }
    report.slots.push_back(std::move(sr));
  }

  if (tra_xb_n > 0) report.tra_xb_mean = tra_xb_sum / static_cast<double>(tra_xb_n);
  if (spatial_n > 0) report.spatial_error_mean = spatial_sum / static_cast<double>(spatial_n);
  if (temporal_n > 0) report.temporal_error_mean = temporal_sum / static_cast<double>(temporal_n);

  // Best estimate per traversed route segment.
  struct SegmentKey {
    std::string service_id;
    double trip_departure;
    std::size_t segment_index;
    auto operator<=>(const SegmentKey&) const = default;
  };
  struct SegmentBest {
    double spatial = std::numeric_limits<double>::infinity();
    double temporal = 0.0;
    bool found = false;
  };
  std::map<SegmentKey, SegmentBest> best_by_segment;
  for (const auto& [slot, per_vehicle] : truth_by_slot) {
    const auto cit = clusters.find(slot);
    if (cit == clusters.end()) continue;
    for (const auto& [key, rec] : per_vehicle) {
      SegmentBest& best =
          best_by_segment[{rec.service_id, rec.trip_departure, rec.segment_index}];
      for (const Cluster& c : cit->second) {
        const double d = euclidean_distance(rec.arrival_node, c.center.end_point());
        if (d < best.spatial) {
          best.spatial = d;
          best.temporal = temporal_error(rec.travel_time_s,
                                         c.center.end_time() - rec.segment_departure_t);
          best.found = true;
        }
      }
    }
  }
  double seg_spatial_sum = 0.0;
  double seg_temporal_sum = 0.0;
  std::size_t seg_n = 0;
  for (const auto& [key, best] : best_by_segment) {
    if (!best.found) continue;
    report.segments.push_back(
        {key.service_id, key.trip_departure, key.segment_index, best.spatial, best.temporal});
    seg_spatial_sum += best.spatial;
    seg_temporal_sum += best.temporal;
    ++seg_n;
  }
  if (seg_n > 0) {
    report.segment_spatial_error_mean = seg_spatial_sum / static_cast<double>(seg_n);
    report.segment_temporal_error_mean = seg_temporal_sum / static_cast<double>(seg_n);
  }

  if (!opt.schedule_path.empty()) {
    const Schedule schedule = load_schedule_file(opt.schedule_path);
    Tracker tracker(schedule.services, doc.delta_t, opt.tracking);
    for (const auto& [slot, slot_clusters] : clusters) {
      std::vector<ClusterCenter> centers;
      centers.reserve(slot_clusters.size());
      for (const Cluster& c : slot_clusters) centers.push_back(c.center);
      for (const VehicleTrack& track : tracker.step(slot, centers)) {
        if (track.missed_slots > 0) continue;
        report.tracks.push_back({slot, track.id, track.vehicle.service_id,
                                 track.vehicle.segment_index, track.vehicle.location,
                                 track.vehicle.segment_departure_t,
                                 track.vehicle.arrival_estimate_t});
      }
    }
  }
  return report;
}

inline nlohmann::ordered_json to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["format"] = "mcsreport";
  j["format_version"] = 1;
  j["params"] = {{"epsilon", report.params.epsilon},
                 {"min_s", report.params.min_segments},
                 {"weights", {report.params.weights.following, report.params.weights.speed,
                              report.params.weights.direction}},
                 {"delta_t", report.delta_t},
                 {"t0", report.t0}};
  auto opt_number = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json slots = nlohmann::ordered_json::array();
  for (const SlotReport& sr : report.slots) {
    nlohmann::ordered_json js;
    js["slot"] = sr.slot;
    js["clusters"] = sr.cluster_count;
    js["sse"] = sr.sse;
    js["tra_xb"] = opt_number(sr.tra_xb);
    if (!sr.tra_xb) js["tra_xb_reason"] = sr.tra_xb_reason;
    nlohmann::ordered_json vehicles = nlohmann::ordered_json::array();
    for (const VehicleSlotError& ve : sr.vehicles) {
      vehicles.push_back({{"service", ve.service_id},
                          {"trip", ve.trip_departure},
                          {"segment", ve.segment_index},
                          {"spatial_error", opt_number(ve.spatial)},
                          {"temporal_error", opt_number(ve.temporal)}});
    }
    js["vehicles"] = std::move(vehicles);
    slots.push_back(std::move(js));
  }
  j["slots"] = std::move(slots);

  nlohmann::ordered_json segments = nlohmann::ordered_json::array();
  for (const SegmentReport& s : report.segments) {
    segments.push_back({{"service", s.service_id},
                        {"trip", s.trip_departure},
                        {"segment", s.segment_index},
                        {"spatial_error", s.spatial_error},
                        {"temporal_error", s.temporal_error}});
  }
  j["segments"] = std::move(segments);

  nlohmann::ordered_json tracks = nlohmann::ordered_json::array();
  for (const TrackStateRecord& t : report.tracks) {
    tracks.push_back({{"slot", t.slot},
                      {"track", t.track_id},
                      {"service", t.service_id},
                      {"segment", t.segment_index},
                      {"lat", t.location.y},
                      {"lon", t.location.x},
                      {"t_d", t.segment_departure_t},
                      {"t_a", t.arrival_estimate_t}});
  }
  j["tracks"] = std::move(tracks);

  j["aggregate"] = {{"sse_total", report.sse_total},
                    {"tra_xb_mean", opt_number(report.tra_xb_mean)},
                    {"spatial_error_mean", opt_number(report.spatial_error_mean)},
                    {"temporal_error_mean", opt_number(report.temporal_error_mean)},
                    {"segment_spatial_error_mean", opt_number(report.segment_spatial_error_mean)},
                    {"segment_temporal_error_mean", opt_number(report.segment_temporal_error_mean)}};
  j["warnings"] = report.warnings;
  return j;
}

inline void write_report(std::ostream& out, const EvaluationReport& report) {
  out << to_json(report).dump(2) << '\n';
}

/// Plot-ready per-slot series: index values and mean vehicle errors.
inline void write_series_csv(std::ostream& out, const EvaluationReport& report) {
  out << "slot,clusters,sse,tra_xb,spatial_error,temporal_error\n";
  for (const SlotReport& sr : report.slots) {
    out << sr.slot << ',' << sr.cluster_count << ',' << format_double(sr.sse) << ',';
    if (sr.tra_xb) out << format_double(*sr.tra_xb);
    out << ',';
    double spatial_sum = 0.0, temporal_sum = 0.0;
    std::size_t n = 0;
    for (const VehicleSlotError& ve : sr.vehicles) {
      if (ve.spatial) {
        spatial_sum += *ve.spatial;
        temporal_sum += *ve.temporal;
        ++n;
      }
    }
    if (n > 0) out << format_double(spatial_sum / static_cast<double>(n));
    out << ',';
    if (n > 0) out << format_double(temporal_sum / static_cast<double>(n));
    out << '\n';
  }
}

inline void print_report_table(std::ostream& out, const EvaluationReport& report) {
  out << std::left << std::setw(8) << "slot" << std::setw(10) << "clusters" << std::setw(16)
      << "sse" << std::setw(16) << "tra_xb" << std::setw(16) << "spatial" << std::setw(16)
      << "temporal" << '\n';
  for (const SlotReport& sr : report.slots) {
    std::ostringstream spatial, temporal;
    std::size_t n = 0;
    double ssum = 0.0, tsum = 0.0;
    for (const VehicleSlotError& ve : sr.vehicles) {
      if (ve.spatial) {
        ssum += *ve.spatial;
        tsum += *ve.temporal;
        ++n;
      }
    }
    if (n > 0) {
      spatial << std::setprecision(6) << ssum / static_cast<double>(n);
      temporal << std::setprecision(6) << tsum / static_cast<double>(n);
    }
    out << std::left << std::setw(8) << sr.slot << std::setw(10) << sr.cluster_count
        << std::setw(16) << std::setprecision(6) << sr.sse << std::setw(16)
        << (sr.tra_xb ? std::to_string(*sr.tra_xb) : std::string("-")) << std::setw(16)
        << (n > 0 ? spatial.str() : std::string("-")) << std::setw(16)
        << (n > 0 ? temporal.str() : std::string("-")) << '\n';
  }
  out << "sse total: " << report.sse_total << '\n';
  if (report.tra_xb_mean) out << "tra_xb mean: " << *report.tra_xb_mean << '\n';
  if (report.segment_spatial_error_mean) {
    out << "per-segment spatial error mean: " << *report.segment_spatial_error_mean << '\n';
  }
  if (report.segment_temporal_error_mean) {
    out << "per-segment temporal error mean: " << *report.segment_temporal_error_mean << '\n';
  }
}

// ---------------------------------------------------------------------------
// CLI entry points: print a summary, map failures to exit codes.
// ---------------------------------------------------------------------------

inline int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const GenerateResult r = run_generate(opt);
    out << "services: " << r.services << "\ntrips: " << r.trips << "\nsensors: " << r.sensors
        << "\npings: " << r.pings << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int cmd_cluster(const ClusterOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const ClusterResult r = run_cluster(opt);
    out << "sensors read: " << r.sensors_read << "\nsensors kept: " << r.sensors_kept
        << "\nsegments: " << r.segments << "\nslots: " << r.slots << "\nslot width: " << r.delta_t
        << "\nclusters: " << r.clusters << '\n';
    if (r.clusters == 0) {
      out << "warning: no clusters found\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const EvaluationReport report = run_evaluate(opt);
    if (!opt.report_out.empty()) {
      auto report_file = open_output(opt.report_out);
      write_report(report_file, report);
    }
    if (!opt.series_out.empty()) {
      auto series_file = open_output(opt.series_out);
      write_series_csv(series_file, report);
    }
    print_report_table(out, report);
    for (const std::string& w : report.warnings) out << "warning: " << w << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mcs
