#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "mcs/clustering.hpp"
#include "mcs/errors.hpp"
#include "mcs/geo.hpp"
#include "mcs/model.hpp"

// File formats. All are versioned by their first line (text) or a
// format_version field (JSON), and round-trip doubles exactly via
// shortest-representation formatting.

namespace mcs {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double_token(const std::string& tok, const std::string& source,
                                 std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError(source, line, "expected a number, got '" + tok + "'");
  }
  return v;
}

/// Identifier of a trajectory segment: the sensor id plus the segment's start
/// time. Unique because a sensor's timestamps are strictly increasing.
inline std::string segment_id(const TrajectorySegment& ts) {
  return ts.sensor_id + "@" + format_double(ts.start.t);
}

inline std::pair<std::string, double> parse_segment_id(const std::string& id,
                                                       const std::string& source,
                                                       std::size_t line) {
  const auto at = id.rfind('@');
  if (at == std::string::npos || at == 0 || at + 1 == id.size()) {
    throw ParseError(source, line, "malformed segment id '" + id + "'");
  }
  return {id.substr(0, at), parse_double_token(id.substr(at + 1), source, line)};
}

// ---------------------------------------------------------------------------
// Ping table: "# mcspings v1", a header row, then one CSV row per ping,
// sorted by (sensor_id, t).
// ---------------------------------------------------------------------------

inline void write_pings(std::ostream& out, std::span<const SensorTrajectory> sensors) {
  struct Row {
    const std::string* id;
    const TimestampedPoint* p;
  };
  std::vector<Row> rows;
  for (const SensorTrajectory& tr : sensors) {
    if (tr.sensor_id.empty() ||
        tr.sensor_id.find_first_of(", \t\r\n") != std::string::npos) {
      throw ValidationError("sensor id '" + tr.sensor_id + "' is empty or contains separators");
    }
    for (const TimestampedPoint& tp : tr.points) {
      if (!std::isfinite(tp.point.x) || !std::isfinite(tp.point.y) || !std::isfinite(tp.t)) {
        throw ValidationError("sensor " + tr.sensor_id + ": non-finite ping");
      }
      rows.push_back({&tr.sensor_id, &tp});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (*a.id != *b.id) return *a.id < *b.id;
    return a.p->t < b.p->t;
  });
  out << "# mcspings v1\n";
  out << "sensor_id,t,lat,lon\n";
  for (const Row& r : rows) {
    out << *r.id << ',' << format_double(r.p->t) << ',' << format_double(r.p->point.y) << ','
        << format_double(r.p->point.x) << '\n';
  }
}

inline std::vector<SensorTrajectory> read_pings(std::istream& in,
                                                const std::string& source = "pings") {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != "# mcspings v1") {
    throw ParseError(source, 1, "expected header '# mcspings v1'");
  }
  ++line_no;
  if (!std::getline(in, line) || line != "sensor_id,t,lat,lon") {
    throw ParseError(source, 2, "expected column header 'sensor_id,t,lat,lon'");
  }
  ++line_no;

  std::vector<SensorTrajectory> sensors;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::array<std::string, 4> fields;
    std::size_t field = 0;
    std::string cur;
    for (const char c : line) {
      if (c == ',') {
        if (field >= 3) throw ParseError(source, line_no, "too many columns");
        fields[field++] = std::move(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (field != 3) throw ParseError(source, line_no, "expected 4 columns");
    fields[3] = std::move(cur);

    const double t = parse_double_token(fields[1], source, line_no);
    const double lat = parse_double_token(fields[2], source, line_no);
    const double lon = parse_double_token(fields[3], source, line_no);
    if (fields[0].empty()) throw ParseError(source, line_no, "empty sensor id");
    if (sensors.empty() || sensors.back().sensor_id != fields[0]) {
      for (const SensorTrajectory& tr : sensors) {
        if (tr.sensor_id == fields[0]) {
          throw ParseError(source, line_no,
                           "rows of sensor " + fields[0] + " are not contiguous");
        }
      }
      sensors.push_back({fields[0], {}});
    }
    SensorTrajectory& tr = sensors.back();
    if (!tr.points.empty() && !(tr.points.back().t < t)) {
      throw ParseError(source, line_no,
                       "sensor " + fields[0] + ": timestamps must be strictly increasing");
    }
    tr.points.push_back({{lon, lat}, t});
  }
  return sensors;
}

// ---------------------------------------------------------------------------
// Ground-truth vehicle states: "# mcstruth v1" plus whitespace-delimited rows.
// ---------------------------------------------------------------------------

struct TruthRecord {
  double t = 0.0;                 // grid time of this state
  std::string service_id;
  double trip_departure = 0.0;
  std::size_t segment_index = 0;  // route segment being traversed
  GeoPoint location;              // true vehicle position at t
  double segment_departure_t = 0.0;
  double segment_arrival_t = 0.0;
  GeoPoint arrival_node;
  double travel_time_s = 0.0;     // scheduled travel time of the segment
};

inline void write_truth(std::ostream& out, std::span<const TruthRecord> records) {
  out << "# mcstruth v1\n";
  out << "# columns: t service trip_departure segment_index loc_lat loc_lon t_d t_a "
         "na_lat na_lon att\n";
  for (const TruthRecord& r : records) {
    out << format_double(r.t) << ' ' << r.service_id << ' ' << format_double(r.trip_departure)
        << ' ' << r.segment_index << ' ' << format_double(r.location.y) << ' '
        << format_double(r.location.x) << ' ' << format_double(r.segment_departure_t) << ' '
        << format_double(r.segment_arrival_t) << ' ' << format_double(r.arrival_node.y) << ' '
        << format_double(r.arrival_node.x) << ' ' << format_double(r.travel_time_s) << '\n';
  }
}

inline std::vector<TruthRecord> read_truth(std::istream& in,
                                           const std::string& source = "truth") {
  std::string line;
  if (!std::getline(in, line) || line != "# mcstruth v1") {
    throw ParseError(source, 1, "expected header '# mcstruth v1'");
  }
  std::size_t line_no = 1;
  std::vector<TruthRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::vector<std::string> tok;
    std::string t;
    while (row >> t) tok.push_back(t);
    if (tok.size() != 11) throw ParseError(source, line_no, "expected 11 columns");
    TruthRecord r;
    r.t = parse_double_token(tok[0], source, line_no);
    r.service_id = tok[1];
    r.trip_departure = parse_double_token(tok[2], source, line_no);
    r.segment_index = static_cast<std::size_t>(parse_double_token(tok[3], source, line_no));
    r.location.y = parse_double_token(tok[4], source, line_no);
    r.location.x = parse_double_token(tok[5], source, line_no);
    r.segment_departure_t = parse_double_token(tok[6], source, line_no);
    r.segment_arrival_t = parse_double_token(tok[7], source, line_no);
    r.arrival_node.y = parse_double_token(tok[8], source, line_no);
    r.arrival_node.x = parse_double_token(tok[9], source, line_no);
    r.travel_time_s = parse_double_token(tok[10], source, line_no);
    records.push_back(std::move(r));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Per-slot clusters with centers and member segment ids. Text and JSON
// variants carry the same content, including the clustering parameters and
// slot grid so that downstream evaluation aligns exactly.
// ---------------------------------------------------------------------------

struct ClusterRecord {
  std::string core_id;
  std::vector<std::string> member_ids;
  ClusterCenter center;
};

struct ClustersDocument {
  ClusteringParams params;
  double t0 = 0.0;
  double delta_t = 0.0;
  std::map<std::int64_t, std::vector<ClusterRecord>> slots;
};

inline ClusterRecord to_record(const Cluster& c) {
  ClusterRecord r;
  r.core_id = segment_id(c.core);
  r.member_ids.reserve(c.members.size());
  for (const TrajectorySegment& m : c.members) r.member_ids.push_back(segment_id(m));
  r.center = c.center;
  return r;
}

inline void write_clusters_text(std::ostream& out, const ClustersDocument& doc) {
  const ClusteringParams& p = doc.params;
  out << "# mcsclusters v1\n";
  out << "# epsilon=" << format_double(p.epsilon) << " min_s=" << p.min_segments
      << " w1=" << format_double(p.weights.following) << " w2=" << format_double(p.weights.speed)
      << " w3=" << format_double(p.weights.direction) << " delta_t=" << format_double(doc.delta_t)
      << " t0=" << format_double(doc.t0) << " include_core=" << (p.scores_include_core ? 1 : 0)
      << '\n';
  for (const auto& [slot, clusters] : doc.slots) {
    out << "slot " << slot << '\n';
    for (const ClusterRecord& c : clusters) {
      out << "cluster " << c.core_id << '\n';
      out << "center " << format_double(c.center.anchor.point.y) << ' '
          << format_double(c.center.anchor.point.x) << ' ' << format_double(c.center.anchor.t)
          << ' ' << format_double(c.center.dx) << ' ' << format_double(c.center.dy) << ' '
          << format_double(c.center.dt) << '\n';
      out << "members";
      for (const std::string& id : c.member_ids) out << ' ' << id;
      out << '\n';
    }
  }
}

inline nlohmann::ordered_json to_json(const ClustersDocument& doc) {
  nlohmann::ordered_json j;
  j["format"] = "mcsclusters";
  j["format_version"] = 1;
  j["params"] = {{"epsilon", doc.params.epsilon},
                 {"min_s", doc.params.min_segments},
                 {"weights", {doc.params.weights.following, doc.params.weights.speed,
                              doc.params.weights.direction}},
                 {"delta_t", doc.delta_t},
                 {"t0", doc.t0},
                 {"include_core", doc.params.scores_include_core}};
  nlohmann::ordered_json slots = nlohmann::ordered_json::array();
  for (const auto& [slot, clusters] : doc.slots) {
    nlohmann::ordered_json js;
    js["slot"] = slot;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ClusterRecord& c : clusters) {
      nlohmann::ordered_json jc;
      jc["core"] = c.core_id;
      jc["anchor"] = {{"lat", c.center.anchor.point.y},
                      {"lon", c.center.anchor.point.x},
                      {"t", c.center.anchor.t}};
      jc["vector"] = {{"dx", c.center.dx}, {"dy", c.center.dy}, {"dt", c.center.dt}};
      jc["members"] = c.member_ids;
      arr.push_back(std::move(jc));
    }
    js["clusters"] = std::move(arr);
    slots.push_back(std::move(js));
  }
  j["slots"] = std::move(slots);
  return j;
}

inline void write_clusters(std::ostream& out, const ClustersDocument& doc,
                           const std::string& format = "text") {
  if (format == "text") {
    write_clusters_text(out, doc);
  } else if (format == "json") {
    out << to_json(doc).dump(2) << '\n';
  } else {
    throw ValidationError("unknown clusters format '" + format + "'");
  }
}

inline ClustersDocument read_clusters_text(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != "# mcsclusters v1") {
    throw ParseError(source, 1, "expected header '# mcsclusters v1'");
  }
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ParseError(source, 2, "expected a parameter line");
  }
  ClustersDocument doc;
  {
    std::istringstream params(line.substr(2));
    std::string kv;
    while (params >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError(source, 2, "malformed parameter '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      if (key == "epsilon") {
        doc.params.epsilon = parse_double_token(value, source, 2);
      } else if (key == "min_s") {
        doc.params.min_segments = static_cast<std::size_t>(parse_double_token(value, source, 2));
      } else if (key == "w1") {
        doc.params.weights.following = parse_double_token(value, source, 2);
      } else if (key == "w2") {
        doc.params.weights.speed = parse_double_token(value, source, 2);
      } else if (key == "w3") {
        doc.params.weights.direction = parse_double_token(value, source, 2);
      } else if (key == "delta_t") {
        doc.delta_t = parse_double_token(value, source, 2);
      } else if (key == "t0") {
        doc.t0 = parse_double_token(value, source, 2);
      } else if (key == "include_core") {
        doc.params.scores_include_core = value != "0";
      } else {
        throw ParseError(source, 2, "unknown parameter '" + key + "'");
      }
    }
  }
  doc.params.delta_t = doc.delta_t;

  std::size_t line_no = 2;
  std::optional<std::int64_t> slot;
  std::vector<ClusterRecord>* current = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string kind;
    row >> kind;
    if (kind == "slot") {
      std::int64_t s = 0;
      if (!(row >> s)) throw ParseError(source, line_no, "slot line needs an index");
      slot = s;
      current = &doc.slots[s];
    } else if (kind == "cluster") {
      if (!current) throw ParseError(source, line_no, "cluster before any slot");
      ClusterRecord r;
      if (!(row >> r.core_id)) throw ParseError(source, line_no, "cluster line needs a core id");
      current->push_back(std::move(r));
    } else if (kind == "center") {
      if (!current || current->empty()) {
        throw ParseError(source, line_no, "center line outside a cluster");
      }
      std::vector<std::string> tok;
      std::string t;
      while (row >> t) tok.push_back(t);
      if (tok.size() != 6) throw ParseError(source, line_no, "center line needs 6 numbers");
      ClusterCenter& cc = current->back().center;
      cc.anchor.point.y = parse_double_token(tok[0], source, line_no);
      cc.anchor.point.x = parse_double_token(tok[1], source, line_no);
      cc.anchor.t = parse_double_token(tok[2], source, line_no);
      cc.dx = parse_double_token(tok[3], source, line_no);
      cc.dy = parse_double_token(tok[4], source, line_no);
      cc.dt = parse_double_token(tok[5], source, line_no);
    } else if (kind == "members") {
      if (!current || current->empty()) {
        throw ParseError(source, line_no, "members line outside a cluster");
      }
      std::string id;
      while (row >> id) current->back().member_ids.push_back(id);
    } else {
      throw ParseError(source, line_no, "unknown record '" + kind + "'");
    }
  }
  return doc;
}

inline ClustersDocument read_clusters_json(std::istream& in, const std::string& source) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "mcsclusters" || j.at("format_version") != 1) {
      throw ParseError(source, 0, "not a mcsclusters v1 document");
    }
    ClustersDocument doc;
    const auto& p = j.at("params");
    doc.params.epsilon = p.at("epsilon").get<double>();
    doc.params.min_segments = p.at("min_s").get<std::size_t>();
    doc.params.weights.following = p.at("weights").at(0).get<double>();
    doc.params.weights.speed = p.at("weights").at(1).get<double>();
    doc.params.weights.direction = p.at("weights").at(2).get<double>();
    doc.delta_t = p.at("delta_t").get<double>();
    doc.t0 = p.at("t0").get<double>();
    doc.params.scores_include_core = p.at("include_core").get<bool>();
    doc.params.delta_t = doc.delta_t;
    for (const auto& js : j.at("slots")) {
      auto& clusters = doc.slots[js.at("slot").get<std::int64_t>()];
      for (const auto& jc : js.at("clusters")) {
        ClusterRecord r;
        r.core_id = jc.at("core").get<std::string>();
        r.center.anchor.point.y = jc.at("anchor").at("lat").get<double>();
        r.center.anchor.point.x = jc.at("anchor").at("lon").get<double>();
        r.center.anchor.t = jc.at("anchor").at("t").get<double>();
        r.center.dx = jc.at("vector").at("dx").get<double>();
        r.center.dy = jc.at("vector").at("dy").get<double>();
        r.center.dt = jc.at("vector").at("dt").get<double>();
        for (const auto& m : jc.at("members")) r.member_ids.push_back(m.get<std::string>());
        clusters.push_back(std::move(r));
      }
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, std::string("malformed clusters document: ") + e.what());
  }
}

inline ClustersDocument read_clusters(std::istream& in, const std::string& source = "clusters") {
  const int first = in.peek();
  if (first == '{') return read_clusters_json(in, source);
  return read_clusters_text(in, source);
}

// ---------------------------------------------------------------------------
// File-path conveniences.
// ---------------------------------------------------------------------------

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file " + path);
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file " + path);
  return in;
}

}  // namespace mcs
