#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fjvrp/errors.hpp"
#include "fjvrp/geometry.hpp"
#include "fjvrp/text.hpp"

namespace fjvrp {

// One ingested CSV row: a quantity of one product bound for one location on
// one day.
struct MissionRecord {
  int day = 0;
  std::string location_id;
  double lat = 0.0;
  double lon = 0.0;
  std::string product;
  double amount = 0.0;
  std::string unit;
};

// unit-name -> kilograms per unit. Ships with {sack: 25, kg: 1}; entries
// loaded from a file are merged over those defaults.
struct UnitMap {
  std::map<std::string, double> kg_per_unit{{"sack", 25.0}, {"kg", 1.0}};

  double kg_per(const std::string& unit) const {
    auto it = kg_per_unit.find(unit);
    if (it == kg_per_unit.end()) throw UnknownUnit(unit);
    return it->second;
  }
};

// Sidecar file: one `name=kg_float` per line, `#` starts a comment.
inline UnitMap parse_unit_map(std::istream& in) {
  UnitMap units;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body{line};
    if (auto hash = body.find('#'); hash != std::string_view::npos)
      body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw MalformedRow(line_no, "expected name=kg_per_unit");
    std::string name{trim(body.substr(0, eq))};
    auto factor = parse_double(body.substr(eq + 1));
    if (name.empty() || !factor)
      throw MalformedRow(line_no, "expected name=kg_per_unit");
    if (*factor <= 0.0)
      throw MalformedRow(line_no, "conversion factor must be positive");
    units.kg_per_unit[name] = *factor;
  }
  return units;
}

struct DemandNode {
  std::string id;
  Point point;
  double demand_q = 0.0;  // kilograms
};

// One day's routing problem: every node carries the same demand
// total_supply / |nodes|.
struct DailyInstance {
  int day = 0;
  Point hub;
  std::vector<DemandNode> nodes;
  double total_supply = 0.0;  // kilograms
};

struct VehicleConfig {
  double payload_R = 0.0;  // kilograms, identical across the fleet
  int sa_iterations = 1;   // annealing iterations per temperature step
};

inline const char* kMissionsHeader = "day,location_id,lat,lon,product,amount,unit";

// Reads the canonical missions CSV. Row numbers in errors are 1-based and
// count the header line.
inline std::vector<MissionRecord> parse_missions_csv(std::istream& in,
                                                     const UnitMap& units) {
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line) ||
      std::string_view{trim(line)} != kMissionsHeader)
    throw MalformedRow(1, std::string("expected header ") + kMissionsHeader);
  row = 1;

  std::vector<MissionRecord> records;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split(trim(line), ',');
    if (fields.size() != 7)
      throw MalformedRow(row, "expected 7 fields, got " +
                                  std::to_string(fields.size()));
    MissionRecord rec;
    auto day = parse_int(fields[0]);
    if (!day || *day < 1) throw MalformedRow(row, "bad day \"" + fields[0] + "\"");
    rec.day = static_cast<int>(*day);
    rec.location_id = std::string(trim(fields[1]));
    if (rec.location_id.empty()) throw MalformedRow(row, "empty location_id");
    auto lat = parse_double(fields[2]);
    auto lon = parse_double(fields[3]);
    if (!lat || !lon || !std::isfinite(*lat) || !std::isfinite(*lon))
      throw MalformedRow(row, "bad coordinates");
    rec.lat = *lat;
    rec.lon = *lon;
    rec.product = std::string(trim(fields[4]));
    auto amount = parse_double(fields[5]);
    if (!amount || !(*amount >= 0.0))
      throw MalformedRow(row, "bad amount \"" + fields[5] + "\"");
    rec.amount = *amount;
    rec.unit = std::string(trim(fields[6]));
    units.kg_per(rec.unit);  // reject unknown units at parse time
    records.push_back(std::move(rec));
  }
  return records;
}

// Groups records by day, merges duplicate location_ids, sums the day's
// supply in kilograms and splits it evenly across the day's nodes. Days come
// out ascending and nodes sorted by id, so the result does not depend on row
// order.
inline std::vector<DailyInstance> build_daily_instances(
    const std::vector<MissionRecord>& records, const UnitMap& units,
    const Point& hub) {
  if (records.empty()) throw Error("build_daily_instances: no records");

  std::map<int, std::vector<const MissionRecord*>> by_day;
  for (const auto& rec : records) by_day[rec.day].push_back(&rec);

  std::vector<DailyInstance> instances;
  for (auto& [day, rows] : by_day) {
    DailyInstance inst;
    inst.day = day;
    inst.hub = hub;

    double total = 0.0;
    std::map<std::string, Point> locations;  // first row fixes coordinates
    for (const MissionRecord* rec : rows) {
      total += rec->amount * units.kg_per(rec->unit);
      locations.emplace(rec->location_id, Point{rec->lon, rec->lat});
    }
    if (total <= 0.0) throw ZeroSupply(day);

    inst.total_supply = total;
    const double q = total / static_cast<double>(locations.size());
    for (const auto& [id, point] : locations) {
      if (point == hub)
        throw Error("day " + std::to_string(day) + ": node " + id +
                    " coincides with the hub");
      inst.nodes.push_back(DemandNode{id, point, q});
    }
    instances.push_back(std::move(inst));
  }
  return instances;
}

// Fleet size: ceil(n / (payload/q)) with q = total/n, i.e. just enough
// vehicles that the summed payload covers the day's supply. The loop guards
// the ceiling against floating-point shortfall so m * payload >= total
// always holds.
inline int vehicle_count(const DailyInstance& inst, const VehicleConfig& cfg) {
  const double n = static_cast<double>(inst.nodes.size());
  const double q = inst.total_supply / n;
  if (q > cfg.payload_R) throw NodeExceedsCapacity(q, cfg.payload_R);
  int m = static_cast<int>(std::ceil(inst.total_supply / cfg.payload_R));
  if (m < 1) m = 1;
  while (static_cast<double>(m) * cfg.payload_R < inst.total_supply) ++m;
  return m;
}

// Debug dump: one header+value pair for the day, then the node table.
inline void write_instance_dump(const DailyInstance& inst, std::ostream& out) {
  out << "day,total_kg,hub_lat,hub_lon\n"
      << inst.day << ',' << fmt_f(inst.total_supply, 6) << ','
      << fmt_f(inst.hub.y, 6) << ',' << fmt_f(inst.hub.x, 6) << '\n'
      << "id,lat,lon,q_kg\n";
  for (const auto& node : inst.nodes)
    out << node.id << ',' << fmt_f(node.point.y, 6) << ','
        << fmt_f(node.point.x, 6) << ',' << fmt_f(node.demand_q, 6) << '\n';
}

}  // namespace fjvrp
