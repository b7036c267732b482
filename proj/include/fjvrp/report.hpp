#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fjvrp/assign.hpp"
#include "fjvrp/errors.hpp"
#include "fjvrp/geometry.hpp"
#include "fjvrp/instance.hpp"
#include "fjvrp/rng.hpp"
#include "fjvrp/route.hpp"
#include "fjvrp/text.hpp"

namespace fjvrp {

enum class Algo { greedy, subtour, anneal, oracle };

inline constexpr std::array<Algo, 4> kAllAlgos{Algo::greedy, Algo::subtour,
                                               Algo::anneal, Algo::oracle};

inline std::string algo_name(Algo a) {
  switch (a) {
    case Algo::greedy:
      return "greedy";
    case Algo::subtour:
      return "subtour";
    case Algo::anneal:
      return "anneal";
    case Algo::oracle:
      return "oracle";
  }
  return "?";
}

inline std::optional<Algo> parse_algo(std::string_view name) {
  for (Algo a : kAllAlgos)
    if (algo_name(a) == name) return a;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Day files: one CSV per day, a total-supply comment above an id,lat,lon
// header. The day number lives in the filename, day_<N>.csv.

inline std::string day_file_name(int day) {
  return "day_" + std::to_string(day) + ".csv";
}

inline std::optional<int> day_number_from_name(const std::string& name) {
  constexpr std::string_view prefix = "day_";
  constexpr std::string_view suffix = ".csv";
  if (name.size() <= prefix.size() + suffix.size()) return std::nullopt;
  if (name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
    return std::nullopt;
  auto num = parse_int(
      name.substr(prefix.size(), name.size() - prefix.size() - suffix.size()));
  if (!num || *num < 1) return std::nullopt;
  return static_cast<int>(*num);
}

inline void write_day_file(std::ostream& out, const DailyInstance& inst) {
  out << "# total_kg=" << fmt_f(inst.total_supply, 6) << '\n';
  out << "id,lat,lon\n";
  for (const DemandNode& node : inst.nodes)
    out << node.id << ',' << fmt_f(node.point.y, 6) << ','
        << fmt_f(node.point.x, 6) << '\n';
}

inline DailyInstance read_day_file(std::istream& in, int day, Point hub) {
  if (day < 1) throw Error("day number must be at least 1");
  DailyInstance inst;
  inst.day = day;
  inst.hub = hub;

  std::string line;
  int row = 0;
  bool have_total = false;
  bool have_header = false;
  double total = 0.0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++row;
    std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      constexpr std::string_view key = "# total_kg=";
      if (text.substr(0, key.size()) == key) {
        auto value = parse_double(text.substr(key.size()));
        if (!value) throw MalformedRow(row, "bad total_kg value");
        if (have_total) throw MalformedRow(row, "duplicate total_kg comment");
        total = *value;
        have_total = true;
      }
      continue;
    }
    if (!have_header) {
      if (text != "id,lat,lon")
        throw MalformedRow(row, "expected header id,lat,lon");
      have_header = true;
      continue;
    }
    auto fields = split(text, ',');
    if (fields.size() != 3) throw MalformedRow(row, "expected 3 fields");
    std::string id = fields[0];
    if (id.empty()) throw MalformedRow(row, "empty id");
    if (!ids.insert(id).second) throw MalformedRow(row, "duplicate id " + id);
    auto lat = parse_double(fields[1]);
    auto lon = parse_double(fields[2]);
    if (!lat || !lon) throw MalformedRow(row, "bad coordinate");
    Point p{*lon, *lat};
    if (p == hub)
      throw Error("day " + std::to_string(day) + ": node " + id +
                  " coincides with the hub");
    inst.nodes.push_back(DemandNode{std::move(id), p, 0.0});
  }
  if (!have_total) throw Error("day file missing total_kg comment");
  if (inst.nodes.empty()) throw Error("day file has no nodes");
  if (total <= 0.0) throw ZeroSupply(day);

  std::sort(inst.nodes.begin(), inst.nodes.end(),
            [](const DemandNode& a, const DemandNode& b) { return a.id < b.id; });
  inst.total_supply = total;
  double q = total / static_cast<double>(inst.nodes.size());
  for (DemandNode& node : inst.nodes) node.demand_q = q;
  return inst;
}

inline void write_day_files(const std::vector<DailyInstance>& days,
                            const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const DailyInstance& inst : days) {
    fs::path path = fs::path(dir) / day_file_name(inst.day);
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_day_file(out, inst);
  }
}

inline std::vector<std::pair<int, std::filesystem::path>> discover_day_files(
    const std::string& days_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(days_dir))
    throw Error("days directory not found: " + days_dir);
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(days_dir)) {
    if (!entry.is_regular_file()) continue;
    auto num = day_number_from_name(entry.path().filename().string());
    if (num) files.emplace_back(*num, entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw Error("no day_<N>.csv files in " + days_dir);
  return files;
}

// ---------------------------------------------------------------------------
// Batch run configuration and per-day outcomes.

struct RunConfig {
  std::string days_dir;
  Point hub{0.0, 0.0};
  std::vector<double> payloads;
  std::vector<Algo> algorithms;
  std::uint64_t rng_seed = 12345;
  std::string unit_map_path;  // consumed by the ingest flow, not by run
  std::string output_dir = "out";
  int oracle_cap = 10;
  int sa_iterations = 0;  // 0 -> payload default
  bool verbose = false;
  std::ostream* log = nullptr;
};

inline int sa_iterations_for(double payload, int override_iterations) {
  if (override_iterations > 0) return override_iterations;
  return payload >= 2000.0 ? 20 : 15;
}

struct DayResult {
  int day = 0;
  int payload_index = 0;
  double payload = 0.0;
  bool failed = false;
  std::string error;
  int vehicles = 0;
  bool oracle_na = false;  // some group exceeded the exact-search cap
  DailyInstance inst;
  Assignment assignment;
  std::map<Algo, double> total_deg;
  std::map<Algo, std::vector<Route>> routes;
  double assign_seconds = 0.0;
  std::map<Algo, double> route_seconds;
};

struct RunOutput {
  std::vector<DayResult> results;  // payload-major, days ascending
  bool partial = false;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

inline Route route_group(Algo a, const std::vector<Point>& pts, Point hub,
                         int sa_iterations, std::uint64_t seed) {
  if (pts.empty()) return make_route(pts, hub, {});
  switch (a) {
    case Algo::greedy:
      return greedy_route(pts, hub);
    case Algo::subtour:
      return subtour_reversal(initial_route(pts, hub));
    case Algo::anneal:
      return simulated_annealing(initial_route(pts, hub), sa_iterations, seed);
    case Algo::oracle:
      return brute_force_route(pts, hub);
  }
  throw Error("unknown algorithm");
}

// Routes every vehicle group of an assigned day with one algorithm.
// Returns false when the exact search would exceed the cap.
[[gnu::noinline]] inline bool route_day(Algo a, const RunConfig& cfg,
                                        const DayResult& r, int sa_iterations,
                                        std::vector<Route>& routes,
                                        double& total) {
  routes.clear();
  total = 0.0;
  for (std::size_t k = 0; k < r.assignment.groups.size(); ++k) {
    std::vector<Point> pts;
    for (int i : r.assignment.groups[k]) pts.push_back(r.inst.nodes[i].point);
    if (a == Algo::oracle && static_cast<int>(pts.size()) > cfg.oracle_cap)
      return false;
    std::uint64_t seed = mix_seed(
        mix_seed(mix_seed(cfg.rng_seed,
                          static_cast<std::uint64_t>(r.payload_index)),
                 static_cast<std::uint64_t>(r.day)),
        k);
    Route route = route_group(a, pts, cfg.hub, sa_iterations, seed);
    total += route.length_deg;
    routes.push_back(std::move(route));
  }
  return true;
}

struct ParsedDay {
  int day = 0;
  std::optional<DailyInstance> inst;
  std::string error;
};

[[gnu::noinline]] inline ParsedDay parse_day_file(
    const std::filesystem::path& path, int num, Point hub) {
  ParsedDay pd;
  pd.day = num;
  try {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    pd.inst = read_day_file(in, num, hub);
  } catch (const Error& e) {
    pd.error = e.what();
  }
  return pd;
}

// Both assignment and routing stages for one already-parsed day.
[[gnu::noinline]] inline void process_day(const RunConfig& cfg,
                                          const VehicleConfig& vcfg,
                                          const Bbox& global, DayResult& r) {
  const int m = vehicle_count(r.inst, vcfg);
  auto t0 = std::chrono::steady_clock::now();
  r.assignment = assign_nodes(r.inst, vcfg, m, global);
  r.assign_seconds = seconds_since(t0);
  r.vehicles = m;

  for (Algo a : cfg.algorithms) {
    auto ta = std::chrono::steady_clock::now();
    std::vector<Route> routes;
    double total = 0.0;
    if (route_day(a, cfg, r, vcfg.sa_iterations, routes, total)) {
      r.total_deg[a] = total;
      r.routes[a] = std::move(routes);
    } else {
      r.oracle_na = true;
      if (cfg.log)
        *cfg.log << "day " << r.day << " payload " << r.payload
                 << ": a group exceeds the exact-search cap of "
                 << cfg.oracle_cap << " nodes; oracle column is NA\n";
    }
    r.route_seconds[a] = seconds_since(ta);
  }
  if (cfg.log && cfg.verbose)
    *cfg.log << "day " << r.day << " payload " << r.payload << ": m="
             << r.vehicles << " assignment " << fmt_f(r.assign_seconds, 3)
             << "s\n";
}

[[gnu::noinline]] inline bool process_day_guarded(const RunConfig& cfg,
                                                  const VehicleConfig& vcfg,
                                                  const Bbox& global,
                                                  DayResult& r) {
  try {
    process_day(cfg, vcfg, global, r);
    return true;
  } catch (const Error& e) {
    r.failed = true;
    r.error = "day " + std::to_string(r.day) + ": " + e.what();
    if (cfg.log) *cfg.log << r.error << '\n';
    return false;
  }
}

}  // namespace detail

// Ingest every day file, then for each payload: size the fleet, solve the
// assignment program, and route every vehicle with each requested algorithm.
// A day that fails (unparseable, overweight node, or provably infeasible at
// the computed fleet size) is reported and skipped; the remaining days still
// run and the batch is marked partial.
inline RunOutput run_pipeline(const RunConfig& cfg) {
  if (cfg.payloads.empty()) throw Error("at least one payload is required");
  if (cfg.algorithms.empty()) throw Error("at least one algorithm is required");

  std::vector<detail::ParsedDay> days;
  std::vector<DailyInstance> parsed;
  for (const auto& [num, path] : discover_day_files(cfg.days_dir)) {
    days.push_back(detail::parse_day_file(path, num, cfg.hub));
    if (days.back().inst) parsed.push_back(*days.back().inst);
  }
  if (parsed.empty()) throw Error("no parseable day files in " + cfg.days_dir);
  const Bbox global = nodes_bbox(parsed);

  RunOutput out;
  for (std::size_t pi = 0; pi < cfg.payloads.size(); ++pi) {
    const double payload = cfg.payloads[pi];
    const VehicleConfig vcfg{payload,
                             sa_iterations_for(payload, cfg.sa_iterations)};
    for (const detail::ParsedDay& pd : days) {
      DayResult r;
      r.day = pd.day;
      r.payload_index = static_cast<int>(pi);
      r.payload = payload;
      if (!pd.inst) {
        r.failed = true;
        r.error = pd.error;
        out.partial = true;
        if (cfg.log)
          *cfg.log << "day " << r.day << " skipped: " << r.error << '\n';
        out.results.push_back(std::move(r));
        continue;
      }
      r.inst = *pd.inst;
      if (!detail::process_day_guarded(cfg, vcfg, global, r))
        out.partial = true;
      out.results.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emitters. Aggregation stays in full precision; rounding happens only when
// a cell is printed (degrees to 6 decimals, miles to 3).

inline std::string fmt_payload(double p) {
  auto ip = static_cast<long long>(p);
  if (p == static_cast<double>(ip)) return std::to_string(ip);
  return fmt_f(p, 3);
}

namespace detail {

inline std::vector<std::vector<std::string>> render_table(
    const RunConfig& cfg, const RunOutput& out) {
  std::set<int> day_set;
  std::map<std::pair<int, int>, const DayResult*> by_cell;
  for (const DayResult& r : out.results) {
    day_set.insert(r.day);
    by_cell[{r.payload_index, r.day}] = &r;
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"day"};
  for (std::size_t pi = 0; pi < cfg.payloads.size(); ++pi) {
    std::string p = fmt_payload(cfg.payloads[pi]);
    header.push_back("m_" + p);
    for (Algo a : cfg.algorithms) {
      header.push_back(algo_name(a) + "_" + p + "_deg");
      header.push_back(algo_name(a) + "_" + p + "_mi");
    }
  }
  rows.push_back(std::move(header));

  for (int day : day_set) {
    std::vector<std::string> row{std::to_string(day)};
    for (std::size_t pi = 0; pi < cfg.payloads.size(); ++pi) {
      auto it = by_cell.find({static_cast<int>(pi), day});
      const DayResult* r =
          it == by_cell.end() || it->second->failed ? nullptr : it->second;
      row.push_back(r ? std::to_string(r->vehicles) : "NA");
      for (Algo a : cfg.algorithms) {
        if (r && r->total_deg.count(a)) {
          double deg = r->total_deg.at(a);
          row.push_back(fmt_f(deg, 6));
          row.push_back(fmt_f(degrees_to_miles(deg), 3));
        } else {
          row.push_back("NA");
          row.push_back("NA");
        }
      }
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::string> totals{"Totals"};
  for (std::size_t pi = 0; pi < cfg.payloads.size(); ++pi) {
    totals.push_back("");
    for (Algo a : cfg.algorithms) {
      double sum = 0.0;
      bool complete = true;
      for (int day : day_set) {
        auto it = by_cell.find({static_cast<int>(pi), day});
        if (it == by_cell.end() || it->second->failed ||
            !it->second->total_deg.count(a)) {
          complete = false;
          break;
        }
        sum += it->second->total_deg.at(a);
      }
      if (complete) {
        totals.push_back(fmt_f(sum, 6));
        totals.push_back(fmt_f(degrees_to_miles(sum), 3));
      } else {
        totals.push_back("NA");
        totals.push_back("NA");
      }
    }
  }
  rows.push_back(std::move(totals));
  return rows;
}

}  // namespace detail

inline void emit_table_csv(const RunConfig& cfg, const RunOutput& out,
                           std::ostream& os) {
  for (const auto& row : detail::render_table(cfg, out)) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  }
}

inline void emit_table_text(const RunConfig& cfg, const RunOutput& out,
                            std::ostream& os) {
  auto rows = detail::render_table(cfg, out);
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << "  ";
      if (i == 0) {
        os << row[i] << std::string(width[i] - row[i].size(), ' ');
      } else {
        os << std::string(width[i] - row[i].size(), ' ') << row[i];
      }
    }
    os << '\n';
  }
}

// Two-stage wall-clock seconds per algorithm and payload, summed over days:
// the shared assignment stage plus that algorithm's routing stage.
inline void emit_timings(const RunConfig& cfg, const RunOutput& out,
                         std::ostream& os) {
  os << "payload,algorithm,seconds\n";
  if (out.results.empty()) return;
  for (std::size_t pi = 0; pi < cfg.payloads.size(); ++pi) {
    for (Algo a : cfg.algorithms) {
      double total = 0.0;
      for (const DayResult& r : out.results) {
        if (r.payload_index != static_cast<int>(pi)) continue;
        total += r.assign_seconds;
        auto it = r.route_seconds.find(a);
        if (it != r.route_seconds.end()) total += it->second;
      }
      os << fmt_payload(cfg.payloads[pi]) << ',' << algo_name(a) << ','
         << fmt_f(total, 6) << '\n';
    }
  }
}

inline void write_routes_csv(const RunConfig& cfg, const RunOutput& out,
                             int payload_index, std::ostream& os) {
  os << "day,vehicle,algorithm,seq_index,node_id,lat,lon\n";
  for (const DayResult& r : out.results) {
    if (r.payload_index != payload_index || r.failed) continue;
    for (Algo a : cfg.algorithms) {
      auto it = r.routes.find(a);
      if (it == r.routes.end()) continue;
      for (std::size_t k = 0; k < it->second.size(); ++k) {
        std::vector<std::string> ids;
        for (int i : r.assignment.groups[k]) ids.push_back(r.inst.nodes[i].id);
        write_route_dump(os, r.day, static_cast<int>(k) + 1, algo_name(a),
                         it->second[k], ids, false);
      }
    }
  }
}

inline void write_assignments_csv(const RunConfig& cfg, const RunOutput& out,
                                  int payload_index, std::ostream& os) {
  (void)cfg;
  os << "day,vehicle,node_id,lat,lon,q_kg\n";
  for (const DayResult& r : out.results) {
    if (r.payload_index != payload_index || r.failed) continue;
    write_assignment_dump(r.inst, r.assignment, os, false);
  }
}

// Writes table.csv, table.txt, timings.csv, and per-payload routes and
// assignments dumps into output_dir. With a single payload the dumps are
// routes.csv / assignments.csv; with several they carry a _<payload> suffix
// since the dump schema has no payload column. Returns the process exit
// code: 0 on full success, 2 when any day failed.
inline int write_outputs(const RunConfig& cfg, const RunOutput& out) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(cfg.output_dir) / name);
    if (!f) throw Error("cannot write " + name + " in " + cfg.output_dir);
    return f;
  };
  {
    auto f = open("table.csv");
    emit_table_csv(cfg, out, f);
  }
  {
    auto f = open("table.txt");
    emit_table_text(cfg, out, f);
  }
  {
    auto f = open("timings.csv");
    emit_timings(cfg, out, f);
  }
  const bool multi = cfg.payloads.size() > 1;
  for (std::size_t pi = 0; pi < cfg.payloads.size(); ++pi) {
    std::string suffix =
        multi ? "_" + fmt_payload(cfg.payloads[pi]) : std::string();
    {
      auto f = open("routes" + suffix + ".csv");
      write_routes_csv(cfg, out, static_cast<int>(pi), f);
    }
    {
      auto f = open("assignments" + suffix + ".csv");
      write_assignments_csv(cfg, out, static_cast<int>(pi), f);
    }
  }
  return out.partial ? 2 : 0;
}

}  // namespace fjvrp
