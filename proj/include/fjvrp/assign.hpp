#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fjvrp/bip.hpp"
#include "fjvrp/errors.hpp"
#include "fjvrp/geometry.hpp"
#include "fjvrp/instance.hpp"

namespace fjvrp {

// Coordinate range of all demand nodes across every day. Seeds fall back to
// this when a single day's hull is too poor in corners.
struct Bbox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;
};

inline Bbox nodes_bbox(const std::vector<DailyInstance>& days) {
  bool any = false;
  Bbox b;
  for (const auto& inst : days) {
    for (const auto& node : inst.nodes) {
      if (!any) {
        b = {node.point.x, node.point.y, node.point.x, node.point.y};
        any = true;
        continue;
      }
      b.min_lon = std::min(b.min_lon, node.point.x);
      b.min_lat = std::min(b.min_lat, node.point.y);
      b.max_lon = std::max(b.max_lon, node.point.x);
      b.max_lat = std::max(b.max_lat, node.point.y);
    }
  }
  if (!any) throw Error("nodes_bbox: no nodes in any instance");
  return b;
}

inline Bbox instance_bbox(const DailyInstance& inst) {
  return nodes_bbox({inst});
}

enum class SeedProvenance { hull_corners, grid_fallback, single_node };

struct SeedSet {
  std::vector<Point> seeds;  // one per vehicle
  SeedProvenance provenance = SeedProvenance::hull_corners;
};

// Seed hierarchy: a lone node seeds itself; a hull (nodes plus hub, hub
// never selectable) with at least m node-corners yields m corners by greedy
// farthest-point dispersion; anything poorer falls back to m points spread
// inclusively along the diagonal of the all-days bounding box.
inline SeedSet select_seeds(const DailyInstance& inst, int m,
                            const Bbox& global_bbox) {
  if (m < 1) throw Error("select_seeds: vehicle count must be at least 1");
  const auto& nodes = inst.nodes;

  if (nodes.size() == 1) {
    if (m != 1)
      throw Error("select_seeds: single node cannot seed " +
                  std::to_string(m) + " vehicles");
    return {{nodes[0].point}, SeedProvenance::single_node};
  }

  std::vector<Point> pts;
  pts.reserve(nodes.size() + 1);
  for (const auto& node : nodes) pts.push_back(node.point);
  pts.push_back(inst.hub);
  Hull hull = convex_hull(std::move(pts));

  // hull corners that are demand nodes, tagged with the lowest owning index
  std::vector<std::pair<Point, int>> corners;
  for (const Point& c : hull.corners) {
    if (c == inst.hub) continue;  // a hub seed degenerates h to 2*d_0i
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].point == c) {
        corners.emplace_back(c, static_cast<int>(i));
        break;
      }
    }
  }

  if (static_cast<int>(corners.size()) >= m) {
    SeedSet out;
    out.provenance = SeedProvenance::hull_corners;
    std::vector<char> used(corners.size(), 0);
    // far from the hub first, then grow a maximally spread set
    while (static_cast<int>(out.seeds.size()) < m) {
      int pick = -1;
      double best = -1.0;
      for (std::size_t c = 0; c < corners.size(); ++c) {
        if (used[c]) continue;
        double score;
        if (out.seeds.empty()) {
          score = euclid_dist(inst.hub, corners[c].first);
        } else {
          score = std::numeric_limits<double>::infinity();
          for (const Point& s : out.seeds)
            score = std::min(score, euclid_dist(s, corners[c].first));
        }
        bool better = score > best + 1e-12 ||
                      (score > best - 1e-12 && pick >= 0 &&
                       corners[c].second < corners[pick].second);
        if (pick < 0 || better) {
          pick = static_cast<int>(c);
          best = std::max(best, score);
        }
      }
      used[pick] = 1;
      out.seeds.push_back(corners[pick].first);
    }
    return out;
  }

  SeedSet out;
  out.provenance = SeedProvenance::grid_fallback;
  for (int k = 0; k < m; ++k) {
    double t = m == 1 ? 0.0
                      : static_cast<double>(k) / static_cast<double>(m - 1);
    out.seeds.push_back(
        Point{global_bbox.min_lon + t * (global_bbox.max_lon - global_bbox.min_lon),
              global_bbox.min_lat + t * (global_bbox.max_lat - global_bbox.min_lat)});
  }
  return out;
}

// h_ik: extra distance of detouring through node i on the hub-seed_k leg.
// Node-major flat layout, matching the assignment variable flattening.
struct ExtraMileageMatrix {
  int n = 0;
  int m = 0;
  std::vector<double> h;

  double at(int i, int k) const { return h[static_cast<std::size_t>(i) * m + k]; }
};

inline ExtraMileageMatrix extra_mileage(const DailyInstance& inst,
                                        const SeedSet& seeds) {
  ExtraMileageMatrix mat;
  mat.n = static_cast<int>(inst.nodes.size());
  mat.m = static_cast<int>(seeds.seeds.size());
  mat.h.reserve(static_cast<std::size_t>(mat.n) * mat.m);
  for (const auto& node : inst.nodes) {
    double d_0i = euclid_dist(inst.hub, node.point);
    for (const Point& seed : seeds.seeds) {
      double h = d_0i + euclid_dist(node.point, seed) -
                 euclid_dist(inst.hub, seed);
      mat.h.push_back(std::max(h, 0.0));  // floor rounding residue at zero
    }
  }
  return mat;
}

// Node partition produced by the assignment stage.
struct Assignment {
  std::vector<std::vector<int>> groups;  // node indices per vehicle, ascending
  std::vector<double> loads;             // kg per vehicle
  SeedSet seeds;
  double objective = 0.0;  // total extra mileage, length-degrees
  long node_count = 0;
  long cut_count = 0;
};

// Assignment program over z_ik (node i -> vehicle k), flat index i*m + k:
// minimize sum h_ik z_ik, each node covered exactly once, vehicle loads
// capped by the payload. Infeasibility here proves the whole routing
// problem has no m-vehicle solution, so it surfaces as an error.
inline Assignment assign_nodes(const DailyInstance& inst,
                               const VehicleConfig& cfg, int m,
                               const Bbox& global_bbox) {
  const int n = static_cast<int>(inst.nodes.size());
  SeedSet seeds = select_seeds(inst, m, global_bbox);
  ExtraMileageMatrix h = extra_mileage(inst, seeds);

  BipProblem p;
  p.lp.var_count = n * m;
  p.lp.objective = h.h;
  for (int i = 0; i < n; ++i) {  // every node rides exactly one vehicle
    LinearRow row;
    row.a.assign(p.lp.var_count, 0.0);
    for (int k = 0; k < m; ++k) row.a[static_cast<std::size_t>(i) * m + k] = 1.0;
    row.b = 1.0;
    p.lp.eq_rows.push_back(std::move(row));
  }
  for (int k = 0; k < m; ++k) {  // payload cap per vehicle
    LinearRow row;
    row.a.assign(p.lp.var_count, 0.0);
    for (int i = 0; i < n; ++i)
      row.a[static_cast<std::size_t>(i) * m + k] = inst.nodes[i].demand_q;
    row.b = cfg.payload_R;
    p.lp.le_rows.push_back(std::move(row));
  }

  BipSolution sol = solve_bip(p);
  if (sol.status == BipStatus::infeasible) throw NoFeasibleAssignment(m);

  Assignment out;
  out.groups.assign(m, {});
  out.loads.assign(m, 0.0);
  out.seeds = std::move(seeds);
  out.objective = sol.objective;
  out.node_count = sol.node_count;
  out.cut_count = sol.cut_count;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) {
      if (sol.values[static_cast<std::size_t>(i) * m + k]) {
        out.groups[k].push_back(i);
        out.loads[k] += inst.nodes[i].demand_q;
        break;
      }
    }
  }
  return out;
}

inline Assignment assign_nodes(const DailyInstance& inst,
                               const VehicleConfig& cfg,
                               const Bbox& global_bbox) {
  return assign_nodes(inst, cfg, vehicle_count(inst, cfg), global_bbox);
}

inline Assignment assign_nodes(const DailyInstance& inst,
                               const VehicleConfig& cfg) {
  return assign_nodes(inst, cfg, instance_bbox(inst));
}

// CSV: day,vehicle,node_id,lat,lon,q_kg with vehicles numbered from 1.
inline void write_assignment_dump(const DailyInstance& inst,
                                  const Assignment& assignment,
                                  std::ostream& out, bool header = true) {
  if (header) out << "day,vehicle,node_id,lat,lon,q_kg\n";
  for (std::size_t k = 0; k < assignment.groups.size(); ++k)
    for (int i : assignment.groups[k]) {
      const DemandNode& node = inst.nodes[i];
      out << inst.day << ',' << k + 1 << ',' << node.id << ','
          << fmt_f(node.point.y, 6) << ',' << fmt_f(node.point.x, 6) << ','
          << fmt_f(node.demand_q, 6) << '\n';
    }
}

}  // namespace fjvrp
