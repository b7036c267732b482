#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fjvrp/errors.hpp"
#include "fjvrp/geometry.hpp"
#include "fjvrp/rng.hpp"
#include "fjvrp/text.hpp"

namespace fjvrp {

// Closed tour: hub, every assigned node exactly once, hub again.
// visit_order holds indices into the node list the route was built from,
// in visiting order, so callers can join back to node ids.
struct Route {
  std::vector<Point> sequence;
  std::vector<int> visit_order;
  double length_deg = 0.0;
};

inline double route_length(const std::vector<Point>& sequence) {
  double total = 0.0;
  for (std::size_t i = 1; i < sequence.size(); ++i)
    total += euclid_dist(sequence[i - 1], sequence[i]);
  return total;
}

inline Route make_route(const std::vector<Point>& nodes, Point hub,
                        std::vector<int> order) {
  Route r;
  r.sequence.reserve(order.size() + 2);
  r.sequence.push_back(hub);
  for (int i : order) r.sequence.push_back(nodes[i]);
  r.sequence.push_back(hub);
  r.visit_order = std::move(order);
  r.length_deg = route_length(r.sequence);
  return r;
}

inline int interior_count(const Route& r) {
  return static_cast<int>(r.visit_order.size());
}

// Starting tour for the improvement heuristics: input order between the hub
// copies. Callers hand nodes over in ascending id order, so this is the
// numeric-order tour.
inline Route initial_route(const std::vector<Point>& nodes, Point hub) {
  std::vector<int> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return make_route(nodes, hub, std::move(order));
}

// Nearest unvisited neighbor from the hub outward; distance ties take the
// lowest node index.
inline Route greedy_route(const std::vector<Point>& nodes, Point hub) {
  if (nodes.empty()) throw EmptyPointSet();
  const int n = static_cast<int>(nodes.size());
  std::vector<char> used(n, 0);
  std::vector<int> order;
  order.reserve(n);
  Point cur = hub;
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      double d = euclid_dist(cur, nodes[i]);
      if (d < best) {
        best = d;
        pick = i;
      }
    }
    used[pick] = 1;
    order.push_back(pick);
    cur = nodes[pick];
  }
  return make_route(nodes, hub, std::move(order));
}

// Tour positions are 0-based with the hub at 0 and at n+1. A reversal
// inverts the window [b, e]. The beginning may not be the first, the last,
// or the second-to-last position; the end may not be the last position; and
// the window may not cover both position 1 and position n. That leaves
// 1 <= b < e <= n with (b, e) = (1, n) excluded. Enumeration order is
// b-major ascending.
inline std::vector<std::pair<int, int>> legal_reversal_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int b = 1; b <= n - 1; ++b)
    for (int e = b + 1; e <= n; ++e) {
      if (b == 1 && e == n) continue;
      pairs.emplace_back(b, e);
    }
  return pairs;
}

inline Route reverse_subsequence(const Route& r, int b, int e) {
  Route out = r;
  std::reverse(out.sequence.begin() + b, out.sequence.begin() + e + 1);
  std::reverse(out.visit_order.begin() + (b - 1), out.visit_order.begin() + e);
  out.length_deg = route_length(out.sequence);
  return out;
}

// Best-improvement passes over every legal reversal until none shortens the
// tour. Equal-best candidates resolve to the earliest pair in enumeration
// order.
inline Route subtour_reversal(const Route& start) {
  Route current = start;
  const auto pairs = legal_reversal_pairs(interior_count(current));
  bool improved = true;
  while (improved) {
    improved = false;
    double best_len = current.length_deg;
    int best_b = -1, best_e = -1;
    for (const auto& [b, e] : pairs) {
      double len = reverse_subsequence(current, b, e).length_deg;
      if (len < best_len) {
        best_len = len;
        best_b = b;
        best_e = e;
      }
    }
    if (best_b >= 0) {
      current = reverse_subsequence(current, best_b, best_e);
      improved = true;
    }
  }
  return current;
}

// Five-rung geometric cooling ladder anchored to the starting length.
struct AnnealingSchedule {
  std::array<double, 5> temperatures{};
  int iterations_per_T = 15;
};

inline AnnealingSchedule annealing_schedule(double z0, int iterations) {
  if (z0 <= 0.0)
    throw Error("annealing_schedule: starting length must be positive");
  if (iterations < 1)
    throw Error("annealing_schedule: iterations must be at least 1");
  AnnealingSchedule s;
  s.iterations_per_T = iterations;
  double t = 0.2 * z0;
  for (double& temp : s.temperatures) {
    temp = t;
    t *= 0.2;
  }
  return s;
}

// One acceptance decision: the current tour of length z_c against a
// candidate of length z_n, with the seed that drives the draws.
struct TrialState {
  double z_c = 0.0;
  double z_n = 0.0;
  std::uint64_t rng_seed = 0;
};

// Random restarts of the reversal move under the cooling ladder. A candidate
// no longer than the current tour is always taken; a longer one is taken
// when e^((z_c - z_n)/T) exceeds a uniform draw from [0,1). Returns the best
// tour seen anywhere in the walk, so the result never exceeds the start.
// Fewer than 4 interior nodes leaves no legal window wholly inside the
// boundary rules above, and a zero-length start (all nodes on the hub) has
// no positive temperature ladder; both come back unchanged.
inline Route simulated_annealing(const Route& start,
                                 const AnnealingSchedule& sched,
                                 std::uint64_t rng_seed) {
  const int n = interior_count(start);
  if (n < 4) return start;
  if (start.length_deg <= 0.0) return start;

  const auto pairs = legal_reversal_pairs(n);
  Rng rng(rng_seed);
  Route current = start;
  Route best = start;
  TrialState trial{start.length_deg, start.length_deg, rng_seed};
  for (double T : sched.temperatures) {
    for (int it = 0; it < sched.iterations_per_T; ++it) {
      const auto& [b, e] = pairs[rng.below(pairs.size())];
      Route cand = reverse_subsequence(current, b, e);
      trial.z_c = current.length_deg;
      trial.z_n = cand.length_deg;
      bool accept = trial.z_n <= trial.z_c;
      if (!accept) {
        double w = rng.unit();
        accept = std::exp((trial.z_c - trial.z_n) / T) > w;
      }
      if (accept) {
        current = std::move(cand);
        if (current.length_deg < best.length_deg) best = current;
      }
    }
  }
  return best;
}

inline Route simulated_annealing(const Route& start, int iterations,
                                 std::uint64_t rng_seed) {
  if (interior_count(start) < 4 || start.length_deg <= 0.0) return start;
  return simulated_annealing(
      start, annealing_schedule(start.length_deg, iterations), rng_seed);
}

// Exact minimum over all n!/2 distinct cycles; each mirror-image pair is
// evaluated once by fixing first-visit < last-visit. Equal-length optima
// resolve to the earliest permutation in lexicographic order.
inline Route brute_force_route(const std::vector<Point>& nodes, Point hub) {
  const int n = static_cast<int>(nodes.size());
  if (n > 10) throw TooLargeForOracle(n);
  if (n == 0) return make_route(nodes, hub, {});

  std::vector<std::vector<double>> dist(n + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i <= n; ++i) {
    const Point& a = i == n ? hub : nodes[i];
    for (int j = 0; j <= n; ++j) {
      const Point& b = j == n ? hub : nodes[j];
      dist[i][j] = euclid_dist(a, b);
    }
  }

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<int> best_perm = perm;
  double best_len = std::numeric_limits<double>::infinity();
  do {
    if (n >= 2 && perm.front() > perm.back()) continue;
    double len = dist[n][perm[0]];
    for (int i = 0; i + 1 < n; ++i) len += dist[perm[i]][perm[i + 1]];
    len += dist[perm[n - 1]][n];
    if (len < best_len) {
      best_len = len;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return make_route(nodes, hub, std::move(best_perm));
}

// CSV rows: day,vehicle,algorithm,seq_index,node_id,lat,lon for every stop,
// then a summary row with seq_index "total" carrying length_deg and
// length_miles in the last two columns. `ids` maps node index -> id.
inline void write_route_dump(std::ostream& out, int day, int vehicle,
                             const std::string& algorithm, const Route& r,
                             const std::vector<std::string>& ids,
                             bool header = true) {
  if (header) out << "day,vehicle,algorithm,seq_index,node_id,lat,lon\n";
  for (std::size_t p = 0; p < r.sequence.size(); ++p) {
    const Point& pt = r.sequence[p];
    bool is_hub = p == 0 || p + 1 == r.sequence.size();
    std::string id = is_hub ? "hub" : ids[r.visit_order[p - 1]];
    out << day << ',' << vehicle << ',' << algorithm << ',' << p << ',' << id
        << ',' << fmt_f(pt.y, 6) << ',' << fmt_f(pt.x, 6) << '\n';
  }
  out << day << ',' << vehicle << ',' << algorithm << ",total,,"
      << fmt_f(r.length_deg, 6) << ','
      << fmt_f(degrees_to_miles(r.length_deg), 6) << '\n';
}

}  // namespace fjvrp
