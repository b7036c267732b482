#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "fjvrp/errors.hpp"
#include "fjvrp/instance.hpp"
#include "fjvrp/rng.hpp"

namespace fjvrp {

// Shape of the generated dataset: day counts and node counts sized for a
// desk-scale batch, per-node supply drawn so that the standard payloads can
// always cover a day's demand with an even split.
struct SyntheticConfig {
  int days = 26;
  int max_nodes = 20;
  Point hub{-105.0, 40.0};
  double lat_lo = 39.85;
  double lat_span = 0.30;
  double lon_lo = -105.15;
  double lon_span = 0.30;
  double supply_lo = 120.0;  // per-node kg
  double supply_hi = 450.0;
  std::vector<double> payload_checks{1500.0, 2000.0};
};

namespace detail {

// A per-node supply is usable when every checked payload admits a feasible
// even split, with enough slack that the value survives a 6-decimal text
// round trip: the vehicle count and the per-vehicle node capacity must both
// sit away from their integer boundaries.
inline bool supply_feasible(double s, int n,
                            const std::vector<double>& payloads) {
  for (double R : payloads) {
    if (s > R) return false;
    double trips = static_cast<double>(n) * s / R;
    double frac_m = trips - std::floor(trips);
    if (frac_m < 0.05 || frac_m > 0.95) return false;
    double per = R / s;
    double frac_per = per - std::floor(per);
    if (frac_per < 0.05 || frac_per > 0.95) return false;
    auto m = static_cast<long long>(std::ceil(trips));
    if (m < 1) m = 1;
    if (m * static_cast<long long>(std::floor(per)) < n) return false;
  }
  return true;
}

}  // namespace detail

inline DailyInstance synthetic_day(int day, std::uint64_t seed,
                                   const SyntheticConfig& cfg = {}) {
  if (day < 1) throw Error("synthetic day number must be at least 1");
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(day)));

  // day 1 is always the single-node smoke case; the rest vary freely
  int n = day == 1 ? 1
                   : 1 + static_cast<int>(
                             rng.below(static_cast<std::uint64_t>(cfg.max_nodes)));

  double s = 0.0;
  do {
    s = cfg.supply_lo + (cfg.supply_hi - cfg.supply_lo) * rng.unit();
  } while (!detail::supply_feasible(s, n, cfg.payload_checks));

  DailyInstance inst;
  inst.day = day;
  inst.hub = cfg.hub;
  inst.total_supply = s * n;
  for (int i = 0; i < n; ++i) {
    Point p{0.0, 0.0};
    do {
      p = Point{cfg.lon_lo + cfg.lon_span * rng.unit(),
                cfg.lat_lo + cfg.lat_span * rng.unit()};
    } while (p == cfg.hub);
    char id[16];
    std::snprintf(id, sizeof id, "n%02d", i + 1);
    inst.nodes.push_back(DemandNode{id, p, s});
  }
  return inst;
}

inline std::vector<DailyInstance> generate_synthetic_days(
    std::uint64_t seed, const SyntheticConfig& cfg = {}) {
  std::vector<DailyInstance> days;
  days.reserve(cfg.days);
  for (int day = 1; day <= cfg.days; ++day)
    days.push_back(synthetic_day(day, seed, cfg));
  return days;
}

}  // namespace fjvrp
