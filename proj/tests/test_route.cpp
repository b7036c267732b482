#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "fjvrp/route.hpp"

using namespace fjvrp;

namespace {

std::vector<Point> random_nodes(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::vector<Point> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back(Point{coord(gen), coord(gen)});
  return nodes;
}

void check_valid(const Route& r, const std::vector<Point>& nodes, Point hub) {
  REQUIRE(r.sequence.size() == nodes.size() + 2);
  CHECK(r.sequence.front() == hub);
  CHECK(r.sequence.back() == hub);
  REQUIRE(r.visit_order.size() == nodes.size());
  std::vector<char> seen(nodes.size(), 0);
  for (std::size_t p = 0; p < r.visit_order.size(); ++p) {
    int i = r.visit_order[p];
    REQUIRE(i >= 0);
    REQUIRE(i < static_cast<int>(nodes.size()));
    CHECK(!seen[i]);
    seen[i] = 1;
    CHECK(r.sequence[p + 1] == nodes[i]);
  }
  CHECK(r.length_deg == Catch::Approx(route_length(r.sequence)).margin(1e-12));
}

// The window rules, transcribed independently: over positions 0..n+1 the
// beginning is not the first, last, or second-to-last position, the end is
// not the last position, and the window may not cover both position 1 and
// position n.
bool window_legal(int n, int b, int e) {
  if (e <= b) return false;
  if (b == 0 || b == n + 1 || b == n) return false;
  if (e == n + 1) return false;
  bool covers_second = b <= 1 && 1 <= e;
  bool covers_second_to_last = b <= n && n <= e;
  if (covers_second && covers_second_to_last) return false;
  return true;
}

}  // namespace

TEST_CASE("route length sums consecutive hops") {
  CHECK(route_length({}) == 0.0);
  CHECK(route_length({Point{2, 2}}) == 0.0);
  CHECK(route_length({Point{0, 0}, Point{3, 4}, Point{0, 0}}) == 10.0);
}

TEST_CASE("route length is direction-symmetric") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point> seq{Point{0, 0}};
    for (int i = 0; i < 6; ++i) seq.push_back(Point{coord(gen), coord(gen)});
    seq.push_back(Point{0, 0});
    std::vector<Point> rev = seq;
    std::reverse(rev.begin() + 1, rev.end() - 1);
    CHECK(route_length(rev) ==
          Catch::Approx(route_length(seq)).margin(1e-9));
  }
}

TEST_CASE("greedy walks to the nearest unvisited node") {
  Point hub{0, 0};

  SECTION("single node out and back") {
    Route r = greedy_route({Point{3, 4}}, hub);
    check_valid(r, {Point{3, 4}}, hub);
    CHECK(r.length_deg == 10.0);
  }

  SECTION("collinear nodes in distance order") {
    std::vector<Point> nodes{Point{10, 0}, Point{1, 0}, Point{2, 0}};
    Route r = greedy_route(nodes, hub);
    CHECK(r.visit_order == std::vector<int>{1, 2, 0});
  }

  SECTION("distance ties take the lowest index") {
    std::vector<Point> nodes{Point{1, 0}, Point{-1, 0}};
    Route r = greedy_route(nodes, hub);
    CHECK(r.visit_order == std::vector<int>{0, 1});
  }

  SECTION("empty node set is rejected") {
    CHECK_THROWS_AS(greedy_route({}, hub), EmptyPointSet);
  }

  SECTION("never beats the exact tour") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
      auto nodes = random_nodes(gen, 7);
      Route g = greedy_route(nodes, hub);
      Route exact = brute_force_route(nodes, hub);
      check_valid(g, nodes, hub);
      CHECK(g.length_deg >= exact.length_deg - 1e-9);
    }
  }
}

TEST_CASE("legal reversal windows match the boundary rules") {
  for (int n = 0; n <= 8; ++n) {
    auto pairs = legal_reversal_pairs(n);
    std::vector<std::pair<int, int>> expect;
    for (int b = 0; b <= n + 1; ++b)
      for (int e = 0; e <= n + 1; ++e)
        if (window_legal(n, b, e)) expect.emplace_back(b, e);
    std::sort(expect.begin(), expect.end());
    auto sorted = pairs;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == expect);
  }
  CHECK(legal_reversal_pairs(1).empty());
  CHECK(legal_reversal_pairs(2).empty());
  CHECK(legal_reversal_pairs(3) ==
        std::vector<std::pair<int, int>>{{1, 2}, {2, 3}});
  CHECK(legal_reversal_pairs(4).size() == 5);
}

TEST_CASE("subsequence reversal flips the window and nothing else") {
  Point hub{0, 0};
  std::vector<Point> nodes{Point{1, 0}, Point{2, 0}, Point{3, 0}, Point{4, 0}};
  Route r = initial_route(nodes, hub);
  Route flipped = reverse_subsequence(r, 2, 4);
  CHECK(flipped.visit_order == std::vector<int>{0, 3, 2, 1});
  CHECK(flipped.sequence[1] == Point(1, 0));
  CHECK(flipped.sequence[2] == Point(4, 0));
  CHECK(flipped.length_deg == Catch::Approx(route_length(flipped.sequence)));
}

TEST_CASE("subtour reversal uncrosses a three-node tour") {
  Point hub{0, 0};
  std::vector<Point> nodes{Point{1, 0}, Point{0, 1}, Point{1, 1}};
  // visiting order (1,0),(0,1),(1,1) crosses itself
  Route start = initial_route(nodes, hub);
  CHECK(start.length_deg == Catch::Approx(2.0 + 2.0 * std::sqrt(2.0)));
  Route fixed = subtour_reversal(start);
  CHECK(fixed.visit_order == std::vector<int>{0, 2, 1});
  CHECK(fixed.length_deg == Catch::Approx(4.0));
}

TEST_CASE("subtour reversal leaves an optimal square alone") {
  Point hub{0, 0};
  std::vector<Point> nodes{Point{1, 0}, Point{1, 1}, Point{0, 1}};
  Route start = initial_route(nodes, hub);  // the perimeter, length 4
  Route out = subtour_reversal(start);
  CHECK(out.visit_order == start.visit_order);
  CHECK(out.length_deg == start.length_deg);
}

TEST_CASE("subtour reversal is monotone, locally optimal, idempotent") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> size(3, 9);
  Point hub{0.5, -0.5};
  for (int trial = 0; trial < 200; ++trial) {
    auto nodes = random_nodes(gen, size(gen));
    Route start = initial_route(nodes, hub);
    Route out = subtour_reversal(start);
    Route exact = brute_force_route(nodes, hub);

    check_valid(out, nodes, hub);
    CHECK(out.length_deg <= start.length_deg + 1e-12);
    CHECK(out.length_deg >= exact.length_deg - 1e-9);

    for (const auto& [b, e] : legal_reversal_pairs(interior_count(out)))
      CHECK(reverse_subsequence(out, b, e).length_deg >=
            out.length_deg - 1e-12);

    Route again = subtour_reversal(out);
    CHECK(again.visit_order == out.visit_order);
  }
}

TEST_CASE("annealing schedule is a geometric ladder") {
  AnnealingSchedule s = annealing_schedule(10.0, 20);
  CHECK(s.iterations_per_T == 20);
  CHECK(s.temperatures[0] == Catch::Approx(2.0));
  for (std::size_t i = 1; i < s.temperatures.size(); ++i) {
    CHECK(s.temperatures[i] ==
          Catch::Approx(0.2 * s.temperatures[i - 1]));
    CHECK(s.temperatures[i] < s.temperatures[i - 1]);
    CHECK(s.temperatures[i] > 0.0);
  }
  CHECK_THROWS_AS(annealing_schedule(0.0, 15), Error);
  CHECK_THROWS_AS(annealing_schedule(-1.0, 15), Error);
  CHECK_THROWS_AS(annealing_schedule(10.0, 0), Error);
}

TEST_CASE("annealing leaves tiny or degenerate routes unchanged") {
  Point hub{0, 0};

  SECTION("one node") {
    Route start = initial_route({Point{2, 2}}, hub);
    Route out = simulated_annealing(start, 15, 42);
    CHECK(out.visit_order == start.visit_order);
    CHECK(out.length_deg == start.length_deg);
  }

  SECTION("three nodes have no legal window") {
    auto nodes = std::vector<Point>{Point{1, 0}, Point{0, 1}, Point{1, 1}};
    Route start = initial_route(nodes, hub);
    Route out = simulated_annealing(start, 15, 42);
    CHECK(out.visit_order == start.visit_order);
  }

  SECTION("all nodes on the hub give a zero-length start") {
    std::vector<Point> nodes(5, Point{0, 0});
    Route start = initial_route(nodes, hub);
    REQUIRE(start.length_deg == 0.0);
    Route out = simulated_annealing(start, 15, 42);
    CHECK(out.visit_order == start.visit_order);
  }
}

TEST_CASE("annealing is reproducible from its seed") {
  std::mt19937_64 gen(123);
  for (int trial = 0; trial < 20; ++trial) {
    auto nodes = random_nodes(gen, 8);
    Route start = initial_route(nodes, Point{0, 0});
    Route a = simulated_annealing(start, 15, 1000 + trial);
    Route b = simulated_annealing(start, 15, 1000 + trial);
    CHECK(a.visit_order == b.visit_order);
    CHECK(a.length_deg == b.length_deg);
  }
}

TEST_CASE("annealing never loses to its start and never beats the oracle") {
  std::mt19937_64 gen(321);
  std::uniform_int_distribution<int> size(4, 9);
  Point hub{1.0, 1.0};
  for (int trial = 0; trial < 200; ++trial) {
    auto nodes = random_nodes(gen, size(gen));
    Route start = initial_route(nodes, hub);
    Route out = simulated_annealing(start, 15, 7000 + trial);
    Route exact = brute_force_route(nodes, hub);

    check_valid(out, nodes, hub);
    CHECK(out.length_deg <= start.length_deg + 1e-12);
    CHECK(out.length_deg >= exact.length_deg - 1e-9);
  }
}

TEST_CASE("exact search over half the permutations") {
  Point hub{0, 0};

  SECTION("two nodes, either order") {
    std::vector<Point> nodes{Point{3, 0}, Point{0, 4}};
    Route r = brute_force_route(nodes, hub);
    check_valid(r, nodes, hub);
    CHECK(r.length_deg == Catch::Approx(3.0 + 5.0 + 4.0));
  }

  SECTION("unit square perimeter is optimal") {
    std::vector<Point> nodes{Point{1, 1}, Point{0, 1}, Point{1, 0}};
    Route r = brute_force_route(nodes, hub);
    CHECK(r.length_deg == Catch::Approx(4.0));
  }

  SECTION("empty set is an out-and-back at the hub") {
    Route r = brute_force_route({}, hub);
    CHECK(r.length_deg == 0.0);
    CHECK(r.sequence.size() == 2);
  }

  SECTION("cap at ten nodes") {
    std::vector<Point> nodes;
    for (int i = 0; i < 11; ++i)
      nodes.push_back(Point{static_cast<double>(i), 0.0});
    try {
      brute_force_route(nodes, hub);
      FAIL("expected TooLargeForOracle");
    } catch (const TooLargeForOracle& e) {
      CHECK(e.nodes == 11);
    }
  }

  SECTION("evaluation count arithmetic at the cap boundary") {
    double evals_11 = 19958400.0;  // 11!/2
    CHECK(evals_11 * 0.000068 == Catch::Approx(1357.1712));
    CHECK(fmt_f(evals_11 * 0.000068 / 60.0, 1) == "22.6");
  }
}

TEST_CASE("route dump format") {
  Point hub{85.0, 27.5};
  std::vector<Point> nodes{Point{85.2, 27.6}, Point{84.9, 27.4}};
  Route r = make_route(nodes, hub, {1, 0});
  std::ostringstream out;
  write_route_dump(out, 3, 1, "greedy", r, {"n01", "n02"});
  std::ostringstream expect;
  expect << "day,vehicle,algorithm,seq_index,node_id,lat,lon\n"
         << "3,1,greedy,0,hub,27.500000,85.000000\n"
         << "3,1,greedy,1,n02,27.400000,84.900000\n"
         << "3,1,greedy,2,n01,27.600000,85.200000\n"
         << "3,1,greedy,3,hub,27.500000,85.000000\n"
         << "3,1,greedy,total,," << fmt_f(r.length_deg, 6) << ','
         << fmt_f(degrees_to_miles(r.length_deg), 6) << '\n';
  CHECK(out.str() == expect.str());
}
