#pragma once

#include <stdexcept>
#include <string>

namespace fjvrp {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct EmptyPointSet : Error {
  EmptyPointSet() : Error("convex_hull: point set is empty") {}
};

struct NegativeLength : Error {
  explicit NegativeLength(double d)
      : Error("degrees_to_miles: negative length " + std::to_string(d)) {}
};

// instance ingestion
struct MalformedRow : Error {
  std::size_t row;
  MalformedRow(std::size_t row_number, const std::string& what_part)
      : Error("row " + std::to_string(row_number) + ": " + what_part),
        row(row_number) {}
};

struct UnknownUnit : Error {
  std::string unit;
  explicit UnknownUnit(const std::string& name)
      : Error("unknown unit \"" + name + "\""), unit(name) {}
};

struct ZeroSupply : Error {
  int day;
  explicit ZeroSupply(int day_)
      : Error("day " + std::to_string(day_) + " has zero total supply"),
        day(day_) {}
};

struct NodeExceedsCapacity : Error {
  NodeExceedsCapacity(double q, double payload)
      : Error("per-node demand " + std::to_string(q) +
              " kg exceeds vehicle payload " + std::to_string(payload) +
              " kg") {}
};

// linear programming
struct CutNotViolated : Error {
  CutNotViolated() : Error("cut is not violated by the current LP optimum") {}
};

struct NoFractionalRow : Error {
  NoFractionalRow()
      : Error("tableau has no fractional row eligible for a cut") {}
};

// assignment
struct NoFeasibleAssignment : Error {
  int vehicles;
  explicit NoFeasibleAssignment(int m)
      : Error("no feasible assignment of nodes to " + std::to_string(m) +
              " vehicles; the routing problem itself is infeasible"),
        vehicles(m) {}
};

// routing
struct TooLargeForOracle : Error {
  std::size_t nodes;
  explicit TooLargeForOracle(std::size_t n)
      : Error("brute-force routing refuses " + std::to_string(n) +
              " nodes (limit 10)"),
        nodes(n) {}
};

}  // namespace fjvrp
