#pragma once

#include <string>
#include <vector>

#include "mptpt/rules.hpp"
#include "mptpt/simplex.hpp"
#include "mptpt/topology.hpp"

namespace mptpt {

/// Result of a path-producing baseline. `paths` is the canonical routing
/// (shared JSON form with the CLI); rule_counts follows the path-rule
/// accounting of path_rule_counts.
struct BaselineResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;      // LP objective (hop cost; LP baseline only)
  double routed = 0.0;         // demand actually delivered
  double total_demand = 0.0;
  std::vector<CommodityPath> paths;
  std::vector<int> rule_counts;  // per topology node
  long iterations = 0;
  double solve_ms = 0.0;
  bool stopped_early = false;  // greedy hit a stuck commodity and stopped

  bool fully_routed() const { return routed >= total_demand - 1e-6; }
};

/// One-shot optimum: solve the relaxed joint program over per-commodity
/// processed/unprocessed edge flows, then peel the vertex into paths. The
/// least constrained scheme — whenever any routing exists, this one finds it.
BaselineResult solve_lp1_baseline(const Topology& topo,
                                  const std::vector<Commodity>& commodities,
                                  const std::vector<ClassSpec>& classes,
                                  const SimplexOptions& options = {});

struct GreedyOptions {
  /// The literal scheme stops outright when one commodity cannot move
  /// (leaving later commodities unrouted); setting this instead skips the
  /// stuck commodity and keeps going. Reports mark which was used.
  bool skip_stuck_commodities = false;
};

/// Greedy: commodities in descending unit_cost*demand order (ties by index)
/// each repeatedly grab the hop-shortest residual round trip
/// source → PM → destination (PM chosen to minimize total hops, ties by the
/// smaller switch id) and route the largest amount the residual link
/// capacities — counted per traversal — and the PM budget allow.
BaselineResult greedy_shortest_path(const Topology& topo,
                                    const std::vector<Commodity>& commodities,
                                    const std::vector<ClassSpec>& classes,
                                    const GreedyOptions& options = {});

/// Stable-field-order JSON for path-form solutions, and its inverse.
std::string paths_to_json(const BaselineResult& result, const std::string& algorithm,
                          const Topology& topo);
BaselineResult paths_from_json(const std::string& text, const Topology& topo,
                               std::string* algorithm = nullptr);

}  // namespace mptpt
