#pragma once

#include <string>
#include <vector>

#include "mptpt/pipeline.hpp"
#include "mptpt/rules.hpp"
#include "mptpt/topology.hpp"

namespace mptpt {

/// One commodity's routing as raw per-edge flow: f0 before processing, f1
/// after. This is the canonical form every check recomputes from — nothing is
/// trusted from a solver.
struct CommodityFlow {
  std::vector<double> f0;  // per topology edge
  std::vector<double> f1;
};

struct CheckResult {
  std::string name;
  double worst = 0.0;  // largest violation magnitude found
  bool pass = true;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  double tolerance = 0.0;

  bool pass() const {
    for (const CheckResult& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::string to_json() const;
};

/// Expands a tree-form solution into per-commodity edge flows by walking each
/// share over its step-1 tree into the PM and its step-2 tree home. Throws on
/// structurally broken solutions (unknown tags, paths that reach no PM).
std::vector<CommodityFlow> flows_from_trees(const RoutingSolution& solution,
                                            const Topology& topo,
                                            const std::vector<Commodity>& commodities);

/// Expands path-form routings (baselines) into the same canonical flows.
std::vector<CommodityFlow> flows_from_paths(const std::vector<CommodityPath>& paths,
                                            const Topology& topo,
                                            std::size_t num_commodities);

/// Checks every constraint a routing must satisfy, each from the raw flows:
/// conservation (demand enters at the source, processed traffic drains only
/// at the destination), link capacities under the joint load, PM processing
/// budgets, processing happening exactly once per unit of demand (and never
/// twice), per-commodity VM coupling (what enters a PM unprocessed leaves it
/// processed), nonnegativity, and full demand delivery. A check passes when
/// its worst violation is at most `tolerance` (default 1e-6, looser than the
/// solver's 1e-7 so honest rounding never trips it).
VerificationReport verify_routing(const Topology& topo,
                                  const std::vector<Commodity>& commodities,
                                  const std::vector<ClassSpec>& classes,
                                  const std::vector<CommodityFlow>& flows,
                                  double tolerance = 1e-6);

}  // namespace mptpt
