#pragma once

#include <string>
#include <vector>

#include "mptpt/lp_builders.hpp"
#include "mptpt/pipeline.hpp"
#include "mptpt/topology.hpp"

namespace mptpt {

enum class RuleAction { Forward, SendToPm, PopTag1AndForward };

/// One match-action entry. Packets carry two tags: switches match the first
/// tag until a SendToPm rule hands the packet to the PM, the PM strips that
/// tag during processing, and the way home matches the second tag.
/// PopTag1AndForward exists for switch-side stripping; the compiler never
/// emits it because PM-side removal needs no extra rule anywhere.
struct Rule {
  int tag = 0;
  RuleAction action = RuleAction::Forward;
  int out_edge = -1;  // topology edge (Forward / PopTag1AndForward / link to PM)
  int pm = -1;        // topology node (SendToPm)
  int pm_class = 0;   // class whose VM processes the packet (SendToPm)
};

/// Per-switch rule tables. `rules` is indexed by topology node (empty for
/// PMs). Source-side classification entries — mapping a raw flow to its tag
/// pair, one per (commodity, tree pair) — are tallied separately in
/// `classify_counts` and deliberately excluded from rule_count(): tree rules
/// are the quantity the worst-case bound speaks about, and the tables a
/// real deployment would size against it. Both figures appear in reports.
struct RuleTable {
  std::vector<std::vector<Rule>> rules;
  std::vector<int> classify_counts;

  int rule_count(int node) const { return static_cast<int>(rules[node].size()); }
  int node_count() const { return static_cast<int>(rules.size()); }
};

/// Classification entries live at each commodity's source switch, so the
/// tally needs the commodity list; without it classify_counts stays zero.
RuleTable compile_rules(const RoutingSolution& solution, const Topology& topo,
                        const std::vector<Commodity>& commodities = {});

/// Largest per-switch rule count.
int max_rule_count(const RuleTable& table);

/// Mean rule count; denominator is all switches, or only switches holding at
/// least one rule when used_only is set (0.0 when the denominator is empty).
double avg_rule_count(const RuleTable& table, const Topology& topo, bool used_only);

/// CSV dump `switch,tag,action,arg`, rows ordered by (switch id, tag).
std::string rule_table_csv(const RuleTable& table, const Topology& topo);

struct ForwardingReport {
  std::vector<std::string> violations;
  int traces = 0;
  int delivered = 0;

  bool ok() const { return violations.empty(); }
};

/// Injects one abstract packet flow per (commodity, tree pair) and walks it
/// through the compiled tables: both tags applied at the source, first tag
/// matched until the PM, second tag afterwards. Verifies delivery, exactly
/// one PM visit of the right class, loop-freedom (hop guard), and that the
/// accumulated per-link/per-PM load stays within capacity (tolerance 1e-6).
ForwardingReport simulate_forwarding(const RuleTable& table, const RoutingSolution& solution,
                                     const Topology& topo,
                                     const std::vector<Commodity>& commodities,
                                     const std::vector<ClassSpec>& classes);

/// One source→PM→destination walk carrying `amount`; `nodes` lists topology
/// nodes in visit order with the PM in place (…, v, pm, v, …).
struct CommodityPath {
  int commodity = -1;
  std::vector<int> nodes;
  double amount = 0.0;
};

/// Decomposes a one-shot-program solution into per-commodity paths by
/// shortest-path peeling: repeatedly take the hop-shortest positive-flow
/// source→PM→destination walk and drain its bottleneck. Cycles are cancelled
/// first. Throws when more than `tol` of any demand cannot be decomposed.
std::vector<CommodityPath> decompose_paths(const Lp1Model& model,
                                           const std::vector<double>& values,
                                           const Topology& topo,
                                           const std::vector<Commodity>& commodities,
                                           double tol = 1e-6);

/// Path-routing rule demand: one rule per path per on-path switch (a switch
/// revisited by the same path — the PM round-trip — counts once; the
/// destination terminates the path and needs none).
std::vector<int> path_rule_counts(const std::vector<CommodityPath>& paths,
                                  const Topology& topo);

}  // namespace mptpt
