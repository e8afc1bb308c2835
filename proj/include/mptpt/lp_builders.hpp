#pragma once

#include <vector>

#include "mptpt/lp_model.hpp"
#include "mptpt/step_graph.hpp"
#include "mptpt/topology.hpp"

namespace mptpt {

/// Relaxed one-shot program: per commodity i and topology edge e, unprocessed
/// and processed flow f_i^0(e) / f_i^1(e); 2*M*|E0| variables. Rows, in order:
/// unprocessed conservation at every switch (demand enters at the source),
/// processed conservation at every switch except the destination, processed
/// flow into PMs forced to zero, unprocessed-in equals processed-out at every
/// PM, PM processing budgets, joint link capacities. Objective: total flow.
struct Lp1Model {
  LpModel lp;
  int num_commodities = 0;
  int num_edges = 0;  // all topology edges

  /// x = 0 unprocessed, 1 processed.
  int var(int x, int commodity, int edge) const {
    return x * (num_commodities * num_edges) + commodity * num_edges + edge;
  }
};

Lp1Model build_lp1_relaxed(const Topology& topo, const std::vector<Commodity>& commodities,
                           const std::vector<ClassSpec>& classes);

/// Step-1 program on G1: per class sink and G1 edge one flow variable.
/// Conservation per (sink, node != sink); shared-capacity rows (tagged bundle):
/// switch-switch edges, per-PM link bottlenecks min{g(v,vhat), g(vhat,v)}, and
/// PM processing budgets. Objective: total flow.
struct Lp2Model {
  LpModel lp;
  int num_classes = 0;
  int num_edges = 0;  // g1 edges

  int var(int class_id, int edge) const { return (class_id - 1) * num_edges + edge; }
};

Lp2Model build_lp2(const StepGraph& g1, const std::vector<StepDemand>& demands,
                   const std::vector<ClassSpec>& classes, const Topology& topo);

/// Step-2 program on G2: per destination (switch with inbound demand) and G2
/// edge one flow variable; conservation per (dest, node != dest), residual
/// capacity rows tagged bundle. Objective: total flow.
struct Lp3Model {
  LpModel lp;
  std::vector<int> dests;  // switch ordinals, ascending
  int num_edges = 0;       // g2 edges

  int var(int dest_index, int edge) const { return dest_index * num_edges + edge; }
};

Lp3Model build_lp3(const StepGraph& g2, const std::vector<StepDemand>& demands);

/// Per-class-sink flows over G1 edges from a step-1 solution.
std::vector<std::vector<double>> lp2_flow_by_class(const Lp2Model& model,
                                                   const std::vector<double>& values);

/// Per-destination flows over G2 edges from a step-2 solution.
std::vector<std::vector<double>> lp3_flow_by_dest(const Lp3Model& model,
                                                  const std::vector<double>& values);

}  // namespace mptpt
