#include "mptpt/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mptpt/rng.hpp"

namespace mptpt {

namespace {

std::uint64_t edge_key(int from, int to) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
         static_cast<std::uint32_t>(to);
}

}  // namespace

void Topology::rebuild_index() {
  const int n = static_cast<int>(nodes.size());
  switch_list.clear();
  pm_list.clear();
  switch_ord.assign(n, -1);
  attached_pm.assign(n, -1);
  attached_switch.assign(n, -1);
  pm_in_edge.assign(n, -1);
  pm_out_edge.assign(n, -1);
  out_edges.assign(n, {});
  in_edges.assign(n, {});
  switch_switch_edges.clear();
  id_to_node_.clear();
  edge_lookup_.clear();

  for (int v = 0; v < n; ++v) {
    id_to_node_.emplace(nodes[v].id, v);
    if (nodes[v].kind == NodeKind::Switch) {
      switch_ord[v] = static_cast<int>(switch_list.size());
      switch_list.push_back(v);
    } else {
      pm_list.push_back(v);
    }
  }
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const Edge& ed = edges[e];
    if (ed.from < 0 || ed.from >= n || ed.to < 0 || ed.to >= n) continue;
    out_edges[ed.from].push_back(e);
    in_edges[ed.to].push_back(e);
    edge_lookup_.emplace(edge_key(ed.from, ed.to), e);
    const bool from_sw = nodes[ed.from].kind == NodeKind::Switch;
    const bool to_sw = nodes[ed.to].kind == NodeKind::Switch;
    if (from_sw && to_sw) {
      switch_switch_edges.push_back(e);
    } else if (from_sw && !to_sw) {
      if (attached_switch[ed.to] < 0) attached_switch[ed.to] = ed.from;
      if (attached_pm[ed.from] < 0) attached_pm[ed.from] = ed.to;
      if (pm_in_edge[ed.to] < 0) pm_in_edge[ed.to] = e;
    } else if (!from_sw && to_sw) {
      if (attached_switch[ed.from] < 0) attached_switch[ed.from] = ed.to;
      if (attached_pm[ed.to] < 0) attached_pm[ed.to] = ed.from;
      if (pm_out_edge[ed.from] < 0) pm_out_edge[ed.from] = e;
    }
  }
}

int Topology::node_index(const std::string& id) const {
  auto it = id_to_node_.find(id);
  return it == id_to_node_.end() ? -1 : it->second;
}

int Topology::find_edge(int from, int to) const {
  auto it = edge_lookup_.find(edge_key(from, to));
  return it == edge_lookup_.end() ? -1 : it->second;
}

std::vector<std::string> validate(const Topology& topo) {
  std::vector<std::string> errors;
  auto fail = [&errors](const std::string& msg) { errors.push_back(msg); };

  const int n = static_cast<int>(topo.nodes.size());
  {
    std::unordered_map<std::string, int> seen;
    for (int v = 0; v < n; ++v) {
      const Node& nd = topo.nodes[v];
      if (nd.id.empty()) fail("node " + std::to_string(v) + ": empty id");
      auto [it, inserted] = seen.emplace(nd.id, v);
      if (!inserted) fail("duplicate node id '" + nd.id + "'");
      if (nd.kind == NodeKind::Pm && !(nd.pm_capacity > 0.0))
        fail("pm '" + nd.id + "': capacity must be > 0");
      if (nd.kind == NodeKind::Switch && !(nd.memory > 0.0))
        fail("switch '" + nd.id + "': memory must be > 0");
    }
  }

  std::unordered_map<std::uint64_t, int> edge_seen;
  for (int e = 0; e < static_cast<int>(topo.edges.size()); ++e) {
    const Edge& ed = topo.edges[e];
    if (ed.from < 0 || ed.from >= n || ed.to < 0 || ed.to >= n) {
      fail("edge " + std::to_string(e) + ": endpoint out of range");
      continue;
    }
    if (ed.from == ed.to) fail("edge " + std::to_string(e) + ": self loop");
    if (!(ed.capacity > 0.0))
      fail("edge " + topo.nodes[ed.from].id + "->" + topo.nodes[ed.to].id +
           ": capacity must be > 0");
    if (topo.nodes[ed.from].kind == NodeKind::Pm && topo.nodes[ed.to].kind == NodeKind::Pm)
      fail("edge " + topo.nodes[ed.from].id + "->" + topo.nodes[ed.to].id + ": pm-pm link");
    auto [it, inserted] = edge_seen.emplace(edge_key(ed.from, ed.to), e);
    if (!inserted)
      fail("duplicate edge " + topo.nodes[ed.from].id + "->" + topo.nodes[ed.to].id);
  }

  // Each PM hangs off exactly one switch, with both directed edges present.
  for (int v : topo.pm_list) {
    std::vector<int> neighbors;
    int in_deg = 0, out_deg = 0;
    for (int e : topo.in_edges[v]) {
      ++in_deg;
      int u = topo.edges[e].from;
      if (std::find(neighbors.begin(), neighbors.end(), u) == neighbors.end())
        neighbors.push_back(u);
    }
    for (int e : topo.out_edges[v]) {
      ++out_deg;
      int u = topo.edges[e].to;
      if (std::find(neighbors.begin(), neighbors.end(), u) == neighbors.end())
        neighbors.push_back(u);
    }
    if (neighbors.size() != 1 || in_deg != 1 || out_deg != 1)
      fail("pm '" + topo.nodes[v].id + "': must have exactly one switch neighbor " +
           "with one link in each direction");
  }

  // A switch hosts at most one PM (the v-hat coupling must be unique).
  {
    std::vector<int> host_count(n, 0);
    for (int v : topo.pm_list)
      if (topo.attached_switch[v] >= 0) ++host_count[topo.attached_switch[v]];
    for (int u : topo.switch_list)
      if (host_count[u] > 1)
        fail("switch '" + topo.nodes[u].id + "': hosts more than one pm");
  }

  // Switch graph connectivity (undirected view of switch-switch edges).
  if (!topo.switch_list.empty()) {
    std::vector<char> seen(n, 0);
    std::queue<int> bfs;
    bfs.push(topo.switch_list[0]);
    seen[topo.switch_list[0]] = 1;
    int reached = 1;
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      auto visit = [&](int w) {
        if (topo.nodes[w].kind == NodeKind::Switch && !seen[w]) {
          seen[w] = 1;
          ++reached;
          bfs.push(w);
        }
      };
      for (int e : topo.out_edges[u]) visit(topo.edges[e].to);
      for (int e : topo.in_edges[u]) visit(topo.edges[e].from);
    }
    if (reached != topo.switch_count()) fail("switch graph is not connected");
  }

  for (std::size_t k = 0; k < topo.classes.size(); ++k) {
    const ClassSpec& c = topo.classes[k];
    if (c.id != static_cast<int>(k) + 1)
      fail("class ids must be dense 1..C (got id " + std::to_string(c.id) +
           " at position " + std::to_string(k) + ")");
    if (!(c.unit_cost > 0.0))
      fail("class " + std::to_string(c.id) + ": cost must be > 0");
  }
  return errors;
}

namespace {

void add_link(Topology& topo, int a, int b, double capacity) {
  topo.edges.push_back({a, b, capacity});
  topo.edges.push_back({b, a, capacity});
}

int add_switch(Topology& topo, const std::string& id) {
  topo.nodes.push_back({id, NodeKind::Switch, 0.0, kUnlimited});
  return static_cast<int>(topo.nodes.size()) - 1;
}

int add_pm(Topology& topo, const std::string& id, double capacity) {
  topo.nodes.push_back({id, NodeKind::Pm, capacity, kUnlimited});
  return static_cast<int>(topo.nodes.size()) - 1;
}

}  // namespace

Topology gen_fig1() {
  Topology topo;
  std::vector<int> sw;
  for (int i = 1; i <= 6; ++i) sw.push_back(add_switch(topo, "sw" + std::to_string(i)));
  for (int i = 0; i < 6; ++i) add_link(topo, sw[i], sw[(i + 1) % 6], 100.0);
  add_link(topo, sw[0], add_pm(topo, "pm1", 500.0), 100.0);
  add_link(topo, sw[1], add_pm(topo, "pm2", 500.0), 100.0);
  add_link(topo, sw[5], add_pm(topo, "pm3", 500.0), 100.0);
  topo.rebuild_index();
  return topo;
}

Topology gen_fat_tree() {
  Topology topo;
  std::vector<int> core, agg, edge;
  for (int i = 1; i <= 2; ++i) core.push_back(add_switch(topo, "core" + std::to_string(i)));
  for (int i = 1; i <= 4; ++i) agg.push_back(add_switch(topo, "agg" + std::to_string(i)));
  for (int i = 1; i <= 16; ++i) edge.push_back(add_switch(topo, "edge" + std::to_string(i)));
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 2; ++c) add_link(topo, core[c], agg[a], 200.0);
  for (int e = 0; e < 16; ++e) add_link(topo, agg[e / 4], edge[e], 10.0);
  int pm = 0;
  for (int c : core) add_link(topo, c, add_pm(topo, "pm" + std::to_string(++pm), 500.0), 100.0);
  for (int a : agg) add_link(topo, a, add_pm(topo, "pm" + std::to_string(++pm), 500.0), 100.0);
  topo.rebuild_index();
  return topo;
}

namespace {

using nlohmann::json;

double require_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::runtime_error(what + ": must be a positive number");
  return v;
}

}  // namespace

Topology parse_topology_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::runtime_error(std::string("topology parse error: ") + err.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("links"))
    throw std::runtime_error("topology: expected object with 'nodes' and 'links'");

  Topology topo;
  for (const auto& nd : doc.at("nodes")) {
    if (!nd.contains("id") || !nd.contains("kind"))
      throw std::runtime_error("topology node: 'id' and 'kind' are required");
    Node node;
    node.id = nd.at("id").get<std::string>();
    const std::string kind = nd.at("kind").get<std::string>();
    if (kind == "switch") {
      node.kind = NodeKind::Switch;
      if (nd.contains("memory"))
        node.memory = require_positive(nd.at("memory").get<double>(),
                                       "switch '" + node.id + "' memory");
    } else if (kind == "pm") {
      node.kind = NodeKind::Pm;
      if (!nd.contains("capacity"))
        throw std::runtime_error("pm '" + node.id + "': 'capacity' is required");
      node.pm_capacity = require_positive(nd.at("capacity").get<double>(),
                                          "pm '" + node.id + "' capacity");
    } else {
      throw std::runtime_error("node '" + node.id + "': unknown kind '" + kind + "'");
    }
    topo.nodes.push_back(std::move(node));
  }
  topo.rebuild_index();  // id lookup for links

  for (const auto& ln : doc.at("links")) {
    if (!ln.contains("from") || !ln.contains("to") || !ln.contains("capacity"))
      throw std::runtime_error("link: 'from', 'to' and 'capacity' are required");
    const std::string from = ln.at("from").get<std::string>();
    const std::string to = ln.at("to").get<std::string>();
    const int a = topo.node_index(from);
    const int b = topo.node_index(to);
    if (a < 0) throw std::runtime_error("link: unknown endpoint '" + from + "'");
    if (b < 0) throw std::runtime_error("link: unknown endpoint '" + to + "'");
    const double cap =
        require_positive(ln.at("capacity").get<double>(), "link " + from + "->" + to);
    const bool bidir = ln.value("bidirectional", true);
    topo.edges.push_back({a, b, cap});
    if (bidir) topo.edges.push_back({b, a, cap});
  }

  if (doc.contains("classes")) {
    for (const auto& cl : doc.at("classes")) {
      ClassSpec spec;
      spec.id = cl.at("id").get<int>();
      spec.unit_cost = require_positive(cl.value("cost", 1.0),
                                        "class " + std::to_string(spec.id) + " cost");
      if (cl.contains("functions"))
        for (const auto& fn : cl.at("functions")) spec.functions.push_back(fn.get<std::string>());
      topo.classes.push_back(std::move(spec));
    }
  }

  topo.rebuild_index();
  const auto errors = validate(topo);
  if (!errors.empty())
    throw std::runtime_error("topology invalid: " + errors.front() +
                             (errors.size() > 1 ? " (+" + std::to_string(errors.size() - 1) +
                                                      " more)"
                                                : ""));
  return topo;
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_topology_json(buf.str());
}

std::string topology_to_json(const Topology& topo) {
  nlohmann::ordered_json doc;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const Node& nd : topo.nodes) {
    nlohmann::ordered_json j;
    j["id"] = nd.id;
    j["kind"] = nd.kind == NodeKind::Switch ? "switch" : "pm";
    if (nd.kind == NodeKind::Switch) {
      if (nd.memory != kUnlimited) j["memory"] = nd.memory;
    } else {
      j["capacity"] = nd.pm_capacity;
    }
    doc["nodes"].push_back(std::move(j));
  }
  // Collapse directed pairs back to bidirectional links where possible.
  doc["links"] = nlohmann::ordered_json::array();
  std::vector<char> emitted(topo.edges.size(), 0);
  for (int e = 0; e < topo.edge_count(); ++e) {
    if (emitted[e]) continue;
    const Edge& ed = topo.edges[e];
    nlohmann::ordered_json j;
    j["from"] = topo.nodes[ed.from].id;
    j["to"] = topo.nodes[ed.to].id;
    j["capacity"] = ed.capacity;
    const int back = topo.find_edge(ed.to, ed.from);
    if (back >= 0 && !emitted[back] && topo.edges[back].capacity == ed.capacity) {
      emitted[back] = 1;
      j["bidirectional"] = true;
    } else {
      j["bidirectional"] = false;
    }
    doc["links"].push_back(std::move(j));
  }
  doc["classes"] = nlohmann::ordered_json::array();
  for (const ClassSpec& c : topo.classes) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["cost"] = c.unit_cost;
    if (!c.functions.empty()) j["functions"] = c.functions;
    doc["classes"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

void save_topology(const Topology& topo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write topology file '" + path + "'");
  out << topology_to_json(topo);
}

std::vector<Commodity> gen_random_commodities(const Topology& topo, int count,
                                              int num_classes, double demand,
                                              std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("commodity count must be >= 0");
  if (num_classes < 1) throw std::invalid_argument("need at least one class");
  if (!(demand > 0.0)) throw std::invalid_argument("demand must be > 0");
  const int s = topo.switch_count();
  if (s < 2) throw std::invalid_argument("need at least two switches");

  Rng rng(seed);
  std::vector<Commodity> result;
  result.reserve(count);
  for (int i = 0; i < count; ++i) {
    Commodity c;
    c.source = topo.switch_list[rng.next_below(s)];
    do {
      c.dest = topo.switch_list[rng.next_below(s)];
    } while (c.dest == c.source);
    c.class_id = 1 + static_cast<int>(rng.next_below(num_classes));
    c.demand = demand;
    result.push_back(c);
  }
  return result;
}

std::string commodities_to_csv(const Topology& topo, const std::vector<Commodity>& commodities) {
  std::ostringstream out;
  out << "source,dest,demand,class\n";
  out.precision(17);
  for (const Commodity& c : commodities) {
    out << topo.nodes[c.source].id << ',' << topo.nodes[c.dest].id << ',' << c.demand << ','
        << c.class_id << '\n';
  }
  return out.str();
}

void save_commodities(const Topology& topo, const std::vector<Commodity>& commodities,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write commodities file '" + path + "'");
  out << commodities_to_csv(topo, commodities);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<Commodity> parse_commodities_csv(const Topology& topo, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("commodities: empty file");
  {
    auto header = split_csv_line(line);
    if (header != std::vector<std::string>{"source", "dest", "demand", "class"})
      throw std::runtime_error("commodities line 1: header must be 'source,dest,demand,class'");
  }
  std::vector<Commodity> result;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    const std::string where = "commodities line " + std::to_string(line_no);
    if (fields.size() != 4) throw std::runtime_error(where + ": expected 4 fields");
    Commodity c;
    c.source = topo.node_index(fields[0]);
    if (c.source < 0 || !topo.is_switch(c.source))
      throw std::runtime_error(where + ": source '" + fields[0] + "' is not a switch");
    c.dest = topo.node_index(fields[1]);
    if (c.dest < 0 || !topo.is_switch(c.dest))
      throw std::runtime_error(where + ": dest '" + fields[1] + "' is not a switch");
    if (c.dest == c.source)
      throw std::runtime_error(where + ": source and dest must differ");
    try {
      std::size_t pos = 0;
      c.demand = std::stod(fields[2], &pos);
      if (pos != fields[2].size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": bad demand '" + fields[2] + "'");
    }
    if (!(c.demand > 0.0)) throw std::runtime_error(where + ": demand must be > 0");
    try {
      std::size_t pos = 0;
      c.class_id = std::stoi(fields[3], &pos);
      if (pos != fields[3].size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": bad class '" + fields[3] + "'");
    }
    if (c.class_id < 1) throw std::runtime_error(where + ": class must be >= 1");
    result.push_back(c);
  }
  return result;
}

std::vector<Commodity> load_commodities(const Topology& topo, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open commodities file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_commodities_csv(topo, buf.str());
}

std::vector<ClassSpec> classes_for(const Topology& topo, int num_classes) {
  if (num_classes < 1) throw std::invalid_argument("need at least one class");
  std::vector<ClassSpec> result;
  result.reserve(num_classes);
  for (int id = 1; id <= num_classes; ++id) {
    const auto it = std::find_if(topo.classes.begin(), topo.classes.end(),
                                 [id](const ClassSpec& c) { return c.id == id; });
    result.push_back(it != topo.classes.end() ? *it : ClassSpec{id, 1.0, {}});
  }
  return result;
}

}  // namespace mptpt
