#include "lonas/lon.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <nlohmann/json.hpp>
#include <unordered_map>

#include "lonas/errors.hpp"
#include "lonas/util.hpp"

namespace lonas {

using Json = nlohmann::ordered_json;

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::improving: return "improving";
    case EdgeKind::deteriorating: return "deteriorating";
    case EdgeKind::self: return "self";
  }
  return "self";
}

EdgeKind edge_kind_from_string(std::string_view text) {
  if (text == "improving") return EdgeKind::improving;
  if (text == "deteriorating") return EdgeKind::deteriorating;
  if (text == "self") return EdgeKind::self;
  throw FormatError("unknown edge kind '" + std::string(text) + "'");
}

std::optional<std::size_t> LonGraph::node_of(const ArchSpec& arch) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), arch,
                                   [](const LonNode& n, const ArchSpec& a) { return n.arch < a; });
  if (it == nodes.end() || it->arch != arch) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

namespace {

std::vector<std::uint64_t> incoming(std::size_t node_count, const std::vector<LonEdge>& edges) {
  std::vector<std::uint64_t> strength(node_count, 0);
  for (const auto& e : edges) {
    if (e.source != e.target) strength[e.target] += e.weight;
  }
  return strength;
}

EdgeKind classify(const LonNode& source, const LonNode& target, bool same) {
  if (same) return EdgeKind::self;
  if (target.fitness > source.fitness) return EdgeKind::improving;
  if (target.fitness < source.fitness) return EdgeKind::deteriorating;
  throw GraphError("optima " + source.arch.encode() + " and " + target.arch.encode() +
                   " share a fitness value");
}

}  // namespace

std::vector<std::uint64_t> LonGraph::incoming_strength() const { return incoming(nodes.size(), edges); }

LonGraph build_lon(const BasinMap& basins, const Landscape& land, int strength, unsigned threads) {
  if (strength < 1) throw InputError("perturbation strength must be >= 1");
  if (!(basins.config() == land.config())) throw GraphError("basin map and landscape cover different spaces");
  const auto& space = land.space();
  const auto f = [&](std::size_t i) { return land.fitness_at(i); };

  LonGraph lon;
  lon.meta = {land.config().max_depth(), land.config().max_width(), strength, land.fitness().provenance(),
              land.fitness().digest()};

  const auto& optima = basins.optima();
  std::unordered_map<std::size_t, std::size_t> node_index;
  for (std::size_t k = 0; k < optima.size(); ++k) {
    const std::size_t o = optima[k];
    if (best_improvement_step(space, o, f) != o) {
      throw GraphError("basin map names " + space.spec(o).encode() + " as an optimum but it can still climb");
    }
    node_index.emplace(o, k);
    lon.nodes.push_back({space.spec(o), land.fitness_at(o), basins.basin_sizes()[k]});
  }
  // Reject ties up front rather than half-way through edge classification.
  {
    std::vector<std::size_t> order(lon.nodes.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lon.nodes[a].fitness < lon.nodes[b].fitness; });
    for (std::size_t k = 1; k < order.size(); ++k) {
      classify(lon.nodes[order[k - 1]], lon.nodes[order[k]], false);
    }
  }

  // Per source: path counts to every end point, level by level.
  std::vector<std::vector<LonEdge>> per_source(optima.size());
  parallel_for(optima.size(), threads, [&](std::size_t k) {
    std::map<std::size_t, std::uint64_t> weights;
    std::unordered_map<std::uint32_t, std::uint64_t> frontier{{static_cast<std::uint32_t>(optima[k]), 1}};
    for (int level = 1; level <= strength; ++level) {
      std::unordered_map<std::uint32_t, std::uint64_t> next;
      for (const auto& [u, count] : frontier) {
        for (std::uint32_t v : space.neighbors(u)) next[v] += count;
      }
      for (const auto& [v, count] : next) weights[node_index.at(basins.terminus_of(v))] += count;
      frontier = std::move(next);
    }
    auto& out = per_source[k];
    for (const auto& [target, weight] : weights) {
      out.push_back({k, target, weight, classify(lon.nodes[k], lon.nodes[target], k == target)});
    }
  });
  for (auto& edges : per_source) lon.edges.insert(lon.edges.end(), edges.begin(), edges.end());
  return lon;
}

MlonGraph derive_mlon(const LonGraph& lon) {
  MlonGraph mlon;
  mlon.meta = lon.meta;
  mlon.nodes = lon.nodes;
  const std::size_t n = lon.nodes.size();
  std::vector<std::size_t> out_degree(n, 0);
  std::vector<std::vector<std::size_t>> predecessors(n);
  for (const auto& e : lon.edges) {
    if (e.kind != EdgeKind::improving) continue;
    mlon.edges.push_back(e);
    ++out_degree[e.source];
    predecessors[e.target].push_back(e.source);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (out_degree[v] == 0) mlon.sinks.push_back(v);
  }
  for (std::size_t sink : mlon.sinks) {
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> queue{sink};
    seen[sink] = 1;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t p : predecessors[v]) {
        if (!seen[p]) {
          seen[p] = 1;
          queue.push_back(p);
        }
      }
    }
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < n; ++v) {
      if (seen[v]) members.push_back(v);
    }
    mlon.funnels.emplace_back(sink, std::move(members));
  }
  return mlon;
}

std::optional<std::vector<std::size_t>> topological_order(const MlonGraph& mlon) {
  const std::size_t n = mlon.nodes.size();
  std::vector<std::size_t> in_degree(n, 0);
  std::vector<std::vector<std::size_t>> successors(n);
  for (const auto& e : mlon.edges) {
    successors[e.source].push_back(e.target);
    ++in_degree[e.target];
  }
  std::deque<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (in_degree[v] == 0) ready.push_back(v);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (std::size_t w : successors[v]) {
      if (--in_degree[w] == 0) ready.push_back(w);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

LonMetrics compute_metrics(const LonGraph& lon, const MlonGraph& mlon) {
  if (lon.nodes.empty()) throw GraphError("LON has no nodes");
  LonMetrics m;
  m.node_count = lon.nodes.size();
  for (const auto& e : lon.edges) {
    switch (e.kind) {
      case EdgeKind::self: ++m.self_loop_count; break;
      case EdgeKind::improving:
        ++m.improving_edge_count;
        m.improving_weight += e.weight;
        break;
      case EdgeKind::deteriorating:
        ++m.deteriorating_edge_count;
        m.deteriorating_weight += e.weight;
        break;
    }
  }
  m.edge_count = m.improving_edge_count + m.deteriorating_edge_count;
  m.funnel_count = mlon.funnels.size();
  m.sink_count = mlon.sinks.size();
  if (m.deteriorating_edge_count > 0) {
    m.improving_to_deteriorating_ratio =
        static_cast<double>(m.improving_edge_count) / static_cast<double>(m.deteriorating_edge_count);
  }

  std::size_t go = 0;
  for (std::size_t v = 1; v < lon.nodes.size(); ++v) {
    if (lon.nodes[v].fitness > lon.nodes[go].fitness) go = v;
  }
  for (std::size_t v = 0; v < lon.nodes.size(); ++v) {
    if (v != go && lon.nodes[v].fitness == lon.nodes[go].fitness) {
      throw GraphError("global optimum is not unique: " + lon.nodes[go].arch.encode() + " and " +
                       lon.nodes[v].arch.encode());
    }
  }
  m.incoming_strength = lon.incoming_strength();
  m.global_optimum = lon.nodes[go].arch;
  m.global_optimum_fitness = lon.nodes[go].fitness;
  m.global_optimum_basin = lon.nodes[go].basin_size;
  m.global_optimum_incoming_strength = m.incoming_strength[go];
  for (const auto& [sink, members] : mlon.funnels) {
    if (sink == go) m.global_optimum_funnel_size = members.size();
  }

  double mean = 0.0;
  for (const auto& node : lon.nodes) mean += node.fitness;
  mean /= static_cast<double>(lon.nodes.size());
  double var = 0.0;
  for (const auto& node : lon.nodes) var += (node.fitness - mean) * (node.fitness - mean);
  m.lo_fitness_sd = std::sqrt(var / static_cast<double>(lon.nodes.size()));

  for (const auto& node : lon.nodes) m.basin_size_distribution.push_back(node.basin_size);
  return m;
}

namespace {

Json meta_json(const LonMeta& meta) {
  return Json{{"depth", meta.depth},
              {"width", meta.width},
              {"strength_D", meta.strength},
              {"sequence_lengths", "1.." + std::to_string(meta.strength)},
              {"provider", meta.provider},
              {"fitness_table_digest", meta.fitness_table_digest}};
}

Json graph_json(const LonMeta& meta, const std::vector<LonNode>& nodes, const std::vector<LonEdge>& edges) {
  const auto strength = incoming(nodes.size(), edges);
  Json j;
  j["meta"] = meta_json(meta);
  j["nodes"] = Json::array();
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    j["nodes"].push_back({{"arch", nodes[v].arch.encode()},
                          {"fitness", nodes[v].fitness},
                          {"basin_size", nodes[v].basin_size},
                          {"incoming_strength", strength[v]}});
  }
  j["edges"] = Json::array();
  for (const auto& e : edges) {
    j["edges"].push_back({{"source", nodes[e.source].arch.encode()},
                          {"target", nodes[e.target].arch.encode()},
                          {"weight", e.weight},
                          {"kind", to_string(e.kind)}});
  }
  return j;
}

std::string dot_graph(std::string_view name, const std::vector<LonNode>& nodes, const std::vector<LonEdge>& edges) {
  std::string out = "digraph " + std::string(name) + " {\n";
  for (const auto& node : nodes) {
    out += "  \"" + node.arch.encode() + "\" [label=\"" + node.arch.encode() +
           "\", fitness=" + format_fitness(node.fitness) + ", basin_size=" + std::to_string(node.basin_size) +
           "];\n";
  }
  for (const auto& e : edges) {
    out += "  \"" + nodes[e.source].arch.encode() + "\" -> \"" + nodes[e.target].arch.encode() +
           "\" [weight=" + std::to_string(e.weight) + ", kind=\"" + std::string(to_string(e.kind)) + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace

std::string lon_to_json(const LonGraph& lon) { return graph_json(lon.meta, lon.nodes, lon.edges).dump(2) + "\n"; }

std::string mlon_to_json(const MlonGraph& mlon) {
  Json j = graph_json(mlon.meta, mlon.nodes, mlon.edges);
  j["sinks"] = Json::array();
  for (std::size_t s : mlon.sinks) j["sinks"].push_back(mlon.nodes[s].arch.encode());
  j["funnels"] = Json::array();
  for (const auto& [sink, members] : mlon.funnels) {
    Json m = Json::array();
    for (std::size_t v : members) m.push_back(mlon.nodes[v].arch.encode());
    j["funnels"].push_back({{"sink", mlon.nodes[sink].arch.encode()}, {"members", m}});
  }
  return j.dump(2) + "\n";
}

LonGraph lon_from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    LonGraph lon;
    const auto& meta = j.at("meta");
    lon.meta = {meta.at("depth").get<int>(), meta.at("width").get<int>(), meta.at("strength_D").get<int>(),
                meta.at("provider").get<std::string>(), meta.at("fitness_table_digest").get<std::string>()};
    for (const auto& node : j.at("nodes")) {
      lon.nodes.push_back({ArchSpec::decode(node.at("arch").get<std::string>()), node.at("fitness").get<double>(),
                           node.at("basin_size").get<std::size_t>()});
    }
    if (!std::is_sorted(lon.nodes.begin(), lon.nodes.end(),
                        [](const LonNode& a, const LonNode& b) { return a.arch < b.arch; })) {
      throw FormatError("LON nodes are not in canonical order");
    }
    for (const auto& edge : j.at("edges")) {
      const auto source = lon.node_of(ArchSpec::decode(edge.at("source").get<std::string>()));
      const auto target = lon.node_of(ArchSpec::decode(edge.at("target").get<std::string>()));
      if (!source || !target) throw FormatError("LON edge refers to an unknown node");
      lon.edges.push_back({*source, *target, edge.at("weight").get<std::uint64_t>(),
                           edge_kind_from_string(edge.at("kind").get<std::string>())});
    }
    return lon;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid LON JSON: ") + e.what());
  }
}

std::string lon_to_dot(const LonGraph& lon) { return dot_graph("lon", lon.nodes, lon.edges); }
std::string mlon_to_dot(const MlonGraph& mlon) { return dot_graph("mlon", mlon.nodes, mlon.edges); }

std::string report_to_json(const LonGraph& lon, const LonMetrics& m) {
  Json j;
  j["meta"] = meta_json(lon.meta);
  j["summary"] = {{"GO", {{"count", 1}, {"arch", m.global_optimum.encode()}, {"fitness", m.global_optimum_fitness}}},
                  {"LO", m.node_count},
                  {"Edg", m.edge_count},
                  {"Fnl", m.funnel_count}};
  Json metrics;
  metrics["node_count"] = m.node_count;
  metrics["edge_count"] = m.edge_count;
  metrics["self_loop_count"] = m.self_loop_count;
  metrics["improving_edge_count"] = m.improving_edge_count;
  metrics["deteriorating_edge_count"] = m.deteriorating_edge_count;
  metrics["improving_weight"] = m.improving_weight;
  metrics["deteriorating_weight"] = m.deteriorating_weight;
  metrics["funnel_count"] = m.funnel_count;
  metrics["sink_count"] = m.sink_count;
  metrics["global_optimum"] = {{"arch", m.global_optimum.encode()},
                               {"fitness", m.global_optimum_fitness},
                               {"basin_size", m.global_optimum_basin},
                               {"incoming_strength", m.global_optimum_incoming_strength},
                               {"funnel_size", m.global_optimum_funnel_size}};
  metrics["lo_fitness_sd"] = m.lo_fitness_sd;
  metrics["improving_to_deteriorating_ratio"] =
      m.improving_to_deteriorating_ratio ? Json(*m.improving_to_deteriorating_ratio) : Json(nullptr);
  Json strength = Json::object();
  Json basins = Json::object();
  for (std::size_t v = 0; v < lon.nodes.size(); ++v) {
    strength[lon.nodes[v].arch.encode()] = m.incoming_strength[v];
    basins[lon.nodes[v].arch.encode()] = m.basin_size_distribution[v];
  }
  metrics["incoming_strength"] = std::move(strength);
  metrics["basin_size_distribution"] = std::move(basins);
  j["metrics"] = std::move(metrics);
  return j.dump(2) + "\n";
}

std::vector<std::string> validate_report_json(std::string_view text) {
  std::vector<std::string> problems;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  const auto require = [&](const Json& obj, const char* key, auto check, const char* what) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(std::string("missing ") + key);
      return;
    }
    if (!check(obj.at(key))) problems.push_back(std::string(key) + " is not " + what);
  };
  const auto is_obj = [](const Json& v) { return v.is_object(); };
  const auto is_count = [](const Json& v) { return v.is_number_unsigned(); };
  const auto is_num = [](const Json& v) { return v.is_number(); };
  const auto is_str = [](const Json& v) { return v.is_string(); };
  const auto is_ratio = [](const Json& v) { return v.is_number() || v.is_null(); };

  require(j, "meta", is_obj, "an object");
  require(j, "summary", is_obj, "an object");
  require(j, "metrics", is_obj, "an object");
  if (!problems.empty()) return problems;

  for (const char* key : {"depth", "width", "strength_D"}) require(j["meta"], key, is_count, "a count");
  for (const char* key : {"provider", "fitness_table_digest"}) require(j["meta"], key, is_str, "a string");

  const auto& summary = j["summary"];
  require(summary, "GO", is_obj, "an object");
  for (const char* key : {"LO", "Edg", "Fnl"}) require(summary, key, is_count, "a count");
  if (summary.contains("GO") && summary["GO"].is_object()) {
    require(summary["GO"], "arch", is_str, "a string");
    require(summary["GO"], "fitness", is_num, "a number");
    if (summary["GO"].value("count", 0) != 1) problems.push_back("GO.count must be 1");
  }

  const auto& metrics = j["metrics"];
  for (const char* key : {"node_count", "edge_count", "self_loop_count", "improving_edge_count",
                          "deteriorating_edge_count", "improving_weight", "deteriorating_weight", "funnel_count",
                          "sink_count"}) {
    require(metrics, key, is_count, "a count");
  }
  require(metrics, "global_optimum", is_obj, "an object");
  require(metrics, "lo_fitness_sd", is_num, "a number");
  require(metrics, "improving_to_deteriorating_ratio", is_ratio, "a number or null");
  require(metrics, "incoming_strength", is_obj, "an object");
  require(metrics, "basin_size_distribution", is_obj, "an object");
  if (!problems.empty()) return problems;

  if (summary["LO"] != metrics["node_count"]) problems.push_back("summary.LO != metrics.node_count");
  if (summary["Edg"] != metrics["edge_count"]) problems.push_back("summary.Edg != metrics.edge_count");
  if (summary["Fnl"] != metrics["funnel_count"]) problems.push_back("summary.Fnl != metrics.funnel_count");
  if (metrics["incoming_strength"].size() != metrics["node_count"].get<std::size_t>()) {
    problems.push_back("incoming_strength does not list every node");
  }
  if (metrics["basin_size_distribution"].size() != metrics["node_count"].get<std::size_t>()) {
    problems.push_back("basin_size_distribution does not list every node");
  }
  return problems;
}

}  // namespace lonas
