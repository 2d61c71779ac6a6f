#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lonas/arch_space.hpp"
#include "lonas/landscape.hpp"

namespace lonas {

enum class EdgeKind { improving, deteriorating, self };

std::string_view to_string(EdgeKind kind);
EdgeKind edge_kind_from_string(std::string_view text);

struct LonNode {
  ArchSpec arch;
  double fitness = 0.0;
  std::size_t basin_size = 0;

  friend bool operator==(const LonNode&, const LonNode&) = default;
};

/// Source and target are positions in LonGraph::nodes.
struct LonEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  std::uint64_t weight = 0;
  EdgeKind kind = EdgeKind::self;

  friend bool operator==(const LonEdge&, const LonEdge&) = default;
};

struct LonMeta {
  int depth = 0;
  int width = 0;
  int strength = 0;
  std::string provider;
  std::string fitness_table_digest;

  friend bool operator==(const LonMeta&, const LonMeta&) = default;
};

/// Local optima network. Nodes are in canonical order, edges sorted by
/// (source, target) with at most one edge per ordered pair.
struct LonGraph {
  LonMeta meta;
  std::vector<LonNode> nodes;
  std::vector<LonEdge> edges;

  std::optional<std::size_t> node_of(const ArchSpec& arch) const;
  /// Σ weights of non-self edges entering each node.
  std::vector<std::uint64_t> incoming_strength() const;

  friend bool operator==(const LonGraph&, const LonGraph&) = default;
};

/// Builds the LON by exhaustively enumerating every move sequence of length
/// 1..strength from each optimum. An edge i -> j carries the number of
/// sequences whose end point climbs to j; counts are raw, not normalised.
///
/// Throws GraphError if `basins` disagrees with `land` or two distinct optima
/// share a fitness value.
LonGraph build_lon(const BasinMap& basins, const Landscape& land, int strength = 2, unsigned threads = 1);

/// Monotonic LON: improving edges only, plus sinks and funnels.
struct MlonGraph {
  LonMeta meta;
  std::vector<LonNode> nodes;
  std::vector<LonEdge> edges;
  std::vector<std::size_t> sinks;  // ascending node positions
  /// (sink, nodes with a monotonic path to it, sink included), ordered by sink.
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> funnels;
};

MlonGraph derive_mlon(const LonGraph& lon);

/// Kahn topological order of the MLON, or nullopt if it has a cycle.
std::optional<std::vector<std::size_t>> topological_order(const MlonGraph& mlon);

struct LonMetrics {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;  // self-loops excluded
  std::size_t self_loop_count = 0;
  std::size_t improving_edge_count = 0;
  std::size_t deteriorating_edge_count = 0;
  std::uint64_t improving_weight = 0;
  std::uint64_t deteriorating_weight = 0;
  std::size_t funnel_count = 0;
  std::size_t sink_count = 0;

  ArchSpec global_optimum;
  double global_optimum_fitness = 0.0;
  std::size_t global_optimum_basin = 0;
  std::uint64_t global_optimum_incoming_strength = 0;
  std::size_t global_optimum_funnel_size = 0;

  /// Population SD of optimum fitness values.
  double lo_fitness_sd = 0.0;
  /// improving / deteriorating edge counts; empty when nothing deteriorates.
  std::optional<double> improving_to_deteriorating_ratio;

  std::vector<std::uint64_t> incoming_strength;      // per node
  std::vector<std::size_t> basin_size_distribution;  // per node
};

/// Throws GraphError if the global optimum is not unique.
LonMetrics compute_metrics(const LonGraph& lon, const MlonGraph& mlon);

std::string lon_to_json(const LonGraph& lon);
/// Inverse of lon_to_json. Throws FormatError on schema violations.
LonGraph lon_from_json(std::string_view text);
/// LON schema plus `sinks` and `funnels` arrays.
std::string mlon_to_json(const MlonGraph& mlon);

std::string lon_to_dot(const LonGraph& lon);
std::string mlon_to_dot(const MlonGraph& mlon);

/// Metrics and a compact summary (GO, LO, Edg, Fnl) as JSON.
std::string report_to_json(const LonGraph& lon, const LonMetrics& metrics);

/// Structural check of a report document; returns the list of problems.
std::vector<std::string> validate_report_json(std::string_view text);

}  // namespace lonas
