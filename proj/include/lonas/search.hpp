#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lonas/arch_space.hpp"
#include "lonas/landscape.hpp"
#include "lonas/seeding.hpp"

namespace lonas {

struct IlsConfig {
  int perturbation_strength = 2;  // k
  int stopping_threshold = 20;    // t
  int runs = 100;
  std::uint64_t base_seed = 0;
  int top_m = 5;

  /// Throws InputError unless every field is >= 1.
  void validate() const;
};

struct IlsTrace {
  std::size_t run_index = 0;
  std::uint64_t run_seed = 0;
  std::vector<ArchSpec> accepted_optima;  // incumbents in acceptance order, initial climb first
  std::size_t iterations = 0;             // perturb + climb rounds
  std::size_t evaluation_count = 0;       // distinct architectures whose fitness was consulted
  std::optional<std::size_t> first_top_m_hit;
  bool found_global = false;
  std::optional<std::size_t> global_hit_evaluation;
  ArchSpec final_optimum;

  friend bool operator==(const IlsTrace&, const IlsTrace&) = default;
};

/// k uniform random moves through the directed neighbourhood.
ArchSpec perturb(const ArchSpec& s, int k, const ArchSpace& space, Rng& rng);
std::size_t perturb_index(std::size_t s, int k, const ArchSpace& space, Rng& rng);

/// Canonical indices of the `m` fittest architectures, fittest first.
std::vector<std::size_t> top_m_indices(const Landscape& land, int m);

/// One iterated local search run. The run's RNG is seeded with
/// derive_seed(cfg.base_seed, run_index).
///
/// Evaluation indices are 1-based positions in the sequence of distinct
/// architectures consulted; a top-m or global hit is recorded when that
/// architecture is first evaluated.
IlsTrace run_ils(const Landscape& land, const IlsConfig& cfg, std::size_t run_index);

/// Runs cfg.runs independent traces; `threads` does not affect the result.
std::vector<IlsTrace> run_ils_batch(const Landscape& land, const IlsConfig& cfg, unsigned threads = 1);

struct IlsSummary {
  std::size_t runs = 0;
  std::size_t runs_with_top_m_hit = 0;
  std::optional<double> median_first_top_m_hit;
  std::optional<double> mean_first_top_m_hit;
  std::size_t runs_found_global = 0;
  double global_fraction = 0.0;
  std::optional<double> mean_evaluations_to_global;  // over successful runs
  double mean_evaluations = 0.0;
  double median_evaluations = 0.0;

  friend bool operator==(const IlsSummary&, const IlsSummary&) = default;
};

/// Order-invariant aggregate. Throws InputError on an empty input.
IlsSummary aggregate_ils(std::span<const IlsTrace> traces);

/// `run,seed,evaluations,first_top_m_hit,found_global,global_hit_evaluation`;
/// absent hits are empty fields.
std::string ils_traces_to_csv(std::span<const IlsTrace> traces);
std::string ils_summary_to_json(const IlsSummary& summary, const IlsConfig& cfg);

}  // namespace lonas
