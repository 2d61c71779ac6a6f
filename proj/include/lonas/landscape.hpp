#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lonas/arch_space.hpp"
#include "lonas/fitness.hpp"

namespace lonas {

/// The triple (space, neighbourhood, fitness). Immutable.
class Landscape {
 public:
  explicit Landscape(FitnessTable fitness);

  const ArchSpace& space() const noexcept { return space_; }
  const FitnessTable& fitness() const noexcept { return fitness_; }
  const SpaceConfig& config() const noexcept { return space_.config(); }
  std::size_t size() const noexcept { return space_.size(); }

  double fitness_at(std::size_t index) const { return fitness_.values()[index]; }

 private:
  ArchSpace space_;
  FitnessTable fitness_;
};

/// Best neighbour of `x` under `fitness_of`, ties to the smallest canonical
/// index; returns `x` itself if no neighbour is strictly fitter.
template <typename FitnessFn>
std::size_t best_improvement_step(const ArchSpace& space, std::size_t x, FitnessFn&& fitness_of) {
  const double fx = fitness_of(x);
  std::size_t best = x;
  double best_f = 0.0;
  bool have = false;
  for (std::uint32_t y : space.neighbors(x)) {
    const double fy = fitness_of(y);
    if (!have || fy > best_f) {
      best = y;
      best_f = fy;
      have = true;
    }
  }
  return (have && best_f > fx) ? best : x;
}

/// Maximising best-improvement hill climbing over canonical indices. The
/// fitness callback lets callers account for evaluations.
template <typename FitnessFn>
std::size_t climb(const ArchSpace& space, std::size_t start, FitnessFn&& fitness_of,
                  std::vector<std::size_t>* trace = nullptr) {
  std::size_t x = start;
  if (trace) trace->assign(1, x);
  while (true) {
    const std::size_t next = best_improvement_step(space, x, fitness_of);
    if (next == x) return x;
    x = next;
    if (trace) trace->push_back(x);
  }
}

ArchSpec hill_climb(const ArchSpec& start, const Landscape& land);
/// Visited specs from `start` to its terminus, inclusive.
std::vector<ArchSpec> hill_climb_trace(const ArchSpec& start, const Landscape& land);

struct LocalOptimaScan {
  std::vector<ArchSpec> optima;  // canonical order
  /// Number of (s, t ∈ N(s)) pairs with f(s) == f(t). Non-zero means the
  /// landscape is neutral somewhere and scan/climb results may disagree.
  std::size_t neutral_pairs = 0;
  bool neutral() const noexcept { return neutral_pairs != 0; }
};

/// {s : f(s) >= f(t) for all t in N(s)}, by direct scan.
LocalOptimaScan find_local_optima(const Landscape& land);

class BasinMap {
 public:
  BasinMap(SpaceConfig cfg, std::vector<std::size_t> terminus);

  const SpaceConfig& config() const noexcept { return cfg_; }
  /// Hill-climb terminus of every spec, by canonical index.
  const std::vector<std::size_t>& terminus() const noexcept { return terminus_; }
  std::size_t terminus_of(std::size_t index) const { return terminus_[index]; }
  ArchSpec terminus_of(const ArchSpec& spec) const;

  /// Optima (canonical indices, ascending) and matching basin sizes.
  const std::vector<std::size_t>& optima() const noexcept { return optima_; }
  const std::vector<std::size_t>& basin_sizes() const noexcept { return basin_sizes_; }
  bool is_optimum(std::size_t index) const { return terminus_[index] == index; }

  /// CSV `architecture,terminus,is_optimum`, canonical order.
  std::string to_csv() const;
  /// CSV `optimum,fitness,basin_size`, canonical order.
  std::string summary_csv(const FitnessTable& fitness) const;

 private:
  SpaceConfig cfg_;
  std::vector<std::size_t> terminus_;
  std::vector<std::size_t> optima_;
  std::vector<std::size_t> basin_sizes_;
};

/// Hill-climb terminus of every spec. Shared trajectory tails are memoised;
/// the climb is deterministic, so results equal independent climbs.
BasinMap compute_basins(const Landscape& land);

}  // namespace lonas
