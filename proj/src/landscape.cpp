#include "lonas/landscape.hpp"

#include <map>

#include "lonas/errors.hpp"

namespace lonas {

Landscape::Landscape(FitnessTable fitness) : space_(fitness.config()), fitness_(std::move(fitness)) {}

namespace {

std::size_t checked_index(const ArchSpec& spec, const Landscape& land) {
  if (!spec.valid_in(land.config())) throw InputError("architecture " + spec.encode() + " outside the space");
  return land.space().index_of(spec);
}

}  // namespace

ArchSpec hill_climb(const ArchSpec& start, const Landscape& land) {
  const auto f = [&](std::size_t i) { return land.fitness_at(i); };
  return land.space().spec(climb(land.space(), checked_index(start, land), f));
}

std::vector<ArchSpec> hill_climb_trace(const ArchSpec& start, const Landscape& land) {
  const auto f = [&](std::size_t i) { return land.fitness_at(i); };
  std::vector<std::size_t> trace;
  climb(land.space(), checked_index(start, land), f, &trace);
  std::vector<ArchSpec> out;
  out.reserve(trace.size());
  for (auto i : trace) out.push_back(land.space().spec(i));
  return out;
}

LocalOptimaScan find_local_optima(const Landscape& land) {
  LocalOptimaScan scan;
  const auto& space = land.space();
  for (std::size_t s = 0; s < space.size(); ++s) {
    const double fs = land.fitness_at(s);
    bool optimum = true;
    for (std::uint32_t t : space.neighbors(s)) {
      const double ft = land.fitness_at(t);
      if (ft > fs) optimum = false;
      if (ft == fs) ++scan.neutral_pairs;
    }
    if (optimum) scan.optima.push_back(space.spec(s));
  }
  return scan;
}

BasinMap::BasinMap(SpaceConfig cfg, std::vector<std::size_t> terminus)
    : cfg_(cfg), terminus_(std::move(terminus)) {
  if (terminus_.size() != cfg_.size()) throw InputError("basin map does not cover the space");
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t i = 0; i < terminus_.size(); ++i) {
    const std::size_t t = terminus_[i];
    if (t >= terminus_.size() || terminus_[t] != t) {
      throw GraphError("basin map terminus of " + spec_at(i, cfg_).encode() + " is not a fixed point");
    }
    ++sizes[t];
  }
  for (const auto& [opt, size] : sizes) {
    optima_.push_back(opt);
    basin_sizes_.push_back(size);
  }
}

ArchSpec BasinMap::terminus_of(const ArchSpec& spec) const {
  return spec_at(terminus_.at(canonical_index(spec, cfg_)), cfg_);
}

std::string BasinMap::to_csv() const {
  std::string out = "architecture,terminus,is_optimum\n";
  for (std::size_t i = 0; i < terminus_.size(); ++i) {
    out += spec_at(i, cfg_).encode() + "," + spec_at(terminus_[i], cfg_).encode() + "," +
           (is_optimum(i) ? "true" : "false") + "\n";
  }
  return out;
}

std::string BasinMap::summary_csv(const FitnessTable& fitness) const {
  std::string out = "optimum,fitness,basin_size\n";
  for (std::size_t k = 0; k < optima_.size(); ++k) {
    out += spec_at(optima_[k], cfg_).encode() + "," + format_fitness(fitness.at(optima_[k])) + "," +
           std::to_string(basin_sizes_[k]) + "\n";
  }
  return out;
}

BasinMap compute_basins(const Landscape& land) {
  const auto& space = land.space();
  const auto f = [&](std::size_t i) { return land.fitness_at(i); };
  constexpr std::size_t kUnknown = static_cast<std::size_t>(-1);
  std::vector<std::size_t> terminus(space.size(), kUnknown);
  std::vector<std::size_t> path;
  for (std::size_t s = 0; s < space.size(); ++s) {
    path.clear();
    std::size_t x = s;
    while (terminus[x] == kUnknown) {
      path.push_back(x);
      const std::size_t next = best_improvement_step(space, x, f);
      if (next == x) {
        terminus[x] = x;
        break;
      }
      x = next;
    }
    const std::size_t end = terminus[x];
    for (std::size_t p : path) terminus[p] = end;
  }
  return BasinMap(space.config(), std::move(terminus));
}

}  // namespace lonas
