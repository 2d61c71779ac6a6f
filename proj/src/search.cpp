#include "lonas/search.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>

#include "lonas/errors.hpp"
#include "lonas/util.hpp"

namespace lonas {

void IlsConfig::validate() const {
  if (perturbation_strength < 1 || stopping_threshold < 1 || runs < 1 || top_m < 1) {
    throw InputError("ILS parameters k, t, runs and top must all be >= 1");
  }
}

std::size_t perturb_index(std::size_t s, int k, const ArchSpace& space, Rng& rng) {
  for (int j = 0; j < k; ++j) {
    const auto nb = space.neighbors(s);
    if (nb.empty()) break;
    s = nb[uniform_index(rng, nb.size())];
  }
  return s;
}

ArchSpec perturb(const ArchSpec& s, int k, const ArchSpace& space, Rng& rng) {
  if (!s.valid_in(space.config())) throw InputError("architecture " + s.encode() + " outside the space");
  return space.spec(perturb_index(space.index_of(s), k, space, rng));
}

std::vector<std::size_t> top_m_indices(const Landscape& land, int m) {
  std::vector<std::size_t> order(land.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto count = std::min(order.size(), static_cast<std::size_t>(std::max(m, 0)));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double fa = land.fitness_at(a);
                      const double fb = land.fitness_at(b);
                      return fa != fb ? fa > fb : a < b;
                    });
  order.resize(count);
  return order;
}

namespace {

// Fitness lookups with first-visit accounting.
class EvaluationLog {
 public:
  EvaluationLog(const Landscape& land, const std::vector<std::size_t>& top, std::size_t global)
      : land_(land), seen_(land.size(), 0), top_(land.size(), 0), global_(global) {
    for (std::size_t i : top) top_[i] = 1;
  }

  double operator()(std::size_t i) {
    if (!seen_[i]) {
      seen_[i] = 1;
      ++count_;
      if (top_[i] && !first_top_) first_top_ = count_;
      if (i == global_) global_hit_ = count_;
    }
    return land_.fitness_at(i);
  }

  std::size_t count() const { return count_; }
  std::optional<std::size_t> first_top() const { return first_top_; }
  std::optional<std::size_t> global_hit() const { return global_hit_; }

 private:
  const Landscape& land_;
  std::vector<char> seen_;
  std::vector<char> top_;
  std::size_t global_;
  std::size_t count_ = 0;
  std::optional<std::size_t> first_top_;
  std::optional<std::size_t> global_hit_;
};

IlsTrace run_one(const Landscape& land, const IlsConfig& cfg, std::size_t run_index,
                 const std::vector<std::size_t>& top) {
  const auto& space = land.space();
  IlsTrace trace;
  trace.run_index = run_index;
  trace.run_seed = derive_seed(cfg.base_seed, run_index);
  Rng rng(trace.run_seed);
  EvaluationLog eval(land, top, top.front());
  auto f = [&](std::size_t i) { return eval(i); };

  std::size_t s = climb(space, uniform_index(rng, space.size()), f);
  trace.accepted_optima.push_back(space.spec(s));
  int stall = 0;
  do {
    const std::size_t x = perturb_index(s, cfg.perturbation_strength, space, rng);
    const std::size_t candidate = climb(space, x, f);
    ++trace.iterations;
    if (f(candidate) >= f(s) && candidate != s) {
      s = candidate;
      trace.accepted_optima.push_back(space.spec(s));
      stall = 0;
    }
    ++stall;
  } while (stall < cfg.stopping_threshold);

  trace.final_optimum = space.spec(s);
  trace.evaluation_count = eval.count();
  trace.first_top_m_hit = eval.first_top();
  trace.global_hit_evaluation = eval.global_hit();
  trace.found_global = trace.global_hit_evaluation.has_value();
  return trace;
}

double median_of_sorted(const std::vector<double>& v) {
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of_sorted(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

IlsTrace run_ils(const Landscape& land, const IlsConfig& cfg, std::size_t run_index) {
  cfg.validate();
  return run_one(land, cfg, run_index, top_m_indices(land, cfg.top_m));
}

std::vector<IlsTrace> run_ils_batch(const Landscape& land, const IlsConfig& cfg, unsigned threads) {
  cfg.validate();
  const auto top = top_m_indices(land, cfg.top_m);
  std::vector<IlsTrace> traces(static_cast<std::size_t>(cfg.runs));
  parallel_for(traces.size(), threads, [&](std::size_t r) { traces[r] = run_one(land, cfg, r, top); });
  return traces;
}

IlsSummary aggregate_ils(std::span<const IlsTrace> traces) {
  if (traces.empty()) throw InputError("aggregate_ils needs at least one trace");
  IlsSummary out;
  out.runs = traces.size();
  std::vector<double> top_hits;
  std::vector<double> global_hits;
  std::vector<double> evaluations;
  for (const auto& t : traces) {
    if (t.first_top_m_hit) top_hits.push_back(static_cast<double>(*t.first_top_m_hit));
    if (t.found_global && t.global_hit_evaluation) global_hits.push_back(static_cast<double>(*t.global_hit_evaluation));
    evaluations.push_back(static_cast<double>(t.evaluation_count));
  }
  // Sorting first makes every floating-point sum independent of input order.
  std::sort(top_hits.begin(), top_hits.end());
  std::sort(global_hits.begin(), global_hits.end());
  std::sort(evaluations.begin(), evaluations.end());

  out.runs_with_top_m_hit = top_hits.size();
  if (!top_hits.empty()) {
    out.median_first_top_m_hit = median_of_sorted(top_hits);
    out.mean_first_top_m_hit = mean_of_sorted(top_hits);
  }
  out.runs_found_global = global_hits.size();
  out.global_fraction = static_cast<double>(global_hits.size()) / static_cast<double>(traces.size());
  if (!global_hits.empty()) out.mean_evaluations_to_global = mean_of_sorted(global_hits);
  out.mean_evaluations = mean_of_sorted(evaluations);
  out.median_evaluations = median_of_sorted(evaluations);
  return out;
}

std::string ils_traces_to_csv(std::span<const IlsTrace> traces) {
  const auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); };
  std::string out = "run,seed,evaluations,first_top_m_hit,found_global,global_hit_evaluation\n";
  for (const auto& t : traces) {
    out += std::to_string(t.run_index) + "," + std::to_string(t.run_seed) + "," +
           std::to_string(t.evaluation_count) + "," + opt(t.first_top_m_hit) + "," +
           (t.found_global ? "true" : "false") + "," + opt(t.global_hit_evaluation) + "\n";
  }
  return out;
}

std::string ils_summary_to_json(const IlsSummary& s, const IlsConfig& cfg) {
  using Json = nlohmann::ordered_json;
  const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j;
  j["config"] = {{"k", cfg.perturbation_strength},
                 {"t", cfg.stopping_threshold},
                 {"runs", cfg.runs},
                 {"base_seed", cfg.base_seed},
                 {"top_m", cfg.top_m}};
  j["runs"] = s.runs;
  j["runs_with_top_m_hit"] = s.runs_with_top_m_hit;
  j["median_first_top_m_hit"] = opt(s.median_first_top_m_hit);
  j["mean_first_top_m_hit"] = opt(s.mean_first_top_m_hit);
  j["runs_found_global"] = s.runs_found_global;
  j["global_fraction"] = s.global_fraction;
  j["mean_evaluations_to_global"] = opt(s.mean_evaluations_to_global);
  j["mean_evaluations"] = s.mean_evaluations;
  j["median_evaluations"] = s.median_evaluations;
  return j.dump(2) + "\n";
}

}  // namespace lonas
