#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lonas/arch_space.hpp"

namespace lonas {

/// Coefficient of determination 1 - SS_res / SS_tot.
/// Throws InputError on empty or unequal inputs and DegenerateInputError when
/// `actual` has zero variance.
double r_squared(std::span<const double> actual, std::span<const double> predicted);

/// Unweighted mean of per-column R² over row-major `rows x outputs` data.
double r_squared_multioutput(std::span<const double> actual, std::span<const double> predicted,
                             std::size_t outputs);

/// Same, over a sequence of output vectors.
double r_squared_multioutput(const std::vector<std::vector<double>>& actual,
                             const std::vector<std::vector<double>>& predicted);

/// Total fitness assignment over an architecture space, stored by canonical
/// index.
class FitnessTable {
 public:
  /// Throws InputError if `values` is not one finite value per spec.
  FitnessTable(SpaceConfig cfg, std::vector<double> values, std::string provenance = {});

  const SpaceConfig& config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::string& provenance() const noexcept { return provenance_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(std::size_t index) const { return values_.at(index); }
  double at(const ArchSpec& spec) const;

  /// CSV with header `architecture,fitness`, canonical order, 17 significant digits.
  std::string to_csv() const;
  /// FNV-1a 64 of to_csv(), as 16 hex digits.
  std::string digest() const;

 private:
  SpaceConfig cfg_;
  std::vector<double> values_;
  std::string provenance_;
};

/// Parses `architecture,fitness` CSV (rows in any order). Throws FormatError on
/// malformed, out-of-space or duplicate rows and CompletenessError when
/// architectures are absent.
FitnessTable parse_fitness_table(std::istream& in, const SpaceConfig& cfg, std::string provenance = {});
FitnessTable load_fitness_table(const std::filesystem::path& path, const SpaceConfig& cfg);
void save_fitness_table(const FitnessTable& table, const std::filesystem::path& path);

/// Shortest-unambiguous-enough text for a double: %.17g.
std::string format_fitness(double value);

/// Anything that can score an architecture. Implementations must be
/// deterministic and safe to call concurrently.
class FitnessProvider {
 public:
  virtual ~FitnessProvider() = default;
  virtual std::string name() const = 0;
  virtual double evaluate(const ArchSpec& spec) const = 0;
};

/// Σ w_i · 1.01^(i-1). Unimodal under the width/depth neighbourhood.
double synthetic_linear(const ArchSpec& spec);

/// Σ g(w_i) · 1.01^(i-1), with peaks g(3)=5 and g(8)=4.5. Multimodal for
/// w = 10; slopes are asymmetric so every value in the (3,10) space is unique.
double synthetic_bimodal(const ArchSpec& spec);

class SyntheticLinearProvider final : public FitnessProvider {
 public:
  std::string name() const override { return "synthetic:linear"; }
  double evaluate(const ArchSpec& spec) const override { return synthetic_linear(spec); }
};

class SyntheticBimodalProvider final : public FitnessProvider {
 public:
  std::string name() const override { return "synthetic:bimodal"; }
  double evaluate(const ArchSpec& spec) const override { return synthetic_bimodal(spec); }
};

/// Lookup into a previously computed table.
class TableProvider final : public FitnessProvider {
 public:
  explicit TableProvider(FitnessTable table) : table_(std::move(table)) {}
  std::string name() const override;
  double evaluate(const ArchSpec& spec) const override { return table_.at(spec); }
  const FitnessTable& table() const noexcept { return table_; }

 private:
  FitnessTable table_;
};

/// Evaluates `provider` on every spec of `cfg`. `threads` only changes
/// wall time, never the result.
FitnessTable tabulate(const FitnessProvider& provider, const SpaceConfig& cfg, unsigned threads = 1);

/// Builds a provider from `synthetic:linear`, `synthetic:bimodal` or
/// `table:<path>`. Throws InputError for anything else.
std::unique_ptr<FitnessProvider> make_provider(const std::string& selector, const SpaceConfig& cfg);

}  // namespace lonas
