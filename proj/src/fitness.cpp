#include "lonas/fitness.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "lonas/errors.hpp"
#include "lonas/util.hpp"

namespace lonas {

double r_squared(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.empty() || actual.size() != predicted.size()) {
    throw InputError("r_squared needs two non-empty sequences of equal length");
  }
  double mean = 0.0;
  for (double y : actual) mean += y;
  mean /= static_cast<double>(actual.size());

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double r = actual[i] - predicted[i];
    const double c = actual[i] - mean;
    ss_res += r * r;
    ss_tot += c * c;
  }
  if (ss_tot == 0.0) throw DegenerateInputError("r_squared: actual values have zero variance");
  return 1.0 - ss_res / ss_tot;
}

double r_squared_multioutput(std::span<const double> actual, std::span<const double> predicted,
                             std::size_t outputs) {
  if (outputs == 0 || actual.size() != predicted.size() || actual.size() % outputs != 0 ||
      actual.empty()) {
    throw InputError("r_squared_multioutput: shape mismatch");
  }
  const std::size_t rows = actual.size() / outputs;
  std::vector<double> a(rows);
  std::vector<double> p(rows);
  double total = 0.0;
  for (std::size_t k = 0; k < outputs; ++k) {
    for (std::size_t i = 0; i < rows; ++i) {
      a[i] = actual[i * outputs + k];
      p[i] = predicted[i * outputs + k];
    }
    try {
      total += r_squared(a, p);
    } catch (const DegenerateInputError&) {
      throw DegenerateInputError("r_squared_multioutput: output " + std::to_string(k) +
                                 " has zero variance");
    }
  }
  return total / static_cast<double>(outputs);
}

double r_squared_multioutput(const std::vector<std::vector<double>>& actual,
                             const std::vector<std::vector<double>>& predicted) {
  if (actual.empty() || actual.size() != predicted.size()) {
    throw InputError("r_squared_multioutput: row count mismatch");
  }
  const std::size_t outputs = actual.front().size();
  std::vector<double> a;
  std::vector<double> p;
  a.reserve(actual.size() * outputs);
  p.reserve(actual.size() * outputs);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i].size() != outputs || predicted[i].size() != outputs) {
      throw InputError("r_squared_multioutput: output dimension mismatch at row " + std::to_string(i));
    }
    a.insert(a.end(), actual[i].begin(), actual[i].end());
    p.insert(p.end(), predicted[i].begin(), predicted[i].end());
  }
  return r_squared_multioutput(a, p, outputs);
}

FitnessTable::FitnessTable(SpaceConfig cfg, std::vector<double> values, std::string provenance)
    : cfg_(cfg), values_(std::move(values)), provenance_(std::move(provenance)) {
  if (values_.size() != cfg_.size()) {
    throw InputError("fitness table has " + std::to_string(values_.size()) + " values for a space of " +
                     std::to_string(cfg_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError("non-finite fitness for " + spec_at(i, cfg_).encode());
    }
  }
}

double FitnessTable::at(const ArchSpec& spec) const {
  if (!spec.valid_in(cfg_)) throw InputError("architecture " + spec.encode() + " outside the space");
  return values_[canonical_index(spec, cfg_)];
}

std::string format_fitness(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string FitnessTable::to_csv() const {
  std::string out = "architecture,fitness\n";
  const auto specs = enumerate_space(cfg_);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out += specs[i].encode();
    out.push_back(',');
    out += format_fitness(values_[i]);
    out.push_back('\n');
  }
  return out;
}

std::string FitnessTable::digest() const { return fnv1a_hex(to_csv()); }

FitnessTable parse_fitness_table(std::istream& in, const SpaceConfig& cfg, std::string provenance) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "architecture,fitness") {
    throw FormatError("fitness table must start with header 'architecture,fitness'");
  }
  std::vector<double> values(cfg.size());
  std::vector<char> present(cfg.size(), 0);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 2) throw FormatError(where + ": expected 2 fields");
    ArchSpec spec;
    try {
      spec = ArchSpec::decode(fields[0]);
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!spec.valid_in(cfg)) throw FormatError(where + ": architecture " + fields[0] + " outside the space");
    double value = 0.0;
    const auto& text = fields[1];
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
      throw FormatError(where + ": unparseable fitness '" + text + "'");
    }
    const std::size_t idx = canonical_index(spec, cfg);
    if (present[idx]) throw FormatError(where + ": duplicate architecture " + fields[0]);
    present[idx] = 1;
    values[idx] = value;
  }
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < present.size(); ++i) {
    if (!present[i]) missing.push_back(spec_at(i, cfg).encode());
  }
  if (!missing.empty()) {
    std::string msg = "fitness table is missing " + std::to_string(missing.size()) + " architecture(s):";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    throw CompletenessError(msg, std::move(missing));
  }
  return FitnessTable(cfg, std::move(values), std::move(provenance));
}

FitnessTable load_fitness_table(const std::filesystem::path& path, const SpaceConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open fitness table " + path.string());
  return parse_fitness_table(in, cfg, "table:" + path.filename().string());
}

void save_fitness_table(const FitnessTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, table.to_csv());
}

double synthetic_linear(const ArchSpec& spec) {
  double total = 0.0;
  double factor = 1.0;
  for (int w : spec.widths()) {
    total += w * factor;
    factor *= 1.01;
  }
  return total;
}

namespace {

double bimodal_peak(int x) {
  // Rising slope 1, falling slope 1.1: breaks the mirror ties g(p-k) == g(p+k).
  if (x <= 5) return x <= 3 ? 5.0 - (3 - x) : 5.0 - 1.1 * (x - 3);
  return x <= 8 ? 4.5 - (8 - x) : 4.5 - 1.1 * (x - 8);
}

}  // namespace

double synthetic_bimodal(const ArchSpec& spec) {
  double total = 0.0;
  double factor = 1.0;
  for (int w : spec.widths()) {
    total += bimodal_peak(w) * factor;
    factor *= 1.01;
  }
  return total;
}

std::string TableProvider::name() const {
  return table_.provenance().empty() ? std::string("table") : table_.provenance();
}

FitnessTable tabulate(const FitnessProvider& provider, const SpaceConfig& cfg, unsigned threads) {
  const auto specs = enumerate_space(cfg);
  std::vector<double> values(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t i) { values[i] = provider.evaluate(specs[i]); });
  return FitnessTable(cfg, std::move(values), provider.name());
}

std::unique_ptr<FitnessProvider> make_provider(const std::string& selector, const SpaceConfig& cfg) {
  if (selector == "synthetic:linear") return std::make_unique<SyntheticLinearProvider>();
  if (selector == "synthetic:bimodal") return std::make_unique<SyntheticBimodalProvider>();
  if (selector.rfind("table:", 0) == 0) {
    return std::make_unique<TableProvider>(load_fitness_table(selector.substr(6), cfg));
  }
  throw InputError("unknown provider '" + selector + "'");
}

}  // namespace lonas
