#include "lonas/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>

#include "lonas/errors.hpp"
#include "lonas/seeding.hpp"
#include "lonas/util.hpp"

namespace lonas {

TaskKind task_kind_from_string(std::string_view text) {
  if (text == "classification") return TaskKind::classification;
  if (text == "regression") return TaskKind::regression;
  throw InputError("unknown task kind '" + std::string(text) + "'");
}

ColumnKind column_kind_from_string(std::string_view text) {
  if (text == "numeric") return ColumnKind::numeric;
  if (text == "binary") return ColumnKind::binary;
  if (text == "categorical") return ColumnKind::categorical;
  throw InputError("unknown column kind '" + std::string(text) + "'");
}

Matrix Matrix::select_rows(std::span<const std::size_t> index) const {
  Matrix out(index.size(), cols);
  for (std::size_t r = 0; r < index.size(); ++r) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(index[r] * cols), cols,
                out.data.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return out;
}

void TrainConfig::validate() const {
  const double sum = train_fraction + validation_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("split fractions must sum to 1");
  if (train_fraction <= 0 || validation_fraction <= 0 || test_fraction <= 0) {
    throw InputError("split fractions must be positive");
  }
  if (batch_runs < 1) throw InputError("batch_runs must be >= 1");
  if (batch_size < 1) throw InputError("batch_size must be >= 1");
  if (max_epochs < 1) throw InputError("max_epochs must be >= 1");
  if (early_stop_patience < 1) throw InputError("early_stop_patience must be >= 1");
  if (!(learning_rate > 0)) throw InputError("learning_rate must be positive");
}

// ---------------------------------------------------------------------------
// Dataset ingestion

DatasetSchema DatasetSchema::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    DatasetSchema schema;
    schema.task = task_kind_from_string(j.at("task").get<std::string>());
    schema.target = j.at("target").get<std::string>();
    // Keep the declaration order of the columns object.
    const auto ordered = nlohmann::ordered_json::parse(text);
    for (const auto& [name, decl] : ordered.at("columns").items()) {
      ColumnSchema col;
      col.name = name;
      if (decl.is_string()) {
        col.kind = column_kind_from_string(decl.get<std::string>());
      } else {
        col.kind = column_kind_from_string(decl.at("kind").get<std::string>());
        if (decl.contains("levels")) col.levels = decl.at("levels").get<std::vector<std::string>>();
      }
      schema.inputs.push_back(std::move(col));
    }
    if (j.contains("ignore")) schema.ignored = j.at("ignore").get<std::vector<std::string>>();
    return schema;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid dataset schema: ") + e.what());
  }
}

DatasetSchema DatasetSchema::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("schema file not found: " + path.string());
  return from_json(read_file(path));
}

namespace {

bool is_missing(const std::string& v) { return v.empty() || v == "NA" || v == "?" || v == "nan" || v == "NaN"; }

double parse_number(const std::string& v, std::size_t row, const std::string& column) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw IngestionError("row " + std::to_string(row) + ", column '" + column + "': '" + v + "' is not numeric");
  }
  return out;
}

std::vector<std::string> resolve_levels(const ColumnSchema& col, const std::vector<std::string>& values) {
  if (!col.levels.empty()) {
    for (std::size_t r = 0; r < values.size(); ++r) {
      if (std::find(col.levels.begin(), col.levels.end(), values[r]) == col.levels.end()) {
        throw IngestionError("row " + std::to_string(r + 1) + ", column '" + col.name + "': unknown category '" +
                             values[r] + "'");
      }
    }
    return col.levels;
  }
  const std::set<std::string> seen(values.begin(), values.end());
  return {seen.begin(), seen.end()};
}

std::size_t level_of(const std::vector<std::string>& levels, const std::string& v) {
  return static_cast<std::size_t>(std::find(levels.begin(), levels.end(), v) - levels.begin());
}

}  // namespace

DatasetSpec parse_dataset(std::istream& in, const DatasetSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("dataset is empty");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!position.emplace(header[c], c).second) throw IngestionError("duplicate column '" + header[c] + "'");
  }
  const auto column = [&](const std::string& name) {
    const auto it = position.find(name);
    if (it == position.end()) throw IngestionError("column '" + name + "' not in dataset header");
    return it->second;
  };
  std::set<std::string> declared(schema.ignored.begin(), schema.ignored.end());
  declared.insert(schema.target);
  for (const auto& col : schema.inputs) declared.insert(col.name);
  for (const auto& name : header) {
    if (!declared.count(name)) throw IngestionError("column '" + name + "' is not declared in the schema");
  }
  const std::size_t target_col = column(schema.target);

  std::vector<std::vector<std::string>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_no;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw IngestionError("row " + std::to_string(row_no) + ": expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (is_missing(fields[c]) && !std::count(schema.ignored.begin(), schema.ignored.end(), header[c])) {
        throw IngestionError("row " + std::to_string(row_no) + ", column '" + header[c] + "': missing value");
      }
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw IngestionError("dataset has no rows");
  const std::size_t n = rows.size();

  const auto values_of = [&](std::size_t c) {
    std::vector<std::string> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = rows[r][c];
    return v;
  };

  // Encoded input columns, one vector per output feature.
  std::vector<std::vector<double>> features;
  DatasetSpec data;
  data.task = schema.task;
  for (const auto& col : schema.inputs) {
    const std::size_t c = column(col.name);
    const auto raw = values_of(c);
    switch (col.kind) {
      case ColumnKind::numeric: {
        std::vector<double> v(n);
        for (std::size_t r = 0; r < n; ++r) v[r] = parse_number(raw[r], r + 1, col.name);
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        const double sd = std::sqrt(var / static_cast<double>(n));
        for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
        features.push_back(std::move(v));
        data.feature_names.push_back(col.name);
        break;
      }
      case ColumnKind::binary: {
        const auto levels = resolve_levels(col, raw);
        if (levels.size() > 2) throw IngestionError("binary column '" + col.name + "' has more than two values");
        std::vector<double> v(n);
        for (std::size_t r = 0; r < n; ++r) v[r] = (levels.size() == 2 && level_of(levels, raw[r]) == 1) ? 1.0 : -1.0;
        features.push_back(std::move(v));
        data.feature_names.push_back(col.name);
        break;
      }
      case ColumnKind::categorical: {
        const auto levels = resolve_levels(col, raw);
        for (const auto& level : levels) {
          std::vector<double> v(n);
          for (std::size_t r = 0; r < n; ++r) v[r] = raw[r] == level ? 1.0 : 0.0;
          features.push_back(std::move(v));
          data.feature_names.push_back(col.name + "=" + level);
        }
        break;
      }
    }
  }
  if (features.empty()) throw IngestionError("schema declares no input columns");

  data.inputs = Matrix(n, features.size());
  for (std::size_t k = 0; k < features.size(); ++k) {
    for (std::size_t r = 0; r < n; ++r) data.inputs(r, k) = features[k][r];
  }

  const auto target = values_of(target_col);
  if (schema.task == TaskKind::regression) {
    data.targets = Matrix(n, 1);
    for (std::size_t r = 0; r < n; ++r) data.targets(r, 0) = parse_number(target[r], r + 1, schema.target);
  } else {
    const std::set<std::string> levels(target.begin(), target.end());
    data.class_names.assign(levels.begin(), levels.end());
    if (data.class_names.size() < 2) throw IngestionError("classification target has fewer than two classes");
    data.targets = Matrix(n, data.class_names.size());
    for (std::size_t r = 0; r < n; ++r) {
      const auto k = level_of(data.class_names, target[r]);
      data.labels.push_back(static_cast<int>(k));
      data.targets(r, k) = 1.0;
    }
  }
  return data;
}

DatasetSpec ingest_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path.string());
  return parse_dataset(in, schema);
}

DataSplit split_dataset(std::size_t n, const TrainConfig& cfg) {
  cfg.validate();
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.train_fraction));
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.validation_fraction));
  if (n_train < 1 || n_val < 1 || n_train + n_val >= n) {
    throw InputError("dataset of " + std::to_string(n) + " patterns is too small to split");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.base_seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);
  DataSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                          order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return split;
}

// ---------------------------------------------------------------------------
// Network

std::size_t Network::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.weights.size() + l.bias.size();
  return total;
}

std::vector<std::pair<std::size_t, std::size_t>> Network::shapes() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& l : layers) out.emplace_back(l.fan_in, l.fan_out);
  return out;
}

Network build_network(const ArchSpec& spec, std::size_t input_dim, std::size_t output_dim, TaskKind task) {
  if (input_dim < 1 || output_dim < 1) throw InputError("network dimensions must be >= 1");
  if (spec.depth() == 0) throw InputError("architecture has no hidden layers");
  Network net;
  net.task = task;
  std::size_t fan_in = input_dim;
  const auto add = [&](std::size_t fan_out) {
    net.layers.push_back({fan_in, fan_out, std::vector<double>(fan_in * fan_out, 0.0), std::vector<double>(fan_out, 0.0)});
    fan_in = fan_out;
  };
  for (int w : spec.widths()) add(static_cast<std::size_t>(w));
  add(output_dim);
  return net;
}

void init_weights(Network& net, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& layer : net.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.fan_in));
    for (double& w : layer.weights) w = uniform_real(rng, -limit, limit);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
}

namespace {

// Pre-activations and activations of every layer for one batch.
struct ForwardPass {
  std::vector<Matrix> pre;   // z_l
  std::vector<Matrix> post;  // a_l; post.back() is the network output
};

Matrix affine(const DenseLayer& layer, const Matrix& a) {
  Matrix z(a.rows, layer.fan_out);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t o = 0; o < layer.fan_out; ++o) {
      double sum = layer.bias[o];
      const double* w = layer.weights.data() + o * layer.fan_in;
      for (std::size_t i = 0; i < layer.fan_in; ++i) sum += w[i] * a(r, i);
      z(r, o) = sum;
    }
  }
  return z;
}

void softmax_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m.cols; ++c) peak = std::max(peak, m(r, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) {
      m(r, c) = std::exp(m(r, c) - peak);
      sum += m(r, c);
    }
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) /= sum;
  }
}

ForwardPass forward(const Network& net, const Matrix& inputs) {
  ForwardPass pass;
  const Matrix* a = &inputs;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    pass.pre.push_back(affine(net.layers[l], *a));
    Matrix out = pass.pre.back();
    if (l + 1 < net.layers.size()) {
      for (double& x : out.data) x = x > 0.0 ? x : 0.0;
    } else if (net.task == TaskKind::classification) {
      softmax_rows(out);
    }
    pass.post.push_back(std::move(out));
    a = &pass.post.back();
  }
  return pass;
}

double loss_from_pass(const Network& net, const ForwardPass& pass, const Matrix& targets) {
  const Matrix& z = pass.pre.back();
  const Matrix& out = pass.post.back();
  double total = 0.0;
  if (net.task == TaskKind::classification) {
    // Cross-entropy via log-sum-exp on the logits.
    for (std::size_t r = 0; r < z.rows; ++r) {
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < z.cols; ++c) peak = std::max(peak, z(r, c));
      double sum = 0.0;
      for (std::size_t c = 0; c < z.cols; ++c) sum += std::exp(z(r, c) - peak);
      const double lse = peak + std::log(sum);
      for (std::size_t c = 0; c < z.cols; ++c) total -= targets(r, c) * (z(r, c) - lse);
    }
    return total / static_cast<double>(z.rows);
  }
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double d = out.data[i] - targets.data[i];
    total += d * d;
  }
  return total / static_cast<double>(out.data.size());
}

Network zeros_like(const Network& net) {
  Network g = net;
  for (auto& l : g.layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  return g;
}

}  // namespace

Matrix predict(const Network& net, const Matrix& inputs) { return forward(net, inputs).post.back(); }

double loss(const Network& net, const Matrix& inputs, const Matrix& targets) {
  return loss_from_pass(net, forward(net, inputs), targets);
}

double loss_and_gradient(const Network& net, const Matrix& inputs, const Matrix& targets, Network& grad) {
  const ForwardPass pass = forward(net, inputs);
  const double value = loss_from_pass(net, pass, targets);
  grad = zeros_like(net);

  const Matrix& out = pass.post.back();
  Matrix delta(out.rows, out.cols);
  const double scale = net.task == TaskKind::classification ? 1.0 / static_cast<double>(out.rows)
                                                            : 2.0 / static_cast<double>(out.data.size());
  for (std::size_t i = 0; i < out.data.size(); ++i) delta.data[i] = scale * (out.data[i] - targets.data[i]);

  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const DenseLayer& layer = net.layers[l];
    DenseLayer& g = grad.layers[l];
    const Matrix& a_prev = l == 0 ? inputs : pass.post[l - 1];
    for (std::size_t r = 0; r < delta.rows; ++r) {
      for (std::size_t o = 0; o < layer.fan_out; ++o) {
        const double d = delta(r, o);
        if (d == 0.0) continue;
        g.bias[o] += d;
        double* gw = g.weights.data() + o * layer.fan_in;
        for (std::size_t i = 0; i < layer.fan_in; ++i) gw[i] += d * a_prev(r, i);
      }
    }
    if (l == 0) break;
    Matrix prev(delta.rows, layer.fan_in);
    const Matrix& z_prev = pass.pre[l - 1];
    for (std::size_t r = 0; r < delta.rows; ++r) {
      for (std::size_t i = 0; i < layer.fan_in; ++i) {
        if (z_prev(r, i) <= 0.0) continue;
        double sum = 0.0;
        for (std::size_t o = 0; o < layer.fan_out; ++o) sum += delta(r, o) * layer.weights[o * layer.fan_in + i];
        prev(r, i) = sum;
      }
    }
    delta = std::move(prev);
  }
  return value;
}

// ---------------------------------------------------------------------------
// Training

namespace {

class Adam {
 public:
  Adam(const Network& shape, const TrainConfig& cfg) : cfg_(cfg), m_(zeros_like(shape)), v_(zeros_like(shape)) {}

  void step(Network& net, const Network& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      update(net.layers[l].weights, grad.layers[l].weights, m_.layers[l].weights, v_.layers[l].weights, c1, c2);
      update(net.layers[l].bias, grad.layers[l].bias, m_.layers[l].bias, v_.layers[l].bias, c1, c2);
    }
  }

 private:
  void update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m, std::vector<double>& v,
              double c1, double c2) const {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      p[i] -= cfg_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.epsilon);
    }
  }

  const TrainConfig& cfg_;
  Network m_;
  Network v_;
  long t_ = 0;
};

constexpr std::uint64_t kShuffleStream = 0x53687566666c65ULL;

}  // namespace

TrainOutcome train_once(const ArchSpec& spec, const DatasetSpec& data, const DataSplit& split,
                        const TrainConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Network net = build_network(spec, data.input_dim(), data.output_dim(), data.task);
  init_weights(net, seed);
  Rng shuffle_rng(splitmix_finish(seed ^ kShuffleStream));

  const Matrix x_val = data.inputs.select_rows(split.validation);
  const Matrix y_val = data.targets.select_rows(split.validation);

  Adam adam(net, cfg);
  Network grad;
  std::vector<std::size_t> order = split.train;
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  double best = std::numeric_limits<double>::infinity();
  int wait = 0;
  TrainOutcome outcome;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    outcome.epochs = epoch;
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[uniform_index(shuffle_rng, i + 1)]);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::span<const std::size_t> idx(order.data() + start, std::min(batch, order.size() - start));
      const double value = loss_and_gradient(net, data.inputs.select_rows(idx), data.targets.select_rows(idx), grad);
      if (!std::isfinite(value)) {
        outcome.diverged = true;
        break;
      }
      adam.step(net, grad);
    }
    if (outcome.diverged) break;
    const double val_loss = loss(net, x_val, y_val);
    if (!std::isfinite(val_loss)) {
      outcome.diverged = true;
      break;
    }
    if (val_loss < best - cfg.early_stop_min_delta) {
      best = val_loss;
      wait = 0;
    } else if (++wait >= cfg.early_stop_patience) {
      break;
    }
  }

  const Matrix predicted = predict(net, data.inputs.select_rows(split.test));
  const Matrix actual = data.targets.select_rows(split.test);
  outcome.r2 = r_squared_multioutput(actual.data, predicted.data, actual.cols);
  if (!std::isfinite(outcome.r2)) throw NumericalError("training produced a non-finite R²");
  return outcome;
}

BatchResult evaluate_batch(const ArchSpec& spec, const DatasetSpec& data, const TrainConfig& cfg, unsigned threads) {
  cfg.validate();
  const DataSplit split = split_dataset(data.size(), cfg);
  const auto runs = static_cast<std::size_t>(cfg.batch_runs);
  BatchResult result;
  result.per_run_r2.resize(runs);
  result.epochs_used.resize(runs);
  result.seeds.resize(runs);
  parallel_for(runs, threads, [&](std::size_t j) {
    const std::uint64_t seed = derive_seed(cfg.base_seed, j);
    const TrainOutcome run = train_once(spec, data, split, cfg, seed);
    result.seeds[j] = seed;
    result.per_run_r2[j] = run.r2;
    result.epochs_used[j] = run.epochs;
  });
  double sum = 0.0;
  for (double r2 : result.per_run_r2) sum += r2;
  result.mean_r2 = sum / static_cast<double>(runs);
  return result;
}

TrainerProvider::TrainerProvider(DatasetSpec data, TrainConfig cfg, std::string dataset_name)
    : data_(std::move(data)), cfg_(cfg), dataset_name_(std::move(dataset_name)) {
  cfg_.validate();
}

double TrainerProvider::evaluate(const ArchSpec& spec) const {
  BatchResult result;
  try {
    result = evaluate_batch(spec, data_, cfg_);
  } catch (const std::exception& e) {
    throw NumericalError("training " + spec.encode() + " failed: " + e.what());
  }
  const double mean = result.mean_r2;
  std::lock_guard lock(detail_mutex_);
  details_.emplace_back(spec, std::move(result));
  return mean;
}

std::string TrainerProvider::detail_csv() const {
  std::lock_guard lock(detail_mutex_);
  auto sorted = details_;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out = "architecture,run,seed,r2,epochs\n";
  for (const auto& [spec, result] : sorted) {
    for (std::size_t j = 0; j < result.per_run_r2.size(); ++j) {
      out += spec.encode() + "," + std::to_string(j) + "," + std::to_string(result.seeds[j]) + "," +
             format_fitness(result.per_run_r2[j]) + "," + std::to_string(result.epochs_used[j]) + "\n";
    }
  }
  return out;
}

}  // namespace lonas
