#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lonas/arch_space.hpp"
#include "lonas/fitness.hpp"

namespace lonas {

enum class TaskKind { classification, regression };
enum class ColumnKind { numeric, binary, categorical };

TaskKind task_kind_from_string(std::string_view text);
ColumnKind column_kind_from_string(std::string_view text);

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  /// Rows picked by `index`, in that order.
  Matrix select_rows(std::span<const std::size_t> index) const;
};

struct TrainConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 100;
  double early_stop_min_delta = 1e-4;
  int early_stop_patience = 10;
  double train_fraction = 0.70;
  double validation_fraction = 0.15;
  double test_fraction = 0.15;
  int batch_runs = 30;
  int batch_size = 32;
  std::uint64_t base_seed = 0;

  void validate() const;
};

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> levels;  // optional for binary/categorical; fixes the encoding when given
};

/// Which CSV columns are inputs, which one is the target, and the task.
struct DatasetSchema {
  std::vector<ColumnSchema> inputs;
  std::vector<std::string> ignored;
  std::string target;
  TaskKind task = TaskKind::regression;

  /// `{"task": ..., "target": ..., "columns": {name: kind | {"kind", "levels"}}, "ignore": [...]}`
  static DatasetSchema from_json(std::string_view text);
  static DatasetSchema load(const std::filesystem::path& path);
};

/// Encoded patterns ready for training.
struct DatasetSpec {
  TaskKind task = TaskKind::regression;
  Matrix inputs;
  Matrix targets;           // one-hot for classification, raw responses for regression
  std::vector<int> labels;  // class index per pattern (classification only)
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return inputs.rows; }
  std::size_t input_dim() const noexcept { return inputs.cols; }
  std::size_t output_dim() const noexcept { return targets.cols; }
};

/// Numeric columns are z-scored with the population SD (constant columns
/// become 0), binary columns map to -1/+1 in sorted level order, categorical
/// columns are one-hot. Regression targets are left unscaled.
DatasetSpec parse_dataset(std::istream& in, const DatasetSchema& schema);
DatasetSpec ingest_dataset(const std::filesystem::path& path, const DatasetSchema& schema);

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of [0, n), cut by the configured fractions.
DataSplit split_dataset(std::size_t n, const TrainConfig& cfg);

struct DenseLayer {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::vector<double> weights;  // fan_out x fan_in, row-major
  std::vector<double> bias;     // fan_out
};

/// Fully connected network: input -> hidden ReLU layers -> softmax/identity.
struct Network {
  TaskKind task = TaskKind::regression;
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const;
  /// (fan_in, fan_out) of every layer.
  std::vector<std::pair<std::size_t, std::size_t>> shapes() const;
};

/// Zero-initialised network for `spec`.
Network build_network(const ArchSpec& spec, std::size_t input_dim, std::size_t output_dim, TaskKind task);

/// He uniform: weights ~ U[-sqrt(6/fan_in), +sqrt(6/fan_in)], zero biases.
void init_weights(Network& net, std::uint64_t seed);

/// Network outputs (class probabilities for classification).
Matrix predict(const Network& net, const Matrix& inputs);

/// Mean cross-entropy (classification) or mean squared error (regression).
double loss(const Network& net, const Matrix& inputs, const Matrix& targets);

/// Loss plus its gradient; `grad` gets the network's shape.
double loss_and_gradient(const Network& net, const Matrix& inputs, const Matrix& targets, Network& grad);

struct TrainOutcome {
  double r2 = 0.0;
  int epochs = 0;
  bool diverged = false;
};

/// Trains one model for `spec` with Adam and early stopping on validation
/// loss, then scores the test split with R². Throws NumericalError if that
/// R² is not finite.
TrainOutcome train_once(const ArchSpec& spec, const DatasetSpec& data, const DataSplit& split,
                        const TrainConfig& cfg, std::uint64_t seed);

struct BatchResult {
  std::vector<double> per_run_r2;
  std::vector<std::uint64_t> seeds;
  std::vector<int> epochs_used;
  double mean_r2 = 0.0;
};

/// cfg.batch_runs models, run j seeded with derive_seed(cfg.base_seed, j).
BatchResult evaluate_batch(const ArchSpec& spec, const DatasetSpec& data, const TrainConfig& cfg,
                           unsigned threads = 1);

/// Mean batch R² as a fitness provider. Optionally keeps per-run details.
class TrainerProvider final : public FitnessProvider {
 public:
  TrainerProvider(DatasetSpec data, TrainConfig cfg, std::string dataset_name);

  std::string name() const override { return "trainer:" + dataset_name_; }
  double evaluate(const ArchSpec& spec) const override;

  /// `architecture,run,seed,r2,epochs` rows for every evaluated spec, in
  /// canonical order.
  std::string detail_csv() const;

 private:
  DatasetSpec data_;
  TrainConfig cfg_;
  std::string dataset_name_;
  mutable std::mutex detail_mutex_;
  mutable std::vector<std::pair<ArchSpec, BatchResult>> details_;
};

}  // namespace lonas
