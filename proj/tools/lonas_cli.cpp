// lonas: enumerate -> evaluate -> landscape -> lon -> ils -> report, with
// CSV/JSON handoff between stages.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lonas/arch_space.hpp"
#include "lonas/errors.hpp"
#include "lonas/fitness.hpp"
#include "lonas/landscape.hpp"
#include "lonas/lon.hpp"
#include "lonas/search.hpp"
#include "lonas/trainer.hpp"
#include "lonas/util.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  int depth = 3;
  int width = 10;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  unsigned threads = 1;
};

// Outputs are staged in memory and written only once every stage succeeded.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  fs::path path(const std::string& name) const { return dir_ / name; }
  void add(fs::path path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }
  void add_named(const std::string& name, std::string content) { add(path(name), std::move(content)); }

  void commit() const {
    for (const auto& [path, content] : files_) lonas::write_file_atomic(path, content);
    for (const auto& [path, content] : files_) std::cout << "wrote " << path.string() << "\n";
  }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

lonas::SpaceConfig space_of(const GlobalOptions& g) { return lonas::SpaceConfig(g.depth, g.width); }

fs::path fitness_path_or_default(const std::string& flag, const GlobalOptions& g) {
  return flag.empty() ? fs::path(g.out_dir) / "fitness.csv" : fs::path(flag);
}

lonas::Landscape load_landscape(const fs::path& path, const GlobalOptions& g) {
  return lonas::Landscape(lonas::load_fitness_table(path, space_of(g)));
}

void warn_if_neutral(const lonas::Landscape& land) {
  const auto scan = lonas::find_local_optima(land);
  if (scan.neutral()) {
    std::cerr << "warning: " << scan.neutral_pairs
              << " neighbour pair(s) share a fitness value; local-optimum scan and hill-climb termini may differ\n";
  }
}

struct LonBundle {
  lonas::LonGraph lon;
  lonas::MlonGraph mlon;
  lonas::LonMetrics metrics;
};

LonBundle analyse(const lonas::Landscape& land, int strength, unsigned threads) {
  const auto basins = lonas::compute_basins(land);
  LonBundle b{lonas::build_lon(basins, land, strength, threads), {}, {}};
  b.mlon = lonas::derive_mlon(b.lon);
  b.metrics = lonas::compute_metrics(b.lon, b.mlon);
  return b;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local optima network analysis of the feedforward architecture space", "lonas"};
  app.set_config("--config", "", "Optional TOML/INI manifest mirroring any flag; flags override file values");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--depth", g.depth, "Maximum number of hidden layers")->check(CLI::Range(1, 64));
  app.add_option("--width", g.width, "Maximum neurons per hidden layer")->check(CLI::Range(1, 1 << 20));
  app.add_option("--seed", g.seed, "Base seed for training and search");
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--threads", g.threads, "Worker threads (never changes outputs)")->check(CLI::PositiveNumber);

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "Write the canonical architecture listing");
  std::string enumerate_output;
  enumerate->add_option("--output", enumerate_output, "Output CSV (default <out-dir>/space.csv)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Write a total fitness table");
  std::string provider_sel;
  std::string dataset_path;
  std::string schema_path;
  std::string task;
  std::string evaluate_output;
  std::string detail_output;
  int batch_runs = 30;
  evaluate->add_option("--provider", provider_sel, "synthetic:linear | synthetic:bimodal | table:<path> | trainer")
      ->required();
  evaluate->add_option("--dataset", dataset_path, "Dataset CSV (trainer)");
  evaluate->add_option("--schema", schema_path, "Dataset schema JSON (trainer)");
  evaluate->add_option("--task", task, "classification | regression (trainer; overrides the schema)")
      ->check(CLI::IsMember({"classification", "regression"}));
  evaluate->add_option("--batch-runs", batch_runs, "Models trained per architecture (trainer)")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--output", evaluate_output, "Output CSV (default <out-dir>/fitness.csv)");
  evaluate->add_option("--detail", detail_output, "Per-run detail CSV (trainer)");

  // landscape
  auto* landscape = app.add_subcommand("landscape", "Write basins of attraction and local optima");
  std::string landscape_fitness;
  landscape->add_option("--fitness", landscape_fitness, "Fitness table (default <out-dir>/fitness.csv)");

  // lon
  auto* lon_cmd = app.add_subcommand("lon", "Build the LON and MLON and report their metrics");
  std::string lon_fitness;
  int strength = 2;
  bool dot = false;
  lon_cmd->add_option("--fitness", lon_fitness, "Fitness table (default <out-dir>/fitness.csv)");
  lon_cmd->add_option("--strength", strength, "Longest move sequence between optima")->check(CLI::PositiveNumber);
  lon_cmd->add_flag("--dot", dot, "Also write lon.dot and mlon.dot");

  // ils
  auto* ils_cmd = app.add_subcommand("ils", "Run seeded iterated local search");
  std::string ils_fitness;
  lonas::IlsConfig ils_cfg;
  ils_cmd->add_option("--fitness", ils_fitness, "Fitness table (default <out-dir>/fitness.csv)");
  ils_cmd->add_option("--runs", ils_cfg.runs, "Number of runs")->check(CLI::PositiveNumber);
  ils_cmd->add_option("--k", ils_cfg.perturbation_strength, "Perturbation strength")->check(CLI::PositiveNumber);
  ils_cmd->add_option("--t", ils_cfg.stopping_threshold, "Stopping threshold")->check(CLI::PositiveNumber);
  ils_cmd->add_option("--top", ils_cfg.top_m, "Size of the global top set for first-hit tracking")
      ->check(CLI::PositiveNumber);

  // report
  auto* report = app.add_subcommand("report", "Summary table over one or more fitness tables");
  std::vector<std::string> report_tables;
  int report_strength = 2;
  report->add_option("--fitness", report_tables, "Fitness tables (repeatable)")->required();
  report->add_option("--strength", report_strength, "Longest move sequence between optima")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = space_of(g);
    Outputs out(g.out_dir);

    if (*enumerate) {
      out.add(enumerate_output.empty() ? out.path("space.csv") : fs::path(enumerate_output), lonas::space_to_csv(cfg));
    } else if (*evaluate) {
      std::unique_ptr<lonas::FitnessProvider> provider;
      lonas::TrainerProvider* trainer = nullptr;
      if (provider_sel == "trainer") {
        if (dataset_path.empty() || schema_path.empty()) {
          throw lonas::InputError("--provider trainer requires --dataset and --schema");
        }
        if (!fs::exists(dataset_path)) throw lonas::InputError("dataset not found: " + dataset_path);
        auto schema = lonas::DatasetSchema::load(schema_path);
        if (!task.empty()) schema.task = lonas::task_kind_from_string(task);
        lonas::TrainConfig train_cfg;
        train_cfg.base_seed = g.seed;
        train_cfg.batch_runs = batch_runs;
        auto owned = std::make_unique<lonas::TrainerProvider>(lonas::ingest_dataset(dataset_path, schema), train_cfg,
                                                              fs::path(dataset_path).stem().string());
        trainer = owned.get();
        provider = std::move(owned);
      } else {
        provider = lonas::make_provider(provider_sel, cfg);
      }
      const auto table = lonas::tabulate(*provider, cfg, g.threads);
      out.add(evaluate_output.empty() ? out.path("fitness.csv") : fs::path(evaluate_output), table.to_csv());
      if (trainer && !detail_output.empty()) out.add(detail_output, trainer->detail_csv());
    } else if (*landscape) {
      const auto land = load_landscape(fitness_path_or_default(landscape_fitness, g), g);
      warn_if_neutral(land);
      const auto basins = lonas::compute_basins(land);
      out.add_named("basins.csv", basins.to_csv());
      out.add_named("optima.csv", basins.summary_csv(land.fitness()));
    } else if (*lon_cmd) {
      const auto land = load_landscape(fitness_path_or_default(lon_fitness, g), g);
      warn_if_neutral(land);
      const auto b = analyse(land, strength, g.threads);
      out.add_named("lon.json", lonas::lon_to_json(b.lon));
      out.add_named("mlon.json", lonas::mlon_to_json(b.mlon));
      out.add_named("report.json", lonas::report_to_json(b.lon, b.metrics));
      if (dot) {
        out.add_named("lon.dot", lonas::lon_to_dot(b.lon));
        out.add_named("mlon.dot", lonas::mlon_to_dot(b.mlon));
      }
    } else if (*ils_cmd) {
      const auto land = load_landscape(fitness_path_or_default(ils_fitness, g), g);
      ils_cfg.base_seed = g.seed;
      const auto traces = lonas::run_ils_batch(land, ils_cfg, g.threads);
      out.add_named("ils.csv", lonas::ils_traces_to_csv(traces));
      out.add_named("ils_summary.json", lonas::ils_summary_to_json(lonas::aggregate_ils(traces), ils_cfg));
    } else if (*report) {
      std::string table = "dataset,go_arch,go_fitness,LO,Edg,Fnl\n";
      for (const auto& path : report_tables) {
        const auto land = load_landscape(path, g);
        const auto b = analyse(land, report_strength, g.threads);
        const std::string name = fs::path(path).stem().string();
        table += name + "," + b.metrics.global_optimum.encode() + "," +
                 lonas::format_fitness(b.metrics.global_optimum_fitness) + "," + std::to_string(b.metrics.node_count) +
                 "," + std::to_string(b.metrics.edge_count) + "," + std::to_string(b.metrics.funnel_count) + "\n";
        out.add_named("report_" + name + ".json", lonas::report_to_json(b.lon, b.metrics));
      }
      out.add_named("table.csv", std::move(table));
    }
    out.commit();
  } catch (const lonas::CompletenessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
