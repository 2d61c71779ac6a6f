#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "lonas/arch_space.hpp"
#include "lonas/errors.hpp"
#include "lonas/fitness.hpp"
#include "lonas/landscape.hpp"
#include "lonas/lon.hpp"
#include "lonas/search.hpp"
#include "lonas/trainer.hpp"

namespace py = pybind11;
using namespace lonas;

namespace {

std::vector<ArchSpec> specs_of(const Landscape& land, const std::vector<std::size_t>& index) {
  std::vector<ArchSpec> out;
  out.reserve(index.size());
  for (auto i : index) out.push_back(land.space().spec(i));
  return out;
}

py::dict metrics_dict(const LonGraph& lon, const LonMetrics& m) {
  py::dict d;
  d["node_count"] = m.node_count;
  d["edge_count"] = m.edge_count;
  d["self_loop_count"] = m.self_loop_count;
  d["improving_edge_count"] = m.improving_edge_count;
  d["deteriorating_edge_count"] = m.deteriorating_edge_count;
  d["funnel_count"] = m.funnel_count;
  d["sink_count"] = m.sink_count;
  d["global_optimum"] = m.global_optimum;
  d["global_optimum_fitness"] = m.global_optimum_fitness;
  d["lo_fitness_sd"] = m.lo_fitness_sd;
  d["improving_to_deteriorating_ratio"] = m.improving_to_deteriorating_ratio;
  py::dict strength, basins;
  for (std::size_t i = 0; i < lon.nodes.size(); ++i) {
    const auto key = lon.nodes[i].arch.encode();
    strength[py::str(key)] = m.incoming_strength[i];
    basins[py::str(key)] = m.basin_size_distribution[i];
  }
  d["incoming_strength"] = strength;
  d["basin_size_distribution"] = basins;
  return d;
}

py::dict summary_dict(const IlsSummary& s) {
  py::dict d;
  d["runs"] = s.runs;
  d["runs_with_top_m_hit"] = s.runs_with_top_m_hit;
  d["median_first_top_m_hit"] = s.median_first_top_m_hit;
  d["mean_first_top_m_hit"] = s.mean_first_top_m_hit;
  d["runs_found_global"] = s.runs_found_global;
  d["global_fraction"] = s.global_fraction;
  d["mean_evaluations_to_global"] = s.mean_evaluations_to_global;
  d["mean_evaluations"] = s.mean_evaluations;
  d["median_evaluations"] = s.median_evaluations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Architecture-space enumeration, fitness landscapes, local optima networks and iterated local search.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);
  py::register_exception<CompletenessError>(m, "CompletenessError", PyExc_ValueError);
  py::register_exception<IngestionError>(m, "IngestionError", PyExc_ValueError);
  py::register_exception<GraphError>(m, "GraphError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<SpaceConfig>(m, "SpaceConfig")
      .def(py::init<int, int>(), py::arg("max_depth"), py::arg("max_width"))
      .def_property_readonly("max_depth", &SpaceConfig::max_depth)
      .def_property_readonly("max_width", &SpaceConfig::max_width)
      .def("__len__", &SpaceConfig::size)
      .def("__repr__", [](const SpaceConfig& c) {
        return "SpaceConfig(" + std::to_string(c.max_depth()) + ", " + std::to_string(c.max_width()) + ")";
      });

  py::class_<ArchSpec>(m, "ArchSpec")
      .def(py::init<std::vector<int>>(), py::arg("widths"))
      .def_property_readonly("widths",
                             [](const ArchSpec& s) { return std::vector<int>(s.widths().begin(), s.widths().end()); })
      .def_property_readonly("depth", &ArchSpec::depth)
      .def("encode", &ArchSpec::encode)
      .def_static("decode", &ArchSpec::decode, py::arg("text"))
      .def("valid_in", &ArchSpec::valid_in)
      .def("__eq__", [](const ArchSpec& a, const ArchSpec& b) { return a == b; })
      .def("__lt__", [](const ArchSpec& a, const ArchSpec& b) { return a < b; })
      .def("__hash__", [](const ArchSpec& s) { return py::hash(py::str(s.encode())); })
      .def("__str__", &ArchSpec::encode)
      .def("__repr__", [](const ArchSpec& s) { return "ArchSpec('" + s.encode() + "')"; });
  py::implicitly_convertible<std::vector<int>, ArchSpec>();

  m.def("enumerate_space", &enumerate_space, py::arg("cfg"), "All architectures in canonical order.");
  m.def("canonical_index", &canonical_index, py::arg("spec"), py::arg("cfg"));
  m.def("spec_at", &spec_at, py::arg("index"), py::arg("cfg"));
  m.def("width_offsets", &width_offsets, py::arg("spec"), py::arg("cfg"));
  m.def("depth_offsets", &depth_offsets, py::arg("spec"), py::arg("cfg"));
  m.def("neighborhood", &neighborhood, py::arg("spec"), py::arg("cfg"));
  m.def(
      "adjacency_counts",
      [](const SpaceConfig& cfg) {
        const auto a = adjacency_pairs(cfg);
        py::dict d;
        d["pairs"] = a.pairs.size();
        d["directed_relations"] = a.directed_relations;
        d["mean_degree"] = a.mean_degree(cfg.size());
        return d;
      },
      py::arg("cfg"), "Symmetrised pair count, directed relation count and mean degree.");

  m.def(
      "r_squared",
      [](const std::vector<double>& actual, const std::vector<double>& predicted) {
        return r_squared(actual, predicted);
      },
      py::arg("actual"), py::arg("predicted"));
  m.def("r_squared_multioutput",
        py::overload_cast<const std::vector<std::vector<double>>&, const std::vector<std::vector<double>>&>(
            &r_squared_multioutput),
        py::arg("actual"), py::arg("predicted"));
  m.def("synthetic_linear", &synthetic_linear, py::arg("spec"));
  m.def("synthetic_bimodal", &synthetic_bimodal, py::arg("spec"));

  py::class_<FitnessTable>(m, "FitnessTable")
      .def(py::init<SpaceConfig, std::vector<double>, std::string>(), py::arg("cfg"), py::arg("values"),
           py::arg("provenance") = "")
      .def_static("load", &load_fitness_table, py::arg("path"), py::arg("cfg"))
      .def_static(
          "tabulate",
          [](const std::string& provider, const SpaceConfig& cfg, unsigned threads) {
            const auto p = make_provider(provider, cfg);
            py::gil_scoped_release release;
            return tabulate(*p, cfg, threads);
          },
          py::arg("provider"), py::arg("cfg"), py::arg("threads") = 1,
          "Tabulate synthetic:linear, synthetic:bimodal or table:<path> over the space.")
      .def("save", [](const FitnessTable& t, const std::filesystem::path& p) { save_fitness_table(t, p); })
      .def_property_readonly("config", &FitnessTable::config)
      .def_property_readonly("provenance", &FitnessTable::provenance)
      .def_property_readonly("values",
                             [](const FitnessTable& t) { return std::vector<double>(t.values().begin(), t.values().end()); })
      .def("at", py::overload_cast<const ArchSpec&>(&FitnessTable::at, py::const_), py::arg("spec"))
      .def("to_csv", &FitnessTable::to_csv)
      .def("digest", &FitnessTable::digest)
      .def("__len__", &FitnessTable::size);

  py::class_<Landscape>(m, "Landscape")
      .def(py::init<FitnessTable>(), py::arg("fitness"))
      .def_property_readonly("fitness", &Landscape::fitness)
      .def("__len__", &Landscape::size)
      .def(
          "hill_climb", [](const Landscape& l, const ArchSpec& s) { return hill_climb(s, l); }, py::arg("start"))
      .def(
          "hill_climb_trace", [](const Landscape& l, const ArchSpec& s) { return hill_climb_trace(s, l); },
          py::arg("start"))
      .def(
          "local_optima",
          [](const Landscape& l) {
            const auto scan = find_local_optima(l);
            return py::make_tuple(scan.optima, scan.neutral_pairs);
          },
          "(optima, neutral_pairs) by direct scan.")
      .def(
          "basins",
          [](const Landscape& l) {
            const auto b = compute_basins(l);
            py::dict d;
            for (std::size_t k = 0; k < b.optima().size(); ++k) {
              d[py::cast(l.space().spec(b.optima()[k]))] = b.basin_sizes()[k];
            }
            return d;
          },
          "Basin size of every local optimum.")
      .def(
          "top_m", [](const Landscape& l, int m) { return specs_of(l, top_m_indices(l, m)); }, py::arg("m"));

  py::class_<LonGraph>(m, "LonGraph")
      .def_property_readonly("nodes",
                             [](const LonGraph& g) {
                               py::list out;
                               for (const auto& n : g.nodes) out.append(py::make_tuple(n.arch, n.fitness, n.basin_size));
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const LonGraph& g) {
                               py::list out;
                               for (const auto& e : g.edges) {
                                 out.append(py::make_tuple(g.nodes[e.source].arch, g.nodes[e.target].arch, e.weight,
                                                           std::string(to_string(e.kind))));
                               }
                               return out;
                             })
      .def("to_json", &lon_to_json)
      .def("to_dot", &lon_to_dot)
      .def_static("from_json", &lon_from_json, py::arg("text"));

  py::class_<MlonGraph>(m, "MlonGraph")
      .def_property_readonly("sinks",
                             [](const MlonGraph& g) {
                               std::vector<ArchSpec> out;
                               for (auto s : g.sinks) out.push_back(g.nodes[s].arch);
                               return out;
                             })
      .def_property_readonly("funnels",
                             [](const MlonGraph& g) {
                               py::dict d;
                               for (const auto& [sink, members] : g.funnels) {
                                 std::vector<ArchSpec> list;
                                 for (auto v : members) list.push_back(g.nodes[v].arch);
                                 d[py::cast(g.nodes[sink].arch)] = list;
                               }
                               return d;
                             })
      .def_property_readonly("edge_count", [](const MlonGraph& g) { return g.edges.size(); })
      .def("is_dag", [](const MlonGraph& g) { return topological_order(g).has_value(); })
      .def("to_json", &mlon_to_json)
      .def("to_dot", &mlon_to_dot);

  m.def(
      "build_lon",
      [](const Landscape& land, int strength, unsigned threads) {
        py::gil_scoped_release release;
        return build_lon(compute_basins(land), land, strength, threads);
      },
      py::arg("landscape"), py::arg("strength") = 2, py::arg("threads") = 1);
  m.def("derive_mlon", &derive_mlon, py::arg("lon"));
  m.def(
      "compute_metrics",
      [](const LonGraph& lon, const MlonGraph& mlon) { return metrics_dict(lon, compute_metrics(lon, mlon)); },
      py::arg("lon"), py::arg("mlon"));
  m.def(
      "report_json",
      [](const LonGraph& lon, const MlonGraph& mlon) { return report_to_json(lon, compute_metrics(lon, mlon)); },
      py::arg("lon"), py::arg("mlon"));
  m.def("validate_report_json", &validate_report_json, py::arg("text"));

  m.def(
      "run_ils",
      [](const Landscape& land, int k, int t, int runs, std::uint64_t seed, int top, unsigned threads) {
        IlsConfig cfg{k, t, runs, seed, top};
        std::vector<IlsTrace> traces;
        {
          py::gil_scoped_release release;
          traces = run_ils_batch(land, cfg, threads);
        }
        py::list rows;
        for (const auto& tr : traces) {
          py::dict r;
          r["run"] = tr.run_index;
          r["seed"] = tr.run_seed;
          r["accepted_optima"] = tr.accepted_optima;
          r["evaluations"] = tr.evaluation_count;
          r["first_top_m_hit"] = tr.first_top_m_hit;
          r["found_global"] = tr.found_global;
          r["global_hit_evaluation"] = tr.global_hit_evaluation;
          r["final_optimum"] = tr.final_optimum;
          rows.append(r);
        }
        return py::make_tuple(rows, summary_dict(aggregate_ils(traces)));
      },
      py::arg("landscape"), py::arg("k") = 2, py::arg("t") = 20, py::arg("runs") = 100, py::arg("seed") = 0,
      py::arg("top") = 5, py::arg("threads") = 1, "Seeded ILS runs; returns (traces, summary).");

  m.def(
      "evaluate_batch",
      [](const ArchSpec& spec, const std::filesystem::path& dataset, const std::filesystem::path& schema,
         int batch_runs, std::uint64_t seed, unsigned threads) {
        const auto data = ingest_dataset(dataset, DatasetSchema::load(schema));
        TrainConfig cfg;
        cfg.batch_runs = batch_runs;
        cfg.base_seed = seed;
        BatchResult r;
        {
          py::gil_scoped_release release;
          r = evaluate_batch(spec, data, cfg, threads);
        }
        py::dict d;
        d["mean_r2"] = r.mean_r2;
        d["per_run_r2"] = r.per_run_r2;
        d["seeds"] = r.seeds;
        d["epochs"] = r.epochs_used;
        return d;
      },
      py::arg("spec"), py::arg("dataset"), py::arg("schema"), py::arg("batch_runs") = 30, py::arg("seed") = 0,
      py::arg("threads") = 1, "Train batch_runs models for one architecture and report test-split R².");
}
