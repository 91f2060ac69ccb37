#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kgealign/align.hpp"
#include "kgealign/bench.hpp"
#include "kgealign/cli.hpp"
#include "kgealign/metrics.hpp"
#include "kgealign/rdf.hpp"

namespace py = pybind11;
using namespace kgealign;

namespace {

TrainingConfig make_config(const std::string& model, std::size_t dim, std::size_t epochs,
                           std::size_t batch_size, std::size_t negatives,
                           std::size_t eval_batch_size, double lr, double margin,
                           std::uint64_t seed, bool transe_l1) {
  TrainingConfig c;
  c.model = parse_model_kind(model);
  c.dim = dim;
  c.epochs = epochs;
  c.batch_size = batch_size;
  c.num_negatives = negatives;
  c.eval_batch_size = eval_batch_size;
  c.learning_rate = lr;
  c.margin = margin;
  c.seed = seed;
  c.transe_l1 = transe_l1;
  c.validate();
  return c;
}

py::dict report_dict(const EvaluationReport& r) {
  py::dict d;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f_measure"] = r.f_measure;
  d["intersection"] = r.intersection;
  d["alignment_size"] = r.alignment_size;
  d["reference_size"] = r.reference_size;
  d["tau"] = r.tau;
  d["seconds"] = r.seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kgealign, m) {
  m.doc() = "ontology alignment via knowledge-graph embeddings";

  m.def("model_names", &model_names, "names of the supported KGE models");

  m.def(
      "align_files",
      [](const std::string& source, const std::string& target, const std::string& model,
         double tau, bool class_only, std::size_t dim, std::size_t epochs,
         std::size_t batch_size, std::size_t negatives, std::size_t eval_batch_size, double lr,
         double margin, std::uint64_t seed, bool transe_l1) {
        const TrainingConfig config = make_config(model, dim, epochs, batch_size, negatives,
                                                  eval_batch_size, lr, margin, seed, transe_l1);
        const PipelineResult result = align_pipeline(source, target, config, tau, class_only);
        py::list mappings;
        for (const auto& mp : result.alignment.mappings)
          mappings.append(py::make_tuple(mp.source_iri, mp.target_iri, mp.confidence));
        py::dict d;
        d["mappings"] = mappings;
        d["seconds"] = result.total_seconds;
        d["epoch_mean_loss"] = result.trace.epoch_mean_loss;
        d["model"] = model_name(config.model);
        d["tau"] = tau;
        return d;
      },
      "end-to-end alignment of two ontology files", py::arg("source"), py::arg("target"),
      py::arg("model") = "transe", py::arg("tau") = 0.0, py::arg("class_only") = true,
      py::arg("dim") = 200, py::arg("epochs") = 20, py::arg("batch_size") = 64,
      py::arg("negatives") = 5, py::arg("eval_batch_size") = 128, py::arg("lr") = 0.01,
      py::arg("margin") = 1.0, py::arg("seed") = 42, py::arg("transe_l1") = false);

  m.def(
      "evaluate_files",
      [](const std::string& alignment_path, const std::string& reference_path) {
        const ReferenceAlignment predicted = load_reference(alignment_path);
        Alignment a;
        for (const auto& [s, t, rel] : predicted.ordered)
          a.mappings.push_back(Mapping{s, t, rel, 1.0});
        return report_dict(evaluate(a, load_reference(reference_path), 0.0));
      },
      "precision/recall/F of an alignment file against a reference file",
      py::arg("alignment"), py::arg("reference"));

  m.def(
      "evaluate_pairs",
      [](const std::vector<std::pair<std::string, std::string>>& predicted,
         const std::vector<std::pair<std::string, std::string>>& reference) {
        Alignment a;
        for (const auto& [s, t] : predicted) a.mappings.push_back(Mapping{s, t, "=", 1.0});
        ReferenceAlignment ref;
        for (const auto& [s, t] : reference) ref.add(s, t, "=");
        return report_dict(evaluate(a, ref, 0.0));
      },
      "precision/recall/F of predicted (source, target) pairs", py::arg("predicted"),
      py::arg("reference"));

  m.def(
      "generate_benchmark",
      [](const std::string& out_dir, std::size_t concepts, std::size_t relations,
         double density, double anchor_fraction, const std::string& rename,
         std::uint64_t seed) {
        BenchSpec spec;
        spec.num_concepts = concepts;
        spec.num_relations = relations;
        spec.density = density;
        spec.anchor_fraction = anchor_fraction;
        spec.rename_scheme = parse_rename_scheme(rename);
        spec.seed = seed;
        const BenchPaths paths = write_benchmark(spec, out_dir);
        return py::make_tuple(paths.source_path, paths.target_path, paths.reference_path);
      },
      "write a synthetic benchmark pair plus reference under out_dir", py::arg("out_dir"),
      py::arg("concepts") = 50, py::arg("relations") = 3, py::arg("density") = 3.0,
      py::arg("anchor_fraction") = 0.3, py::arg("rename") = "suffix", py::arg("seed") = 7);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "run a CLI command; returns (exit_code, stdout, stderr)", py::arg("args"));
}
