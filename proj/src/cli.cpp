#include "kgealign/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgealign/align.hpp"
#include "kgealign/bench.hpp"
#include "kgealign/checkpoint.hpp"
#include "kgealign/errors.hpp"
#include "kgealign/metrics.hpp"
#include "kgealign/rdf.hpp"

namespace kgealign {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kSeedEnvVar = "KGEALIGN_SEED";

// Thrown for pre-flight argument problems; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64_hex(ss.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw io_error("write failure: " + path);
}

json config_echo(const TrainingConfig& c, bool class_only) {
  return json{{"dim", c.dim},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"num_negatives", c.num_negatives},
              {"eval_batch_size", c.eval_batch_size},
              {"learning_rate", c.learning_rate},
              {"margin", c.margin},
              {"seed", c.seed},
              {"model", model_name(c.model)},
              {"transe_l1", c.transe_l1},
              {"class_only", class_only}};
}

// Every command records one manifest: resolved arguments, seed, input
// digests and artifact paths, enough to replay the run bit-exactly.
void write_manifest(const std::string& path, const std::string& command,
                    const json& arguments, std::uint64_t seed,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json in_list = json::array();
  for (const auto& p : inputs) in_list.push_back(json{{"path", p}, {"fnv1a64", digest_file(p)}});
  json out_list = json::array();
  for (const auto& p : outputs) out_list.push_back(p);
  const json manifest{{"tool", "kgealign"},   {"version", kVersion}, {"command", command},
                      {"arguments", arguments}, {"seed", seed},        {"inputs", in_list},
                      {"outputs", out_list}};
  write_text_file(path, manifest.dump(2) + "\n");
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnvVar)) {
    try {
      return static_cast<std::uint64_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw UsageError(std::string(kSeedEnvVar) + " is not a valid integer: " + env);
    }
  }
  return 42;
}

std::vector<double> parse_grid(const std::string& text) {
  double start = 0.0, stop = 0.0, step = 0.0;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw UsageError("grid must be start:stop:step, got '" + text + "'");
  try {
    start = std::stod(text.substr(0, c1));
    stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw UsageError("grid must be numeric start:stop:step, got '" + text + "'");
  }
  if (start < 0.0 || stop > 1.0 || start > stop)
    throw UsageError("grid range must satisfy 0 <= start <= stop <= 1");
  if (start < stop && !(step > 0.0)) throw UsageError("grid step must be > 0");
  std::vector<double> grid;
  if (start == stop) {
    grid.push_back(start);
    return grid;
  }
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(start + static_cast<double>(i) * step);
  return grid;
}

struct TrainFlags {
  std::string config_path;
  TrainingConfig config;
  std::string model_name;
  bool transe_l1 = false;

  // Which flags the user actually passed, so they override file values.
  CLI::Option *opt_dim = nullptr, *opt_epochs = nullptr, *opt_batch = nullptr,
              *opt_negatives = nullptr, *opt_eval_batch = nullptr, *opt_lr = nullptr,
              *opt_margin = nullptr, *opt_seed = nullptr, *opt_l1 = nullptr;
  std::size_t dim = 200, epochs = 20, batch_size = 64, negatives = 5, eval_batch = 128;
  double lr = 0.01, margin = 1.0;
  std::uint64_t seed = 42;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--model", model_name, "KGE model kind")->required();
    cmd->add_option("--config", config_path, "flat key=value config file");
    opt_dim = cmd->add_option("--dim", dim, "embedding dimension (default 200)");
    opt_epochs = cmd->add_option("--epochs", epochs, "training epochs (default 20)");
    opt_batch = cmd->add_option("--batch-size", batch_size, "train batch size (default 64)");
    opt_negatives =
        cmd->add_option("--negatives", negatives, "negatives per positive (default 5)");
    opt_eval_batch = cmd->add_option("--eval-batch-size", eval_batch,
                                     "similarity row-block size (default 128)");
    opt_lr = cmd->add_option("--lr", lr, "SGD learning rate (default 0.01)");
    opt_margin = cmd->add_option("--margin", margin, "ranking margin (default 1.0)");
    opt_seed = cmd->add_option("--seed", seed, "RNG seed (default $KGEALIGN_SEED or 42)");
    opt_l1 = cmd->add_flag("--transe-l1", transe_l1, "use the L1 distance in TransE");
  }

  // defaults -> config file -> explicit CLI flags.
  TrainingConfig resolve() const {
    TrainingConfig c;
    c.seed = default_seed();
    if (!config_path.empty()) c = load_config(config_path, c);
    if (opt_dim->count()) c.dim = dim;
    if (opt_epochs->count()) c.epochs = epochs;
    if (opt_batch->count()) c.batch_size = batch_size;
    if (opt_negatives->count()) c.num_negatives = negatives;
    if (opt_eval_batch->count()) c.eval_batch_size = eval_batch;
    if (opt_lr->count()) c.learning_rate = lr;
    if (opt_margin->count()) c.margin = margin;
    if (opt_seed->count()) c.seed = seed;
    if (opt_l1->count()) c.transe_l1 = transe_l1;
    try {
      c.model = parse_model_kind(model_name);
      c.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

struct AlignFlags {
  TrainFlags train;
  std::string source_path, target_path;
  std::string out_path = "alignment.tsv";
  std::string report_path;
  std::string checkpoint_path;
  std::string dump_factory_prefix;
  std::string format = "tsv";
  double tau = 0.0;
  bool class_only = true;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--source", source_path, "source ontology (N-Triples/Turtle subset)")
        ->required();
    cmd->add_option("--target", target_path, "target ontology (N-Triples/Turtle subset)")
        ->required();
    train.add_options(cmd);
    cmd->add_option("--tau", tau, "similarity threshold (default 0.0)");
    cmd->add_flag("--class-only,!--no-class-only", class_only,
                  "restrict candidates to class entities (default on)");
    cmd->add_option("--out", out_path, "alignment output path (default alignment.tsv)");
    cmd->add_option("--format", format, "alignment format: tsv or xml (default tsv)")
        ->check(CLI::IsMember({"tsv", "xml"}));
    cmd->add_option("--report", report_path, "JSON run report path (default <out>.report.json)");
    cmd->add_option("--checkpoint", checkpoint_path, "also save the trained model here");
    cmd->add_option("--dump-factory", dump_factory_prefix,
                    "write <prefix>.triples.tsv and <prefix>.vocab.tsv debug dumps");
  }

  AlignmentFormat alignment_format() const {
    return format == "xml" ? AlignmentFormat::xml : AlignmentFormat::tsv;
  }
};

int do_align(const AlignFlags& flags, std::ostream& out) {
  const TrainingConfig config = flags.train.resolve();
  if (flags.tau < -1.0 || flags.tau > 1.0) throw UsageError("--tau must lie in [-1, 1]");

  PipelineResult result =
      align_pipeline(flags.source_path, flags.target_path, config, flags.tau, flags.class_only);
  write_alignment(result.alignment, flags.out_path, flags.alignment_format());

  std::vector<std::string> outputs{flags.out_path};
  if (!flags.checkpoint_path.empty()) {
    save_checkpoint(ModelCheckpoint{result.params, config}, flags.checkpoint_path);
    outputs.push_back(flags.checkpoint_path);
  }
  if (!flags.dump_factory_prefix.empty()) {
    const std::string triples_path = flags.dump_factory_prefix + ".triples.tsv";
    const std::string vocab_path = flags.dump_factory_prefix + ".vocab.tsv";
    write_text_file(triples_path, dump_triples_tsv(result.factory));
    write_text_file(vocab_path, dump_vocabulary_tsv(result.factory.vocabulary));
    outputs.push_back(triples_path);
    outputs.push_back(vocab_path);
  }

  const auto notes =
      multi_iri_notes(result.alignment, result.source_side, result.target_side,
                      result.factory.catalog);
  if (!notes.empty()) {
    json diag = json::array();
    for (const auto& n : notes)
      diag.push_back(json{{"side", n.side},
                          {"chosen_iri", n.chosen_iri},
                          {"other_iris", n.other_iris}});
    const std::string diag_path = flags.out_path + ".diagnostics.json";
    write_text_file(diag_path, diag.dump(2) + "\n");
    outputs.push_back(diag_path);
  }

  const std::string report_path =
      flags.report_path.empty() ? flags.out_path + ".report.json" : flags.report_path;
  const json report{{"command", "align"},
                    {"model", model_name(config.model)},
                    {"tau", flags.tau},
                    {"alignment_size", result.alignment.size()},
                    {"seconds", result.total_seconds},
                    {"train_seconds", result.trace.wall_clock_seconds},
                    {"epoch_mean_loss", result.trace.epoch_mean_loss},
                    {"source_entities", result.source_side.rows()},
                    {"target_entities", result.target_side.rows()},
                    {"config", config_echo(config, flags.class_only)},
                    {"outputs", json{{"alignment", flags.out_path}}}};
  write_text_file(report_path, report.dump(2) + "\n");
  outputs.push_back(report_path);

  json arguments = config_echo(config, flags.class_only);
  arguments["source"] = flags.source_path;
  arguments["target"] = flags.target_path;
  arguments["tau"] = flags.tau;
  arguments["format"] = flags.format;
  arguments["out"] = flags.out_path;
  write_manifest(flags.out_path + ".manifest.json", "align", arguments, config.seed,
                 {flags.source_path, flags.target_path}, outputs);

  out << "alignment: " << result.alignment.size() << " mappings (model "
      << model_name(config.model) << ", tau " << flags.tau << ") in " << result.total_seconds
      << " s -> " << flags.out_path << "\n";
  return 0;
}

int do_evaluate(const std::string& alignment_path, const std::string& reference_path,
                const std::string& report_path, const std::string& task,
                std::ostream& out, std::ostream& err) {
  const ReferenceAlignment predicted_raw = load_reference(alignment_path);
  Alignment predicted;
  for (const auto& [s, t, rel] : predicted_raw.ordered)
    predicted.mappings.push_back(Mapping{s, t, rel, 1.0});
  const ReferenceAlignment reference = load_reference(reference_path);
  if (reference.size() == 0) throw invalid_error("reference alignment is empty");

  const EvaluationReport report = evaluate(predicted, reference, 0.0);
  if (report.empty_alignment)
    err << "warning: empty alignment; precision is undefined and reported as 0.0\n";
  out << report_table_header() << "\n";
  const std::string model = "-";
  out << report_table_row(report, task, model) << "\n";

  const std::string rp = report_path.empty() ? alignment_path + ".eval.json" : report_path;
  write_text_file(rp, report_to_json(report, task, model));
  json arguments{{"alignment", alignment_path}, {"reference", reference_path}, {"task", task}};
  write_manifest(rp + ".manifest.json", "evaluate", arguments, 0,
                 {alignment_path, reference_path}, {rp});
  return 0;
}

int do_sweep(const AlignFlags& flags, const std::string& reference_path,
             const std::string& grid_text, std::ostream& out) {
  const TrainingConfig config = flags.train.resolve();
  const std::vector<double> grid = parse_grid(grid_text);

  // One training run; the tau grid only re-filters cached candidates.
  PipelineResult result =
      align_pipeline(flags.source_path, flags.target_path, config, -1.0, flags.class_only);
  const ReferenceAlignment reference = load_reference(reference_path);
  const SweepResult sweep = sweep_threshold(result.alignment, reference, grid,
                                            result.total_seconds);

  out << report_table_header() << "\n";
  for (const auto& row : sweep.rows)
    out << report_table_row(row.report, "sweep", model_name(config.model)) << "\n";
  const auto& best = sweep.rows[sweep.best_index];
  out << "best: tau=" << best.tau << " F=" << round1(best.report.f_measure) << " (P="
      << round1(best.report.precision) << ", R=" << round1(best.report.recall) << ")\n";

  json rows = json::array();
  for (const auto& row : sweep.rows)
    rows.push_back(json{{"tau", row.tau},
                        {"precision", row.report.precision},
                        {"recall", row.report.recall},
                        {"f_measure", row.report.f_measure},
                        {"intersection", row.report.intersection},
                        {"alignment_size", row.report.alignment_size}});
  const std::string report_path =
      flags.report_path.empty() ? "sweep.report.json" : flags.report_path;
  const json report{{"command", "sweep"},
                    {"model", model_name(config.model)},
                    {"grid", grid_text},
                    {"best_tau", best.tau},
                    {"best_f_measure", best.report.f_measure},
                    {"seconds", result.total_seconds},
                    {"config", config_echo(config, flags.class_only)},
                    {"rows", std::move(rows)}};
  write_text_file(report_path, report.dump(2) + "\n");

  json arguments = config_echo(config, flags.class_only);
  arguments["source"] = flags.source_path;
  arguments["target"] = flags.target_path;
  arguments["reference"] = reference_path;
  arguments["grid"] = grid_text;
  write_manifest(report_path + ".manifest.json", "sweep", arguments, config.seed,
                 {flags.source_path, flags.target_path, reference_path}, {report_path});
  return 0;
}

int do_bench(const BenchSpec& spec, const std::string& out_dir, std::ostream& out) {
  try {
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const BenchPaths paths = write_benchmark(spec, out_dir);
  const json arguments{{"num_concepts", spec.num_concepts},
                       {"num_relations", spec.num_relations},
                       {"density", spec.density},
                       {"anchor_fraction", spec.anchor_fraction},
                       {"rename_scheme", rename_scheme_name(spec.rename_scheme)},
                       {"out_dir", out_dir}};
  write_manifest((std::filesystem::path(out_dir) / "manifest.json").string(), "bench",
                 arguments, spec.seed, {},
                 {paths.source_path, paths.target_path, paths.reference_path});
  out << "benchmark: " << paths.source_path << " " << paths.target_path << " "
      << paths.reference_path << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"knowledge-graph-embedding ontology aligner"};
  app.name("kgealign");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  AlignFlags align_flags;
  CLI::App* align_cmd = app.add_subcommand("align", "train embeddings and emit an alignment");
  align_flags.add_options(align_cmd);

  std::string eval_alignment, eval_reference, eval_report, eval_task = "task";
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score an alignment against a reference");
  eval_cmd->add_option("--alignment", eval_alignment, "alignment file (TSV or XML)")->required();
  eval_cmd->add_option("--reference", eval_reference, "reference alignment (TSV or XML)")
      ->required();
  eval_cmd->add_option("--report", eval_report, "JSON report path");
  eval_cmd->add_option("--task", eval_task, "task label for the report row");

  AlignFlags sweep_flags;
  std::string sweep_reference, sweep_grid = "0:1:0.01";
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "train once, then sweep the tau threshold grid");
  sweep_flags.add_options(sweep_cmd);
  sweep_cmd->add_option("--reference", sweep_reference, "reference alignment for scoring")
      ->required();
  sweep_cmd->add_option("--grid", sweep_grid, "tau grid start:stop:step (default 0:1:0.01)");

  BenchSpec bench_spec;
  std::string bench_out_dir = "bench_out", bench_rename = "suffix";
  CLI::App* bench_cmd = app.add_subcommand("bench", "generate a synthetic benchmark pair");
  bench_cmd->add_option("--out-dir", bench_out_dir, "output directory (default bench_out)");
  bench_cmd->add_option("--concepts", bench_spec.num_concepts, "number of concepts (default 50)");
  bench_cmd->add_option("--relations", bench_spec.num_relations,
                        "number of relation labels (default 3)");
  bench_cmd->add_option("--density", bench_spec.density,
                        "structural triples per concept (default 3.0)");
  bench_cmd->add_option("--anchor-fraction", bench_spec.anchor_fraction,
                        "fraction of labels kept verbatim (default 0.3)");
  bench_cmd->add_option("--rename", bench_rename, "rename scheme: suffix or scramble")
      ->check(CLI::IsMember({"suffix", "scramble"}));
  bench_cmd->add_option("--seed", bench_spec.seed, "RNG seed (default 7)");

  std::vector<const char*> argv;
  argv.push_back("kgealign");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << app.help();
    return 2;
  }

  try {
    if (align_cmd->parsed()) return do_align(align_flags, out);
    if (eval_cmd->parsed())
      return do_evaluate(eval_alignment, eval_reference, eval_report, eval_task, out, err);
    if (sweep_cmd->parsed()) return do_sweep(sweep_flags, sweep_reference, sweep_grid, out);
    if (bench_cmd->parsed()) {
      bench_spec.rename_scheme = parse_rename_scheme(bench_rename);
      return do_bench(bench_spec, bench_out_dir, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace kgealign
