#include "kgealign/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kgealign/errors.hpp"

namespace kgealign {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "kgealign-checkpoint";
constexpr int kFormatVersion = 1;

const char* role_name(TensorRole role) {
  switch (role) {
    case TensorRole::entity: return "entity";
    case TensorRole::relation: return "relation";
    case TensorRole::global: return "global";
  }
  return "?";
}

TensorRole parse_role(const std::string& name) {
  if (name == "entity") return TensorRole::entity;
  if (name == "relation") return TensorRole::relation;
  if (name == "global") return TensorRole::global;
  throw invalid_error("checkpoint: unknown tensor role '" + name + "'");
}

json config_to_json(const TrainingConfig& c) {
  return json{{"dim", c.dim},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"num_negatives", c.num_negatives},
              {"eval_batch_size", c.eval_batch_size},
              {"learning_rate", c.learning_rate},
              {"margin", c.margin},
              {"seed", c.seed},
              {"model", model_name(c.model)},
              {"transe_l1", c.transe_l1}};
}

TrainingConfig config_from_json(const json& j) {
  TrainingConfig c;
  c.dim = j.at("dim").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.num_negatives = j.at("num_negatives").get<std::size_t>();
  c.eval_batch_size = j.at("eval_batch_size").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.margin = j.at("margin").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.model = parse_model_kind(j.at("model").get<std::string>());
  c.transe_l1 = j.value("transe_l1", false);
  return c;
}

}  // namespace

std::string checkpoint_to_json(const ModelCheckpoint& checkpoint) {
  const ModelParams& p = checkpoint.params;
  json tensors = json::array();
  for (const auto& t : p.tensors) {
    tensors.push_back(json{{"name", t.name},
                           {"role", role_name(t.role)},
                           {"rows", t.rows},
                           {"cols", t.cols},
                           {"data", t.data}});
  }
  json j{{"format", kFormatTag},
         {"version", kFormatVersion},
         {"model", model_name(p.kind)},
         {"dim", p.dim},
         {"num_entities", p.num_entities},
         {"num_relations", p.num_relations},
         {"transe_l1", p.transe_l1},
         {"tensors", std::move(tensors)}};
  if (checkpoint.config) j["config"] = config_to_json(*checkpoint.config);
  return j.dump(2) + "\n";
}

ModelCheckpoint checkpoint_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::syntax, std::string("checkpoint: ") + e.what());
  }
  if (j.value("format", "") != kFormatTag)
    throw invalid_error("checkpoint: missing format tag");
  if (j.value("version", 0) != kFormatVersion)
    throw invalid_error("checkpoint: unsupported version");

  ModelCheckpoint out;
  ModelParams& p = out.params;
  p.kind = parse_model_kind(j.at("model").get<std::string>());
  p.dim = j.at("dim").get<std::size_t>();
  p.num_entities = j.at("num_entities").get<std::size_t>();
  p.num_relations = j.at("num_relations").get<std::size_t>();
  p.transe_l1 = j.value("transe_l1", false);
  for (const auto& tj : j.at("tensors")) {
    NamedTensor t;
    t.name = tj.at("name").get<std::string>();
    t.role = parse_role(tj.at("role").get<std::string>());
    t.rows = tj.at("rows").get<std::size_t>();
    t.cols = tj.at("cols").get<std::size_t>();
    t.data = tj.at("data").get<std::vector<double>>();
    if (t.data.size() != t.rows * t.cols)
      throw invalid_error("checkpoint: tensor '" + t.name + "' shape/data mismatch");
    p.tensors.push_back(std::move(t));
  }
  if (j.contains("config")) out.config = config_from_json(j.at("config"));
  return out;
}

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << checkpoint_to_json(checkpoint);
  out.flush();
  if (!out) throw io_error("write failure: " + path);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace kgealign
