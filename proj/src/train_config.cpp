#include "kgealign/train_config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "kgealign/errors.hpp"

namespace kgealign {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::size_t parse_count(const std::string& v, std::size_t line) {
  try {
    const long long n = std::stoll(v);
    if (n < 0) throw std::out_of_range("negative");
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw syntax_error("expected a non-negative integer, got '" + v + "'", line);
  }
}

double parse_real(const std::string& v, std::size_t line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw syntax_error("expected a number, got '" + v + "'", line);
  }
}

bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw syntax_error("expected a boolean, got '" + v + "'", line);
}

}  // namespace

TrainingConfig parse_config_text(const std::string& text, TrainingConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find(':');
    if (sep == std::string::npos)
      throw syntax_error("expected 'key = value', got '" + line + "'", lineno);
    const std::string key = trim(line.substr(0, sep));
    const std::string value = trim(line.substr(sep + 1));
    if (key == "dim") base.dim = parse_count(value, lineno);
    else if (key == "epochs") base.epochs = parse_count(value, lineno);
    else if (key == "batch_size") base.batch_size = parse_count(value, lineno);
    else if (key == "num_negatives") base.num_negatives = parse_count(value, lineno);
    else if (key == "eval_batch_size") base.eval_batch_size = parse_count(value, lineno);
    else if (key == "learning_rate") base.learning_rate = parse_real(value, lineno);
    else if (key == "margin") base.margin = parse_real(value, lineno);
    else if (key == "seed") base.seed = parse_count(value, lineno);
    else if (key == "model") base.model = parse_model_kind(value);
    else if (key == "transe_l1") base.transe_l1 = parse_bool(value, lineno);
    else throw syntax_error("unknown config key '" + key + "'", lineno);
  }
  return base;
}

TrainingConfig load_config(const std::string& path, TrainingConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base);
}

}  // namespace kgealign
