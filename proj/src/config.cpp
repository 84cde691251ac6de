#include "dsvgd/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dsvgd {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "protocol", "model", "seed", "out", "alpha",
      "agents", "particles", "rounds", "local_steps", "distill_steps",
      "kde.bandwidth",
      "transport.mode", "transport.step_size", "transport.rate", "transport.distill_rate",
      "transport.momentum", "transport.fudge", "transport.bandwidth_rule", "transport.fixed_h",
      "transport.distill_fixed_h",
      "toy.prior",
      "dataset.path", "dataset.synthetic", "dataset.rows", "dataset.label",
      "dataset.normalization", "dataset.split", "dataset.batch", "dataset.max_rows",
      "dataset.task",
      "mlp.hidden",
      "sgld.a0", "sgld.trajectory", "sgld.chains",
      "fedavg.rate",
      "metrics", "eval.every", "snapshots.every",
      "grid.lo", "grid.hi", "grid.points",
  };
  return keys;
}

const std::set<std::string>& known_protocols() {
  static const std::set<std::string> p = {"dsvgd", "udsvgd", "pvi1",
                                          "svgd",  "sgld",   "dsgld", "fedavg"};
  return p;
}

const std::set<std::string>& known_models() {
  static const std::set<std::string> m = {"toy1d", "toy2d", "blr", "mlp"};
  return m;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

void require_positive_long(const ExperimentConfig& cfg, const std::string& key, long fallback) {
  if (cfg.get_long(key, fallback) < 1) {
    throw std::invalid_argument("config: '" + key + "' must be >= 1");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not of the form key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " has an empty key or value");
    }
    cfg.set(key, value);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (known_keys().find(key) == known_keys().end()) {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  entries_[key] = value;
}

bool ExperimentConfig::has(const std::string& key) const {
  return entries_.find(key) != entries_.end();
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: '" + key + "' is not a number: '" + it->second + "'");
  }
}

long ExperimentConfig::get_long(const std::string& key, long fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: '" + key + "' is not an integer: '" + it->second + "'");
  }
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::invalid_argument("config: '" + key + "' is not a boolean: '" + it->second + "'");
}

void ExperimentConfig::validate() const {
  const std::string protocol = get_string("protocol", "");
  if (known_protocols().find(protocol) == known_protocols().end()) {
    throw std::invalid_argument("config: 'protocol' must be one of dsvgd, udsvgd, pvi1, svgd, "
                                "sgld, dsgld, fedavg (got '" + protocol + "')");
  }
  const std::string model = get_string("model", "");
  if (known_models().find(model) == known_models().end()) {
    throw std::invalid_argument("config: 'model' must be one of toy1d, toy2d, blr, mlp (got '" +
                                model + "')");
  }

  const bool toy = model == "toy1d" || model == "toy2d";
  const bool federated = protocol == "dsvgd" || protocol == "udsvgd" || protocol == "pvi1" ||
                         protocol == "dsgld" || protocol == "fedavg";

  if (protocol == "fedavg" && toy) {
    throw std::invalid_argument("config: 'protocol' fedavg needs a data model (blr or mlp)");
  }
  if (toy && federated && get_long("agents", 2) != 2) {
    throw std::invalid_argument("config: 'agents' must be 2 for the two-agent toy models");
  }
  if (!toy && !has("dataset.path") && !has("dataset.synthetic")) {
    throw std::invalid_argument("config: 'dataset.path' or 'dataset.synthetic' required for model " +
                                model);
  }
  if (has("dataset.synthetic")) {
    const std::string synth = get_string("dataset.synthetic", "");
    if (synth != "separable2d" && synth != "covlike" && synth != "sine1d") {
      throw std::invalid_argument("config: 'dataset.synthetic' must be separable2d, covlike or "
                                  "sine1d (got '" + synth + "')");
    }
  }

  require_positive_long(*this, "particles", 100);
  require_positive_long(*this, "rounds", 10);
  require_positive_long(*this, "local_steps", 200);
  require_positive_long(*this, "agents", 2);
  if (protocol == "dsvgd") require_positive_long(*this, "distill_steps", 200);
  if (protocol == "dsgld") require_positive_long(*this, "sgld.trajectory", 4);

  if (protocol == "pvi1") {
    if (get_long("particles", 1) != 1) {
      throw std::invalid_argument("config: 'particles' must be 1 under pvi1");
    }
    if (get_string("transport.mode", "plain") != "plain") {
      throw std::invalid_argument("config: 'transport.mode' must be plain under pvi1");
    }
  }

  const std::string mode = get_string("transport.mode", "adagrad");
  if (mode != "adagrad" && mode != "plain") {
    throw std::invalid_argument("config: 'transport.mode' must be adagrad or plain (got '" + mode +
                                "')");
  }
  const std::string bw = get_string("transport.bandwidth_rule", "median");
  if (bw != "median" && bw != "fixed") {
    throw std::invalid_argument("config: 'transport.bandwidth_rule' must be median or fixed");
  }
  const std::string prior = get_string("toy.prior", "gaussian");
  if (prior != "gaussian" && prior != "uniform") {
    throw std::invalid_argument("config: 'toy.prior' must be gaussian or uniform");
  }

  if (!(get_double("alpha", 1.0) > 0.0)) {
    throw std::invalid_argument("config: 'alpha' must be positive");
  }
  if (!(get_double("kde.bandwidth", 0.55) > 0.0)) {
    throw std::invalid_argument("config: 'kde.bandwidth' must be positive");
  }
  require_positive_long(*this, "eval.every", 1);

  const std::set<std::string> metric_names = {"kl", "accuracy", "loglik", "rmse", "mce", "mean"};
  std::stringstream ms(get_string("metrics", ""));
  std::string item;
  while (std::getline(ms, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (metric_names.find(item) == metric_names.end()) {
      throw std::invalid_argument("config: unknown metric '" + item + "'");
    }
    if (item == "kl" && !toy) {
      throw std::invalid_argument("config: metric 'kl' is only defined for the toy models");
    }
    if (item == "rmse" && toy) {
      throw std::invalid_argument("config: metric 'rmse' needs a regression model");
    }
  }
}

}  // namespace dsvgd
