#include "tomo/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tomo/error.hpp"

namespace tomo {

using nlohmann::json;

std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::quadratic_sweep: return "quadratic-sweep";
    case ExperimentKind::nn_sweep: return "nn-sweep";
    case ExperimentKind::width_estimate: return "width-estimate";
    case ExperimentKind::affine_distance: return "affine-distance";
    case ExperimentKind::lottery: return "lottery";
    case ExperimentKind::ticket: return "ticket";
  }
  return "?";
}

namespace {

std::vector<double> geomspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = lo * std::pow(hi / lo, f);
  }
  return v;
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(Error::Kind::config, "config: " + path + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
  if (!obj.is_object()) bad(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) bad(path + "." + key, "unknown key");
  }
}

template <typename T>
void get_to(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const json::exception& e) {
    bad(path + "." + key, e.what());
  }
}

void parse_spectrum(const json& j, SpectrumConfig& s, const std::string& path) {
  check_keys(j, {"type", "num_small", "lambda_small", "lambda_large", "lambda_min",
                 "lambda_max", "spectrum_seed"},
             path);
  std::string type = s.type == SpectrumConfig::Type::bimodal ? "bimodal" : "bulk";
  get_to(j, "type", type, path);
  if (type == "bimodal") {
    s.type = SpectrumConfig::Type::bimodal;
  } else if (type == "bulk") {
    s.type = SpectrumConfig::Type::bulk;
  } else {
    bad(path + ".type", "expected bimodal or bulk");
  }
  get_to(j, "num_small", s.num_small, path);
  get_to(j, "lambda_small", s.lambda_small, path);
  get_to(j, "lambda_large", s.lambda_large, path);
  get_to(j, "lambda_min", s.lambda_min, path);
  get_to(j, "lambda_max", s.lambda_max, path);
  get_to(j, "spectrum_seed", s.spectrum_seed, path);
}

void parse_data(const json& j, DataConfig& d, const std::string& path) {
  check_keys(j, {"type", "classes", "per_class", "dim", "separation", "data_seed",
                 "images", "labels", "limit"},
             path);
  std::string type = d.type == DataConfig::Type::blobs ? "blobs" : "idx";
  get_to(j, "type", type, path);
  if (type == "blobs") {
    d.type = DataConfig::Type::blobs;
  } else if (type == "idx") {
    d.type = DataConfig::Type::idx;
  } else {
    bad(path + ".type", "expected blobs or idx");
  }
  get_to(j, "classes", d.classes, path);
  get_to(j, "per_class", d.per_class, path);
  get_to(j, "dim", d.dim, path);
  get_to(j, "separation", d.separation, path);
  get_to(j, "data_seed", d.data_seed, path);
  get_to(j, "images", d.images, path);
  get_to(j, "labels", d.labels, path);
  get_to(j, "limit", d.limit, path);
  if (d.type == DataConfig::Type::idx && (d.images.empty() || d.labels.empty())) {
    bad(path, "idx data needs images and labels paths");
  }
}

void parse_optimizer(const json& j, AdamConfig& a, const std::string& path) {
  check_keys(j, {"learning_rate", "beta1", "beta2", "epsilon", "batch_size", "epochs"},
             path);
  get_to(j, "learning_rate", a.learning_rate, path);
  get_to(j, "beta1", a.beta1, path);
  get_to(j, "beta2", a.beta2, path);
  get_to(j, "epsilon", a.epsilon, path);
  get_to(j, "batch_size", a.batch_size, path);
  get_to(j, "epochs", a.epochs, path);
}

void parse_quadratic(const json& j, QuadraticConfig& q) {
  const std::string path = "quadratic";
  check_keys(j, {"dim", "spectrum", "radii", "dims", "epsilons"}, path);
  get_to(j, "dim", q.dim, path);
  if (j.contains("spectrum")) parse_spectrum(j.at("spectrum"), q.spectrum, path + ".spectrum");
  get_to(j, "radii", q.radii, path);
  get_to(j, "dims", q.dims, path);
  get_to(j, "epsilons", q.epsilons, path);
}

void parse_nn(const json& j, NnConfig& n) {
  const std::string path = "nn";
  check_keys(j, {"data", "hidden", "dims", "burn_in_steps", "loss_thresholds",
                 "accuracy_thresholds", "optimizer", "eval_every", "linearized",
                 "linearize_max_bytes"},
             path);
  if (j.contains("data")) parse_data(j.at("data"), n.data, path + ".data");
  get_to(j, "hidden", n.hidden, path);
  get_to(j, "dims", n.dims, path);
  get_to(j, "burn_in_steps", n.burn_in_steps, path);
  get_to(j, "loss_thresholds", n.loss_thresholds, path);
  get_to(j, "accuracy_thresholds", n.accuracy_thresholds, path);
  if (j.contains("optimizer")) parse_optimizer(j.at("optimizer"), n.optimizer, path + ".optimizer");
  get_to(j, "eval_every", n.eval_every, path);
  get_to(j, "linearized", n.linearized, path);
  get_to(j, "linearize_max_bytes", n.linearize_max_bytes, path);
}

void parse_lottery(const json& j, LotteryConfig& l) {
  const std::string path = "lottery";
  check_keys(j, {"data", "hidden", "dims", "seeds", "rewind_t", "use_deltas",
                 "include_random_baseline", "loss_thresholds", "accuracy_thresholds",
                 "optimizer", "eval_every"},
             path);
  if (j.contains("data")) parse_data(j.at("data"), l.data, path + ".data");
  get_to(j, "hidden", l.hidden, path);
  get_to(j, "dims", l.dims, path);
  get_to(j, "seeds", l.seeds, path);
  get_to(j, "rewind_t", l.rewind_t, path);
  get_to(j, "use_deltas", l.use_deltas, path);
  get_to(j, "include_random_baseline", l.include_random_baseline, path);
  get_to(j, "loss_thresholds", l.loss_thresholds, path);
  get_to(j, "accuracy_thresholds", l.accuracy_thresholds, path);
  if (j.contains("optimizer")) parse_optimizer(j.at("optimizer"), l.optimizer, path + ".optimizer");
  get_to(j, "eval_every", l.eval_every, path);
}

void parse_ticket(const json& j, TicketConfig& t) {
  const std::string path = "ticket";
  check_keys(j, {"data", "hidden", "keep_fractions", "seeds", "pretrain_epochs",
                 "loss_thresholds", "accuracy_thresholds", "optimizer", "eval_every"},
             path);
  if (j.contains("data")) parse_data(j.at("data"), t.data, path + ".data");
  get_to(j, "hidden", t.hidden, path);
  get_to(j, "keep_fractions", t.keep_fractions, path);
  get_to(j, "seeds", t.seeds, path);
  get_to(j, "pretrain_epochs", t.pretrain_epochs, path);
  get_to(j, "loss_thresholds", t.loss_thresholds, path);
  get_to(j, "accuracy_thresholds", t.accuracy_thresholds, path);
  if (j.contains("optimizer")) parse_optimizer(j.at("optimizer"), t.optimizer, path + ".optimizer");
  get_to(j, "eval_every", t.eval_every, path);
}

void parse_width(const json& j, WidthConfig& w) {
  const std::string path = "width";
  check_keys(j, {"cases", "max_dim", "num_gaussians", "radius_min", "radius_max"}, path);
  get_to(j, "cases", w.cases, path);
  get_to(j, "max_dim", w.max_dim, path);
  get_to(j, "num_gaussians", w.num_gaussians, path);
  get_to(j, "radius_min", w.radius_min, path);
  get_to(j, "radius_max", w.radius_max, path);
}

void parse_affine(const json& j, AffineConfig& a) {
  const std::string path = "affine";
  check_keys(j, {"dim", "pairs", "trials"}, path);
  get_to(j, "dim", a.dim, path);
  if (j.contains("pairs")) {
    a.pairs.clear();
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2) bad(path + ".pairs", "expected [n, d] pairs");
      a.pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
    }
  }
  get_to(j, "trials", a.trials, path);
}

json spectrum_to_json(const SpectrumConfig& s) {
  if (s.type == SpectrumConfig::Type::bimodal) {
    return json{{"type", "bimodal"},
                {"num_small", s.num_small},
                {"lambda_small", s.lambda_small},
                {"lambda_large", s.lambda_large}};
  }
  return json{{"type", "bulk"},
              {"lambda_min", s.lambda_min},
              {"lambda_max", s.lambda_max},
              {"spectrum_seed", s.spectrum_seed}};
}

json data_to_json(const DataConfig& d) {
  if (d.type == DataConfig::Type::blobs) {
    return json{{"type", "blobs"},
                {"classes", d.classes},
                {"per_class", d.per_class},
                {"dim", d.dim},
                {"separation", d.separation},
                {"data_seed", d.data_seed}};
  }
  return json{{"type", "idx"}, {"images", d.images}, {"labels", d.labels},
              {"limit", d.limit}};
}

json optimizer_to_json(const AdamConfig& a) {
  return json{{"learning_rate", a.learning_rate}, {"beta1", a.beta1},
              {"beta2", a.beta2},                 {"epsilon", a.epsilon},
              {"batch_size", a.batch_size},       {"epochs", a.epochs}};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(Error::Kind::config, "config: delta must be in (0,1)");
  }
  if (runs == 0) throw Error(Error::Kind::config, "config: runs must be >= 1");
  if (workers == 0) throw Error(Error::Kind::config, "config: workers must be >= 1");
  switch (kind) {
    case ExperimentKind::quadratic_sweep:
      if (quadratic.dims.empty() || quadratic.epsilons.empty() || quadratic.radii.empty()) {
        throw Error(Error::Kind::config, "config: quadratic grids must be nonempty");
      }
      break;
    case ExperimentKind::nn_sweep:
      if (nn.dims.empty() || nn.burn_in_steps.empty()) {
        throw Error(Error::Kind::config, "config: nn grids must be nonempty");
      }
      if (nn.loss_thresholds.empty() && nn.accuracy_thresholds.empty()) {
        throw Error(Error::Kind::config, "config: nn needs loss or accuracy thresholds");
      }
      break;
    case ExperimentKind::lottery:
      if (lottery.dims.empty() || lottery.seeds == 0) {
        throw Error(Error::Kind::config, "config: lottery needs dims and seeds");
      }
      break;
    case ExperimentKind::ticket:
      if (ticket.keep_fractions.empty() || ticket.seeds == 0) {
        throw Error(Error::Kind::config, "config: ticket needs keep_fractions and seeds");
      }
      break;
    case ExperimentKind::width_estimate:
      if (width.cases == 0 || width.num_gaussians < 2) {
        throw Error(Error::Kind::config, "config: width needs cases and >=2 draws");
      }
      break;
    case ExperimentKind::affine_distance:
      if (affine.pairs.empty() || affine.trials == 0) {
        throw Error(Error::Kind::config, "config: affine needs pairs and trials");
      }
      break;
  }
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.experiment = experiment_kind_name(kind);
  switch (kind) {
    case ExperimentKind::quadratic_sweep: {
      cfg.runs = 20;
      cfg.delta = 0.2;
      auto& q = cfg.quadratic;
      q.dims = {1, 2, 4, 8, 16, 24, 32, 36, 38, 40, 42};
      for (std::size_t d = 44; d <= 56; ++d) q.dims.push_back(d);
      q.dims.insert(q.dims.end(), {58, 60, 62, 64, 66, 68, 72, 80, 90, 100});
      q.epsilons = geomspace(0.2, 5.0, 6);
      break;
    }
    case ExperimentKind::nn_sweep: {
      cfg.runs = 10;
      cfg.delta = 0.1;
      auto& n = cfg.nn;
      n.dims = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
      n.loss_thresholds = geomspace(0.05, 2.0, 8);
      n.accuracy_thresholds = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
      n.optimizer.epochs = 8;
      break;
    }
    case ExperimentKind::lottery: {
      cfg.runs = 10;  // mirrored into seeds
      auto& l = cfg.lottery;
      l.seeds = 10;
      l.loss_thresholds = geomspace(0.05, 2.0, 8);
      l.accuracy_thresholds = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
      l.optimizer.epochs = 8;
      break;
    }
    case ExperimentKind::ticket: {
      cfg.runs = 5;
      auto& t = cfg.ticket;
      t.seeds = 5;
      t.loss_thresholds = geomspace(0.05, 2.0, 8);
      t.accuracy_thresholds = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
      t.optimizer.epochs = 8;
      break;
    }
    case ExperimentKind::width_estimate:
      break;
    case ExperimentKind::affine_distance: {
      cfg.affine.pairs = {{10, 10}, {10, 40}, {30, 30}, {50, 20},
                          {20, 60}, {45, 45}, {30, 80}, {60, 50}};
      break;
    }
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentKind kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Error::Kind::config, std::string("config: invalid JSON: ") + e.what());
  }

  check_keys(j, {"experiment", "kind", "seed", "workers", "delta", "runs", "svg",
                 "out", "quadratic", "nn", "lottery", "ticket", "width", "affine"},
             "<root>");

  ExperimentConfig cfg = default_config(kind);
  if (j.contains("kind")) {
    const std::string k = j.at("kind").get<std::string>();
    if (k != experiment_kind_name(kind)) {
      bad("kind", "config is for '" + k + "' but the subcommand selected '" +
                      experiment_kind_name(kind) + "'");
    }
  }
  get_to(j, "experiment", cfg.experiment, "<root>");
  get_to(j, "seed", cfg.master_seed, "<root>");
  get_to(j, "workers", cfg.workers, "<root>");
  get_to(j, "delta", cfg.delta, "<root>");
  get_to(j, "runs", cfg.runs, "<root>");
  get_to(j, "svg", cfg.svg, "<root>");
  get_to(j, "out", cfg.out_dir, "<root>");

  if (j.contains("quadratic")) parse_quadratic(j.at("quadratic"), cfg.quadratic);
  if (j.contains("nn")) parse_nn(j.at("nn"), cfg.nn);
  if (j.contains("lottery")) parse_lottery(j.at("lottery"), cfg.lottery);
  if (j.contains("ticket")) parse_ticket(j.at("ticket"), cfg.ticket);
  if (j.contains("width")) parse_width(j.at("width"), cfg.width);
  if (j.contains("affine")) parse_affine(j.at("affine"), cfg.affine);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentKind kind) {
  std::ifstream f(path);
  if (!f) throw Error(Error::Kind::io, "cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), kind);
}

std::string config_to_json(const ExperimentConfig& cfg, bool include_runtime) {
  json j;
  j["experiment"] = cfg.experiment;
  j["kind"] = experiment_kind_name(cfg.kind);
  j["seed"] = cfg.master_seed;
  j["delta"] = cfg.delta;
  j["runs"] = cfg.runs;
  if (include_runtime) {
    j["workers"] = cfg.workers;
    j["out"] = cfg.out_dir;
    j["svg"] = cfg.svg;
  }
  switch (cfg.kind) {
    case ExperimentKind::quadratic_sweep:
      j["quadratic"] = {{"dim", cfg.quadratic.dim},
                        {"spectrum", spectrum_to_json(cfg.quadratic.spectrum)},
                        {"radii", cfg.quadratic.radii},
                        {"dims", cfg.quadratic.dims},
                        {"epsilons", cfg.quadratic.epsilons}};
      break;
    case ExperimentKind::nn_sweep:
      j["nn"] = {{"data", data_to_json(cfg.nn.data)},
                 {"hidden", cfg.nn.hidden},
                 {"dims", cfg.nn.dims},
                 {"burn_in_steps", cfg.nn.burn_in_steps},
                 {"loss_thresholds", cfg.nn.loss_thresholds},
                 {"accuracy_thresholds", cfg.nn.accuracy_thresholds},
                 {"optimizer", optimizer_to_json(cfg.nn.optimizer)},
                 {"eval_every", cfg.nn.eval_every},
                 {"linearized", cfg.nn.linearized},
                 {"linearize_max_bytes", cfg.nn.linearize_max_bytes}};
      break;
    case ExperimentKind::lottery:
      j["lottery"] = {{"data", data_to_json(cfg.lottery.data)},
                      {"hidden", cfg.lottery.hidden},
                      {"dims", cfg.lottery.dims},
                      {"seeds", cfg.lottery.seeds},
                      {"rewind_t", cfg.lottery.rewind_t},
                      {"use_deltas", cfg.lottery.use_deltas},
                      {"include_random_baseline", cfg.lottery.include_random_baseline},
                      {"loss_thresholds", cfg.lottery.loss_thresholds},
                      {"accuracy_thresholds", cfg.lottery.accuracy_thresholds},
                      {"optimizer", optimizer_to_json(cfg.lottery.optimizer)},
                      {"eval_every", cfg.lottery.eval_every}};
      break;
    case ExperimentKind::ticket:
      j["ticket"] = {{"data", data_to_json(cfg.ticket.data)},
                     {"hidden", cfg.ticket.hidden},
                     {"keep_fractions", cfg.ticket.keep_fractions},
                     {"seeds", cfg.ticket.seeds},
                     {"pretrain_epochs", cfg.ticket.pretrain_epochs},
                     {"loss_thresholds", cfg.ticket.loss_thresholds},
                     {"accuracy_thresholds", cfg.ticket.accuracy_thresholds},
                     {"optimizer", optimizer_to_json(cfg.ticket.optimizer)},
                     {"eval_every", cfg.ticket.eval_every}};
      break;
    case ExperimentKind::width_estimate:
      j["width"] = {{"cases", cfg.width.cases},
                    {"max_dim", cfg.width.max_dim},
                    {"num_gaussians", cfg.width.num_gaussians},
                    {"radius_min", cfg.width.radius_min},
                    {"radius_max", cfg.width.radius_max}};
      break;
    case ExperimentKind::affine_distance: {
      json pairs = json::array();
      for (const auto& [n, d] : cfg.affine.pairs) pairs.push_back({n, d});
      j["affine"] = {{"dim", cfg.affine.dim}, {"pairs", pairs},
                     {"trials", cfg.affine.trials}};
      break;
    }
  }
  return j.dump(2) + "\n";
}

}  // namespace tomo
