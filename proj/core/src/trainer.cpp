#include "lamp/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "lamp/error.hpp"
#include "lamp/eval.hpp"
#include "lamp/io.hpp"

namespace lamp {
namespace {

// First element of every derived-seed path, so the streams never overlap.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kAnchorStream = 3;

using nlohmann::json;

std::vector<double> make_gamma_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(i * 0.05);
  return g;
}

std::string denominator_name(DenominatorForm f) {
  return f == DenominatorForm::ExcludePositive ? "exclude_positive" : "include_positive";
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string grid_string(const std::vector<double>& grid) {
  std::vector<std::string> parts;
  for (double v : grid) parts.push_back(format_double(v));
  return "{" + join(parts) + "}";
}

std::uint64_t get_unsigned(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("config key '" + key + "' must be a non-negative integer");
}

std::int64_t get_integer(const json& v, const std::string& key) {
  if (v.is_number_unsigned() || v.is_number_integer()) return v.get<std::int64_t>();
  throw ConfigError("config key '" + key + "' must be an integer");
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

const std::vector<std::size_t>& batch_size_grid() {
  static const std::vector<std::size_t> grid{32, 128};
  return grid;
}

const std::vector<double>& learning_rate_grid() {
  static const std::vector<double> grid{0.01, 0.005, 0.001};
  return grid;
}

const std::vector<double>& gamma_grid() {
  static const std::vector<double> grid = make_gamma_grid();
  return grid;
}

const std::vector<double>& alpha_grid() {
  static const std::vector<double> grid{0.01, 0.1, 1.0, 10.0, 100.0};
  return grid;
}

bool on_grid(double value, const std::vector<double>& grid) {
  for (double g : grid)
    if (std::abs(value - g) <= 1e-9 * std::max(1.0, std::abs(g))) return true;
  return false;
}

std::vector<std::string> off_grid_warnings(const TrainConfig& c) {
  std::vector<std::string> out;
  bool bs_ok = false;
  for (std::size_t b : batch_size_grid()) bs_ok = bs_ok || b == c.batch_size;
  if (!bs_ok) out.push_back("batch_size " + std::to_string(c.batch_size) + " is outside {32, 128}");
  if (!on_grid(c.learning_rate, learning_rate_grid()))
    out.push_back("learning_rate " + format_double(c.learning_rate) + " is outside " + grid_string(learning_rate_grid()));
  if (!on_grid(c.gamma, gamma_grid()))
    out.push_back("gamma " + format_double(c.gamma) + " is outside 0.05..0.95 step 0.05");
  if (!on_grid(c.alpha, alpha_grid()))
    out.push_back("alpha " + format_double(c.alpha) + " is outside " + grid_string(alpha_grid()));
  return out;
}

void validate(const TrainConfig& c) {
  if (c.hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
  if (c.num_layers < 2) throw ConfigError("num_layers must be >= 2");
  if (c.batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) throw ConfigError("learning_rate must be positive");
  if (c.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) throw ConfigError("alpha must be >= 0");
  if (!(c.tau > 0.0) || !std::isfinite(c.tau)) throw ConfigError("tau must be positive");
  if (c.n_s < 1) throw ConfigError("n_s must be >= 1");
  if (c.eval_every < 0) throw ConfigError("eval_every must be >= 0");
  if (c.max_degree < 1) throw ConfigError("max_degree must be >= 1");
  if (!c.allow_off_grid) {
    const auto warnings = off_grid_warnings(c);
    if (!warnings.empty()) throw ConfigError(warnings.front() + " (set allow_off_grid to permit it)");
  }
}

const std::vector<std::string>& train_config_keys() {
  static const std::vector<std::string> keys{
      "alpha",       "allow_off_grid", "batch_size", "denominator", "epochs",        "eval_every",
      "gamma",       "hidden_dim",     "learning_rate", "max_degree", "n_s",         "num_layers",
      "readout",     "record_timing",  "seed",       "strategy",    "tau"};
  return keys;
}

std::string train_config_json(const TrainConfig& c) {
  json j;
  j["hidden_dim"] = c.hidden_dim;
  j["num_layers"] = c.num_layers;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha;
  j["tau"] = c.tau;
  j["strategy"] = std::string(to_string(c.strategy));
  j["n_s"] = c.n_s;
  j["seed"] = c.seed;
  j["readout"] = std::string(to_string(c.readout));
  j["eval_every"] = c.eval_every;
  j["max_degree"] = c.max_degree;
  j["denominator"] = denominator_name(c.denominator);
  j["allow_off_grid"] = c.allow_off_grid;
  j["record_timing"] = c.record_timing;
  return j.dump(2);
}

TrainConfig parse_train_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  TrainConfig c;
  const auto& keys = train_config_keys();
  for (const auto& [key, v] : j.items()) {
    if (key == "hidden_dim") c.hidden_dim = get_unsigned(v, key);
    else if (key == "num_layers") c.num_layers = get_unsigned(v, key);
    else if (key == "batch_size") c.batch_size = get_unsigned(v, key);
    else if (key == "learning_rate") c.learning_rate = get_number(v, key);
    else if (key == "epochs") c.epochs = static_cast<int>(get_integer(v, key));
    else if (key == "gamma") c.gamma = get_number(v, key);
    else if (key == "alpha") c.alpha = get_number(v, key);
    else if (key == "tau") c.tau = get_number(v, key);
    else if (key == "n_s") c.n_s = get_unsigned(v, key);
    else if (key == "seed") c.seed = get_unsigned(v, key);
    else if (key == "eval_every") c.eval_every = static_cast<int>(get_integer(v, key));
    else if (key == "max_degree") c.max_degree = static_cast<int>(get_integer(v, key));
    else if (key == "allow_off_grid") c.allow_off_grid = get_bool(v, key);
    else if (key == "record_timing") c.record_timing = get_bool(v, key);
    else if (key == "strategy") {
      auto s = parse_prune_strategy(get_string(v, key));
      if (!s) throw ConfigError("strategy must be magnitude or soft_filter");
      c.strategy = *s;
    } else if (key == "readout") {
      auto r = parse_readout(get_string(v, key));
      if (!r) throw ConfigError("readout must be sum or mean");
      c.readout = *r;
    } else if (key == "denominator") {
      const std::string s = get_string(v, key);
      if (s == "exclude_positive") c.denominator = DenominatorForm::ExcludePositive;
      else if (s == "include_positive") c.denominator = DenominatorForm::IncludePositive;
      else throw ConfigError("denominator must be exclude_positive or include_positive");
    } else {
      throw ConfigError("unknown config key '" + key + "'; valid keys: " + join(keys));
    }
  }
  return c;
}

std::string history_csv(const TrainHistory& history, bool include_seconds) {
  std::ostringstream out;
  out << "epoch,total,graph_loss,local_loss,sparsity,seconds\n";
  for (const auto& e : history.epochs) {
    out << e.epoch << ',' << format_double(e.loss.total) << ',' << format_double(e.loss.graph_loss) << ','
        << format_double(e.loss.local_loss) << ',' << format_double(e.sparsity) << ','
        << format_double(include_seconds ? e.seconds : 0.0) << '\n';
  }
  return out.str();
}

std::string batch_history_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,batch,total,graph_loss,local_loss\n";
  for (const auto& b : history.batches) {
    out << b.epoch << ',' << b.batch << ',' << format_double(b.loss.total) << ','
        << format_double(b.loss.graph_loss) << ',' << format_double(b.loss.local_loss) << '\n';
  }
  return out.str();
}

std::string history_json(const TrainHistory& history, bool include_seconds) {
  json arr = json::array();
  for (const auto& e : history.epochs) {
    json row{{"epoch", e.epoch},
             {"total", e.loss.total},
             {"graph_loss", e.loss.graph_loss},
             {"local_loss", e.loss.local_loss},
             {"sparsity", e.sparsity},
             {"seconds", include_seconds ? e.seconds : 0.0}};
    if (e.eval_mean) {
      row["eval_mean"] = *e.eval_mean;
      row["eval_std"] = *e.eval_std;
    }
    arr.push_back(row);
  }
  return json{{"epochs", arr}}.dump(2);
}

PairForward forward_pair(Encoder& encoder, ProjectionHead& head, const GraphBatch& batch,
                         const PruneMask& mask, const TrainConfig& config, Rng& anchor_rng, Tape& tape) {
  PairForward f;
  f.h1 = encode(encoder, batch, nullptr, tape);
  f.h2 = encode(encoder, batch, &mask, tape);
  f.z1 = project(head, readout(f.h1, batch, config.readout));
  f.z2 = project(head, readout(f.h2, batch, config.readout));
  f.graph_loss = nt_xent(f.z1, f.z2, config.tau, config.denominator);
  f.local_loss = local_contrastive(f.h1, f.h2, batch.graph_ids, config.tau, config.n_s, anchor_rng);
  f.total = total_loss(f.graph_loss, f.local_loss, config.alpha);
  return f;
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t num_graphs, std::size_t batch_size,
                                                    std::uint64_t seed, int epoch) {
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  std::vector<std::size_t> order(num_graphs);
  for (std::size_t i = 0; i < num_graphs; ++i) order[i] = i;
  Rng rng(derive_seed(seed, {kShuffleStream, static_cast<std::uint64_t>(epoch)}));
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < num_graphs; start += batch_size) {
    const std::size_t stop = std::min(num_graphs, start + batch_size);
    if (stop - start < 2) break;
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return out;
}

PretrainResult initialize_model(std::size_t input_dim, const TrainConfig& config) {
  Rng rng(derive_seed(config.seed, {kInitStream}));
  PretrainResult r;
  r.encoder = Encoder(input_dim, config.hidden_dim, config.num_layers, rng);
  r.head = ProjectionHead(config.hidden_dim, rng);
  return r;
}

PretrainResult pretrain(const Dataset& dataset, const TrainConfig& config, const TrainHooks& hooks) {
  validate(config);
  if (dataset.graphs.empty()) throw ArgumentError("pretrain: dataset " + dataset.name + " is empty");
  if (dataset.graphs.size() < 2) throw ArgumentError("pretrain: need at least 2 graphs for in-batch negatives");

  PretrainResult result = initialize_model(dataset.feature_dim, config);
  Encoder& encoder = result.encoder;
  ProjectionHead& head = result.head;

  std::vector<Parameter*> params = encoder.parameters();
  for (Parameter* p : head.parameters()) params.push_back(p);
  const AdamOptions adam{config.learning_rate};

  bool labeled = true;
  for (const Graph& g : dataset.graphs) labeled = labeled && g.label().has_value();

  using Clock = std::chrono::steady_clock;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = Clock::now();
    const PruneMask mask = derive_mask(encoder, config.strategy, config.gamma, epoch);
    if (hooks.on_epoch_start) hooks.on_epoch_start(epoch, mask);

    const auto batches = epoch_batches(dataset.graphs.size(), config.batch_size, config.seed, epoch);
    EpochRecord record;
    record.epoch = epoch;
    record.sparsity = sparsity(mask);
    record.loss.alpha = config.alpha;
    record.loss.temperature = config.tau;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      std::vector<const Graph*> members;
      members.reserve(batches[b].size());
      for (std::size_t idx : batches[b]) members.push_back(&dataset.graphs[idx]);
      const GraphBatch batch = make_batch(members);

      Rng anchor_rng(derive_seed(config.seed, {kAnchorStream, static_cast<std::uint64_t>(epoch), b}));
      Tape tape;
      const PairForward f = forward_pair(encoder, head, batch, mask, config, anchor_rng, tape);
      LossBreakdown loss{f.total.item(), f.graph_loss.item(), f.local_loss.item(), config.alpha, config.tau};
      if (!std::isfinite(loss.total)) {
        throw TrainError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(b + 1) +
                         " (graph_loss " + format_double(loss.graph_loss) + ", local_loss " +
                         format_double(loss.local_loss) + ")");
      }
      tape.backward(f.total);
      adam_step(params, adam);

      result.history.batches.push_back({epoch, static_cast<int>(b + 1), loss});
      record.loss.total += loss.total;
      record.loss.graph_loss += loss.graph_loss;
      record.loss.local_loss += loss.local_loss;
      if (hooks.after_batch) hooks.after_batch(epoch, static_cast<int>(b + 1), encoder, mask);
    }
    if (!batches.empty()) {
      const double n = static_cast<double>(batches.size());
      record.loss.total /= n;
      record.loss.graph_loss /= n;
      record.loss.local_loss /= n;
    }
    if (config.eval_every > 0 && epoch % config.eval_every == 0 && labeled) {
      EvalOptions opts;
      opts.seed = config.seed;
      const EvalResult eval = kfold_eval(embed_dataset(encoder, dataset, config.readout), opts);
      record.eval_mean = eval.mean;
      record.eval_std = eval.std;
    }
    record.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.history.epochs.push_back(record);
  }
  return result;
}

}  // namespace lamp
