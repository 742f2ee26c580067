#include "lamp/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lamp/audit.hpp"
#include "lamp/checkpoint.hpp"
#include "lamp/error.hpp"
#include "lamp/eval.hpp"
#include "lamp/io.hpp"
#include "lamp/manifest.hpp"
#include "lamp/tu_format.hpp"

namespace lamp::cli {
namespace {

using nlohmann::json;

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create directory " + dir.string() + ": " + ec.message());
}

fs::path manifest_path_for(const fs::path& file) { return fs::path(file.string() + ".manifest.json"); }

EmbeddingSet embed_from_checkpoint(const Context& ctx, const fs::path& checkpoint_path, const std::string& dataset,
                                   RunManifest& manifest) {
  if (!fs::exists(checkpoint_path)) throw LoadError("checkpoint not found: " + checkpoint_path.string());
  const Checkpoint cp = load_checkpoint(checkpoint_path);
  const fs::path dir = resolve_dataset(ctx, dataset);
  const Dataset ds = load_dataset_for_model(dir, cp.config.max_degree);
  if (ds.feature_dim != cp.encoder.input_dim()) {
    throw ShapeError("checkpoint " + checkpoint_path.string() + " expects " + std::to_string(cp.encoder.input_dim()) +
                     " input features but dataset " + ds.name + " provides " + std::to_string(ds.feature_dim));
  }
  manifest.add_input(checkpoint_path);
  manifest.add_input_dir(dir);
  manifest.set_config(train_config_json(cp.config));
  EmbeddingSet set = embed_dataset(cp.encoder, ds, cp.config.readout);
  set.checkpoint_id = sha256_file(checkpoint_path);
  return set;
}

struct SweepPoint {
  double value = 0.0;
  std::optional<EvalResult> result;
  std::string error;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

fs::path resolve_dataset(const Context& ctx, const std::string& name_or_path) {
  const fs::path direct(name_or_path);
  if (fs::is_directory(direct)) return direct;
  const fs::path under = ctx.data_dir / name_or_path;
  if (fs::is_directory(under)) return under;
  throw LoadError("dataset '" + name_or_path + "' not found (checked " + direct.string() + " and " + under.string() + ")");
}

Dataset load_dataset_for_model(const fs::path& dir, int max_degree) {
  Dataset ds = load_tu_dataset(dir);
  if (!ds.metadata.has_node_labels) ds = featurize_degrees(ds, max_degree);
  return ds;
}

TrainConfig build_config(const ConfigOverrides& o, std::ostream& warn) {
  TrainConfig c;
  if (o.config_file) {
    if (!fs::exists(*o.config_file)) throw LoadError("config file not found: " + o.config_file->string());
    try {
      c = parse_train_config(read_file(*o.config_file));
    } catch (const ConfigError& e) {
      throw ConfigError(o.config_file->string() + ": " + e.what());
    }
  }
  if (o.strategy) {
    auto s = parse_prune_strategy(*o.strategy);
    if (!s) throw ConfigError("--strategy must be magnitude or soft_filter");
    c.strategy = *s;
  }
  if (o.readout) {
    auto r = parse_readout(*o.readout);
    if (!r) throw ConfigError("--readout must be sum or mean");
    c.readout = *r;
  }
  if (o.gamma) c.gamma = *o.gamma;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.learning_rate) c.learning_rate = *o.learning_rate;
  if (o.tau) c.tau = *o.tau;
  if (o.batch_size) c.batch_size = *o.batch_size;
  if (o.epochs) c.epochs = *o.epochs;
  if (o.seed) c.seed = *o.seed;
  c.allow_off_grid = c.allow_off_grid || o.allow_off_grid;
  c.record_timing = c.record_timing || o.record_timing;
  validate(c);
  for (const auto& w : off_grid_warnings(c)) warn << "warning: " << w << "\n";
  return c;
}

int cmd_audit(const Context& ctx, const AuditArgs& a) {
  const auto aug = parse_augmentation(a.augmentation);
  if (!aug) throw ArgumentError("unknown augmentation '" + a.augmentation + "'");
  RunManifest manifest("audit", ctx.args);
  manifest.set_seed(a.seed);
  const fs::path dir = resolve_dataset(ctx, a.dataset);
  manifest.add_input_dir(dir);
  const Dataset ds = load_tu_dataset(dir);
  const DamageReport report = audit_dataset(ds, *aug, a.strength, a.repeats, a.seed);

  ensure_dir(a.out_dir);
  const std::string stem = "audit_" + std::string(to_string(*aug));
  const fs::path csv = a.out_dir / (stem + ".csv");
  const fs::path summary = a.out_dir / (stem + ".json");
  write_file_atomic(csv, damage_csv(report));
  write_file_atomic(summary, damage_summary_json(report) + "\n");
  manifest.add_output(csv);
  manifest.add_output(summary);
  manifest.write(a.out_dir / (stem + ".manifest.json"));

  *ctx.out << ds.name << " " << to_string(*aug) << " strength " << format_double(a.strength) << ": mean change "
           << percent(report.mean) << "% (std " << percent(report.std) << "%, " << report.samples.size()
           << " samples, " << report.negative_count << " negative, " << report.skipped_edgeless
           << " edgeless skipped)\n";
  return 0;
}

int cmd_pretrain(const Context& ctx, const PretrainArgs& a) {
  const TrainConfig config = build_config(a.config, *ctx.err);
  RunManifest manifest("pretrain", ctx.args);
  manifest.set_config(train_config_json(config));
  manifest.set_seed(config.seed);
  const fs::path dir = resolve_dataset(ctx, a.dataset);
  manifest.add_input_dir(dir);
  if (a.config.config_file) manifest.add_input(*a.config.config_file);
  const Dataset ds = load_dataset_for_model(dir, config.max_degree);

  const PretrainResult result = pretrain(ds, config);

  ensure_dir(a.out_dir);
  const fs::path checkpoint = a.out_dir / "checkpoint.json";
  const fs::path history = a.out_dir / "history.csv";
  const fs::path batches = a.out_dir / "batches.csv";
  const fs::path history_js = a.out_dir / "history.json";
  save_checkpoint(result.encoder, result.head, config, checkpoint);
  write_file_atomic(history, history_csv(result.history, config.record_timing));
  write_file_atomic(batches, batch_history_csv(result.history));
  write_file_atomic(history_js, history_json(result.history, config.record_timing) + "\n");
  for (const auto& p : {checkpoint, history, batches, history_js}) manifest.add_output(p);
  manifest.write(a.out_dir / "pretrain.manifest.json");

  for (const auto& e : result.history.epochs) {
    *ctx.out << "epoch " << e.epoch << " loss " << format_double(e.loss.total) << " (graph "
             << format_double(e.loss.graph_loss) << ", local " << format_double(e.loss.local_loss) << ") sparsity "
             << format_double(e.sparsity);
    if (e.eval_mean) *ctx.out << " acc " << percent(*e.eval_mean) << " ± " << percent(*e.eval_std) << " (%)";
    *ctx.out << "\n";
  }
  *ctx.out << "checkpoint written to " << checkpoint.string() << "\n";
  return 0;
}

int cmd_embed(const Context& ctx, const EmbedArgs& a) {
  RunManifest manifest("embed", ctx.args);
  const EmbeddingSet set = embed_from_checkpoint(ctx, a.checkpoint, a.dataset, manifest);
  ensure_dir(a.out.parent_path());
  write_file_atomic(a.out, embeddings_csv(set));
  manifest.add_output(a.out);
  manifest.write(manifest_path_for(a.out));
  *ctx.out << "wrote " << set.embeddings.rows() << " x " << set.embeddings.cols() << " embeddings to "
           << a.out.string() << "\n";
  return 0;
}

int cmd_eval(const Context& ctx, const EvalArgs& a) {
  RunManifest manifest("eval", ctx.args);
  manifest.set_seed(a.seed);
  EmbeddingSet set;
  if (a.checkpoint) {
    set = embed_from_checkpoint(ctx, *a.checkpoint, a.dataset, manifest);
  } else {
    if (!fs::exists(*a.embeddings)) throw LoadError("embeddings file not found: " + a.embeddings->string());
    set = embeddings_from_csv(read_file(*a.embeddings));
    manifest.add_input(*a.embeddings);
  }
  EvalOptions opts;
  opts.folds = a.folds;
  opts.repeats = a.repeats;
  opts.seed = a.seed;
  const EvalResult result = kfold_eval(set, opts);
  ensure_dir(a.out.parent_path());
  write_file_atomic(a.out, eval_result_json(result) + "\n");
  manifest.add_output(a.out);
  manifest.write(manifest_path_for(a.out));
  *ctx.out << "accuracy " << percent(result.mean) << " ± " << percent(result.std) << " (%) over " << result.folds
           << " folds x " << result.repeats << " repeats\n";
  return 0;
}

int cmd_sweep(const Context& ctx, const SweepArgs& a) {
  TrainConfig base = build_config(a.config, *ctx.err);
  const bool is_gamma = a.axis == "gamma";
  if (!is_gamma && a.axis != "alpha") throw ConfigError("--axis must be gamma or alpha");
  const std::vector<double>& grid = is_gamma ? gamma_grid() : alpha_grid();
  const std::vector<double> values = a.values.empty() ? grid : a.values;
  if (!base.allow_off_grid) {
    for (double v : values) {
      if (!on_grid(v, grid)) {
        throw ConfigError(a.axis + " value " + format_double(v) + " is off the tuning grid (pass --allow-off-grid)");
      }
    }
  }
  // The probe at the end of each point replaces the periodic one.
  base.eval_every = 0;

  RunManifest manifest("sweep", ctx.args);
  manifest.set_config(train_config_json(base));
  manifest.set_seed(base.seed);
  const fs::path dir = resolve_dataset(ctx, a.dataset);
  manifest.add_input_dir(dir);
  if (a.config.config_file) manifest.add_input(*a.config.config_file);
  const Dataset ds = load_dataset_for_model(dir, base.max_degree);

  std::vector<SweepPoint> points;
  for (double v : values) {
    SweepPoint point;
    point.value = v;
    TrainConfig cfg = base;
    (is_gamma ? cfg.gamma : cfg.alpha) = v;
    try {
      validate(cfg);
      const PretrainResult trained = pretrain(ds, cfg);
      EvalOptions opts;
      opts.folds = a.folds;
      opts.repeats = a.repeats;
      opts.seed = cfg.seed;
      point.result = kfold_eval(embed_dataset(trained.encoder, ds, cfg.readout), opts);
      *ctx.out << a.axis << " " << format_double(v) << ": " << percent(point.result->mean) << " ± "
               << percent(point.result->std) << " (%)\n";
    } catch (const Error& e) {
      point.error = e.what();
      *ctx.err << a.axis << " " << format_double(v) << " failed: " << e.what() << "\n";
    }
    points.push_back(std::move(point));
  }

  std::ostringstream csv;
  csv << "value,mean_acc,std_acc\n";
  json rows = json::array();
  const SweepPoint* best = nullptr;
  for (const auto& p : points) {
    csv << format_double(p.value) << ',';
    json row{{"value", p.value}};
    if (p.result) {
      csv << format_double(100.0 * p.result->mean) << ',' << format_double(100.0 * p.result->std) << '\n';
      row["mean_acc"] = 100.0 * p.result->mean;
      row["std_acc"] = 100.0 * p.result->std;
      if (!best || p.result->mean > best->result->mean) best = &p;
    } else {
      csv << "nan,nan\n";
      row["error"] = p.error;
    }
    rows.push_back(row);
  }
  json summary{{"axis", a.axis}, {"dataset", ds.name}, {"points", rows}};
  if (best) summary["best_value"] = best->value;
  if (is_gamma && best) {
    for (const auto& p : points) {
      if (p.result && std::abs(p.value - 0.95) < 1e-9) {
        const bool below = p.result->mean < best->result->mean;
        summary["high_sparsity_below_best"] = below;
        *ctx.out << "gamma 0.95 " << (below ? "is" : "is not") << " below the best point ("
                 << format_double(best->value) << ")\n";
      }
    }
  }

  ensure_dir(a.out_dir);
  const fs::path csv_path = a.out_dir / ("sweep_" + a.axis + ".csv");
  const fs::path json_path = a.out_dir / ("sweep_" + a.axis + ".json");
  write_file_atomic(csv_path, csv.str());
  write_file_atomic(json_path, summary.dump(2) + "\n");
  manifest.add_output(csv_path);
  manifest.add_output(json_path);
  manifest.write(a.out_dir / ("sweep_" + a.axis + ".manifest.json"));
  return 0;
}

int cmd_report(const Context& ctx, const ReportArgs& a) {
  RunManifest manifest("report", ctx.args);
  std::ostringstream md;
  md << "# Run report\n";
  for (const auto& path : a.inputs) {
    if (!fs::exists(path)) throw LoadError("report input not found: " + path.string());
    manifest.add_input(path);
    const std::string text = read_file(path);
    md << "\n## " << path.filename().string() << "\n\n";
    if (path.extension() == ".json") {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::parse_error&) {
        throw FormatError(path.string() + ": not valid JSON");
      }
      if (j.contains("augmentation")) {
        md << "| dataset | augmentation | strength | samples | mean % | std % | negative |\n"
           << "|---|---|---|---|---|---|---|\n"
           << "| " << j.value("dataset", "") << " | " << j.value("augmentation", "") << " | "
           << format_double(j.value("strength", 0.0)) << " | " << j.value("samples", 0) << " | "
           << percent(j.value("mean", 0.0)) << " | " << percent(j.value("std", 0.0)) << " | "
           << j.value("negative_count", 0) << " |\n";
      } else if (j.contains("fold_accuracies")) {
        md << "Accuracy " << percent(j.value("mean", 0.0)) << " ± " << percent(j.value("std", 0.0)) << " (%) over "
           << j.value("folds", 0) << " folds x " << j.value("repeats", 0) << " repeats.\n";
      } else {
        md << "```json\n" << j.dump(2) << "\n```\n";
      }
    } else {
      std::stringstream ss(text);
      std::string header;
      std::getline(ss, header);
      const auto cols = split_csv_line(header);
      md << "|";
      for (const auto& c : cols) md << ' ' << c << " |";
      md << "\n|";
      for (std::size_t i = 0; i < cols.size(); ++i) md << "---|";
      md << "\n";
      std::string line;
      while (std::getline(ss, line)) {
        if (line.empty()) continue;
        md << "|";
        for (const auto& c : split_csv_line(line)) md << ' ' << c << " |";
        md << "\n";
      }
    }
  }
  if (a.out.empty()) {
    *ctx.out << md.str();
    return 0;
  }
  ensure_dir(a.out.parent_path());
  write_file_atomic(a.out, md.str());
  manifest.add_output(a.out);
  manifest.write(manifest_path_for(a.out));
  *ctx.out << "report written to " << a.out.string() << "\n";
  return 0;
}

int cmd_info(const Context& ctx, const std::string& dataset) {
  const Dataset ds = load_tu_dataset(resolve_dataset(ctx, dataset));
  *ctx.out << dataset_info_json(ds) << "\n";
  return 0;
}

int cmd_verify(const Context& ctx, const RerunArgs& a) {
  if (!fs::exists(a.manifest)) throw LoadError("manifest not found: " + a.manifest.string());
  const ManifestCheck check = verify_manifest(a.manifest);
  for (const auto& m : check.missing) *ctx.err << "missing: " << m << "\n";
  for (const auto& m : check.mismatched) *ctx.err << "hash mismatch: " << m << "\n";
  if (!check.ok()) return 1;
  *ctx.out << "all outputs match " << a.manifest.string() << "\n";
  return 0;
}

}  // namespace lamp::cli
