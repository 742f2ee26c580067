#include "lamp/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "lamp/augment.hpp"
#include "lamp/commands.hpp"
#include "lamp/error.hpp"
#include "lamp/manifest.hpp"

namespace lamp::cli {
namespace {

fs::path default_data_dir() {
  if (const char* env = std::getenv("LAMP_DATA_DIR"); env && *env) return env;
  return "data";
}

void add_config_flags(CLI::App* cmd, ConfigOverrides& c) {
  cmd->add_option("--config", c.config_file, "JSON config; missing keys take defaults");
  cmd->add_option("--strategy", c.strategy, "magnitude or soft_filter")
      ->check(CLI::IsMember({"magnitude", "soft_filter"}));
  cmd->add_option("--gamma", c.gamma, "pruning ratio");
  cmd->add_option("--alpha", c.alpha, "weight of the node-level loss");
  cmd->add_option("--lr", c.learning_rate, "Adam learning rate");
  cmd->add_option("--tau", c.tau, "temperature");
  cmd->add_option("--batch-size", c.batch_size);
  cmd->add_option("--epochs", c.epochs);
  cmd->add_option("--seed", c.seed);
  cmd->add_option("--readout", c.readout)->check(CLI::IsMember({"sum", "mean"}));
  cmd->add_flag("--allow-off-grid", c.allow_off_grid, "accept values outside the tuning grids (with a warning)");
  cmd->add_flag("--record-timing", c.record_timing, "write measured seconds into history.csv");
}

int rerun(Context ctx, const RerunArgs& a);

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contrastive pre-training of GIN encoders against their pruned twins"};
  app.name("lamp");
  app.require_subcommand(1);

  Context ctx;
  ctx.args = args;
  ctx.out = &out;
  ctx.err = &err;
  std::string data_dir = default_data_dir().string();
  app.add_option("--data-dir", data_dir, "where dataset names are looked up (default $LAMP_DATA_DIR or ./data)");

  std::vector<std::string> augmentations;
  for (auto a : {Augmentation::NodeDrop, Augmentation::EdgePerturb, Augmentation::Subgraph, Augmentation::Identity})
    augmentations.emplace_back(to_string(a));

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "structural-entropy damage of an augmentation");
  audit_cmd->add_option("dataset", audit.dataset, "dataset directory or name")->required();
  audit_cmd->add_option("augmentation", audit.augmentation)->required()->check(CLI::IsMember(augmentations));
  audit_cmd->add_option("strength", audit.strength, "augmentation ratio in [0, 1)")->capture_default_str();
  audit_cmd->add_option("--repeats", audit.repeats)->capture_default_str()->check(CLI::PositiveNumber);
  audit_cmd->add_option("--seed", audit.seed)->capture_default_str();
  audit_cmd->add_option("--out", audit.out_dir, "output directory")->capture_default_str();

  PretrainArgs pre;
  auto* pre_cmd = app.add_subcommand("pretrain", "train an encoder and write checkpoint + history");
  pre_cmd->add_option("dataset", pre.dataset)->required();
  pre_cmd->add_option("--out", pre.out_dir)->capture_default_str();
  add_config_flags(pre_cmd, pre.config);

  EmbedArgs emb;
  auto* emb_cmd = app.add_subcommand("embed", "export frozen graph embeddings as CSV");
  emb_cmd->add_option("checkpoint", emb.checkpoint)->required();
  emb_cmd->add_option("dataset", emb.dataset)->required();
  emb_cmd->add_option("--out", emb.out)->required();

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "k-fold logistic-regression accuracy of embeddings");
  auto* ev_ckpt = ev_cmd->add_option("--checkpoint", ev.checkpoint);
  auto* ev_emb = ev_cmd->add_option("--embeddings", ev.embeddings, "CSV written by embed");
  ev_ckpt->excludes(ev_emb);
  auto* ev_ds = ev_cmd->add_option("--dataset", ev.dataset, "required with --checkpoint");
  ev_cmd->add_option("--out", ev.out)->required();
  ev_cmd->add_option("--folds", ev.folds)->capture_default_str();
  ev_cmd->add_option("--repeats", ev.repeats)->capture_default_str();
  ev_cmd->add_option("--seed", ev.seed)->capture_default_str();

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "pretrain + eval over the gamma or alpha grid");
  sw_cmd->add_option("dataset", sw.dataset)->required();
  sw_cmd->add_option("--axis", sw.axis)->required()->check(CLI::IsMember({"gamma", "alpha"}));
  sw_cmd->add_option("--values", sw.values, "defaults to the full grid")->delimiter(',');
  sw_cmd->add_option("--out", sw.out_dir)->capture_default_str();
  sw_cmd->add_option("--folds", sw.folds)->capture_default_str();
  sw_cmd->add_option("--repeats", sw.repeats)->capture_default_str();
  add_config_flags(sw_cmd, sw.config);

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "markdown summary of audit/eval/sweep/history outputs");
  rep_cmd->add_option("inputs", rep.inputs)->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--out", rep.out, "markdown file (stdout when omitted)");

  std::string info_ds;
  auto* info_cmd = app.add_subcommand("info", "print dataset statistics as JSON");
  info_cmd->add_option("dataset", info_ds)->required();

  RerunArgs rr;
  auto* rr_cmd = app.add_subcommand("rerun", "re-execute a run from its manifest and compare output hashes");
  rr_cmd->add_option("manifest", rr.manifest)->required();
  rr_cmd->add_flag("--verify-only", rr.verify_only, "only re-hash the recorded outputs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (ev_cmd->parsed() && !ev.checkpoint && !ev.embeddings) {
      throw CLI::ValidationError("eval", "one of --checkpoint or --embeddings is required");
    }
    if (ev_cmd->parsed() && ev.checkpoint && ev_ds->count() == 0) {
      throw CLI::ValidationError("eval", "--dataset is required with --checkpoint");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  ctx.data_dir = data_dir;

  if (audit_cmd->parsed()) return cmd_audit(ctx, audit);
  if (pre_cmd->parsed()) return cmd_pretrain(ctx, pre);
  if (emb_cmd->parsed()) return cmd_embed(ctx, emb);
  if (ev_cmd->parsed()) return cmd_eval(ctx, ev);
  if (sw_cmd->parsed()) return cmd_sweep(ctx, sw);
  if (rep_cmd->parsed()) return cmd_report(ctx, rep);
  if (info_cmd->parsed()) return cmd_info(ctx, info_ds);
  if (rr_cmd->parsed()) return rerun(ctx, rr);
  return kUsageError;
}

int rerun(Context ctx, const RerunArgs& a) {
  if (a.verify_only) return cmd_verify(ctx, a);
  if (!fs::exists(a.manifest)) throw LoadError("manifest not found: " + a.manifest.string());
  const fs::path manifest = fs::absolute(a.manifest);
  const auto recorded = manifest_outputs(manifest);
  const auto args = manifest_args(manifest);
  if (!args.empty() && args.front() == "rerun") throw ArgumentError("refusing to rerun a rerun manifest");

  const fs::path previous = fs::current_path();
  fs::current_path(manifest_cwd(manifest));
  int code = 0;
  try {
    code = dispatch(args, *ctx.out, *ctx.err);
  } catch (...) {
    fs::current_path(previous);
    throw;
  }
  fs::current_path(previous);
  if (code != 0) return code;

  const ManifestCheck check = check_outputs(recorded);
  for (const auto& m : check.missing) *ctx.err << "missing: " << m << "\n";
  for (const auto& m : check.mismatched) *ctx.err << "hash mismatch: " << m << "\n";
  if (!check.ok()) return kRuntimeError;
  *ctx.out << "rerun reproduced all " << recorded.size() << " outputs\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lamp::cli
