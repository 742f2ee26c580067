// Acceptance checks. Each subcommand prints one PASS/FAIL line and exits 0 on
// PASS, 1 on FAIL and 77 when the required data is not present.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lamp/audit.hpp"
#include "lamp/checkpoint.hpp"
#include "lamp/entropy.hpp"
#include "lamp/eval.hpp"
#include "lamp/io.hpp"
#include "lamp/trainer.hpp"
#include "lamp/tu_format.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lamp;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kSkip = 77;

fs::path data_dir() {
  if (const char* env = std::getenv("LAMP_DATA_DIR")) return env;
  return LAMP_ACCEPTANCE_DATA_DIR;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  return ok ? kPass : kFail;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng) {
  Tensor t(r, c);
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

Graph random_graph(int n, double p, std::size_t dim, Rng& rng) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < p) edges.push_back({u, v});
  return Graph(n, std::move(edges), random_tensor(static_cast<std::size_t>(n), dim, rng));
}

int entropy_audit() {
  const fs::path mutag = data_dir() / "MUTAG";
  if (!fs::exists(mutag)) {
    std::printf("SKIP entropy_audit: %s not found\n", mutag.c_str());
    return kSkip;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset ds = load_tu_dataset(mutag);
  const DamageReport sub = audit_dataset(ds, Augmentation::Subgraph, 0.2, 5, 0);
  const DamageReport drop = audit_dataset(ds, Augmentation::NodeDrop, 0.2, 5, 0);
  const double secs = seconds_since(t0);
  const bool ok = sub.mean > 0.5 && sub.mean > drop.mean && secs < 120.0;
  return report("entropy_audit", ok,
                "MUTAG subgraph mean " + fmt(sub.mean) + ", node_drop mean " + fmt(drop.mean) + ", " + fmt(secs) + " s");
}

int entropy_audit_reddit() {
  const fs::path reddit = data_dir() / "REDDIT-BINARY";
  if (!fs::exists(reddit)) {
    std::printf("SKIP entropy_audit_reddit: %s not found\n", reddit.c_str());
    return kSkip;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset ds = load_tu_dataset(reddit);
  const DamageReport edge = audit_dataset(ds, Augmentation::EdgePerturb, 0.2, 5, 0);
  const double secs = seconds_since(t0);
  const bool ok = edge.negative_count > 0 && secs < 120.0;
  return report("entropy_audit_reddit", ok,
                std::to_string(edge.negative_count) + " negative edge_perturb samples, " + fmt(secs) + " s");
}

Graph regular_graph(int n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v});
  return Graph(n, std::move(edges), Tensor(static_cast<std::size_t>(n), 1, 1.0));
}

int closed_form_entropy() {
  std::vector<Graph> regular;
  for (int n = 3; n <= 12; ++n) regular.push_back(make_cycle_graph(n));
  for (int n = 2; n <= 10; ++n) regular.push_back(make_complete_graph(n));
  // 3-cube and the Petersen graph
  std::vector<std::pair<int, int>> cube;
  for (int u = 0; u < 8; ++u)
    for (int b = 1; b < 8; b <<= 1)
      if (u < (u ^ b)) cube.push_back({u, u ^ b});
  regular.push_back(regular_graph(8, cube));
  regular.push_back(regular_graph(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 5}, {1, 6}, {2, 7}, {3, 8},
                                       {4, 9}, {5, 7}, {7, 9}, {9, 6}, {6, 8}, {8, 5}}));
  double worst = 0.0;
  for (const Graph& g : regular) {
    const auto deg = g.degrees();
    if (std::set<int>(deg.begin(), deg.end()).size() != 1) return report("closed_form_entropy", false, "non-regular fixture");
    worst = std::max(worst, std::abs(structural_entropy(g) - std::log2(g.node_count())));
  }
  const double star = structural_entropy(make_star_graph(3));
  const bool ok = worst <= 1e-12 && std::abs(star - 1.79248) <= 1e-5;
  return report("closed_form_entropy", ok,
                std::to_string(regular.size()) + " regular graphs, max error " + fmt(worst) + "; star S3 = " + fmt(star));
}

struct GradCase {
  GraphBatch batch;
  Encoder encoder;
  ProjectionHead head;
  PruneMask mask;
  TrainConfig config;
  std::uint64_t anchor_seed;
};

double case_loss(GradCase& c) {
  Rng anchors(c.anchor_seed);
  Tape tape;
  return forward_pair(c.encoder, c.head, c.batch, c.mask, c.config, anchors, tape).total.item();
}

int gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kCases = 24;
  constexpr double kStep = 1e-4;
  // Denominator floor so near-zero gradients are compared absolutely.
  constexpr double kFloor = 1e-6;
  double worst = 0.0;
  std::size_t entries = 0;
  Rng rng(2024);
  for (int k = 0; k < kCases; ++k) {
    GradCase c;
    const std::size_t dim = 1 + rng.uniform_index(3);
    const std::size_t hidden = 2 + rng.uniform_index(5);
    const int graphs = 2 + static_cast<int>(rng.uniform_index(2));
    std::vector<Graph> members;
    for (int g = 0; g < graphs; ++g)
      members.push_back(random_graph(2 + static_cast<int>(rng.uniform_index(3)), 0.6, dim, rng));
    c.batch = make_batch(members);
    c.config.hidden_dim = hidden;
    c.config.num_layers = 2 + rng.uniform_index(2);
    c.config.tau = 0.5;
    c.config.alpha = (k % 3 == 0) ? 0.0 : 1.0 + rng.uniform01();
    c.config.readout = (k % 2 == 0) ? Readout::Sum : Readout::Mean;
    c.config.n_s = (k % 4 == 0) ? 3 : 5000;
    c.config.denominator = (k % 5 == 0) ? DenominatorForm::IncludePositive : DenominatorForm::ExcludePositive;
    c.anchor_seed = rng.next_u64();
    c.encoder = Encoder(dim, hidden, c.config.num_layers, rng);
    c.head = ProjectionHead(hidden, rng);
    // Nonzero biases keep the ReLUs away from exact kinks at zero input.
    for (Parameter* p : c.encoder.parameters())
      if (p->value.rows() == 1) p->value = random_tensor(1, p->value.cols(), rng);
    for (Parameter* p : c.head.parameters())
      if (p->value.rows() == 1) p->value = random_tensor(1, p->value.cols(), rng);
    const PruneStrategy strategy = (k % 2 == 0) ? PruneStrategy::Magnitude : PruneStrategy::SoftFilter;
    c.mask = derive_mask(c.encoder, strategy, 0.1 + 0.2 * static_cast<double>(k % 4));

    {
      Rng anchors(c.anchor_seed);
      Tape tape;
      tape.backward(forward_pair(c.encoder, c.head, c.batch, c.mask, c.config, anchors, tape).total);
    }
    std::vector<Parameter*> params = c.encoder.parameters();
    for (Parameter* p : c.head.parameters()) params.push_back(p);
    for (Parameter* p : params) {
      for (std::size_t i = 0; i < p->value.size(); ++i) {
        const double analytic = p->grad.values()[i];
        const double numeric = oracle::central_difference([&] { return case_loss(c); }, p->value.values()[i], kStep);
        worst = std::max(worst, oracle::relative_error(analytic, numeric, kFloor));
        ++entries;
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < 1e-4 && secs < 60.0;
  return report("gradient_check", ok,
                std::to_string(kCases) + " configurations, " + std::to_string(entries) + " entries, max relative error " +
                    fmt(worst) + ", " + fmt(secs) + " s");
}

int loss_oracle() {
  Rng rng(7);
  double worst = 0.0;
  int batches = 0;
  for (int k = 0; k < 300; ++k) {
    const int graphs = 2 + static_cast<int>(rng.uniform_index(3));
    const std::size_t d = 1 + rng.uniform_index(3);
    std::vector<int> ids;
    for (int g = 0; g < graphs; ++g) {
      const int nodes = 1 + static_cast<int>(rng.uniform_index(3));
      for (int i = 0; i < nodes; ++i) ids.push_back(g);
    }
    const double tau = 0.05 + rng.uniform01();
    Tensor z1 = random_tensor(static_cast<std::size_t>(graphs), d, rng), z2 = random_tensor(static_cast<std::size_t>(graphs), d, rng);
    Tensor h1 = random_tensor(ids.size(), d, rng), h2 = random_tensor(ids.size(), d, rng);
    const std::size_t n_s = (k % 3 == 0) ? 1 + rng.uniform_index(ids.size()) : 5000;
    const std::uint64_t seed = rng.next_u64();

    Tape t(false);
    for (DenominatorForm form : {DenominatorForm::ExcludePositive, DenominatorForm::IncludePositive}) {
      const double got = nt_xent(t.constant(z1), t.constant(z2), tau, form).item();
      const double want =
          oracle::nt_xent(oracle::to_mat(z1), oracle::to_mat(z2), tau, form == DenominatorForm::IncludePositive);
      worst = std::max(worst, std::abs(got - want));
    }
    Rng a(seed), b(seed);
    const double got = local_contrastive(t.constant(h1), t.constant(h2), ids, tau, n_s, a).item();
    const double want =
        oracle::local_contrastive(oracle::to_mat(h1), oracle::to_mat(h2), ids, sample_anchors(ids.size(), n_s, b), tau);
    worst = std::max(worst, std::abs(got - want));
    ++batches;
  }
  return report("loss_oracle", worst <= 1e-9,
                std::to_string(batches) + " random batches, max absolute error " + fmt(worst));
}

std::set<std::size_t> zero_set(const Tensor& mask) {
  std::set<std::size_t> s;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask.values()[i] == 0.0) s.insert(i);
  return s;
}

int pruning_invariants() {
  Rng rng(11);
  std::vector<std::string> failures;
  for (int k = 0; k < 10; ++k) {
    Encoder enc(1 + rng.uniform_index(5), 2 + rng.uniform_index(8), 2 + rng.uniform_index(3), rng);
    for (PruneStrategy s : {PruneStrategy::Magnitude, PruneStrategy::SoftFilter}) {
      std::vector<std::set<std::size_t>> previous;
      for (double gamma = 0.0; gamma < 0.96; gamma += 0.05) {
        const PruneMask m = derive_mask(enc, s, gamma);
        const auto weights = enc.prunable_weights();
        for (std::size_t i = 0; i < weights.size(); ++i) {
          const Tensor& w = weights[i]->value;
          const Tensor& mm = m.matrices[i];
          const auto zeros = zero_set(mm);
          if (s == PruneStrategy::Magnitude) {
            if (zeros.size() != static_cast<std::size_t>(std::floor(gamma * static_cast<double>(w.size()) + 1e-9)))
              failures.push_back("magnitude count");
          } else {
            std::size_t full_rows = 0;
            for (std::size_t r = 0; r < mm.rows(); ++r) {
              std::size_t z = 0;
              for (double v : mm.row(r)) z += v == 0.0;
              if (z == mm.cols()) ++full_rows;
              else if (z != 0) failures.push_back("partial row");
            }
            if (full_rows != static_cast<std::size_t>(std::floor(gamma * static_cast<double>(w.rows()) + 1e-9)))
              failures.push_back("soft filter count");
          }
          // Deriving again from the masked weights selects the same entries.
          const Tensor again = s == PruneStrategy::Magnitude ? magnitude_mask_matrix(apply_mask(w, mm), gamma)
                                                             : soft_filter_mask_matrix(apply_mask(w, mm), gamma);
          if (!(again == mm)) failures.push_back("idempotence");
          if (previous.size() > i) {
            for (std::size_t z : previous[i])
              if (!zeros.count(z)) failures.push_back("nesting");
            previous[i] = zeros;
          } else {
            previous.push_back(zeros);
          }
        }
      }
    }
  }

  // gamma = 0 leaves the pruned branch identical to the dense one.
  {
    Encoder enc(3, 5, 3, rng);
    std::vector<Graph> gs{random_graph(5, 0.5, 3, rng), random_graph(4, 0.7, 3, rng)};
    const GraphBatch b = make_batch(gs);
    for (PruneStrategy s : {PruneStrategy::Magnitude, PruneStrategy::SoftFilter}) {
      const PruneMask m = derive_mask(enc, s, 0.0);
      if (!(encode(enc, b, nullptr) == encode(enc, b, &m))) failures.push_back("gamma zero equality");
    }
  }

  // An inflated masked weight is unmasked at the next epoch boundary.
  for (PruneStrategy s : {PruneStrategy::Magnitude, PruneStrategy::SoftFilter}) {
    Dataset ds;
    ds.name = "toy";
    ds.feature_dim = 2;
    ds.num_classes = 2;
    for (int g = 0; g < 8; ++g) {
      Graph gr = random_graph(4 + g % 3, 0.6, 2, rng);
      ds.graphs.push_back(Graph(gr.node_count(), gr.edges(), gr.features(), g % 2));
    }
    TrainConfig c;
    c.hidden_dim = 6;
    c.num_layers = 2;
    c.batch_size = 4;
    c.epochs = 2;
    c.eval_every = 0;
    c.gamma = 0.5;
    c.strategy = s;
    c.allow_off_grid = true;
    std::vector<PruneMask> masks;
    std::size_t idx = 0;
    TrainHooks hooks;
    hooks.on_epoch_start = [&](int, const PruneMask& m) { masks.push_back(m); };
    hooks.after_batch = [&](int epoch, int batch, Encoder& enc, const PruneMask& m) {
      if (!(m.matrices == masks.back().matrices)) failures.push_back("mask changed within an epoch");
      if (epoch != 1 || batch != 1) return;
      idx = *zero_set(m.matrices[0]).begin();
      if (s == PruneStrategy::Magnitude) {
        enc.layers()[0].w1.value.values()[idx] = 1e3;
      } else {
        const std::size_t row = idx / m.matrices[0].cols();
        for (double& v : enc.layers()[0].w1.value.row(row)) v = 1e3;
      }
    };
    pretrain(ds, c, hooks);
    if (masks.size() != 2 || masks[0].matrices[0].values()[idx] != 0.0 || masks[1].matrices[0].values()[idx] != 1.0)
      failures.push_back(std::string("soft recovery (") + std::string(to_string(s)) + ")");
  }

  std::string detail = failures.empty() ? "counts, idempotence, nesting, gamma=0 equality, soft recovery"
                                        : std::to_string(failures.size()) + " violations, first: " + failures.front();
  return report("pruning_invariants", failures.empty(), detail);
}

Dataset load_mutag() { return load_tu_dataset(data_dir() / "MUTAG"); }

double accuracy(const PretrainResult& r, const Dataset& ds, const TrainConfig& c) {
  EmbeddingSet e = embed_dataset(r.encoder, ds, c.readout);
  EvalOptions o;
  o.seed = c.seed;
  return kfold_eval(e, o).mean;
}

int training_viability() {
  if (!fs::exists(data_dir() / "MUTAG")) {
    std::printf("SKIP training_viability: MUTAG not found\n");
    return kSkip;
  }
  const Dataset ds = load_mutag();
  TrainConfig c;
  c.eval_every = 0;
  const auto t0 = std::chrono::steady_clock::now();
  const PretrainResult r = pretrain(ds, c);
  const double train_secs = seconds_since(t0);
  const double acc = accuracy(r, ds, c);
  const double first = r.history.epochs.front().loss.total;
  const double last = r.history.epochs.back().loss.total;
  const bool ok = train_secs < 600.0 && last < first && acc >= 0.75;
  return report("training_viability", ok,
                "loss " + fmt(first) + " -> " + fmt(last) + ", 10-fold accuracy " + fmt(100 * acc) + "%, training " +
                    fmt(train_secs) + " s");
}

int ablation() {
  if (!fs::exists(data_dir() / "MUTAG")) {
    std::printf("SKIP ablation: MUTAG not found\n");
    return kSkip;
  }
  const Dataset ds = load_mutag();
  double with_sum = 0.0, without_sum = 0.0;
  bool every_seed = true;
  std::ostringstream detail;
  for (std::uint64_t seed : {0, 1, 2}) {
    TrainConfig c;
    c.eval_every = 0;
    c.seed = seed;
    c.alpha = 1.0;
    const double with_local = accuracy(pretrain(ds, c), ds, c);
    c.alpha = 0.0;
    c.allow_off_grid = true;
    const double without_local = accuracy(pretrain(ds, c), ds, c);
    with_sum += with_local;
    without_sum += without_local;
    every_seed = every_seed && with_local >= without_local - 0.01;
    detail << "seed " << seed << ": " << fmt(100 * with_local) << " vs " << fmt(100 * without_local) << "; ";
  }
  const double with_mean = with_sum / 3, without_mean = without_sum / 3;
  detail << "mean " << fmt(100 * with_mean) << "% (alpha=1) vs " << fmt(100 * without_mean) << "% (alpha=0)";
  return report("ablation", every_seed && with_mean >= without_mean - 0.01, detail.str());
}

int determinism() {
  if (!fs::exists(data_dir() / "MUTAG")) {
    std::printf("SKIP determinism: MUTAG not found\n");
    return kSkip;
  }
  const Dataset ds = load_mutag();
  const TrainConfig c;
  const fs::path dir = fs::temp_directory_path() / "lamp_acceptance_determinism";
  fs::create_directories(dir);
  std::vector<std::string> hashes;
  for (int run = 0; run < 2; ++run) {
    const PretrainResult r = pretrain(ds, c);
    const fs::path hist = dir / ("history" + std::to_string(run) + ".csv");
    const fs::path ckpt = dir / ("checkpoint" + std::to_string(run) + ".json");
    write_file_atomic(hist, history_csv(r.history, false));
    save_checkpoint(r.encoder, r.head, c, ckpt);
    hashes.push_back(sha256_file(hist) + " " + sha256_file(ckpt));
  }
  return report("determinism", hashes[0] == hashes[1],
                "history+checkpoint sha256 " + hashes[0].substr(0, 12) + "... vs " + hashes[1].substr(0, 12) + "...");
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<int()>> checks{
      {"entropy_audit", entropy_audit},
      {"entropy_audit_reddit", entropy_audit_reddit},
      {"closed_form_entropy", closed_form_entropy},
      {"gradient_check", gradient_check},
      {"loss_oracle", loss_oracle},
      {"pruning_invariants", pruning_invariants},
      {"training_viability", training_viability},
      {"ablation", ablation},
      {"determinism", determinism},
  };
  if (argc != 2 || !checks.count(argv[1])) {
    std::fprintf(stderr, "usage: lamp_acceptance <check>\nchecks:");
    for (const auto& [name, fn] : checks) std::fprintf(stderr, " %s", name.c_str());
    std::fprintf(stderr, "\n");
    return 2;
  }
  try {
    return checks.at(argv[1])();
  } catch (const std::exception& e) {
    std::printf("FAIL %s: %s\n", argv[1], e.what());
    return kFail;
  }
}
