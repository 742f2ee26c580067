#include "lamp/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lamp/error.hpp"
#include "lamp/io.hpp"

namespace lamp {

EmbeddingSet embed_dataset(const Encoder& encoder, const Dataset& dataset, Readout readout,
                           std::size_t chunk) {
  if (dataset.feature_dim != encoder.input_dim()) {
    throw ShapeError("dataset " + dataset.name + " has feature_dim " + std::to_string(dataset.feature_dim) +
                     " but the encoder expects " + std::to_string(encoder.input_dim()));
  }
  if (chunk == 0) chunk = 1;
  EmbeddingSet out;
  out.dataset_name = dataset.name;
  out.embeddings = Tensor(dataset.graphs.size(), encoder.hidden_dim());
  out.labels.reserve(dataset.graphs.size());
  for (std::size_t start = 0; start < dataset.graphs.size(); start += chunk) {
    const std::size_t stop = std::min(dataset.graphs.size(), start + chunk);
    std::vector<const Graph*> members;
    for (std::size_t i = start; i < stop; ++i) members.push_back(&dataset.graphs[i]);
    const GraphBatch batch = make_batch(members);
    Tape tape(false);
    Var h = tape.constant(encode(encoder, batch));
    const Tensor pooled = lamp::readout(h, batch, readout).value();
    for (std::size_t i = start; i < stop; ++i) {
      auto src = pooled.row(i - start);
      std::copy(src.begin(), src.end(), out.embeddings.row(i).begin());
    }
  }
  for (const Graph& g : dataset.graphs) {
    if (!g.label()) throw ArgumentError("embed_dataset: graph without a label");
    out.labels.push_back(*g.label());
  }
  return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int folds, Rng& rng) {
  if (folds < 2) throw ArgumentError("need at least 2 folds");
  const int classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw ArgumentError("negative label");
    by_class[labels[i]].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t deal = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t idx : members) out[deal++ % folds].push_back(idx);
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

Standardizer Standardizer::fit(const Tensor& x, const std::vector<std::size_t>& rows) {
  Standardizer s;
  const std::size_t d = x.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (rows.empty()) return s;
  for (std::size_t r : rows)
    for (std::size_t k = 0; k < d; ++k) s.mean[k] += x(r, k);
  for (double& m : s.mean) m /= static_cast<double>(rows.size());
  std::vector<double> var(d, 0.0);
  for (std::size_t r : rows)
    for (std::size_t k = 0; k < d; ++k) var[k] += (x(r, k) - s.mean[k]) * (x(r, k) - s.mean[k]);
  for (std::size_t k = 0; k < d; ++k) {
    const double sd = std::sqrt(var[k] / static_cast<double>(rows.size()));
    s.scale[k] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Tensor Standardizer::apply(const Tensor& x, const std::vector<std::size_t>& rows) const {
  Tensor out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) out(i, k) = (x(rows[i], k) - mean[k]) / scale[k];
  return out;
}

void LogisticRegression::fit(const Tensor& x, const std::vector<int>& y, int num_classes,
                             int iterations, double learning_rate, double l2) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const auto c = static_cast<std::size_t>(num_classes);
  w_ = Tensor(c, d);
  b_ = Tensor(1, c);
  if (n == 0) return;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int it = 0; it < iterations; ++it) {
    Tensor logits = matmul_bt(x, w_);
    // Softmax residual P - Y, reused in place.
    for (std::size_t i = 0; i < n; ++i) {
      auto row = logits.row(i);
      double mx = -INFINITY;
      for (std::size_t k = 0; k < c; ++k) {
        row[k] += b_(0, k);
        mx = std::max(mx, row[k]);
      }
      double s = 0.0;
      for (double& v : row) {
        v = std::exp(v - mx);
        s += v;
      }
      for (double& v : row) v /= s;
      row[y[i]] -= 1.0;
    }
    Tensor gw = matmul_at(logits, x);  // [c x d]
    for (std::size_t k = 0; k < c; ++k) {
      double gb = 0.0;
      for (std::size_t i = 0; i < n; ++i) gb += logits(i, k);
      b_(0, k) -= learning_rate * gb * inv_n;
      for (std::size_t j = 0; j < d; ++j) {
        w_(k, j) -= learning_rate * (gw(k, j) * inv_n + l2 * w_(k, j));
      }
    }
  }
}

std::vector<int> LogisticRegression::predict(const Tensor& x) const {
  Tensor logits = matmul_bt(x, w_);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    int best = 0;
    for (std::size_t k = 0; k < logits.cols(); ++k) {
      const double v = logits(i, k) + b_(0, k);
      if (v > logits(i, best) + b_(0, best)) best = static_cast<int>(k);
    }
    out[i] = best;
  }
  return out;
}

EvalResult kfold_eval(const EmbeddingSet& embeds, const EvalOptions& options) {
  const std::size_t n = embeds.embeddings.rows();
  if (embeds.labels.size() != n) throw ArgumentError("kfold_eval: label count differs from embedding rows");
  if (options.folds < 2 || options.repeats < 1) throw ArgumentError("kfold_eval: folds >= 2 and repeats >= 1 required");
  if (n < static_cast<std::size_t>(options.folds)) {
    throw ArgumentError("kfold_eval: " + std::to_string(n) + " graphs for " + std::to_string(options.folds) + " folds");
  }
  if (!embeds.embeddings.all_finite()) throw ArgumentError("kfold_eval: non-finite embeddings");
  const int classes = *std::max_element(embeds.labels.begin(), embeds.labels.end()) + 1;
  {
    std::set<int> present(embeds.labels.begin(), embeds.labels.end());
    if (static_cast<int>(present.size()) != classes) {
      throw StratificationError("kfold_eval: some class index below " + std::to_string(classes) + " has no graphs");
    }
  }

  EvalResult result;
  result.folds = options.folds;
  result.repeats = options.repeats;
  for (int r = 0; r < options.repeats; ++r) {
    const std::uint64_t seed = derive_seed(options.seed, {static_cast<std::uint64_t>(r)});
    result.seeds.push_back(seed);
    Rng rng(seed);
    const auto folds = stratified_folds(embeds.labels, options.folds, rng);
    for (int f = 0; f < options.folds; ++f) {
      const auto& test = folds[f];
      std::vector<std::size_t> train;
      train.reserve(n - test.size());
      for (int g = 0; g < options.folds; ++g)
        if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
      std::sort(train.begin(), train.end());

      std::vector<int> y_train;
      y_train.reserve(train.size());
      for (std::size_t i : train) y_train.push_back(embeds.labels[i]);
      if (static_cast<int>(std::set<int>(y_train.begin(), y_train.end()).size()) != classes) {
        throw StratificationError("fold " + std::to_string(f) + " of repeat " + std::to_string(r) +
                                  ": a class is absent from the training split");
      }

      const Standardizer scaler = Standardizer::fit(embeds.embeddings, train);
      LogisticRegression model;
      model.fit(scaler.apply(embeds.embeddings, train), y_train, classes, options.iterations,
                options.learning_rate, options.l2);
      const auto pred = model.predict(scaler.apply(embeds.embeddings, test));
      std::size_t correct = 0;
      for (std::size_t i = 0; i < test.size(); ++i) correct += pred[i] == embeds.labels[test[i]] ? 1 : 0;
      result.fold_accuracies.push_back(test.empty() ? 0.0
                                                    : static_cast<double>(correct) / static_cast<double>(test.size()));
    }
  }
  const double m = std::accumulate(result.fold_accuracies.begin(), result.fold_accuracies.end(), 0.0) /
                   static_cast<double>(result.fold_accuracies.size());
  double ss = 0.0;
  for (double a : result.fold_accuracies) ss += (a - m) * (a - m);
  result.mean = m;
  result.std = std::sqrt(ss / static_cast<double>(result.fold_accuracies.size()));
  return result;
}

std::string embeddings_csv(const EmbeddingSet& embeds) {
  std::ostringstream out;
  out << "graph_index,label";
  for (std::size_t k = 0; k < embeds.embeddings.cols(); ++k) out << ",e" << k;
  out << '\n';
  for (std::size_t i = 0; i < embeds.embeddings.rows(); ++i) {
    out << i << ',' << embeds.labels[i];
    for (double v : embeds.embeddings.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

EmbeddingSet embeddings_from_csv(std::string_view csv, std::string dataset_name) {
  EmbeddingSet out;
  out.dataset_name = std::move(dataset_name);
  std::vector<double> values;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t c = 0;
    while (true) {
      std::size_t comma = line.find(',', c);
      cells.push_back(line.substr(c, comma == std::string_view::npos ? line.size() - c : comma - c));
      if (comma == std::string_view::npos) break;
      c = comma + 1;
    }
    if (line_no == 1) {
      if (cells.size() < 3 || cells[0] != "graph_index" || cells[1] != "label") {
        throw FormatError("embeddings csv: unexpected header");
      }
      dim = cells.size() - 2;
      continue;
    }
    if (cells.size() != dim + 2) throw FormatError("embeddings csv line " + std::to_string(line_no) + ": wrong column count");
    auto parse = [&](std::string_view s, auto& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw FormatError("embeddings csv line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
      }
    };
    std::size_t idx = 0;
    parse(cells[0], idx);
    if (idx != rows) throw FormatError("embeddings csv line " + std::to_string(line_no) + ": graph_index out of order");
    int label = 0;
    parse(cells[1], label);
    out.labels.push_back(label);
    for (std::size_t k = 0; k < dim; ++k) {
      double v = 0.0;
      parse(cells[k + 2], v);
      values.push_back(v);
    }
    ++rows;
  }
  if (dim == 0) throw FormatError("embeddings csv: missing header");
  out.embeddings = Tensor(rows, dim, std::move(values));
  return out;
}

std::string eval_result_json(const EvalResult& result) {
  nlohmann::json j;
  j["fold_accuracies"] = result.fold_accuracies;
  j["mean"] = result.mean;
  j["std"] = result.std;
  j["mean_percent"] = 100.0 * result.mean;
  j["std_percent"] = 100.0 * result.std;
  j["folds"] = result.folds;
  j["repeats"] = result.repeats;
  j["seeds"] = result.seeds;
  return j.dump(2);
}

}  // namespace lamp
