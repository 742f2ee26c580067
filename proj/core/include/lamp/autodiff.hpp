#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lamp/graph.hpp"
#include "lamp/tensor.hpp"

namespace lamp {

/// Trainable weight with its gradient accumulator and Adam moments.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;
  std::int64_t step_count = 0;

  Parameter() = default;
  Parameter(std::string name, Tensor value);

  void zero_grad() { grad.fill(0.0); }
};

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  Tape& tape() const { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }
  /// Scalar value of a 1x1 variable.
  double item() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records a forward computation for one reverse sweep.
///
/// Nodes live in a deque so references returned by Var::value() stay valid as
/// the tape grows. A tape built with `record == false` computes values only
/// (inference mode) and rejects backward().
class Tape {
 public:
  using BackwardFn = std::function<void(const Tensor& grad_out, Tape& tape)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  Var constant(Tensor value);
  /// Leaf bound to `p`; backward() adds dLoss/dValue into p.grad.
  /// Binding the same parameter twice sums both contributions.
  Var parameter(Parameter& p);

  /// Appends an op output. `backward` receives dLoss/dOutput and must call
  /// accumulate() on its inputs.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);

  void accumulate(Var v, const Tensor& grad);
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  const Tensor& value(Var v) const { return nodes_[v.id()].value; }

  /// Reverse sweep from a 1x1 loss. Intermediate gradients and closures are
  /// released afterwards; a tape supports a single backward().
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  void check_owned(Var v) const;

  std::deque<Node> nodes_;
  bool record_;
  bool consumed_ = false;
};

// Differentiable ops. All inputs must live on the same tape.
Var matmul(Var a, Var b);
/// a * b^T; with weights stored [out x in] this is the dense layer x W^T.
Var matmul_bt(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var x, double c);
/// x + b broadcast over rows; b is 1 x cols.
Var add_bias(Var x, Var b);
Var relu(Var x);
/// Elementwise product with a constant (e.g. a pruning mask).
Var hadamard(Var x, const Tensor& mask);
/// Row v of the result is the sum of rows u over neighbours u of v.
Var scatter_sum(Var x, std::span<const Edge> edges);
Var segment_sum(Var x, std::span<const int> segment_ids, std::size_t segments);
Var segment_mean(Var x, std::span<const int> segment_ids, std::size_t segments);
/// Cosine similarity of every row of a with every row of b; eps is added to each norm.
Var cosine_sim_matrix(Var a, Var b, double eps = 1e-12);
Var gather_rows(Var x, std::vector<std::size_t> rows);
Var concat_rows(Var a, Var b);
/// Column vector of the listed (row, col) entries.
Var pick(Var x, std::vector<std::pair<std::size_t, std::size_t>> entries);
/// out_i = log sum_j exp(x_ij) over j with col_groups[j] != row_groups[i].
/// Empty group vectors include every column.
Var row_logsumexp(Var x, std::vector<int> row_groups, std::vector<int> col_groups);
Var sum(Var x);
Var mean(Var x);

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam update, then zeroes every gradient.
void adam_step(std::span<Parameter* const> params, const AdamOptions& opts);

}  // namespace lamp
