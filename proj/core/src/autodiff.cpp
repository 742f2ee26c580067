#include "lamp/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lamp/error.hpp"

namespace lamp {

Parameter::Parameter(std::string name, Tensor value)
    : name(std::move(name)),
      value(std::move(value)),
      grad(this->value.rows(), this->value.cols()),
      adam_m(this->value.rows(), this->value.cols()),
      adam_v(this->value.rows(), this->value.cols()) {}

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("use of an unbound Var");
  return tape_->value(*this);
}

double Var::item() const {
  const Tensor& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ContractError("item() on non-scalar " + shape_string(v));
  return v(0, 0);
}

void Tape::check_owned(Var v) const {
  if (v.tape_ != this || v.id_ >= nodes_.size()) throw ContractError("Var does not belong to this tape");
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, {}, nullptr, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Parameter& p) {
  nodes_.push_back(Node{p.value, {}, {}, record_ ? &p : nullptr, record_});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
#ifndef NDEBUG
  if (!value.all_finite()) throw Error("non-finite value produced on tape");
#endif
  bool needs = false;
  for (Var in : inputs) {
    check_owned(in);
    needs = needs || nodes_[in.id_].requires_grad;
  }
  needs = needs && record_;
  nodes_.push_back(Node{std::move(value), {}, needs ? std::move(backward) : BackwardFn{}, nullptr, needs});
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(Var v, const Tensor& grad) {
  Node& n = nodes_[v.id_];
  if (!n.requires_grad) return;
  if (n.grad.empty() && !n.value.empty()) {
    n.grad = grad;
    require_shape(n.grad.same_shape(n.value), "accumulate", n.value, grad);
    return;
  }
  add_into(n.grad, grad);
}

void Tape::backward(Var loss) {
  check_owned(loss);
  if (!record_) throw ContractError("backward() on a tape built in inference mode");
  if (consumed_) throw ContractError("backward() already ran on this tape");
  const Tensor& lv = nodes_[loss.id_].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ContractError("backward() needs a scalar loss, got " + shape_string(lv));
  }
  consumed_ = true;
  accumulate(loss, Tensor(1, 1, 1.0));
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty()) continue;
    if (n.param) {
      require_shape(n.param->grad.same_shape(n.grad), "parameter grad", n.param->grad, n.grad);
      add_into(n.param->grad, n.grad);
    } else if (n.backward) {
      n.backward(n.grad, *this);
    }
    n.grad = Tensor();
    n.backward = nullptr;
  }
  for (Node& n : nodes_) {
    n.grad = Tensor();
    n.backward = nullptr;
  }
}

namespace {

void same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw ContractError("operands recorded on different tapes");
}

}  // namespace

Var matmul(Var a, Var b) {
  same_tape(a, b);
  Tensor out = lamp::matmul(a.value(), b.value());
  return a.tape().record(std::move(out), {a, b}, [a, b](const Tensor& g, Tape& t) {
    if (t.requires_grad(a)) t.accumulate(a, matmul_bt(g, b.value()));
    if (t.requires_grad(b)) t.accumulate(b, matmul_at(a.value(), g));
  });
}

Var matmul_bt(Var a, Var b) {
  same_tape(a, b);
  Tensor out = lamp::matmul_bt(a.value(), b.value());
  return a.tape().record(std::move(out), {a, b}, [a, b](const Tensor& g, Tape& t) {
    // out = a b^T: da = g b, db = g^T a
    if (t.requires_grad(a)) t.accumulate(a, lamp::matmul(g, b.value()));
    if (t.requires_grad(b)) t.accumulate(b, matmul_at(g, a.value()));
  });
}

Var add(Var a, Var b) {
  same_tape(a, b);
  require_shape(a.value().same_shape(b.value()), "add", a.value(), b.value());
  Tensor out = a.value();
  add_into(out, b.value());
  return a.tape().record(std::move(out), {a, b}, [a, b](const Tensor& g, Tape& t) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  same_tape(a, b);
  require_shape(a.value().same_shape(b.value()), "sub", a.value(), b.value());
  Tensor out = a.value();
  axpy_into(out, -1.0, b.value());
  return a.tape().record(std::move(out), {a, b}, [a, b](const Tensor& g, Tape& t) {
    t.accumulate(a, g);
    if (t.requires_grad(b)) {
      Tensor ng(g.rows(), g.cols());
      axpy_into(ng, -1.0, g);
      t.accumulate(b, ng);
    }
  });
}

Var scale(Var x, double c) {
  Tensor out = x.value();
  for (double& v : out.values()) v *= c;
  return x.tape().record(std::move(out), {x}, [x, c](const Tensor& g, Tape& t) {
    Tensor gx(g.rows(), g.cols());
    axpy_into(gx, c, g);
    t.accumulate(x, gx);
  });
}

Var add_bias(Var x, Var b) {
  same_tape(x, b);
  const Tensor& xv = x.value();
  const Tensor& bv = b.value();
  require_shape(bv.rows() == 1 && bv.cols() == xv.cols(), "add_bias", xv, bv);
  Tensor out = xv;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bv(0, j);
  }
  return x.tape().record(std::move(out), {x, b}, [x, b](const Tensor& g, Tape& t) {
    t.accumulate(x, g);
    if (t.requires_grad(b)) {
      Tensor gb(1, g.cols());
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gb(0, j) += g(i, j);
      t.accumulate(b, gb);
    }
  });
}

Var relu(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = v < 0.0 ? 0.0 : v;  // NaN passes through
  return x.tape().record(std::move(out), {x}, [x](const Tensor& g, Tape& t) {
    Tensor gx = g;
    auto xv = x.value().values();
    auto gv = gx.values();
    for (std::size_t i = 0; i < gv.size(); ++i)
      if (!(xv[i] > 0.0)) gv[i] = 0.0;
    t.accumulate(x, gx);
  });
}

Var hadamard(Var x, const Tensor& mask) {
  require_shape(x.value().same_shape(mask), "hadamard", x.value(), mask);
  Tensor out = x.value();
  auto m = mask.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= m[i];
  return x.tape().record(std::move(out), {x}, [x, mask](const Tensor& g, Tape& t) {
    Tensor gx = g;
    auto mv = mask.values();
    auto gv = gx.values();
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] *= mv[i];
    t.accumulate(x, gx);
  });
}

namespace {

Tensor scatter_sum_kernel(const Tensor& x, std::span<const Edge> edges) {
  Tensor out(x.rows(), x.cols());
  const std::size_t d = x.cols();
  for (const Edge& e : edges) {
    const double* xu = x.row(e.u).data();
    const double* xv = x.row(e.v).data();
    double* ou = out.row(e.u).data();
    double* ov = out.row(e.v).data();
    for (std::size_t k = 0; k < d; ++k) {
      ou[k] += xv[k];
      ov[k] += xu[k];
    }
  }
  return out;
}

}  // namespace

Var scatter_sum(Var x, std::span<const Edge> edges) {
  const Tensor& xv = x.value();
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= xv.rows() ||
        static_cast<std::size_t>(e.v) >= xv.rows()) {
      throw ShapeError("scatter_sum: edge endpoint outside " + shape_string(xv));
    }
  }
  Tensor out = scatter_sum_kernel(xv, edges);
  std::vector<Edge> kept(edges.begin(), edges.end());
  return x.tape().record(std::move(out), {x}, [x, kept = std::move(kept)](const Tensor& g, Tape& t) {
    // The neighbour-sum operator is symmetric, so its adjoint is itself.
    t.accumulate(x, scatter_sum_kernel(g, kept));
  });
}

namespace {

void check_segments(const Tensor& x, std::span<const int> ids, std::size_t segments) {
  if (ids.size() != x.rows()) {
    throw ShapeError("segment op: " + std::to_string(ids.size()) + " ids for " + shape_string(x));
  }
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= segments) throw ShapeError("segment id out of range");
  }
}

}  // namespace

Var segment_sum(Var x, std::span<const int> segment_ids, std::size_t segments) {
  const Tensor& xv = x.value();
  check_segments(xv, segment_ids, segments);
  Tensor out(segments, xv.cols());
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    auto src = xv.row(i);
    auto dst = out.row(segment_ids[i]);
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
  }
  std::vector<int> ids(segment_ids.begin(), segment_ids.end());
  return x.tape().record(std::move(out), {x}, [x, ids = std::move(ids)](const Tensor& g, Tape& t) {
    Tensor gx(ids.size(), g.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto src = g.row(ids[i]);
      std::copy(src.begin(), src.end(), gx.row(i).begin());
    }
    t.accumulate(x, gx);
  });
}

Var segment_mean(Var x, std::span<const int> segment_ids, std::size_t segments) {
  check_segments(x.value(), segment_ids, segments);
  std::vector<double> counts(segments, 0.0);
  for (int id : segment_ids) counts[id] += 1.0;
  Var s = segment_sum(x, segment_ids, segments);
  Tensor inv(segments, s.cols());
  for (std::size_t r = 0; r < segments; ++r) {
    const double c = counts[r] > 0.0 ? 1.0 / counts[r] : 0.0;
    for (std::size_t k = 0; k < s.cols(); ++k) inv(r, k) = c;
  }
  return hadamard(s, inv);
}

Var cosine_sim_matrix(Var a, Var b, double eps) {
  same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_shape(av.cols() == bv.cols(), "cosine_sim_matrix", av, bv);
  auto norms = [](const Tensor& m) {
    std::vector<double> n(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double s = 0.0;
      for (double v : m.row(i)) s += v * v;
      n[i] = std::sqrt(s);
    }
    return n;
  };
  std::vector<double> na = norms(av);
  std::vector<double> nb = norms(bv);
  Tensor out = lamp::matmul_bt(av, bv);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) /= (na[i] + eps) * (nb[j] + eps);

  return a.tape().record(std::move(out), {a, b},
      [a, b, eps, na = std::move(na), nb = std::move(nb)](const Tensor& g, Tape& t) {
        const Tensor& av = a.value();
        const Tensor& bv = b.value();
        // S is recomputed rather than captured from the output node.
        Tensor s = lamp::matmul_bt(av, bv);
        for (std::size_t i = 0; i < s.rows(); ++i)
          for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) /= (na[i] + eps) * (nb[j] + eps);

        auto grad_side = [eps](const Tensor& gm, const Tensor& sm, const Tensor& self,
                               const std::vector<double>& nself, const Tensor& other,
                               const std::vector<double>& nother) {
          // d/dx_i sum_j G_ij S_ij = sum_j G_ij y_j / (|x_i|+e)(|y_j|+e)
          //                          - (sum_j G_ij S_ij) x_i / ((|x_i|+e) |x_i|)
          Tensor other_hat = other;
          for (std::size_t j = 0; j < other_hat.rows(); ++j)
            for (double& v : other_hat.row(j)) v /= nother[j] + eps;
          Tensor gx = lamp::matmul(gm, other_hat);
          for (std::size_t i = 0; i < gx.rows(); ++i) {
            double r = 0.0;
            for (std::size_t j = 0; j < gm.cols(); ++j) r += gm(i, j) * sm(i, j);
            const double inv = 1.0 / (nself[i] + eps);
            const double radial = nself[i] > 0.0 ? r * inv / nself[i] : 0.0;
            auto row = gx.row(i);
            auto xr = self.row(i);
            for (std::size_t k = 0; k < row.size(); ++k) row[k] = row[k] * inv - radial * xr[k];
          }
          return gx;
        };
        if (t.requires_grad(a)) t.accumulate(a, grad_side(g, s, av, na, bv, nb));
        if (t.requires_grad(b)) t.accumulate(b, grad_side(transpose(g), transpose(s), bv, nb, av, na));
      });
}

Var gather_rows(Var x, std::vector<std::size_t> rows) {
  const Tensor& xv = x.value();
  Tensor out(rows.size(), xv.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= xv.rows()) throw ShapeError("gather_rows: row index outside " + shape_string(xv));
    auto src = xv.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  const std::size_t n = xv.rows();
  return x.tape().record(std::move(out), {x}, [x, n, rows = std::move(rows)](const Tensor& g, Tape& t) {
    Tensor gx(n, g.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto src = g.row(i);
      auto dst = gx.row(rows[i]);
      for (std::size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
    }
    t.accumulate(x, gx);
  });
}

Var concat_rows(Var a, Var b) {
  same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_shape(av.cols() == bv.cols(), "concat_rows", av, bv);
  std::vector<double> values(av.values().begin(), av.values().end());
  values.insert(values.end(), bv.values().begin(), bv.values().end());
  const std::size_t ar = av.rows();
  Tensor out(ar + bv.rows(), av.cols(), std::move(values));
  return a.tape().record(std::move(out), {a, b}, [a, b, ar](const Tensor& g, Tape& t) {
    const std::size_t c = g.cols();
    auto gv = g.values();
    if (t.requires_grad(a)) t.accumulate(a, Tensor(ar, c, std::vector<double>(gv.begin(), gv.begin() + ar * c)));
    if (t.requires_grad(b)) {
      t.accumulate(b, Tensor(g.rows() - ar, c, std::vector<double>(gv.begin() + ar * c, gv.end())));
    }
  });
}

Var pick(Var x, std::vector<std::pair<std::size_t, std::size_t>> entries) {
  const Tensor& xv = x.value();
  Tensor out(entries.size(), 1);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto [r, c] = entries[k];
    if (r >= xv.rows() || c >= xv.cols()) throw ShapeError("pick: entry outside " + shape_string(xv));
    out(k, 0) = xv(r, c);
  }
  const std::size_t rows = xv.rows();
  const std::size_t cols = xv.cols();
  return x.tape().record(std::move(out), {x},
      [x, rows, cols, entries = std::move(entries)](const Tensor& g, Tape& t) {
        Tensor gx(rows, cols);
        for (std::size_t k = 0; k < entries.size(); ++k) gx(entries[k].first, entries[k].second) += g(k, 0);
        t.accumulate(x, gx);
      });
}

Var row_logsumexp(Var x, std::vector<int> row_groups, std::vector<int> col_groups) {
  const Tensor& xv = x.value();
  const bool all = row_groups.empty() && col_groups.empty();
  if (!all && (row_groups.size() != xv.rows() || col_groups.size() != xv.cols())) {
    throw ShapeError("row_logsumexp: group sizes do not match " + shape_string(xv));
  }
  auto included = [&](std::size_t i, std::size_t j) { return all || row_groups[i] != col_groups[j]; };

  Tensor out(xv.rows(), 1);
  Tensor soft(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < xv.cols(); ++j) {
      if (!included(i, j)) continue;
      any = true;
      // max() would silently drop a NaN entry
      mx = std::isnan(xv(i, j)) || std::isnan(mx) ? std::numeric_limits<double>::quiet_NaN() : std::max(mx, xv(i, j));
    }
    if (!any) {
      throw ContractError("row_logsumexp: row " + std::to_string(i) + " has no included entries");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < xv.cols(); ++j) {
      if (!included(i, j)) continue;
      soft(i, j) = std::exp(xv(i, j) - mx);
      s += soft(i, j);
    }
    out(i, 0) = mx + std::log(s);
    for (std::size_t j = 0; j < xv.cols(); ++j) soft(i, j) /= s;
  }
  return x.tape().record(std::move(out), {x}, [x, soft = std::move(soft)](const Tensor& g, Tape& t) {
    Tensor gx = soft;
    for (std::size_t i = 0; i < gx.rows(); ++i)
      for (double& v : gx.row(i)) v *= g(i, 0);
    t.accumulate(x, gx);
  });
}

Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  const std::size_t r = x.rows();
  const std::size_t c = x.cols();
  return x.tape().record(Tensor(1, 1, s), {x}, [x, r, c](const Tensor& g, Tape& t) {
    t.accumulate(x, Tensor(r, c, g(0, 0)));
  });
}

Var mean(Var x) {
  const double n = static_cast<double>(x.value().size());
  if (n == 0.0) throw ContractError("mean of an empty tensor");
  return scale(sum(x), 1.0 / n);
}

void adam_step(std::span<Parameter* const> params, const AdamOptions& opts) {
  for (Parameter* p : params) {
    ++p->step_count;
    const double t = static_cast<double>(p->step_count);
    const double bc1 = 1.0 - std::pow(opts.beta1, t);
    const double bc2 = 1.0 - std::pow(opts.beta2, t);
    auto w = p->value.values();
    auto g = p->grad.values();
    auto m = p->adam_m.values();
    auto v = p->adam_v.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = opts.beta1 * m[i] + (1.0 - opts.beta1) * g[i];
      v[i] = opts.beta2 * v[i] + (1.0 - opts.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= opts.lr * mhat / (std::sqrt(vhat) + opts.eps);
    }
    p->zero_grad();
  }
}

}  // namespace lamp
