#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "lamp/encoder.hpp"
#include "lamp/error.hpp"
#include "lamp/pruning.hpp"
#include "oracles.hpp"

using namespace lamp;

namespace {

std::vector<oracle::DenseGinLayer> dense_layers(const Encoder& enc, const PruneMask* mask = nullptr) {
  std::vector<oracle::DenseGinLayer> out;
  std::size_t m = 0;
  for (const auto& l : enc.layers()) {
    oracle::DenseGinLayer d;
    d.w1 = oracle::to_mat(mask ? apply_mask(l.w1.value, mask->matrices[m]) : l.w1.value);
    d.w2 = oracle::to_mat(mask ? apply_mask(l.w2.value, mask->matrices[m + 1]) : l.w2.value);
    d.b1 = oracle::to_mat(l.b1.value)[0];
    d.b2 = oracle::to_mat(l.b2.value)[0];
    m += 2;
    out.push_back(d);
  }
  return out;
}

void randomize_biases(Encoder& enc, Rng& rng) {
  for (auto& l : enc.layers()) {
    l.b1.value = testing::random_tensor(1, l.b1.value.cols(), rng, -0.2, 0.2);
    l.b2.value = testing::random_tensor(1, l.b2.value.cols(), rng, -0.2, 0.2);
  }
}

double max_diff(const oracle::Mat& a, const Tensor& b) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a[r].size(); ++c) worst = std::max(worst, std::abs(a[r][c] - b(r, c)));
  return worst;
}

}  // namespace

TEST_SUITE("encoder") {

TEST_CASE("construction") {
  Rng rng(1);
  Encoder enc(7, 32, 3, rng);
  CHECK(enc.num_layers() == 3);
  CHECK(enc.layers()[0].w1.value.rows() == 32);
  CHECK(enc.layers()[0].w1.value.cols() == 7);
  CHECK(enc.layers()[2].w2.value.cols() == 32);
  CHECK(enc.parameters().size() == 12);
  CHECK(enc.prunable_weights().size() == 6);
  CHECK(enc.layers()[1].w2.name == "encoder.layers.1.w2");
  for (const auto& l : enc.layers()) CHECK(l.b1.value == Tensor(1, 32));
  CHECK_THROWS_AS(Encoder(7, 32, 1, rng), ArgumentError);
  const double bound = std::sqrt(6.0 / (7 + 32));
  for (double v : enc.layers()[0].w1.value.values()) CHECK(std::abs(v) <= bound);
}

TEST_CASE("matches the dense-adjacency oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Encoder enc(3, 5, 2 + trial % 2, rng);
    randomize_biases(enc, rng);
    Graph g = testing::random_graph(2 + static_cast<int>(rng.uniform_index(7)), 0.4, 3, rng);
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : g.edges()) edges.emplace_back(e.u, e.v);
    GraphBatch b = make_batch(std::vector<Graph>{g});
    CHECK(max_diff(oracle::gin_forward(g.node_count(), edges, oracle::to_mat(g.features()), dense_layers(enc)),
                   encode(enc, b)) < 1e-12);
    PruneMask mask = derive_mask(enc, PruneStrategy::Magnitude, 0.4);
    CHECK(max_diff(oracle::gin_forward(g.node_count(), edges, oracle::to_mat(g.features()), dense_layers(enc, &mask)),
                   encode(enc, b, &mask)) < 1e-12);
  }
}

TEST_CASE("all-ones mask equals the unmasked call bitwise") {
  Rng rng(3);
  Encoder enc(4, 6, 3, rng);
  GraphBatch b = make_batch(std::vector<Graph>{testing::random_graph(6, 0.5, 4, rng), testing::random_graph(3, 0.5, 4, rng)});
  PruneMask ones = derive_mask(enc, PruneStrategy::Magnitude, 0.0);
  CHECK(encode(enc, b, &ones) == encode(enc, b));
  Tape t;
  CHECK(encode(enc, b, &ones, t).value() == encode(enc, b, nullptr, t).value());
}

TEST_CASE("zero weights give zero embeddings") {
  Rng rng(4);
  Encoder enc(2, 4, 2, rng);
  for (Parameter* p : enc.parameters()) p->value.fill(0.0);
  GraphBatch b = make_batch(std::vector<Graph>{testing::random_graph(5, 0.5, 2, rng)});
  CHECK(encode(enc, b) == Tensor(5, 4));
}

TEST_CASE("identity MLPs pass a single node's feature through") {
  Rng rng(5);
  Encoder enc(1, 1, 3, rng);
  for (auto& l : enc.layers()) {
    l.w1.value = Tensor::identity(1);
    l.w2.value = Tensor::identity(1);
  }
  Graph g(1, {}, Tensor::from_rows({{0.75}}));
  CHECK(encode(enc, make_batch(std::vector<Graph>{g}))(0, 0) == 0.75);
}

TEST_CASE("permutation equivariance") {
  Rng rng(6);
  Encoder enc(3, 5, 3, rng);
  randomize_biases(enc, rng);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(6));
    Graph g = testing::random_graph(n, 0.4, 3, rng);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    Tensor h = encode(enc, make_batch(std::vector<Graph>{g}));
    Tensor hp = encode(enc, make_batch(std::vector<Graph>{g.permuted(perm)}));
    for (int i = 0; i < n; ++i)
      for (std::size_t c = 0; c < 5; ++c) CHECK(std::abs(h(i, c) - hp(perm[i], c)) < 1e-12);
  }
}

TEST_CASE("batching invariance") {
  Rng rng(7);
  Encoder enc(2, 4, 3, rng);
  std::vector<Graph> graphs;
  for (int i = 0; i < 5; ++i) graphs.push_back(testing::random_graph(1 + static_cast<int>(rng.uniform_index(6)), 0.5, 2, rng));
  PruneMask mask = derive_mask(enc, PruneStrategy::SoftFilter, 0.5);
  const PruneMask* masked = &mask;
  for (const PruneMask* m : {static_cast<const PruneMask*>(nullptr), masked}) {
    Tensor all = encode(enc, make_batch(graphs), m);
    std::size_t row = 0;
    for (const auto& g : graphs) {
      Tensor one = encode(enc, make_batch(std::vector<Graph>{g}), m);
      for (std::size_t r = 0; r < one.rows(); ++r, ++row)
        for (std::size_t c = 0; c < one.cols(); ++c) CHECK(one(r, c) == all(row, c));
    }
  }
}

TEST_CASE("masked entries do not influence the pruned forward") {
  Rng rng(8);
  Encoder enc(3, 4, 2, rng);
  GraphBatch b = make_batch(std::vector<Graph>{testing::random_graph(5, 0.6, 3, rng)});
  PruneMask mask = derive_mask(enc, PruneStrategy::Magnitude, 0.5);
  Tensor before = encode(enc, b, &mask);
  for (std::size_t i = 0; i < mask.matrices[0].size(); ++i)
    if (mask.matrices[0].values()[i] == 0.0) enc.layers()[0].w1.value.values()[i] = 123.0;
  CHECK(encode(enc, b, &mask) == before);
  CHECK_FALSE(encode(enc, b) == encode(enc, b, &mask));
}

TEST_CASE("pruned-branch gradient is zero at masked entries, dense branch still reaches them") {
  Rng rng(9);
  Encoder enc(3, 4, 2, rng);
  GraphBatch b = make_batch(std::vector<Graph>{testing::random_graph(5, 0.6, 3, rng)});
  PruneMask mask = derive_mask(enc, PruneStrategy::Magnitude, 0.5);
  {
    Tape t;
    t.backward(sum(encode(enc, b, &mask, t)));
  }
  const Tensor& g = enc.layers()[1].w2.grad;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mask.matrices[3].values()[i] == 0.0) CHECK(g.values()[i] == 0.0);
  for (Parameter* p : enc.parameters()) p->zero_grad();
  {
    Tape t;
    t.backward(sum(encode(enc, b, nullptr, t)));
  }
  bool any = false;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mask.matrices[3].values()[i] == 0.0 && g.values()[i] != 0.0) any = true;
  CHECK(any);
}

TEST_CASE("readout") {
  Rng rng(10);
  Tape t(false);
  SUBCASE("single-node graphs") {
    std::vector<Graph> gs{Graph(1, {}, Tensor::from_rows({{1, 2}})), Graph(1, {}, Tensor::from_rows({{3, 4}}))};
    GraphBatch b = make_batch(gs);
    CHECK(readout(t.constant(b.features), b).value() == b.features);
    CHECK(readout(t.constant(b.features), b, Readout::Mean).value() == b.features);
  }
  SUBCASE("duplicating every node doubles the sum") {
    Graph g = testing::random_graph(4, 0.5, 2, rng);
    Tensor doubled(8, 2);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 2; ++c) doubled(r, c) = g.features()(r % 4, c);
    Tensor one = readout(t.constant(g.features()), make_batch(std::vector<Graph>{g})).value();
    Tensor two = readout(t.constant(doubled), make_batch(std::vector<Graph>{Graph(8, {}, doubled)})).value();
    for (std::size_t c = 0; c < 2; ++c) CHECK(two(0, c) == doctest::Approx(2 * one(0, c)));
  }
  SUBCASE("isomorphic graphs give identical rows") {
    Encoder enc(2, 4, 3, rng);
    Graph g = testing::random_graph(6, 0.5, 2, rng);
    std::vector<int> perm{5, 3, 1, 0, 2, 4};
    GraphBatch b = make_batch(std::vector<Graph>{g, g.permuted(perm)});
    Tensor r = readout(t.constant(encode(enc, b)), b).value();
    for (std::size_t c = 0; c < 4; ++c) CHECK(r(0, c) == doctest::Approx(r(1, c)).epsilon(1e-12));
  }
}

TEST_CASE("projection head") {
  Rng rng(11);
  ProjectionHead head(3, rng);
  Tensor x = testing::random_tensor(4, 3, rng, 0.0, 1.0);
  SUBCASE("zero weights") {
    for (Parameter* p : head.parameters()) p->value.fill(0.0);
    CHECK(project(head, x) == Tensor(4, 3));
  }
  SUBCASE("identity head on non-negative input") {
    head.w1.value = Tensor::identity(3);
    head.w2.value = Tensor::identity(3);
    head.b1.value.fill(0.0);
    head.b2.value.fill(0.0);
    CHECK(project(head, x) == x);
  }
  SUBCASE("random head against matrix algebra") {
    head.b1.value = testing::random_tensor(1, 3, rng);
    head.b2.value = testing::random_tensor(1, 3, rng);
    auto h = oracle::naive_matmul(oracle::to_mat(x), oracle::naive_transpose(oracle::to_mat(head.w1.value)));
    for (auto& row : h)
      for (std::size_t k = 0; k < 3; ++k) row[k] = std::max(0.0, row[k] + head.b1.value(0, k));
    auto z = oracle::naive_matmul(h, oracle::naive_transpose(oracle::to_mat(head.w2.value)));
    for (auto& row : z)
      for (std::size_t k = 0; k < 3; ++k) row[k] += head.b2.value(0, k);
    CHECK(max_diff(z, project(head, x)) < 1e-12);
    Tape t(false);
    CHECK(project(head, t.constant(x)).value() == project(head, x));
  }
}

TEST_CASE("shape errors") {
  Rng rng(12);
  Encoder enc(3, 4, 2, rng);
  GraphBatch b = make_batch(std::vector<Graph>{testing::random_graph(4, 0.5, 2, rng)});
  CHECK_THROWS_AS(encode(enc, b), ShapeError);
  Encoder other(3, 5, 2, rng);
  PruneMask wrong = derive_mask(other, PruneStrategy::Magnitude, 0.3);
  GraphBatch ok = make_batch(std::vector<Graph>{testing::random_graph(4, 0.5, 3, rng)});
  CHECK_THROWS_AS(encode(enc, ok, &wrong), ShapeError);
}

}  // TEST_SUITE
