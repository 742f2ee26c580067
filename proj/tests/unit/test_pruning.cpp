#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "lamp/encoder.hpp"
#include "lamp/error.hpp"
#include "lamp/pruning.hpp"
#include "oracles.hpp"

using namespace lamp;

namespace {

std::vector<std::size_t> zero_set(const Tensor& mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask.values()[i] == 0.0) out.push_back(i);
  return out;
}

}  // namespace

TEST_SUITE("pruning") {

TEST_CASE("magnitude examples") {
  Tensor w = Tensor::from_rows({{0.1, -0.5, 0.3, -0.2}});
  CHECK(magnitude_mask_matrix(w, 0.5) == Tensor::from_rows({{0, 1, 1, 0}}));
  CHECK(magnitude_mask_matrix(w, 0.0) == Tensor(1, 4, 1.0));
  Rng rng(1);
  Tensor big = testing::random_tensor(32, 32, rng);
  CHECK(zero_set(magnitude_mask_matrix(big, 0.95)).size() == 972);
}

TEST_CASE("magnitude ties go to the lower flat index") {
  Tensor w = Tensor::from_rows({{0.5, 0.5, 0.5, 0.5}});
  CHECK(magnitude_mask_matrix(w, 0.5) == Tensor::from_rows({{0, 0, 1, 1}}));
}

TEST_CASE("soft filter examples") {
  Tensor w = Tensor::from_rows({{3.0, 0.0}, {0.1, 0.0}, {0.0, 2.0}});
  CHECK(soft_filter_mask_matrix(w, 1.0 / 3.0) == Tensor::from_rows({{1, 1}, {0, 0}, {1, 1}}));
  CHECK(soft_filter_mask_matrix(w, 0.0) == Tensor(3, 2, 1.0));
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor r = testing::random_tensor(8, 4, rng);
    Tensor m = soft_filter_mask_matrix(r, 0.5);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < 8; ++i)
      if (m(i, 0) == 0.0) rows.push_back(i);
    CHECK(rows == oracle::soft_filter_zero_rows(oracle::to_mat(r), 0.5));
  }
}

TEST_CASE("magnitude agrees with the selection oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    Tensor w = testing::random_tensor(1 + rng.uniform_index(9), 1 + rng.uniform_index(9), rng);
    if (trial % 3 == 0) w.values()[0] = w.values()[w.size() - 1];  // force a tie now and then
    const double gamma = 0.05 * static_cast<double>(rng.uniform_index(20));
    CHECK(zero_set(magnitude_mask_matrix(w, gamma)) == oracle::magnitude_zero_set(oracle::to_mat(w), gamma));
  }
}

TEST_CASE("exact counts across the gamma grid") {
  Rng rng(4);
  Encoder enc(7, 32, 3, rng);
  for (int k = 0; k < 20; ++k) {
    const double gamma = 0.05 * k;
    PruneMask mag = derive_mask(enc, PruneStrategy::Magnitude, gamma);
    PruneMask soft = derive_mask(enc, PruneStrategy::SoftFilter, gamma);
    for (std::size_t i = 0; i < mag.matrices.size(); ++i) {
      const Tensor& m = mag.matrices[i];
      CHECK(zero_set(m).size() == static_cast<std::size_t>(std::floor(gamma * m.size() + 1e-9)));
      const Tensor& s = soft.matrices[i];
      std::size_t zero_rows = 0;
      for (std::size_t r = 0; r < s.rows(); ++r) {
        double total = 0.0;
        for (double v : s.row(r)) total += v;
        CHECK((total == 0.0 || total == static_cast<double>(s.cols())));
        zero_rows += total == 0.0;
      }
      CHECK(zero_rows == static_cast<std::size_t>(std::floor(gamma * s.rows() + 1e-9)));
    }
  }
}

TEST_CASE("idempotence and nesting") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Tensor w = testing::random_tensor(6, 5, rng);
    Tensor m = magnitude_mask_matrix(w, 0.4);
    CHECK(apply_mask(apply_mask(w, m), m) == apply_mask(w, m));
    for (double g1 = 0.0; g1 < 0.95; g1 += 0.1) {
      auto small = zero_set(magnitude_mask_matrix(w, g1));
      auto large = zero_set(magnitude_mask_matrix(w, g1 + 0.05));
      CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    }
  }
}

TEST_CASE("apply_mask examples") {
  Rng rng(6);
  Tensor w = testing::random_tensor(3, 3, rng);
  CHECK(apply_mask(w, Tensor(3, 3, 1.0)) == w);
  CHECK(apply_mask(w, Tensor(3, 3, 0.0)) == Tensor(3, 3));
  CHECK_THROWS_AS(apply_mask(w, Tensor(2, 3, 1.0)), ShapeError);
}

TEST_CASE("sparsity") {
  PruneMask one;
  one.matrices = {Tensor::from_rows({{0, 1, 1, 0}})};
  CHECK(sparsity(one) == 0.5);
  Rng rng(7);
  Encoder enc(3, 8, 2, rng);
  CHECK(sparsity(derive_mask(enc, PruneStrategy::Magnitude, 0.0)) == 0.0);
  PruneMask m = derive_mask(enc, PruneStrategy::Magnitude, 0.3);
  CHECK(std::abs(sparsity(m) - 0.3) <= 1.0 / 24.0);
}

TEST_CASE("invalid gamma") {
  Rng rng(8);
  Encoder enc(3, 4, 2, rng);
  CHECK_THROWS_AS(derive_mask(enc, PruneStrategy::Magnitude, 1.0), ArgumentError);
  CHECK_THROWS_AS(derive_mask(enc, PruneStrategy::SoftFilter, -0.1), ArgumentError);
}

TEST_CASE("an inflated masked weight is unmasked at re-derivation") {
  Rng rng(9);
  Encoder enc(4, 6, 2, rng);
  for (auto strategy : {PruneStrategy::Magnitude, PruneStrategy::SoftFilter}) {
    PruneMask before = derive_mask(enc, strategy, 0.5, 1);
    const auto zeros = zero_set(before.matrices[0]);
    REQUIRE_FALSE(zeros.empty());
    const std::size_t idx = zeros.front();
    enc.layers()[0].w1.value.values()[idx] = 50.0;
    PruneMask after = derive_mask(enc, strategy, 0.5, 2);
    CHECK(after.matrices[0].values()[idx] == 1.0);
    CHECK(after.epoch_derived == 2);
  }
}

TEST_CASE("soft filter masks are unions of whole rows") {
  Rng rng(10);
  Encoder enc(5, 8, 3, rng);
  PruneMask m = derive_mask(enc, PruneStrategy::SoftFilter, 0.35);
  for (const Tensor& t : m.matrices)
    for (std::size_t r = 0; r < t.rows(); ++r)
      for (std::size_t c = 1; c < t.cols(); ++c) CHECK(t(r, c) == t(r, 0));
}

TEST_CASE("mask json export") {
  Rng rng(11);
  Encoder enc(3, 4, 2, rng);
  PruneMask m = derive_mask(enc, PruneStrategy::Magnitude, 0.25, 3);
  auto j = nlohmann::json::parse(mask_json(m));
  CHECK(j["epoch"] == 3);
  CHECK(j["strategy"] == "magnitude");
  CHECK(j["masks"]["encoder.layers.0.w1"].size() == 12);
  CHECK(parse_prune_strategy("soft_filter") == PruneStrategy::SoftFilter);
  CHECK_FALSE(parse_prune_strategy("global").has_value());
}

}  // TEST_SUITE
