#pragma once

// Reference implementations for tests. Everything here works on plain nested
// vectors and deliberately shares no code with the library.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "lamp/graph.hpp"
#include "lamp/tensor.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;

Mat to_mat(const lamp::Tensor& t);
Mat naive_matmul(const Mat& a, const Mat& b);
Mat naive_transpose(const Mat& a);

/// -sum p log2 p over degree shares, evaluated term by term.
double entropy_from_degrees(const std::vector<int>& degrees);
std::vector<int> degrees_by_scan(int n, const std::vector<std::pair<int, int>>& edges);

double cosine(const std::vector<double>& a, const std::vector<double>& b, double eps = 1e-12);

/// Symmetrized graph-level loss evaluated anchor by anchor.
double nt_xent(const Mat& z1, const Mat& z2, double tau, bool include_positive);

/// Symmetrized node-level loss over the given anchors; negatives are the
/// other view's nodes belonging to a different graph.
double local_contrastive(const Mat& h1, const Mat& h2, const std::vector<int>& graph_ids,
                         const std::vector<std::size_t>& anchors, double tau);

struct DenseGinLayer {
  Mat w1, w2;            // [out x in]
  std::vector<double> b1, b2;
};

/// GIN stack via a dense adjacency matrix: H <- relu(relu((A + I) H W1^T + b1) W2^T + b2).
Mat gin_forward(int n, const std::vector<std::pair<int, int>>& edges, const Mat& x,
                const std::vector<DenseGinLayer>& layers);

/// Indices of the k entries a stable "smallest first" selection would pick,
/// found by repeated linear scans.
std::vector<std::size_t> k_smallest(const std::vector<double>& keys, std::size_t k);

/// Flat indices of the floor(gamma * size) smallest |w| (ties to the lower index).
std::vector<std::size_t> magnitude_zero_set(const Mat& w, double gamma);
/// Row indices of the floor(gamma * rows) smallest L2 row norms (ties to the lower row).
std::vector<std::size_t> soft_filter_zero_rows(const Mat& w, double gamma);

/// Central difference of f with respect to x, restoring x afterwards.
double central_difference(const std::function<double()>& f, double& x, double h);

/// |a - b| / max(|a|, |b|, floor)
double relative_error(double analytic, double numeric, double floor);

}  // namespace oracle
