#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "tspr/types.hpp"

namespace tspr {

// Matrix-free linear operator C^in_dim -> C^out_dim; adjoint applies the
// conjugate transpose.  Both callables must be set before use.
struct LinearMap {
  Index in_dim = 0;
  Index out_dim = 0;
  std::function<Vec(const Vec&)> forward;
  std::function<Vec(const Vec&)> adjoint;
};

// Wraps an explicit matrix (shared so captures stay cheap).
LinearMap dense_map(std::shared_ptr<const Mat> a);
inline LinearMap dense_map(Mat a) { return dense_map(std::make_shared<const Mat>(std::move(a))); }

// Vertical concatenation: forward stacks the blocks' outputs, adjoint sums
// the blocks' adjoints over the matching output segments.  All blocks must
// share in_dim.
LinearMap stacked_map(std::vector<LinearMap> blocks);

// Applies forward to the canonical basis; intended for tests / small systems.
Mat materialize(const LinearMap& map);

struct CglsConfig {
  int max_iters = 50;
  double rel_tolerance = 1e-8;
};

struct CglsResult {
  Vec x;
  // ||b - L x_t|| for t = 0..iterations (entry 0 is the warm-start residual).
  std::vector<double> residual_norms;
  int iterations = 0;
  bool converged = false;
};

// Conjugate gradient on the normal equations for min_x ||b - L x||, started
// from x0.  Stops when ||L^H (b - L x)|| <= rel_tolerance * ||L^H b|| or after
// max_iters steps; a step that would increase the data residual is rolled
// back, so the recorded residual_norms are non-increasing.
CglsResult cgls(const LinearMap& L, const Vec& b, const Vec& x0, const CglsConfig& cfg = {});

}  // namespace tspr
