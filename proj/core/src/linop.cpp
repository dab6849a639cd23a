#include "tspr/linop.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace tspr {

LinearMap dense_map(std::shared_ptr<const Mat> a) {
  if (!a) throw std::invalid_argument("dense_map: null matrix");
  LinearMap m;
  m.in_dim = a->cols();
  m.out_dim = a->rows();
  m.forward = [a](const Vec& x) -> Vec { return (*a) * x; };
  m.adjoint = [a](const Vec& u) -> Vec { return a->adjoint() * u; };
  return m;
}

LinearMap stacked_map(std::vector<LinearMap> blocks) {
  if (blocks.empty()) throw std::invalid_argument("stacked_map: no blocks");
  const Index in = blocks.front().in_dim;
  Index out = 0;
  for (const auto& b : blocks) {
    if (b.in_dim != in) throw std::invalid_argument("stacked_map: blocks disagree on in_dim");
    out += b.out_dim;
  }
  auto shared = std::make_shared<std::vector<LinearMap>>(std::move(blocks));
  LinearMap m;
  m.in_dim = in;
  m.out_dim = out;
  m.forward = [shared, out](const Vec& x) -> Vec {
    Vec y(out);
    Index at = 0;
    for (const auto& b : *shared) {
      y.segment(at, b.out_dim) = b.forward(x);
      at += b.out_dim;
    }
    return y;
  };
  m.adjoint = [shared, in](const Vec& u) -> Vec {
    Vec y = Vec::Zero(in);
    Index at = 0;
    for (const auto& b : *shared) {
      y += b.adjoint(u.segment(at, b.out_dim));
      at += b.out_dim;
    }
    return y;
  };
  return m;
}

Mat materialize(const LinearMap& map) {
  Mat m(map.out_dim, map.in_dim);
  Vec e = Vec::Zero(map.in_dim);
  for (Index j = 0; j < map.in_dim; ++j) {
    e[j] = 1.0;
    m.col(j) = map.forward(e);
    e[j] = 0.0;
  }
  return m;
}

CglsResult cgls(const LinearMap& L, const Vec& b, const Vec& x0, const CglsConfig& cfg) {
  if (b.size() != L.out_dim) throw std::invalid_argument("cgls: b length must equal out_dim");
  if (x0.size() != L.in_dim) throw std::invalid_argument("cgls: x0 length must equal in_dim");
  if (cfg.max_iters < 0) throw std::invalid_argument("cgls: max_iters must be >= 0");

  CglsResult res;
  res.x = x0;
  Vec r = b - L.forward(res.x);
  res.residual_norms.push_back(r.norm());

  const double target = cfg.rel_tolerance * L.adjoint(b).norm();

  Vec s = L.adjoint(r);
  double gamma = s.squaredNorm();
  if (std::sqrt(gamma) <= target) {
    res.converged = true;
    return res;
  }

  Vec p = s;
  for (int t = 0; t < cfg.max_iters; ++t) {
    Vec w = L.forward(p);
    const double denom = w.squaredNorm();
    if (denom == 0.0) break;  // p in the nullspace of L; cannot make progress
    const double alpha = gamma / denom;
    Vec r_next = r - alpha * w;
    const double rn = r_next.norm();
    if (rn > res.residual_norms.back()) break;  // fp stagnation; keep the better iterate
    res.x += alpha * p;
    r = std::move(r_next);
    res.residual_norms.push_back(rn);
    ++res.iterations;
    s = L.adjoint(r);
    const double gamma_next = s.squaredNorm();
    if (std::sqrt(gamma_next) <= target) {
      res.converged = true;
      return res;
    }
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  res.converged = std::sqrt(gamma) <= target;
  return res;
}

}  // namespace tspr
