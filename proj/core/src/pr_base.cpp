#include "tspr/pr_base.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

#include "tspr/rng.hpp"

namespace tspr {

namespace {

Vec random_unit(Index dim, std::uint64_t seed) {
  auto gen = std::mt19937_64(seed);
  Vec v = rng::complex_gaussian(dim, gen);
  const double nv = v.norm();
  if (nv == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / nv;
}

}  // namespace

EigResult leading_eigvec(const std::function<Vec(const Vec&)>& apply, Index dim,
                         const SpectralInitConfig& cfg, std::uint64_t start_seed) {
  if (dim <= 0) throw std::invalid_argument("leading_eigvec: dim must be positive");
  EigResult res;
  res.v = random_unit(dim, start_seed);
  for (int t = 0; t < cfg.power_iters; ++t) {
    Vec w = apply(res.v);
    const double wn = w.norm();
    if (wn == 0.0) {
      res.value = 0.0;
      res.degenerate = true;
      return res;
    }
    const double rho = res.v.dot(w).real();
    res.value = rho;
    if ((w - rho * res.v).norm() <= cfg.power_tol * rho) return res;
    res.v = w / wn;
  }
  // Out of budget: report the Rayleigh quotient of the final iterate.
  Vec w = apply(res.v);
  res.value = res.v.dot(w).real();
  res.degenerate = w.norm() == 0.0;
  return res;
}

Mat top_eigvecs(const std::function<Vec(const Vec&)>& apply, Index dim, Index r, int iters,
                double tol, std::uint64_t start_seed) {
  if (dim <= 0 || r <= 0 || r > dim)
    throw std::invalid_argument("top_eigvecs: need 0 < r <= dim");
  auto gen = std::mt19937_64(start_seed);
  Mat q = rng::complex_gaussian_matrix(dim, r, gen);
  q = Eigen::HouseholderQR<Mat>(q).householderQ() * Mat::Identity(dim, r);
  for (int t = 0; t < iters; ++t) {
    Mat z(dim, r);
    for (Index j = 0; j < r; ++j) z.col(j) = apply(q.col(j));
    if (z.norm() == 0.0) return q;  // zero operator; the start is as good as any
    Mat proj = q.adjoint() * z;
    if ((z - q * proj).norm() <= tol * proj.norm()) return q;
    q = Eigen::HouseholderQR<Mat>(z).householderQ() * Mat::Identity(dim, r);
  }
  return q;
}

FrameInit twf_init_frame(const RVec& y, const LinearMap& op, const RVec& row_norms_sq,
                         const SpectralInitConfig& cfg, std::uint64_t start_seed) {
  const Index m = y.size();
  const Index n = op.in_dim;
  if (op.out_dim != m) throw std::invalid_argument("twf_init_frame: op/y size mismatch");
  if (row_norms_sq.size() != m)
    throw std::invalid_argument("twf_init_frame: row_norms_sq/y size mismatch");
  if ((y.array() < 0.0).any())
    throw std::invalid_argument("twf_init_frame: observations must be nonnegative");

  FrameInit res;
  res.lambda = cfg.lambda_convention == LambdaConvention::kMagnitude
                   ? std::sqrt(y.mean())
                   : std::sqrt(y.squaredNorm() / static_cast<double>(m));

  // retained counts the indicator, so y_i = 0 rows count even though their
  // weight vanishes.
  const double cut = cfg.alpha * cfg.alpha * res.lambda * res.lambda;
  RVec w(m);
  for (Index i = 0; i < m; ++i) {
    const double yi2 = y[i] * y[i];
    w[i] = yi2 <= cut ? yi2 : 0.0;
    if (yi2 <= cut) ++res.retained;
  }

  auto surrogate = [&](const Vec& v) -> Vec {
    Vec z = op.forward(v);
    z.array() *= w.array();
    return op.adjoint(z) / static_cast<double>(m);
  };
  EigResult eig = leading_eigvec(surrogate, n, cfg, start_seed);
  res.degenerate = eig.degenerate || res.lambda == 0.0;

  const double energy = row_norms_sq.sum();
  const double scale =
      energy > 0.0 ? std::sqrt(static_cast<double>(m * n) / energy) : 0.0;
  res.x0 = (scale * res.lambda) * eig.v;
  return res;
}

Vec rwf(const RVec& y, const LinearMap& op, const Vec& x0, const RwfConfig& cfg) {
  const Index m = y.size();
  if (op.out_dim != m) throw std::invalid_argument("rwf: op/y size mismatch");
  if (x0.size() != op.in_dim) throw std::invalid_argument("rwf: x0 length must equal in_dim");
  if (cfg.iters < 0) throw std::invalid_argument("rwf: iters must be >= 0");

  Vec x = x0;
  const double scale = cfg.step / static_cast<double>(m);
  for (int t = 0; t < cfg.iters; ++t) {
    Vec z = op.forward(x);
    Vec r(m);
    for (Index i = 0; i < m; ++i) {
      const double az = std::abs(z[i]);
      r[i] = az == 0.0 ? Cx(-y[i], 0.0) : z[i] * (1.0 - y[i] / az);
    }
    x -= scale * op.adjoint(r);
  }
  return x;
}

}  // namespace tspr
