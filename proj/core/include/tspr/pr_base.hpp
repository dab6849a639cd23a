#pragma once

#include <cstdint>
#include <functional>

#include "tspr/linop.hpp"

namespace tspr {

// Normalization used by the spectral threshold: kMagnitude is
// sqrt(mean(y)), kIntensity is sqrt(mean(y^2)).
enum class LambdaConvention { kMagnitude, kIntensity };

struct SpectralInitConfig {
  double alpha = 3.0;
  int power_iters = 200;
  double power_tol = 1e-6;
  LambdaConvention lambda_convention = LambdaConvention::kMagnitude;
};

struct RwfConfig {
  int iters = 25;
  double step = 0.8;
};

// c/|c| with phase(0) = 1.
inline Cx phase(Cx c) {
  const double a = std::abs(c);
  return a == 0.0 ? Cx(1.0, 0.0) : c / a;
}

struct EigResult {
  Vec v;                    // unit norm
  double value = 0.0;       // Rayleigh quotient at v
  bool degenerate = false;  // zero operator: v is the (normalized) random start
};

// Power iteration for the leading eigenvector of a Hermitian PSD action.
// Converges when ||Y v - rho v|| <= power_tol * rho.
EigResult leading_eigvec(const std::function<Vec(const Vec&)>& apply, Index dim,
                         const SpectralInitConfig& cfg, std::uint64_t start_seed);

// Orthogonal iteration for an r-dimensional leading invariant subspace of a
// Hermitian PSD action; returns an orthonormal basis.
Mat top_eigvecs(const std::function<Vec(const Vec&)>& apply, Index dim, Index r, int iters,
                double tol, std::uint64_t start_seed);

struct FrameInit {
  Vec x0;
  double lambda = 0.0;
  Index retained = 0;  // measurements kept by the truncation indicator
  bool degenerate = false;
};

// Truncated spectral initialization of a single frame: leading eigenvector of
// (1/m) sum_i w_i a_i a_i^H with w_i = y_i^2 1{y_i^2 <= alpha^2 lambda^2},
// scaled to sqrt(m n / sum_i ||a_i||^2) * lambda.
FrameInit twf_init_frame(const RVec& y, const LinearMap& op, const RVec& row_norms_sq,
                         const SpectralInitConfig& cfg, std::uint64_t start_seed);

// Reshaped Wirtinger flow from a warm start:
// x <- x - (step/m) * A (A^H x - y .* phase(A^H x)).
// The residual is formed as z .* (1 - y ./ |z|) (and -y where z = 0), which
// is exactly zero wherever y == |z|.
Vec rwf(const RVec& y, const LinearMap& op, const Vec& x0, const RwfConfig& cfg);

}  // namespace tspr
