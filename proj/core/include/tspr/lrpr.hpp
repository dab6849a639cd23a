#pragma once

#include "tspr/measurement.hpp"
#include "tspr/pr_base.hpp"

namespace tspr {

// Low-rank pair X = U B^H with U (n x r) and B (q x r).  Row k of B stores
// b_k^H, so x_k = U b_k is column k of U B^H; coeff()/set_coeff() hide that
// conjugation.
struct LowRankFactors {
  Mat U;
  Mat B;

  Vec coeff(Index k) const { return B.row(k).adjoint(); }
  void set_coeff(Index k, const Vec& b) { B.row(k) = b.adjoint(); }
  Vec frame(Index k) const { return U * coeff(k); }
  Mat frames() const { return U * B.adjoint(); }
};

// Unit-modulus measurement phases, c_k = diag(C_k).
struct PhaseState {
  std::vector<Vec> c;
};

struct LrprConfig {
  Index r = 1;
  int T = 20;
  SpectralInitConfig init;
  RwfConfig rwf;
  CglsConfig cgls;
  int subspace_iters = 200;
  double subspace_tol = 1e-6;
  // Re-orthonormalize U (thin QR) after each CGLS update; off leaves U as the
  // plain least-squares iterate.
  bool reorthonormalize_U = false;
};

// Truncated spectral initialization of every frame (start seeds derive from
// the ensemble seed and the frame index).
std::vector<FrameInit> frame_inits(const MeasurementEnsemble& ens,
                                   const SpectralInitConfig& cfg);

struct SubspaceInit {
  Mat U;  // n x r orthonormal
  bool degenerate = false;
};

// Top-r eigenvectors of the jointly truncated surrogate
// (1/(mq)) sum_{i,k} y_{i,k}^2 a_{i,k} a_{i,k}^H 1{y_{i,k}^2 <= threshold}.
SubspaceInit init_U(const MeasurementEnsemble& ens, Index r, const LrprConfig& cfg);

// Effective per-frame sensing map b -> A_k^H (U b) used by the coefficient
// update; U is captured by value.
LinearMap b_frame_map(const LinearMap& op, const Mat& u);

// Per-frame block of the subspace least-squares: vec(U) -> A_k^H (U b).
LinearMap u_frame_map(const LinearMap& op, const Vec& b);

// One RWF pass per frame over the effective r-dimensional problem; rows of
// the result store the updated b_k^H.
Mat update_B(const MeasurementEnsemble& ens, const Mat& u, const Mat& b_prev,
             const RwfConfig& cfg);

// c_k = phase(A_k^H x_k) for every frame (columns of x).
PhaseState update_phases(const MeasurementEnsemble& ens, const Mat& x);

// sum_k ||c_k .* y_k - A_k^H x_k||^2.
double phase_objective(const MeasurementEnsemble& ens, const PhaseState& phases, const Mat& x);

// Stacked CGLS solve for U with phases and coefficients fixed, warm-started
// at u_prev.
Mat update_U(const MeasurementEnsemble& ens, const PhaseState& phases, const Mat& b,
             const Mat& u_prev, const CglsConfig& cfg);

struct LrprResult {
  LowRankFactors factors;
  Mat X;  // n x q
  std::vector<double> objective;  // length T + 1 (entry 0 is at the init)
  bool init_degenerate = false;
  std::vector<Index> degenerate_frames;
};

// Alternating minimization with the joint spectral subspace init.
LrprResult altmin_lowrap(const MeasurementEnsemble& ens, const LrprConfig& cfg);

// Same loop, but U^0 comes from the truncated SVD of the stacked per-frame
// spectral inits.
LrprResult altmin_trunc(const MeasurementEnsemble& ens, const LrprConfig& cfg);

}  // namespace tspr
