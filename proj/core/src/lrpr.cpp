#include "tspr/lrpr.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "tspr/errors.hpp"
#include "tspr/rng.hpp"

namespace tspr {

namespace {

void require_observations(const MeasurementEnsemble& ens) {
  if (!ens.has_observations())
    throw std::invalid_argument("ensemble has no observations attached");
}

void check_rank(const MeasurementEnsemble& ens, Index r) {
  if (r < 1 || r > std::min(ens.n, ens.q))
    throw std::invalid_argument("rank must satisfy 1 <= r <= min(n, q)");
}

void check_objective(const std::vector<double>& obj) {
  if (!std::isfinite(obj.back()))
    throw NumericalError("objective became non-finite at iteration " +
                         std::to_string(obj.size() - 1));
}

}  // namespace

std::vector<FrameInit> frame_inits(const MeasurementEnsemble& ens,
                                   const SpectralInitConfig& cfg) {
  require_observations(ens);
  std::vector<FrameInit> inits;
  inits.reserve(ens.q);
  for (Index k = 0; k < ens.q; ++k)
    inits.push_back(twf_init_frame(
        ens.observations[k], ens.ops[k], ens.row_norms_sq[k], cfg,
        rng::derive(ens.seed, rng::Stream::kFrameInit, static_cast<std::uint64_t>(k))));
  return inits;
}

SubspaceInit init_U(const MeasurementEnsemble& ens, Index r, const LrprConfig& cfg) {
  require_observations(ens);
  check_rank(ens, r);
  const double mq = static_cast<double>(ens.m) * static_cast<double>(ens.q);

  double total = 0.0;
  for (Index k = 0; k < ens.q; ++k) total += ens.observations[k].squaredNorm();
  const double cut = cfg.init.alpha * cfg.init.alpha / mq * total;

  std::vector<RVec> w(ens.q);
  double weight_mass = 0.0;
  for (Index k = 0; k < ens.q; ++k) {
    w[k] = RVec::Zero(ens.m);
    for (Index i = 0; i < ens.m; ++i) {
      const double yi2 = ens.observations[k][i] * ens.observations[k][i];
      if (yi2 <= cut) {
        w[k][i] = yi2;
        weight_mass += yi2;
      }
    }
  }

  SubspaceInit res;
  if (weight_mass == 0.0) {
    auto gen = rng::substream(ens.seed, rng::Stream::kSubspaceInit);
    Mat g = rng::complex_gaussian_matrix(ens.n, r, gen);
    res.U = Eigen::HouseholderQR<Mat>(g).householderQ() * Mat::Identity(ens.n, r);
    res.degenerate = true;
    return res;
  }

  auto surrogate = [&](const Vec& v) -> Vec {
    Vec acc = Vec::Zero(ens.n);
    for (Index k = 0; k < ens.q; ++k) {
      Vec z = ens.ops[k].forward(v);
      z.array() *= w[k].array();
      acc += ens.ops[k].adjoint(z);
    }
    return acc / mq;
  };
  res.U = top_eigvecs(surrogate, ens.n, r, cfg.subspace_iters, cfg.subspace_tol,
                      rng::derive(ens.seed, rng::Stream::kSubspaceInit));
  return res;
}

LinearMap b_frame_map(const LinearMap& op, const Mat& u) {
  LinearMap m;
  m.in_dim = u.cols();
  m.out_dim = op.out_dim;
  m.forward = [op, u](const Vec& b) -> Vec { return op.forward(u * b); };
  m.adjoint = [op, u](const Vec& w) -> Vec { return u.adjoint() * op.adjoint(w); };
  return m;
}

LinearMap u_frame_map(const LinearMap& op, const Vec& b) {
  const Index n = op.in_dim;
  const Index r = b.size();
  LinearMap m;
  m.in_dim = n * r;
  m.out_dim = op.out_dim;
  m.forward = [op, b, n, r](const Vec& u) -> Vec {
    Eigen::Map<const Mat> um(u.data(), n, r);
    return op.forward(um * b);
  };
  m.adjoint = [op, b, n, r](const Vec& w) -> Vec {
    Mat g = op.adjoint(w) * b.adjoint();
    return Eigen::Map<const Vec>(g.data(), n * r);
  };
  return m;
}

Mat update_B(const MeasurementEnsemble& ens, const Mat& u, const Mat& b_prev,
             const RwfConfig& cfg) {
  require_observations(ens);
  if (u.rows() != ens.n) throw std::invalid_argument("update_B: U rows must equal n");
  if (b_prev.rows() != ens.q || b_prev.cols() != u.cols())
    throw std::invalid_argument("update_B: B must be q x r");
  // The RWF step is calibrated for sensing vectors with identity covariance;
  // the effective vectors U^H a have second moment U^H U, so divide the step
  // by its largest eigenvalue (a no-op while U stays orthonormal).
  Eigen::SelfAdjointEigenSolver<Mat> eig(u.adjoint() * u);
  const double lam_max = eig.eigenvalues().maxCoeff();
  RwfConfig scaled = cfg;
  if (lam_max > 0.0) scaled.step = cfg.step / lam_max;

  Mat b_next(ens.q, u.cols());
  for (Index k = 0; k < ens.q; ++k) {
    LinearMap eff = b_frame_map(ens.ops[k], u);
    Vec bk = rwf(ens.observations[k], eff, b_prev.row(k).adjoint(), scaled);
    b_next.row(k) = bk.adjoint();
  }
  return b_next;
}

PhaseState update_phases(const MeasurementEnsemble& ens, const Mat& x) {
  if (x.rows() != ens.n || x.cols() != ens.q)
    throw std::invalid_argument("update_phases: frames must be n x q");
  PhaseState st;
  st.c.reserve(ens.q);
  for (Index k = 0; k < ens.q; ++k) {
    Vec z = ens.ops[k].forward(x.col(k));
    for (Index i = 0; i < z.size(); ++i) z[i] = phase(z[i]);
    st.c.push_back(std::move(z));
  }
  return st;
}

double phase_objective(const MeasurementEnsemble& ens, const PhaseState& phases, const Mat& x) {
  require_observations(ens);
  if (x.rows() != ens.n || x.cols() != ens.q)
    throw std::invalid_argument("phase_objective: frames must be n x q");
  double obj = 0.0;
  for (Index k = 0; k < ens.q; ++k) {
    Vec target = phases.c[k].cwiseProduct(ens.observations[k].cast<Cx>());
    obj += (target - ens.ops[k].forward(x.col(k))).squaredNorm();
  }
  return obj;
}

Mat update_U(const MeasurementEnsemble& ens, const PhaseState& phases, const Mat& b,
             const Mat& u_prev, const CglsConfig& cfg) {
  require_observations(ens);
  const Index n = ens.n;
  const Index r = b.cols();
  if (u_prev.rows() != n || u_prev.cols() != r)
    throw std::invalid_argument("update_U: U must be n x r");

  std::vector<LinearMap> blocks;
  blocks.reserve(ens.q);
  Vec rhs(ens.m * ens.q);
  for (Index k = 0; k < ens.q; ++k) {
    blocks.push_back(u_frame_map(ens.ops[k], b.row(k).adjoint()));
    rhs.segment(k * ens.m, ens.m) = phases.c[k].cwiseProduct(ens.observations[k].cast<Cx>());
  }
  LinearMap sys = stacked_map(std::move(blocks));
  Vec warm = Eigen::Map<const Vec>(u_prev.data(), n * r);
  CglsResult sol = cgls(sys, rhs, warm, cfg);
  return Eigen::Map<const Mat>(sol.x.data(), n, r);
}

namespace {

LrprResult altmin_common(const MeasurementEnsemble& ens, const LrprConfig& cfg,
                         bool joint_subspace) {
  require_observations(ens);
  check_rank(ens, cfg.r);
  if (cfg.T < 0) throw std::invalid_argument("T must be >= 0");

  LrprResult res;
  std::vector<FrameInit> inits = frame_inits(ens, cfg.init);
  for (Index k = 0; k < ens.q; ++k)
    if (inits[k].degenerate) res.degenerate_frames.push_back(k);

  if (joint_subspace) {
    SubspaceInit si = init_U(ens, cfg.r, cfg);
    res.factors.U = si.U;
    res.init_degenerate = si.degenerate;
  } else {
    Mat stacked(ens.n, ens.q);
    for (Index k = 0; k < ens.q; ++k) stacked.col(k) = inits[k].x0;
    if (stacked.norm() == 0.0) {
      res.factors.U = Mat::Identity(ens.n, cfg.r);
      res.init_degenerate = true;
    } else {
      Eigen::BDCSVD<Mat> svd(stacked, Eigen::ComputeThinU);
      res.factors.U = svd.matrixU().leftCols(cfg.r);
    }
  }

  res.factors.B.resize(ens.q, cfg.r);
  for (Index k = 0; k < ens.q; ++k)
    res.factors.set_coeff(k, res.factors.U.adjoint() * inits[k].x0);

  res.X = res.factors.frames();
  PhaseState phases = update_phases(ens, res.X);
  res.objective.push_back(phase_objective(ens, phases, res.X));
  check_objective(res.objective);

  for (int t = 0; t < cfg.T; ++t) {
    res.factors.B = update_B(ens, res.factors.U, res.factors.B, cfg.rwf);
    res.X = res.factors.frames();
    phases = update_phases(ens, res.X);
    res.factors.U = update_U(ens, phases, res.factors.B, res.factors.U, cfg.cgls);
    if (cfg.reorthonormalize_U) {
      Eigen::HouseholderQR<Mat> qr(res.factors.U);
      Mat qthin = qr.householderQ() * Mat::Identity(ens.n, cfg.r);
      // Fold the triangular factor into B so the frames are unchanged.
      Mat rfac = qthin.adjoint() * res.factors.U;
      res.factors.U = std::move(qthin);
      res.factors.B = res.factors.B * rfac.adjoint();
    }
    res.X = res.factors.frames();
    res.objective.push_back(phase_objective(ens, phases, res.X));
    check_objective(res.objective);
  }
  return res;
}

}  // namespace

LrprResult altmin_lowrap(const MeasurementEnsemble& ens, const LrprConfig& cfg) {
  return altmin_common(ens, cfg, true);
}

LrprResult altmin_trunc(const MeasurementEnsemble& ens, const LrprConfig& cfg) {
  return altmin_common(ens, cfg, false);
}

}  // namespace tspr
