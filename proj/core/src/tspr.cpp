#include "tspr/tspr.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "tspr/errors.hpp"

namespace tspr {

namespace {

void check_geometry(const MeasurementEnsemble& ens, Index n1, Index n2) {
  if (n1 <= 0 || n2 <= 0 || n1 * n2 != ens.n)
    throw std::invalid_argument("frame geometry must satisfy n1 * n2 == ensemble n");
}

void check_ranks(std::array<Index, 3> ranks, Index n1, Index n2, Index q) {
  const Index dims[3] = {n1, n2, q};
  for (int i = 0; i < 3; ++i)
    if (ranks[i] < 1 || ranks[i] > dims[i])
      throw std::invalid_argument("tucker rank out of range for its dimension");
}

}  // namespace

TuckerFactors tspr_init(const MeasurementEnsemble& ens, Index n1, Index n2,
                        std::array<Index, 3> ranks, const SpectralInitConfig& cfg,
                        std::vector<Index>* degenerate) {
  check_geometry(ens, n1, n2);
  check_ranks(ranks, n1, n2, ens.q);
  std::vector<FrameInit> inits = frame_inits(ens, cfg);
  ComplexTensor3 x0(n1, n2, ens.q);
  for (Index k = 0; k < ens.q; ++k) x0.set_frame_vec(k, inits[k].x0);
  if (degenerate) {
    degenerate->clear();
    for (Index k = 0; k < ens.q; ++k)
      if (inits[k].degenerate) degenerate->push_back(k);
  }
  return hosvd(x0, ranks[0], ranks[1], ranks[2]);
}

Mat core_contraction(const TuckerFactors& f, Index k) {
  const auto r = f.core.dims();
  if (k < 0 || k >= f.F.rows()) throw std::out_of_range("core_contraction: frame out of range");
  if (f.F.cols() != r[2])
    throw std::invalid_argument("core_contraction: F columns must equal r3");
  Mat g = Mat::Zero(r[0], r[1]);
  for (Index t = 0; t < r[2]; ++t) g += f.F(k, t) * f.core.frame(t);
  return g;
}

Vec frame_from_factors(const TuckerFactors& f, Index k) {
  Mat x = f.D * core_contraction(f, k) * f.E.transpose();
  return Eigen::Map<const Vec>(x.data(), x.size());
}

Mat frames_matrix(const TuckerFactors& f) {
  const Index n = f.D.rows() * f.E.rows();
  Mat x(n, f.F.rows());
  for (Index k = 0; k < f.F.rows(); ++k) x.col(k) = frame_from_factors(f, k);
  return x;
}

LinearMap f_row_map(const LinearMap& op, const TuckerFactors& f) {
  const Mat d = f.D;
  const Mat e = f.E;
  const ComplexTensor3 core = f.core;
  const auto r = core.dims();
  LinearMap m;
  m.in_dim = r[2];
  m.out_dim = op.out_dim;
  m.forward = [op, d, e, core, r](const Vec& fr) -> Vec {
    Mat g = Mat::Zero(r[0], r[1]);
    for (Index t = 0; t < r[2]; ++t) g += fr[t] * core.frame(t);
    Mat x = d * g * e.transpose();
    return op.forward(Eigen::Map<const Vec>(x.data(), x.size()));
  };
  m.adjoint = [op, d, e, core, r](const Vec& u) -> Vec {
    Vec z = op.adjoint(u);
    Eigen::Map<const Mat> zm(z.data(), d.rows(), e.rows());
    Mat p = d.adjoint() * zm * e.conjugate();
    Vec out(r[2]);
    Eigen::Map<const Vec> pv(p.data(), p.size());
    for (Index t = 0; t < r[2]; ++t) out[t] = core.frame_vec(t).dot(pv);
    return out;
  };
  return m;
}

LinearMap d_frame_map(const LinearMap& op, const Mat& s_k, Index n1) {
  const Index r1 = s_k.rows();
  LinearMap m;
  m.in_dim = n1 * r1;
  m.out_dim = op.out_dim;
  m.forward = [op, s_k, n1, r1](const Vec& dvec) -> Vec {
    Eigen::Map<const Mat> dm(dvec.data(), n1, r1);
    Mat x = dm * s_k;
    return op.forward(Eigen::Map<const Vec>(x.data(), x.size()));
  };
  m.adjoint = [op, s_k, n1, r1](const Vec& u) -> Vec {
    Vec z = op.adjoint(u);
    Eigen::Map<const Mat> zm(z.data(), n1, s_k.cols());
    Mat g = zm * s_k.adjoint();
    return Eigen::Map<const Vec>(g.data(), n1 * r1);
  };
  return m;
}

LinearMap e_frame_map(const LinearMap& op, const Mat& w_k, Index n2) {
  const Index r2 = w_k.cols();
  LinearMap m;
  m.in_dim = n2 * r2;
  m.out_dim = op.out_dim;
  m.forward = [op, w_k, n2, r2](const Vec& evec) -> Vec {
    Eigen::Map<const Mat> em(evec.data(), n2, r2);
    Mat x = w_k * em.transpose();
    return op.forward(Eigen::Map<const Vec>(x.data(), x.size()));
  };
  m.adjoint = [op, w_k, n2, r2](const Vec& u) -> Vec {
    Vec z = op.adjoint(u);
    Eigen::Map<const Mat> zm(z.data(), w_k.rows(), n2);
    Mat g = zm.transpose() * w_k.conjugate();
    return Eigen::Map<const Vec>(g.data(), n2 * r2);
  };
  return m;
}

LinearMap g_frame_map(const LinearMap& op, const Mat& d, const Mat& e, const Vec& f_row) {
  const Index r1 = d.cols();
  const Index r2 = e.cols();
  const Index r3 = f_row.size();
  LinearMap m;
  m.in_dim = r1 * r2 * r3;
  m.out_dim = op.out_dim;
  m.forward = [op, d, e, f_row, r1, r2, r3](const Vec& gvec) -> Vec {
    Mat g = Mat::Zero(r1, r2);
    for (Index t = 0; t < r3; ++t)
      g += f_row[t] * Eigen::Map<const Mat>(gvec.data() + r1 * r2 * t, r1, r2);
    Mat x = d * g * e.transpose();
    return op.forward(Eigen::Map<const Vec>(x.data(), x.size()));
  };
  m.adjoint = [op, d, e, f_row, r1, r2, r3](const Vec& u) -> Vec {
    Vec z = op.adjoint(u);
    Eigen::Map<const Mat> zm(z.data(), d.rows(), e.rows());
    Mat p = d.adjoint() * zm * e.conjugate();
    Vec out(r1 * r2 * r3);
    for (Index t = 0; t < r3; ++t)
      Eigen::Map<Mat>(out.data() + r1 * r2 * t, r1, r2) = std::conj(f_row[t]) * p;
    return out;
  };
  return m;
}

Mat update_F(const MeasurementEnsemble& ens, const TuckerFactors& f, const RwfConfig& cfg) {
  if (!ens.has_observations())
    throw std::invalid_argument("ensemble has no observations attached");
  // The RWF step is calibrated for sensing vectors with identity covariance,
  // but the effective row vectors here have second moment
  // conj(M3(G)) (E^H E kron D^H D) M3(G)^T, so divide the step by its largest
  // eigenvalue to keep the gradient step safe however the factors are scaled.
  Mat m3 = matricize(f.core, 3);
  Mat h = m3.conjugate() * kron(f.E.adjoint() * f.E, f.D.adjoint() * f.D) * m3.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  const double lam_max = eig.eigenvalues().maxCoeff();
  RwfConfig scaled = cfg;
  if (lam_max > 0.0) scaled.step = cfg.step / lam_max;

  Mat f_next(f.F.rows(), f.F.cols());
  for (Index k = 0; k < ens.q; ++k) {
    LinearMap eff = f_row_map(ens.ops[k], f);
    Vec fk = rwf(ens.observations[k], eff, f.F.row(k).transpose(), scaled);
    f_next.row(k) = fk.transpose();
  }
  return f_next;
}

PhaseState update_phases(const MeasurementEnsemble& ens, const TuckerFactors& f) {
  return update_phases(ens, frames_matrix(f));
}

namespace {

Vec phase_targets(const MeasurementEnsemble& ens, const PhaseState& phases) {
  Vec rhs(ens.m * ens.q);
  for (Index k = 0; k < ens.q; ++k)
    rhs.segment(k * ens.m, ens.m) =
        phases.c[k].cwiseProduct(ens.observations[k].cast<Cx>());
  return rhs;
}

}  // namespace

Mat update_D(const MeasurementEnsemble& ens, const PhaseState& phases, const TuckerFactors& f,
             const CglsConfig& cfg) {
  const Index n1 = f.D.rows();
  const Index r1 = f.D.cols();
  std::vector<LinearMap> blocks;
  blocks.reserve(ens.q);
  for (Index k = 0; k < ens.q; ++k)
    blocks.push_back(d_frame_map(ens.ops[k], core_contraction(f, k) * f.E.transpose(), n1));
  CglsResult sol = cgls(stacked_map(std::move(blocks)), phase_targets(ens, phases),
                        Eigen::Map<const Vec>(f.D.data(), n1 * r1), cfg);
  return Eigen::Map<const Mat>(sol.x.data(), n1, r1);
}

Mat update_E(const MeasurementEnsemble& ens, const PhaseState& phases, const TuckerFactors& f,
             const CglsConfig& cfg) {
  const Index n2 = f.E.rows();
  const Index r2 = f.E.cols();
  std::vector<LinearMap> blocks;
  blocks.reserve(ens.q);
  for (Index k = 0; k < ens.q; ++k)
    blocks.push_back(e_frame_map(ens.ops[k], f.D * core_contraction(f, k), n2));
  CglsResult sol = cgls(stacked_map(std::move(blocks)), phase_targets(ens, phases),
                        Eigen::Map<const Vec>(f.E.data(), n2 * r2), cfg);
  return Eigen::Map<const Mat>(sol.x.data(), n2, r2);
}

ComplexTensor3 update_G(const MeasurementEnsemble& ens, const PhaseState& phases,
                        const TuckerFactors& f, const CglsConfig& cfg) {
  const auto r = f.core.dims();
  std::vector<LinearMap> blocks;
  blocks.reserve(ens.q);
  for (Index k = 0; k < ens.q; ++k)
    blocks.push_back(g_frame_map(ens.ops[k], f.D, f.E, f.F.row(k).transpose()));
  CglsResult sol =
      cgls(stacked_map(std::move(blocks)), phase_targets(ens, phases), f.core.data(), cfg);
  return {sol.x, r[0], r[1], r[2]};
}

TsprResult tspr_run(const MeasurementEnsemble& ens, Index n1, Index n2, const TsprConfig& cfg) {
  if (cfg.T < 0) throw std::invalid_argument("T must be >= 0");
  TsprResult res;
  res.factors = tspr_init(ens, n1, n2, cfg.ranks, cfg.init, &res.degenerate_init_frames);

  PhaseState phases = update_phases(ens, res.factors);
  res.objective.push_back(phase_objective(ens, phases, frames_matrix(res.factors)));
  if (!std::isfinite(res.objective.back()))
    throw NumericalError("objective became non-finite at the initialization");

  for (int t = 0; t < cfg.T; ++t) {
    res.factors.F = update_F(ens, res.factors, cfg.rwf);
    phases = update_phases(ens, res.factors);
    res.factors.D = update_D(ens, phases, res.factors, cfg.cgls);
    res.factors.E = update_E(ens, phases, res.factors, cfg.cgls);
    res.factors.core = update_G(ens, phases, res.factors, cfg.cgls);
    res.objective.push_back(phase_objective(ens, phases, frames_matrix(res.factors)));
    if (!std::isfinite(res.objective.back()))
      throw NumericalError("objective became non-finite at iteration " + std::to_string(t + 1));
  }
  res.X = ComplexTensor3::from_frame_matrix(frames_matrix(res.factors), n1, n2);
  return res;
}

}  // namespace tspr
