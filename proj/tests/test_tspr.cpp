#include <cmath>

#include "doctest.h"
#include "tspr/experiment.hpp"
#include "tspr/measurement.hpp"
#include "tspr/metrics.hpp"
#include "tspr/rng.hpp"
#include "tspr/tspr.hpp"

using namespace tspr;

namespace {

Mat orthonormal_cols(Index n, Index r, std::uint64_t seed) {
  auto gen = rng::substream(seed, rng::Stream::kSynth);
  Mat a = rng::complex_gaussian_matrix(n, r, gen);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(n, r);
}

TuckerFactors random_factors(Index n1, Index n2, Index q, std::array<Index, 3> ranks,
                             std::uint64_t seed) {
  auto gen = rng::substream(seed, rng::Stream::kSynth);
  TuckerFactors f;
  f.D = rng::complex_gaussian_matrix(n1, ranks[0], gen);
  f.E = rng::complex_gaussian_matrix(n2, ranks[1], gen);
  f.F = rng::complex_gaussian_matrix(q, ranks[2], gen);
  f.core = ComplexTensor3(rng::complex_gaussian(ranks[0] * ranks[1] * ranks[2], gen),
                          ranks[0], ranks[1], ranks[2]);
  return f;
}

// Small ensemble observing the frames of the given factors.
MeasurementEnsemble observed_ensemble(const TuckerFactors& f, Index n1, Index n2,
                                      Index m, std::uint64_t seed) {
  const Index q = f.F.rows();
  MeasurementEnsemble ens = gen_gaussian(n1 * n2, m, q, true, seed);
  attach_observations(ens, ComplexTensor3::from_frame_matrix(frames_matrix(f), n1, n2));
  return ens;
}

// Permutation matrix with vec(X^T) = perm * vec(X) for n1 x n2 frames.
Mat transpose_perm(Index n1, Index n2) {
  Mat t = Mat::Zero(n1 * n2, n1 * n2);
  for (Index j = 0; j < n2; ++j)
    for (Index i = 0; i < n1; ++i) t(j + n2 * i, i + n1 * j) = 1.0;
  return t;
}

double rel_err(const Mat& got, const Mat& want) {
  return (got - want).norm() / want.norm();
}

}  // namespace

TEST_CASE("frame_from_factors stacks into the Tucker reconstruction") {
  TuckerFactors f = random_factors(4, 3, 5, {2, 2, 2}, 3);
  ComplexTensor3 full = tucker_reconstruct(f);
  Mat frames = frames_matrix(f);
  CHECK(rel_err(frames, full.frame_matrix()) <= 1e-12);
  for (Index k = 0; k < 5; ++k)
    CHECK((frame_from_factors(f, k) - frames.col(k)).norm() == 0.0);
}

TEST_CASE("a standard-basis temporal row selects one core slice") {
  TuckerFactors f = random_factors(4, 4, 3, {2, 3, 3}, 5);
  f.F = Mat::Identity(3, 3);
  for (Index k = 0; k < 3; ++k) {
    Mat gk = core_contraction(f, k);
    CHECK((gk - f.core.frame(k)).norm() == 0.0);
    Mat x = f.D * f.core.frame(k) * f.E.transpose();
    CHECK((frame_from_factors(f, k) - Eigen::Map<const Vec>(x.data(), x.size())).norm() <=
          1e-14 * x.norm());
  }
}

TEST_CASE("a zero core reconstructs zero frames") {
  TuckerFactors f = random_factors(4, 4, 4, {2, 2, 2}, 7);
  f.core = ComplexTensor3(2, 2, 2);
  CHECK(frames_matrix(f).norm() == 0.0);
}

TEST_CASE("effective maps match their explicit Kronecker constructions") {
  const Index n1 = 4, n2 = 4, q = 3, m = 10;
  std::array<Index, 3> ranks{2, 3, 2};
  TuckerFactors f = random_factors(n1, n2, q, ranks, 11);
  MeasurementEnsemble ens = observed_ensemble(f, n1, n2, m, 11);
  Mat m3 = matricize(f.core, 3);

  for (Index k = 0; k < q; ++k) {
    Mat ah = ens.dense_matrix(k).adjoint();

    Mat f_expl = ah * kron(f.E, f.D) * m3.transpose();
    CHECK(rel_err(materialize(f_row_map(ens.ops[k], f)), f_expl) <= 1e-12);

    Mat s_k = core_contraction(f, k) * f.E.transpose();
    Mat d_expl = ah * kron(s_k.transpose(), Mat::Identity(n1, n1));
    CHECK(rel_err(materialize(d_frame_map(ens.ops[k], s_k, n1)), d_expl) <= 1e-12);

    Mat w_k = f.D * core_contraction(f, k);
    Mat e_cols(n1 * n2, n2 * ranks[1]);
    for (Index c = 0; c < ranks[1]; ++c)
      for (Index j = 0; j < n2; ++j) {
        Vec col = Vec::Zero(n1 * n2);
        col.segment(n1 * j, n1) = w_k.col(c);
        e_cols.col(j + n2 * c) = col;
      }
    Mat e_expl = ah * e_cols;
    CHECK(rel_err(materialize(e_frame_map(ens.ops[k], w_k, n2)), e_expl) <= 1e-12);

    Vec f_row = f.F.row(k).transpose();
    Mat g_expl = ah * kron(f_row.transpose(), kron(f.E, f.D));
    CHECK(rel_err(materialize(g_frame_map(ens.ops[k], f.D, f.E, f_row)), g_expl) <= 1e-12);
  }
}

TEST_CASE("effective maps satisfy the adjoint inner-product identity") {
  const Index n1 = 4, n2 = 3, q = 3, m = 9;
  TuckerFactors f = random_factors(n1, n2, q, {2, 2, 2}, 13);
  MeasurementEnsemble ens = observed_ensemble(f, n1, n2, m, 13);
  auto gen = rng::substream(14, rng::Stream::kSynth);

  auto check_adjoint = [&](const LinearMap& map) {
    for (int t = 0; t < 5; ++t) {
      Vec v = rng::complex_gaussian(map.in_dim, gen);
      Vec u = rng::complex_gaussian(map.out_dim, gen);
      Cx lhs = map.forward(v).dot(u);
      Cx rhs = v.dot(map.adjoint(u));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    }
  };
  check_adjoint(f_row_map(ens.ops[0], f));
  check_adjoint(d_frame_map(ens.ops[1], core_contraction(f, 1) * f.E.transpose(), n1));
  check_adjoint(e_frame_map(ens.ops[2], f.D * core_contraction(f, 2), n2));
  check_adjoint(g_frame_map(ens.ops[0], f.D, f.E, f.F.row(0).transpose()));
}

TEST_CASE("update_F at truth-consistent factors is a fixed point") {
  TuckerFactors f = random_factors(5, 4, 6, {2, 2, 2}, 17);
  MeasurementEnsemble ens = observed_ensemble(f, 5, 4, 60, 17);
  Mat f_next = update_F(ens, f, RwfConfig{});
  CHECK((f_next - f.F).norm() <= 1e-10 * f.F.norm());
}

TEST_CASE("update_F handles a one-dimensional temporal rank") {
  TuckerFactors f = random_factors(4, 4, 5, {2, 2, 1}, 19);
  MeasurementEnsemble ens = observed_ensemble(f, 4, 4, 48, 19);
  Mat f_next = update_F(ens, f, RwfConfig{});
  CHECK(f_next.rows() == 5);
  CHECK(f_next.cols() == 1);
  CHECK((f_next - f.F).norm() <= 1e-10 * f.F.norm());
}

TEST_CASE("update_D recovers the spatial factor from true phases") {
  const Index n1 = 6, n2 = 6, q = 6, m = 4 * n1 * n2;
  TuckerFactors truth = random_factors(n1, n2, q, {2, 2, 2}, 23);
  MeasurementEnsemble ens = observed_ensemble(truth, n1, n2, m, 23);
  PhaseState ph = update_phases(ens, truth);

  TuckerFactors guess = truth;
  guess.D = Mat::Zero(n1, 2);
  CglsConfig cfg;
  cfg.max_iters = 200;
  cfg.rel_tolerance = 1e-14;
  guess.D = update_D(ens, ph, guess, cfg);
  CHECK(rel_err(frames_matrix(guess), frames_matrix(truth)) <= 1e-6);
}

TEST_CASE("update_E recovers the spatial factor from true phases") {
  const Index n1 = 6, n2 = 6, q = 6, m = 4 * n1 * n2;
  TuckerFactors truth = random_factors(n1, n2, q, {2, 2, 2}, 29);
  MeasurementEnsemble ens = observed_ensemble(truth, n1, n2, m, 29);
  PhaseState ph = update_phases(ens, truth);

  TuckerFactors guess = truth;
  guess.E = Mat::Zero(n2, 2);
  CglsConfig cfg;
  cfg.max_iters = 200;
  cfg.rel_tolerance = 1e-14;
  guess.E = update_E(ens, ph, guess, cfg);
  CHECK(rel_err(frames_matrix(guess), frames_matrix(truth)) <= 1e-6);
}

TEST_CASE("update_E mirrors update_D on the transposed problem") {
  const Index n1 = 4, n2 = 3, q = 4, m = 30;
  std::array<Index, 3> ranks{2, 2, 2};
  TuckerFactors f = random_factors(n1, n2, q, ranks, 31);
  MeasurementEnsemble ens = observed_ensemble(f, n1, n2, m, 31);
  PhaseState ph = update_phases(ens, f);

  // Transposed frames share the observations; sensing rows are permuted to
  // absorb vec(X^T) = perm vec(X).
  Mat perm = transpose_perm(n1, n2);
  MeasurementEnsemble ens_t;
  ens_t.kind = ens.kind;
  ens_t.n = ens.n;
  ens_t.m = ens.m;
  ens_t.q = ens.q;
  ens_t.seed = ens.seed;
  for (Index k = 0; k < q; ++k) {
    ens_t.ops.push_back(dense_map(Mat((perm * ens.dense_matrix(k)).adjoint())));
    ens_t.row_norms_sq.push_back(ens.row_norms_sq[k]);
    ens_t.observations.push_back(ens.observations[k]);
  }

  TuckerFactors f_t;
  f_t.D = f.E;
  f_t.E = f.D;
  f_t.F = f.F;
  f_t.core = ComplexTensor3(ranks[1], ranks[0], ranks[2]);
  for (Index t = 0; t < ranks[2]; ++t) f_t.core.set_frame(t, f.core.frame(t).transpose());

  PhaseState ph_t = update_phases(ens_t, f_t);
  for (Index k = 0; k < q; ++k)
    CHECK((ph_t.c[k] - ph.c[k]).norm() <= 1e-12 * std::sqrt(double(m)));

  CglsConfig cfg;
  cfg.max_iters = 200;
  cfg.rel_tolerance = 1e-13;
  Mat d_new = update_D(ens, ph, f, cfg);
  Mat e_new_t = update_E(ens_t, ph_t, f_t, cfg);
  CHECK(rel_err(e_new_t, d_new) <= 1e-8);
}

TEST_CASE("update_G with identity sensing projects onto orthonormal factors") {
  const Index n1 = 5, n2 = 4, q = 6;
  std::array<Index, 3> ranks{2, 3, 2};
  auto gen = rng::substream(37, rng::Stream::kSynth);
  ComplexTensor3 x(rng::complex_gaussian(n1 * n2 * q, gen), n1, n2, q);

  MeasurementEnsemble ens;
  ens.kind = MeasurementKind::kComplexGaussian;
  ens.n = n1 * n2;
  ens.m = n1 * n2;
  ens.q = q;
  ens.seed = 0;
  for (Index k = 0; k < q; ++k) {
    ens.ops.push_back(dense_map(Mat::Identity(ens.n, ens.n)));
    ens.row_norms_sq.push_back(RVec::Ones(ens.n));
    ens.observations.push_back(x.frame_vec(k).cwiseAbs());
  }

  TuckerFactors f;
  f.D = orthonormal_cols(n1, ranks[0], 38);
  f.E = orthonormal_cols(n2, ranks[1], 39);
  f.F = orthonormal_cols(q, ranks[2], 40);
  f.core = ComplexTensor3(ranks[0], ranks[1], ranks[2]);

  // True-frame phases make the least-squares target the frames themselves.
  PhaseState ph;
  for (Index k = 0; k < q; ++k) {
    Vec z = x.frame_vec(k);
    for (Index i = 0; i < z.size(); ++i) z[i] = phase(z[i]);
    ph.c.push_back(std::move(z));
  }

  CglsConfig cfg;
  cfg.max_iters = 200;
  cfg.rel_tolerance = 1e-14;
  ComplexTensor3 core = update_G(ens, ph, f, cfg);

  ComplexTensor3 proj = mode_multiply(
      mode_multiply(mode_multiply(x, f.D.adjoint(), 1), f.E.adjoint(), 2), f.F.adjoint(), 3);
  CHECK((matricize(core, 1) - matricize(proj, 1)).norm() <= 1e-8 * proj.norm());
}

TEST_CASE("update_G drives the core to zero on zero observations") {
  TuckerFactors f = random_factors(4, 4, 5, {2, 2, 2}, 41);
  MeasurementEnsemble ens = gen_gaussian(16, 64, 5, true, 41);
  attach_observations(ens, ComplexTensor3(4, 4, 5));
  PhaseState ph = update_phases(ens, f);
  CglsConfig cfg;
  cfg.max_iters = 200;
  cfg.rel_tolerance = 1e-14;
  ComplexTensor3 core = update_G(ens, ph, f, cfg);
  CHECK(core.norm() <= 1e-8 * f.core.norm());
}

TEST_CASE("factor updates never increase the phase-fixed objective") {
  TuckerFactors truth = random_factors(5, 5, 6, {2, 2, 2}, 43);
  MeasurementEnsemble ens = observed_ensemble(truth, 5, 5, 50, 43);
  TuckerFactors f = random_factors(5, 5, 6, {2, 2, 2}, 44);
  PhaseState ph = update_phases(ens, f);

  const auto objective = [&](const TuckerFactors& g) {
    return phase_objective(ens, ph, frames_matrix(g));
  };
  double before = objective(f);
  f.D = update_D(ens, ph, f, CglsConfig{});
  double after_d = objective(f);
  CHECK(after_d <= before + 1e-9 * before);
  f.E = update_E(ens, ph, f, CglsConfig{});
  double after_e = objective(f);
  CHECK(after_e <= after_d + 1e-9 * after_d);
  f.core = update_G(ens, ph, f, CglsConfig{});
  CHECK(objective(f) <= after_e + 1e-9 * after_e);
}

TEST_CASE("frames are invariant under the Tucker gauge group") {
  std::array<Index, 3> ranks{2, 3, 2};
  TuckerFactors f = random_factors(5, 4, 6, ranks, 47);
  Mat base = frames_matrix(f);
  auto gen = rng::substream(48, rng::Stream::kSynth);

  Mat qmat = rng::complex_gaussian_matrix(ranks[0], ranks[0], gen);
  TuckerFactors g = f;
  g.D = f.D * qmat;
  g.core = mode_multiply(f.core, qmat.inverse(), 1);
  CHECK(rel_err(frames_matrix(g), base) <= 1e-10);

  Mat qmat2 = rng::complex_gaussian_matrix(ranks[2], ranks[2], gen);
  TuckerFactors h = f;
  h.F = f.F * qmat2;
  h.core = mode_multiply(f.core, qmat2.inverse(), 3);
  CHECK(rel_err(frames_matrix(h), base) <= 1e-10);
}

TEST_CASE("tspr_init is deterministic and reports degenerate frames") {
  TuckerFactors truth = random_factors(4, 4, 5, {2, 2, 2}, 53);
  MeasurementEnsemble ens = observed_ensemble(truth, 4, 4, 64, 53);

  std::vector<Index> degenerate;
  TuckerFactors a = tspr_init(ens, 4, 4, {2, 2, 2}, SpectralInitConfig{}, &degenerate);
  TuckerFactors b = tspr_init(ens, 4, 4, {2, 2, 2}, SpectralInitConfig{});
  CHECK(degenerate.empty());
  CHECK((a.D - b.D).norm() == 0.0);
  CHECK((a.E - b.E).norm() == 0.0);
  CHECK((a.F - b.F).norm() == 0.0);
  CHECK((matricize(a.core, 1) - matricize(b.core, 1)).norm() == 0.0);

  MeasurementEnsemble zeros = gen_gaussian(16, 64, 5, true, 54);
  attach_observations(zeros, ComplexTensor3(4, 4, 5));
  TuckerFactors z = tspr_init(zeros, 4, 4, {2, 2, 2}, SpectralInitConfig{}, &degenerate);
  CHECK(degenerate.size() == 5);
  CHECK(z.core.norm() == 0.0);
}

TEST_CASE("tspr_init at full ranks reproduces the stacked frame inits") {
  TuckerFactors truth = random_factors(4, 3, 5, {2, 2, 2}, 59);
  MeasurementEnsemble ens = observed_ensemble(truth, 4, 3, 48, 59);

  TuckerFactors full = tspr_init(ens, 4, 3, {4, 3, 5}, SpectralInitConfig{});
  std::vector<FrameInit> inits = frame_inits(ens, SpectralInitConfig{});
  Mat stacked(12, 5);
  for (Index k = 0; k < 5; ++k) stacked.col(k) = inits[k].x0;
  CHECK(rel_err(frames_matrix(full), stacked) <= 1e-10);
}

TEST_CASE("tspr_run at T = 0 returns the spectral-HOSVD initialization") {
  TuckerFactors truth = random_factors(4, 4, 5, {2, 2, 2}, 61);
  MeasurementEnsemble ens = observed_ensemble(truth, 4, 4, 64, 61);
  TsprConfig cfg;
  cfg.ranks = {2, 2, 2};
  cfg.T = 0;
  TsprResult res = tspr_run(ens, 4, 4, cfg);
  CHECK(res.objective.size() == 1);
  TuckerFactors init = tspr_init(ens, 4, 4, cfg.ranks, cfg.init);
  CHECK((frames_matrix(res.factors) - frames_matrix(init)).norm() == 0.0);
  CHECK((res.X.frame_matrix() - frames_matrix(init)).norm() == 0.0);
}

TEST_CASE("tspr_run traces are bit-identical across reruns") {
  TuckerFactors truth = random_factors(4, 4, 5, {2, 2, 2}, 67);
  MeasurementEnsemble ens = observed_ensemble(truth, 4, 4, 64, 67);
  TsprConfig cfg;
  cfg.ranks = {2, 2, 2};
  cfg.T = 3;
  TsprResult a = tspr_run(ens, 4, 4, cfg);
  TsprResult b = tspr_run(ens, 4, 4, cfg);
  CHECK(a.objective == b.objective);
  CHECK((a.X.frame_matrix() - b.X.frame_matrix()).norm() == 0.0);
}

TEST_CASE("tspr_run recovers an exactly-Tucker tensor in a well-measured regime") {
  for (std::uint64_t seed : {1, 2, 3}) {
    ComplexTensor3 truth = synth_tensor(8, 8, 8, {2, 2, 2}, seed);
    MeasurementEnsemble ens = gen_gaussian(64, 3 * 64, 8, true, seed);
    attach_observations(ens, truth);
    TsprConfig cfg;
    cfg.ranks = {2, 2, 2};
    cfg.T = 25;
    TsprResult res = tspr_run(ens, 8, 8, cfg);
    CHECK(mat_dist(res.X, truth) / truth.frame_matrix().norm() <= 1e-3);
    CHECK(res.objective.size() == 26);
    for (size_t t = 1; t < res.objective.size(); ++t)
      CHECK(std::isfinite(res.objective[t]));
  }
}
