#include "tspr/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tspr {

double frame_dist(const Vec& xhat, const Vec& x) {
  if (xhat.size() != x.size())
    throw std::invalid_argument("frame_dist: vectors must share a length");
  // All three terms go through the same dot-product reduction so that the
  // self-distance cancels exactly: |x.dot(x)| == x.dot(x).real() bit for bit.
  const double d2 =
      x.dot(x).real() + xhat.dot(xhat).real() - 2.0 * std::abs(xhat.dot(x));
  return std::sqrt(std::max(d2, 0.0));
}

std::vector<double> frame_dists(const ComplexTensor3& xhat, const ComplexTensor3& x) {
  if (xhat.dims() != x.dims())
    throw std::invalid_argument("frame_dists: tensors must share dimensions");
  std::vector<double> d;
  d.reserve(x.q());
  for (Index k = 0; k < x.q(); ++k)
    d.push_back(frame_dist(xhat.frame_vec(k), x.frame_vec(k)));
  return d;
}

double mat_dist(const ComplexTensor3& xhat, const ComplexTensor3& x) {
  double acc = 0.0;
  for (double d : frame_dists(xhat, x)) acc += d * d;
  return std::sqrt(acc);
}

double mat_dist(const Mat& xhat, const Mat& x) {
  if (xhat.rows() != x.rows() || xhat.cols() != x.cols())
    throw std::invalid_argument("mat_dist: matrices must share dimensions");
  double acc = 0.0;
  for (Index k = 0; k < x.cols(); ++k) {
    const double d = frame_dist(xhat.col(k), x.col(k));
    acc += d * d;
  }
  return std::sqrt(acc);
}

long long param_count(const TuckerModel& m) {
  return static_cast<long long>(m.r1) * m.r2 * m.r3 + m.n1 * m.r1 + m.n2 * m.r2 + m.q * m.r3;
}

long long param_count(const MatrixModel& m) {
  return static_cast<long long>(m.n + m.q) * m.r;
}

CorrectionOutcome model_correct(const MeasurementEnsemble& ens, const ComplexTensor3& xhat,
                                const RwfConfig& cfg) {
  if (!ens.has_observations())
    throw std::invalid_argument("model_correct: ensemble has no observations attached");
  if (xhat.frame_size() != ens.n || xhat.q() != ens.q)
    throw std::invalid_argument("model_correct: estimate dimensions do not match ensemble");

  CorrectionOutcome out;
  out.underdetermined = ens.m < ens.n;
  if (out.underdetermined)
    std::fprintf(stderr,
                 "warning: model correction with m = %lld < n = %lld is under-determined\n",
                 static_cast<long long>(ens.m), static_cast<long long>(ens.n));

  out.corrected = xhat;
  for (Index k = 0; k < ens.q; ++k)
    out.corrected.set_frame_vec(
        k, rwf(ens.observations[k], ens.ops[k], xhat.frame_vec(k), cfg));
  return out;
}

ReconstructionReport make_report(const ComplexTensor3& recon, const ComplexTensor3& truth,
                                 long long params, const std::vector<double>& objective) {
  ReconstructionReport rep;
  rep.per_frame_dist = frame_dists(recon, truth);
  double acc = 0.0;
  for (double d : rep.per_frame_dist) acc += d * d;
  rep.mat_dist = std::sqrt(acc);
  const double tn = truth.norm();
  rep.relative_error = tn > 0.0 ? rep.mat_dist / tn : rep.mat_dist;
  rep.param_count = params;
  rep.objective_trace = objective;
  return rep;
}

}  // namespace tspr
