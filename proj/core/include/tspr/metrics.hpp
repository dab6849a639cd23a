#pragma once

#include <string>
#include <vector>

#include "tspr/measurement.hpp"
#include "tspr/pr_base.hpp"
#include "tspr/tensor.hpp"

namespace tspr {

// Phase-invariant distance min_phi ||x - e^{i phi} xhat||, via the closed
// form sqrt(||x||^2 + ||xhat||^2 - 2 |<xhat, x>|) (clamped at zero).
double frame_dist(const Vec& xhat, const Vec& x);

std::vector<double> frame_dists(const ComplexTensor3& xhat, const ComplexTensor3& x);

// sqrt of the summed squared per-frame distances.
double mat_dist(const ComplexTensor3& xhat, const ComplexTensor3& x);
double mat_dist(const Mat& xhat, const Mat& x);  // columns are frames

struct TuckerModel {
  Index n1, n2, q, r1, r2, r3;
};
struct MatrixModel {
  Index n, q, r;
};

long long param_count(const TuckerModel& m);
long long param_count(const MatrixModel& m);

struct CorrectionOutcome {
  ComplexTensor3 corrected;
  bool underdetermined = false;  // m < n: the per-frame refinement is not identifiable
};

// Per-frame RWF refinement warm-started at the model-constrained estimate.
// Emits a warning on stderr when m < n.
CorrectionOutcome model_correct(const MeasurementEnsemble& ens, const ComplexTensor3& xhat,
                                const RwfConfig& cfg);

struct ReconstructionReport {
  double mat_dist = 0.0;
  std::vector<double> per_frame_dist;
  double relative_error = 0.0;  // mat_dist / ||truth||_F
  long long param_count = 0;
  double wall_time_s = 0.0;
  std::vector<double> objective_trace;
  std::string status = "ok";
};

ReconstructionReport make_report(const ComplexTensor3& recon, const ComplexTensor3& truth,
                                 long long params, const std::vector<double>& objective);

}  // namespace tspr
