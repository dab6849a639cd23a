#pragma once

#include <array>
#include <vector>

#include "tspr/lrpr.hpp"
#include "tspr/tensor.hpp"

namespace tspr {

struct TsprConfig {
  std::array<Index, 3> ranks{1, 1, 1};
  int T = 20;
  RwfConfig rwf;
  CglsConfig cgls;
  SpectralInitConfig init;
};

// Spectral init: per-frame truncated inits stacked into a tensor, then HOSVD
// at the requested ranks.  Frames whose init degenerated are reported through
// degenerate (optional).
TuckerFactors tspr_init(const MeasurementEnsemble& ens, Index n1, Index n2,
                        std::array<Index, 3> ranks, const SpectralInitConfig& cfg,
                        std::vector<Index>* degenerate = nullptr);

// G_k = sum_t F(k, t) * core slice t; the r1 x r2 contraction entering every
// frame formula x_k = vec(D G_k E^T).
Mat core_contraction(const TuckerFactors& f, Index k);
Vec frame_from_factors(const TuckerFactors& f, Index k);
Mat frames_matrix(const TuckerFactors& f);  // n1*n2 x q, columns are frames

// Effective maps for the alternating least-squares blocks.  Each one is the
// composition of the frame sensing op with the factor-linear frame formula;
// all captured matrices are copied.
//
//   f_row_map:   f_k (r3)        -> A_k^H vec(D (sum_t f_t G_t) E^T)
//   d_frame_map: vec(D) (n1 r1)  -> A_k^H vec(D S_k),   S_k = G_k E^T
//   e_frame_map: vec(E) (n2 r2)  -> A_k^H vec(W_k E^T), W_k = D G_k
//   g_frame_map: vec(core)       -> A_k^H vec(D G_k(core) E^T)
LinearMap f_row_map(const LinearMap& op, const TuckerFactors& f);
LinearMap d_frame_map(const LinearMap& op, const Mat& s_k, Index n1);
LinearMap e_frame_map(const LinearMap& op, const Mat& w_k, Index n2);
LinearMap g_frame_map(const LinearMap& op, const Mat& d, const Mat& e, const Vec& f_row);

// One RWF pass per row of F over the r3-dimensional effective problem, each
// warm-started at the current row; D, E and the core stay fixed.
Mat update_F(const MeasurementEnsemble& ens, const TuckerFactors& f, const RwfConfig& cfg);

PhaseState update_phases(const MeasurementEnsemble& ens, const TuckerFactors& f);

// Stacked CGLS solves with phases fixed, warm-started at the current factor.
Mat update_D(const MeasurementEnsemble& ens, const PhaseState& phases, const TuckerFactors& f,
             const CglsConfig& cfg);
Mat update_E(const MeasurementEnsemble& ens, const PhaseState& phases, const TuckerFactors& f,
             const CglsConfig& cfg);
ComplexTensor3 update_G(const MeasurementEnsemble& ens, const PhaseState& phases,
                        const TuckerFactors& f, const CglsConfig& cfg);

struct TsprResult {
  TuckerFactors factors;
  ComplexTensor3 X;
  std::vector<double> objective;  // length T + 1
  std::vector<Index> degenerate_init_frames;
};

// Full alternating loop: init, then per outer iteration the F rows (RWF),
// the phases, and the D, E, core least-squares blocks in that order.
TsprResult tspr_run(const MeasurementEnsemble& ens, Index n1, Index n2, const TsprConfig& cfg);

}  // namespace tspr
