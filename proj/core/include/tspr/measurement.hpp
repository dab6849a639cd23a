#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tspr/linop.hpp"
#include "tspr/tensor.hpp"

namespace tspr {

enum class MeasurementKind { kRealGaussian, kComplexGaussian, kCdp };

// Coded diffraction masks: L unit-modulus diagonal modulations of a length-n
// unnormalized DFT; mask entries are drawn from {1, -1, i, -i}.
struct CdpMasks {
  std::vector<Vec> masks;
  Index levels() const { return static_cast<Index>(masks.size()); }
  Index dft_size() const { return masks.empty() ? 0 : masks.front().size(); }
};

// Per-frame magnitude-only sensing.  ops[k].forward applies A_k^H (the map
// x -> measurements) and ops[k].adjoint applies A_k.  observations hold
// y_k = |A_k^H x_k| once attach_observations has run.
struct MeasurementEnsemble {
  MeasurementKind kind = MeasurementKind::kComplexGaussian;
  Index n = 0;         // signal length per frame
  Index m = 0;         // measurements per frame
  Index q = 0;         // frames
  Index cdp_levels = 0;
  std::uint64_t seed = 0;

  std::vector<LinearMap> ops;      // size q
  std::vector<RVec> row_norms_sq;  // size q; ||a_{i,k}||^2 for each measurement
  std::vector<RVec> observations;  // size q once observed, otherwise empty

  // Gaussian kinds only: A_k with columns a_{i,k} (n x m).
  std::vector<std::shared_ptr<const Mat>> dense;
  // CDP kind only.
  std::vector<CdpMasks> masks;

  bool has_observations() const { return !observations.empty(); }
  const Mat& dense_matrix(Index k) const;
};

// q independent n x m sensing matrices with i.i.d. Gaussian columns;
// complex entries are CN(0, 1) (variance 1/2 per part), real entries N(0, 1).
MeasurementEnsemble gen_gaussian(Index n, Index m, Index q, bool complex_valued,
                                 std::uint64_t seed);

// q independent coded-diffraction ensembles with `levels` masks each; the
// per-frame measurement count is levels * n.
MeasurementEnsemble gen_cdp(Index n, Index levels, Index q, std::uint64_t seed);

// Sensing operator realized from explicit masks: forward stacks the DFTs of
// the masked signal per level, adjoint sums conj(mask) .* inverse-DFT pieces.
LinearMap make_cdp_op(const CdpMasks& masks);

// y_k = |A_k^H vec(X_k)| elementwise.
std::vector<RVec> observe(const MeasurementEnsemble& ens, const ComplexTensor3& x);
void attach_observations(MeasurementEnsemble& ens, const ComplexTensor3& x);

}  // namespace tspr
