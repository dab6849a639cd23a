#include "tspr/measurement.hpp"

#include <stdexcept>

#include <fftw3.h>

#include "tspr/rng.hpp"

namespace tspr {

namespace {

// Unnormalized DFT pair of a fixed size.  Plans are created once per size;
// fftw_execute_dft on out-of-place ESTIMATE plans leaves the input intact and
// is safe to reuse with fresh buffers.
class DftPlan {
 public:
  explicit DftPlan(Index n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("DFT size must be positive");
    Vec in = Vec::Zero(n), out = Vec::Zero(n);
    auto* pi = reinterpret_cast<fftw_complex*>(in.data());
    auto* po = reinterpret_cast<fftw_complex*>(out.data());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), pi, po, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), pi, po, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
  }
  ~DftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  DftPlan(const DftPlan&) = delete;
  DftPlan& operator=(const DftPlan&) = delete;

  void forward(const Cx* in, Cx* out) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(const_cast<Cx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
  void backward(const Cx* in, Cx* out) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(const_cast<Cx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
  Index size() const { return n_; }

 private:
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  Index n_;
};

LinearMap cdp_op_with_plan(const CdpMasks& masks, std::shared_ptr<const DftPlan> plan) {
  const Index n = masks.dft_size();
  const Index levels = masks.levels();
  if (n == 0 || levels == 0) throw std::invalid_argument("cdp op needs at least one mask");
  for (const auto& mk : masks.masks)
    if (mk.size() != n) throw std::invalid_argument("cdp masks must share one length");

  auto shared = std::make_shared<const CdpMasks>(masks);
  LinearMap op;
  op.in_dim = n;
  op.out_dim = n * levels;
  op.forward = [shared, plan, n, levels](const Vec& x) -> Vec {
    Vec y(n * levels);
    Vec tmp(n);
    for (Index l = 0; l < levels; ++l) {
      tmp = shared->masks[l].cwiseProduct(x);
      plan->forward(tmp.data(), y.data() + l * n);
    }
    return y;
  };
  op.adjoint = [shared, plan, n, levels](const Vec& u) -> Vec {
    Vec acc = Vec::Zero(n);
    Vec tmp(n);
    for (Index l = 0; l < levels; ++l) {
      plan->backward(u.data() + l * n, tmp.data());
      acc += shared->masks[l].conjugate().cwiseProduct(tmp);
    }
    return acc;
  };
  return op;
}

}  // namespace

const Mat& MeasurementEnsemble::dense_matrix(Index k) const {
  if (kind == MeasurementKind::kCdp)
    throw std::invalid_argument("dense_matrix: CDP ensembles have no dense sensing matrix");
  if (k < 0 || k >= static_cast<Index>(dense.size()))
    throw std::out_of_range("dense_matrix: frame index out of range");
  return *dense[k];
}

MeasurementEnsemble gen_gaussian(Index n, Index m, Index q, bool complex_valued,
                                 std::uint64_t seed) {
  if (n <= 0 || m <= 0 || q <= 0)
    throw std::invalid_argument("gen_gaussian: n, m, q must be positive");
  MeasurementEnsemble ens;
  ens.kind = complex_valued ? MeasurementKind::kComplexGaussian : MeasurementKind::kRealGaussian;
  ens.n = n;
  ens.m = m;
  ens.q = q;
  ens.seed = seed;
  ens.ops.reserve(q);
  ens.dense.reserve(q);
  ens.row_norms_sq.reserve(q);
  for (Index k = 0; k < q; ++k) {
    auto gen = rng::substream(seed, rng::Stream::kGaussian, static_cast<std::uint64_t>(k));
    Mat a(n, m);
    if (complex_valued) {
      for (Index j = 0; j < m; ++j) a.col(j) = rng::complex_gaussian(n, gen);
    } else {
      for (Index j = 0; j < m; ++j) a.col(j) = rng::real_gaussian(n, gen).cast<Cx>();
    }
    auto sp = std::make_shared<const Mat>(std::move(a));
    RVec rn(m);
    for (Index j = 0; j < m; ++j) rn[j] = sp->col(j).squaredNorm();
    ens.row_norms_sq.push_back(std::move(rn));
    ens.dense.push_back(sp);
    // forward applies A^H (signal -> measurements), adjoint applies A.
    LinearMap op;
    op.in_dim = n;
    op.out_dim = m;
    op.forward = [sp](const Vec& x) -> Vec { return sp->adjoint() * x; };
    op.adjoint = [sp](const Vec& u) -> Vec { return (*sp) * u; };
    ens.ops.push_back(std::move(op));
  }
  return ens;
}

MeasurementEnsemble gen_cdp(Index n, Index levels, Index q, std::uint64_t seed) {
  if (n <= 0 || levels <= 0 || q <= 0)
    throw std::invalid_argument("gen_cdp: n, levels, q must be positive");
  MeasurementEnsemble ens;
  ens.kind = MeasurementKind::kCdp;
  ens.n = n;
  ens.m = n * levels;
  ens.q = q;
  ens.cdp_levels = levels;
  ens.seed = seed;
  auto plan = std::make_shared<const DftPlan>(n);
  static const Cx kQuad[4] = {Cx(1, 0), Cx(-1, 0), Cx(0, 1), Cx(0, -1)};
  for (Index k = 0; k < q; ++k) {
    CdpMasks mk;
    mk.masks.reserve(levels);
    for (Index l = 0; l < levels; ++l) {
      auto gen = rng::substream(seed, rng::Stream::kCdpMask, static_cast<std::uint64_t>(k),
                                static_cast<std::uint64_t>(l));
      std::uniform_int_distribution<int> pick(0, 3);
      Vec mask(n);
      for (Index i = 0; i < n; ++i) mask[i] = kQuad[pick(gen)];
      mk.masks.push_back(std::move(mask));
    }
    ens.ops.push_back(cdp_op_with_plan(mk, plan));
    ens.masks.push_back(std::move(mk));
    // Every CDP measurement row is a modulated DFT row: squared norm n.
    ens.row_norms_sq.push_back(RVec::Constant(ens.m, static_cast<double>(n)));
  }
  return ens;
}

LinearMap make_cdp_op(const CdpMasks& masks) {
  return cdp_op_with_plan(masks, std::make_shared<const DftPlan>(masks.dft_size()));
}

std::vector<RVec> observe(const MeasurementEnsemble& ens, const ComplexTensor3& x) {
  if (x.frame_size() != ens.n)
    throw std::invalid_argument("observe: tensor frame size must equal ensemble n");
  if (x.q() != ens.q) throw std::invalid_argument("observe: tensor frames must equal ensemble q");
  std::vector<RVec> y;
  y.reserve(ens.q);
  for (Index k = 0; k < ens.q; ++k)
    y.push_back(ens.ops[k].forward(x.frame_vec(k)).cwiseAbs());
  return y;
}

void attach_observations(MeasurementEnsemble& ens, const ComplexTensor3& x) {
  ens.observations = observe(ens, x);
}

}  // namespace tspr
