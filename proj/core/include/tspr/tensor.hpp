#pragma once

#include <array>

#include "tspr/types.hpp"

namespace tspr {

// Dense 3-way complex tensor, column-major: entry (i, j, k) lives at
// data[i + n1*j + n1*n2*k].  Frame k is the n1 x n2 frontal slice, so a
// vectorized frame occupies a contiguous block and the full buffer equals the
// frame vectors stacked in order.
class ComplexTensor3 {
 public:
  ComplexTensor3() = default;
  ComplexTensor3(Index n1, Index n2, Index q);
  ComplexTensor3(Vec data, Index n1, Index n2, Index q);

  Index n1() const { return n1_; }
  Index n2() const { return n2_; }
  Index q() const { return q_; }
  Index frame_size() const { return n1_ * n2_; }
  Index size() const { return data_.size(); }
  std::array<Index, 3> dims() const { return {n1_, n2_, q_}; }

  Cx operator()(Index i, Index j, Index k) const {
    return data_[i + n1_ * j + n1_ * n2_ * k];
  }
  Cx& operator()(Index i, Index j, Index k) {
    return data_[i + n1_ * j + n1_ * n2_ * k];
  }

  const Vec& data() const { return data_; }
  Vec& data() { return data_; }

  Eigen::Map<const Mat> frame(Index k) const;
  Eigen::Map<const Vec> frame_vec(Index k) const;
  void set_frame(Index k, const Mat& f);
  void set_frame_vec(Index k, const Vec& x);

  // Frames as columns of an n1*n2 x q matrix (shares memory layout).
  Eigen::Map<const Mat> frame_matrix() const;
  static ComplexTensor3 from_frame_matrix(const Mat& frames, Index n1, Index n2);

  double norm() const { return data_.norm(); }

 private:
  Vec data_;
  Index n1_ = 0, n2_ = 0, q_ = 0;
};

// Tucker factorization: core (r1 x r2 x r3) with factors D (n1 x r1),
// E (n2 x r2), F (q x r3); reconstruction is core x1 D x2 E x3 F.
struct TuckerFactors {
  ComplexTensor3 core;
  Mat D, E, F;

  std::array<Index, 3> ranks() const { return core.dims(); }
  std::array<Index, 3> dims() const { return {D.rows(), E.rows(), F.rows()}; }
};

// Mode-k matricization, k in {1,2,3}.  The column ordering is the one for
// which X_(1) = D * G_(1) * kron(F, E)^T holds for a Tucker-factored tensor
// (and cyclically for modes 2 and 3), i.e. column j + n2*k of X_(1) holds
// fiber (:, j, k).
Mat matricize(const ComplexTensor3& t, int mode);
ComplexTensor3 refold(const Mat& unfolded, int mode, Index n1, Index n2, Index q);

Mat kron(const Mat& a, const Mat& b);

// t x_mode m: replaces dimension `mode` of t by m.rows(); requires
// m.cols() == dim(mode).
ComplexTensor3 mode_multiply(const ComplexTensor3& t, const Mat& m, int mode);

ComplexTensor3 tucker_reconstruct(const TuckerFactors& f);

// Truncated higher-order SVD: factor k holds the r_k leading left singular
// vectors of the mode-k matricization; core = t x1 D^H x2 E^H x3 F^H.
TuckerFactors hosvd(const ComplexTensor3& t, Index r1, Index r2, Index r3);

// vec(a * x * b), with vec stacking columns.  Reference for the identity
// vec(a x b) = kron(b^T, a) vec(x) (plain transpose, also over C).
Vec vec_AXB(const Mat& a, const Mat& x, const Mat& b);

}  // namespace tspr
