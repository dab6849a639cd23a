#include "tspr/tensor.hpp"

#include <stdexcept>

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

namespace tspr {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) throw std::invalid_argument("tensor mode must be 1, 2 or 3");
}

void check_dims(Index n1, Index n2, Index q) {
  if (n1 <= 0 || n2 <= 0 || q <= 0)
    throw std::invalid_argument("tensor dimensions must be positive");
}

}  // namespace

ComplexTensor3::ComplexTensor3(Index n1, Index n2, Index q) : n1_(n1), n2_(n2), q_(q) {
  check_dims(n1, n2, q);
  data_ = Vec::Zero(n1 * n2 * q);
}

ComplexTensor3::ComplexTensor3(Vec data, Index n1, Index n2, Index q)
    : data_(std::move(data)), n1_(n1), n2_(n2), q_(q) {
  check_dims(n1, n2, q);
  if (data_.size() != n1 * n2 * q)
    throw std::invalid_argument("tensor buffer size does not match dimensions");
}

Eigen::Map<const Mat> ComplexTensor3::frame(Index k) const {
  if (k < 0 || k >= q_) throw std::out_of_range("frame index out of range");
  return {data_.data() + frame_size() * k, n1_, n2_};
}

Eigen::Map<const Vec> ComplexTensor3::frame_vec(Index k) const {
  if (k < 0 || k >= q_) throw std::out_of_range("frame index out of range");
  return {data_.data() + frame_size() * k, frame_size()};
}

void ComplexTensor3::set_frame(Index k, const Mat& f) {
  if (k < 0 || k >= q_) throw std::out_of_range("frame index out of range");
  if (f.rows() != n1_ || f.cols() != n2_)
    throw std::invalid_argument("frame dimensions do not match tensor");
  Eigen::Map<Mat>(data_.data() + frame_size() * k, n1_, n2_) = f;
}

void ComplexTensor3::set_frame_vec(Index k, const Vec& x) {
  if (k < 0 || k >= q_) throw std::out_of_range("frame index out of range");
  if (x.size() != frame_size())
    throw std::invalid_argument("frame vector length does not match tensor");
  data_.segment(frame_size() * k, frame_size()) = x;
}

Eigen::Map<const Mat> ComplexTensor3::frame_matrix() const {
  return {data_.data(), frame_size(), q_};
}

ComplexTensor3 ComplexTensor3::from_frame_matrix(const Mat& frames, Index n1, Index n2) {
  if (frames.rows() != n1 * n2)
    throw std::invalid_argument("frame matrix rows must equal n1*n2");
  Vec data = Eigen::Map<const Vec>(frames.data(), frames.size());
  return {std::move(data), n1, n2, frames.cols()};
}

Mat matricize(const ComplexTensor3& t, int mode) {
  check_mode(mode);
  const Index n1 = t.n1(), n2 = t.n2(), q = t.q();
  switch (mode) {
    case 1:
      return Eigen::Map<const Mat>(t.data().data(), n1, n2 * q);
    case 2: {
      Mat out(n2, n1 * q);
      for (Index k = 0; k < q; ++k) out.middleCols(k * n1, n1) = t.frame(k).transpose();
      return out;
    }
    default:
      return Eigen::Map<const Mat>(t.data().data(), n1 * n2, q).transpose();
  }
}

ComplexTensor3 refold(const Mat& unfolded, int mode, Index n1, Index n2, Index q) {
  check_mode(mode);
  check_dims(n1, n2, q);
  const std::array<Index, 2> want =
      mode == 1 ? std::array<Index, 2>{n1, n2 * q}
                : (mode == 2 ? std::array<Index, 2>{n2, n1 * q}
                             : std::array<Index, 2>{q, n1 * n2});
  if (unfolded.rows() != want[0] || unfolded.cols() != want[1])
    throw std::invalid_argument("unfolded matrix shape does not match target dimensions");
  switch (mode) {
    case 1:
      return {Eigen::Map<const Vec>(unfolded.data(), unfolded.size()), n1, n2, q};
    case 2: {
      ComplexTensor3 out(n1, n2, q);
      for (Index k = 0; k < q; ++k)
        out.set_frame(k, unfolded.middleCols(k * n1, n1).transpose());
      return out;
    }
    default: {
      Mat cols = unfolded.transpose();  // (n1*n2) x q
      return {Eigen::Map<const Vec>(cols.data(), cols.size()), n1, n2, q};
    }
  }
}

Mat kron(const Mat& a, const Mat& b) { return Eigen::kroneckerProduct(a, b); }

ComplexTensor3 mode_multiply(const ComplexTensor3& t, const Mat& m, int mode) {
  check_mode(mode);
  const Index n1 = t.n1(), n2 = t.n2(), q = t.q();
  const Index dims[3] = {n1, n2, q};
  if (m.cols() != dims[mode - 1])
    throw std::invalid_argument("mode-multiply factor columns must match tensor dimension");
  switch (mode) {
    case 1: {
      Mat y = m * Eigen::Map<const Mat>(t.data().data(), n1, n2 * q);
      return {Eigen::Map<const Vec>(y.data(), y.size()), m.rows(), n2, q};
    }
    case 2: {
      ComplexTensor3 out(n1, m.rows(), q);
      for (Index k = 0; k < q; ++k) out.set_frame(k, t.frame(k) * m.transpose());
      return out;
    }
    default: {
      Mat y = Eigen::Map<const Mat>(t.data().data(), n1 * n2, q) * m.transpose();
      return {Eigen::Map<const Vec>(y.data(), y.size()), n1, n2, m.rows()};
    }
  }
}

ComplexTensor3 tucker_reconstruct(const TuckerFactors& f) {
  const auto r = f.core.dims();
  if (f.D.cols() != r[0] || f.E.cols() != r[1] || f.F.cols() != r[2])
    throw std::invalid_argument("factor columns must match core dimensions");
  return mode_multiply(mode_multiply(mode_multiply(f.core, f.D, 1), f.E, 2), f.F, 3);
}

namespace {

// Leading r left singular vectors; exact-zero input falls back to the first
// r canonical basis vectors (orthonormal, rank deficiency is legitimate here).
Mat leading_left_vectors(const Mat& m, Index r) {
  if (m.norm() == 0.0) return Mat::Identity(m.rows(), r);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(r);
}

}  // namespace

TuckerFactors hosvd(const ComplexTensor3& t, Index r1, Index r2, Index r3) {
  const Index rs[3] = {r1, r2, r3};
  const Index ds[3] = {t.n1(), t.n2(), t.q()};
  for (int i = 0; i < 3; ++i)
    if (rs[i] < 1 || rs[i] > ds[i])
      throw std::invalid_argument("hosvd rank out of range for tensor dimension");

  TuckerFactors f;
  f.D = leading_left_vectors(matricize(t, 1), r1);
  f.E = leading_left_vectors(matricize(t, 2), r2);
  f.F = leading_left_vectors(matricize(t, 3), r3);
  f.core = mode_multiply(mode_multiply(mode_multiply(t, f.D.adjoint(), 1), f.E.adjoint(), 2),
                         f.F.adjoint(), 3);
  return f;
}

Vec vec_AXB(const Mat& a, const Mat& x, const Mat& b) {
  if (a.cols() != x.rows() || x.cols() != b.rows())
    throw std::invalid_argument("vec_AXB dimensions do not conform");
  Mat y = a * x * b;
  return Eigen::Map<const Vec>(y.data(), y.size());
}

}  // namespace tspr
