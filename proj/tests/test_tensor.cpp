#include <random>

#include "doctest.h"
#include "tspr/rng.hpp"
#include "tspr/tensor.hpp"

using namespace tspr;

namespace {

ComplexTensor3 random_tensor(Index n1, Index n2, Index q, std::mt19937_64& gen) {
  return ComplexTensor3(rng::complex_gaussian(n1 * n2 * q, gen), n1, n2, q);
}

TuckerFactors random_factors(Index n1, Index n2, Index q, Index r1, Index r2, Index r3,
                             std::mt19937_64& gen) {
  TuckerFactors f;
  f.core = random_tensor(r1, r2, r3, gen);
  f.D = rng::complex_gaussian_matrix(n1, r1, gen);
  f.E = rng::complex_gaussian_matrix(n2, r2, gen);
  f.F = rng::complex_gaussian_matrix(q, r3, gen);
  return f;
}

}  // namespace

TEST_CASE("tensor layout is column-major with contiguous frames") {
  ComplexTensor3 t(2, 3, 2);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = Cx(static_cast<double>(i + 1), 0.0);

  CHECK(t(1, 0, 0) == Cx(2, 0));
  CHECK(t(0, 1, 0) == Cx(3, 0));
  CHECK(t(0, 0, 1) == Cx(7, 0));
  CHECK(t.frame(1)(1, 2) == Cx(12, 0));
  CHECK(t.frame_vec(1)(0) == Cx(7, 0));
  CHECK(t.frame_matrix()(0, 1) == Cx(7, 0));
}

TEST_CASE("tensor constructors validate dimensions") {
  CHECK_THROWS_AS(ComplexTensor3(-1, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(ComplexTensor3(Vec::Zero(5), 2, 2, 2), std::invalid_argument);
}

TEST_CASE("frame accessors round trip") {
  std::mt19937_64 gen(3);
  ComplexTensor3 t = random_tensor(3, 4, 5, gen);
  Mat f = rng::complex_gaussian_matrix(3, 4, gen);
  t.set_frame(2, f);
  CHECK((Mat(t.frame(2)) - f).norm() == 0.0);
  Vec v = rng::complex_gaussian(12, gen);
  t.set_frame_vec(4, v);
  CHECK((Vec(t.frame_vec(4)) - v).norm() == 0.0);

  ComplexTensor3 back = ComplexTensor3::from_frame_matrix(t.frame_matrix(), 3, 4);
  CHECK((back.data() - t.data()).norm() == 0.0);
}

TEST_CASE("mode-1 matricization of the 2x2x2 counting tensor") {
  ComplexTensor3 t(2, 2, 2);
  for (Index i = 0; i < 8; ++i) t.data()[i] = Cx(static_cast<double>(i + 1), 0.0);

  Mat m1 = matricize(t, 1);
  Mat want(2, 4);
  want << Cx(1, 0), Cx(3, 0), Cx(5, 0), Cx(7, 0), Cx(2, 0), Cx(4, 0), Cx(6, 0), Cx(8, 0);
  CHECK((m1 - want).norm() == 0.0);
}

TEST_CASE("refold inverts matricize in every mode") {
  std::mt19937_64 gen(7);
  ComplexTensor3 t = random_tensor(3, 4, 5, gen);
  for (int mode : {1, 2, 3}) {
    ComplexTensor3 back = refold(matricize(t, mode), mode, 3, 4, 5);
    CHECK((back.data() - t.data()).norm() == 0.0);
  }
  CHECK_THROWS_AS(matricize(t, 0), std::invalid_argument);
  CHECK_THROWS_AS(refold(matricize(t, 1), 1, 4, 3, 5), std::invalid_argument);
}

TEST_CASE("matricization of a Tucker tensor matches the Kronecker identities") {
  std::mt19937_64 gen(11);
  TuckerFactors f = random_factors(3, 4, 5, 2, 2, 2, gen);
  ComplexTensor3 t = tucker_reconstruct(f);

  Mat g1 = matricize(f.core, 1), g2 = matricize(f.core, 2), g3 = matricize(f.core, 3);
  CHECK((matricize(t, 1) - f.D * g1 * kron(f.F, f.E).transpose()).norm() < 1e-12 * t.norm());
  CHECK((matricize(t, 2) - f.E * g2 * kron(f.F, f.D).transpose()).norm() < 1e-12 * t.norm());
  CHECK((matricize(t, 3) - f.F * g3 * kron(f.E, f.D).transpose()).norm() < 1e-12 * t.norm());

  Vec direct = kron(f.F, kron(f.E, f.D)) * f.core.data();
  CHECK((t.data() - direct).norm() < 1e-12 * t.norm());
}

TEST_CASE("kron matches the blockwise definition") {
  Mat a(2, 2), b(2, 1);
  a << Cx(1, 1), Cx(0, 2), Cx(3, 0), Cx(-1, 0);
  b << Cx(2, 0), Cx(0, 1);
  Mat k = kron(a, b);
  REQUIRE(k.rows() == 4);
  REQUIRE(k.cols() == 2);
  CHECK(k(0, 0) == a(0, 0) * b(0, 0));
  CHECK(k(1, 0) == a(0, 0) * b(1, 0));
  CHECK(k(2, 1) == a(1, 1) * b(0, 0));
  CHECK(k(3, 1) == a(1, 1) * b(1, 0));
}

TEST_CASE("mode_multiply agrees with the matricized product") {
  std::mt19937_64 gen(13);
  ComplexTensor3 t = random_tensor(3, 4, 5, gen);
  std::array<Index, 3> dims = {3, 4, 5};
  for (int mode : {1, 2, 3}) {
    Mat m = rng::complex_gaussian_matrix(6, dims[mode - 1], gen);
    ComplexTensor3 prod = mode_multiply(t, m, mode);
    CHECK((matricize(prod, mode) - m * matricize(t, mode)).norm() < 1e-12 * t.norm() * m.norm());
  }
  Mat bad = rng::complex_gaussian_matrix(6, 7, gen);
  CHECK_THROWS_AS(mode_multiply(t, bad, 2), std::invalid_argument);
}

TEST_CASE("tucker_reconstruct equals sequential mode products") {
  std::mt19937_64 gen(17);
  TuckerFactors f = random_factors(4, 3, 6, 2, 3, 2, gen);
  ComplexTensor3 seq =
      mode_multiply(mode_multiply(mode_multiply(f.core, f.D, 1), f.E, 2), f.F, 3);
  ComplexTensor3 t = tucker_reconstruct(f);
  CHECK((t.data() - seq.data()).norm() < 1e-12 * t.norm());
}

TEST_CASE("hosvd recovers exact-rank tensors") {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 20; ++trial) {
    TuckerFactors f = random_factors(6, 5, 7, 3, 2, 3, gen);
    ComplexTensor3 t = tucker_reconstruct(f);
    TuckerFactors h = hosvd(t, 3, 2, 3);
    ComplexTensor3 back = tucker_reconstruct(h);
    CHECK((back.data() - t.data()).norm() < 1e-10 * t.norm());
    CHECK((h.D.adjoint() * h.D - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK((h.E.adjoint() * h.E - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK((h.F.adjoint() * h.F - Mat::Identity(3, 3)).norm() < 1e-12);
  }
}

TEST_CASE("hosvd at full ranks is lossless") {
  std::mt19937_64 gen(23);
  ComplexTensor3 t = random_tensor(3, 4, 5, gen);
  ComplexTensor3 back = tucker_reconstruct(hosvd(t, 3, 4, 5));
  CHECK((back.data() - t.data()).norm() < 1e-10 * t.norm());
}

TEST_CASE("hosvd of the zero tensor yields orthonormal factors and a zero core") {
  ComplexTensor3 z(4, 4, 4);
  z.data().setZero();
  TuckerFactors h = hosvd(z, 2, 2, 2);
  CHECK(h.core.norm() == 0.0);
  CHECK((h.D.adjoint() * h.D - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("hosvd validates rank bounds") {
  ComplexTensor3 t(2, 2, 2);
  t.data().setZero();
  CHECK_THROWS_AS(hosvd(t, 3, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(hosvd(t, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("vec_AXB matches the Kronecker vectorization identity") {
  std::mt19937_64 gen(29);
  Mat a = rng::complex_gaussian_matrix(4, 3, gen);
  Mat x = rng::complex_gaussian_matrix(3, 2, gen);
  Mat b = rng::complex_gaussian_matrix(2, 5, gen);
  Vec lhs = vec_AXB(a, x, b);
  Vec xv = Eigen::Map<const Vec>(x.data(), x.size());
  Vec rhs = kron(b.transpose(), a) * xv;
  CHECK((lhs - rhs).norm() < 1e-12 * lhs.norm());
}
