#pragma once

#include <cstdint>
#include <filesystem>

#include "tspr/tensor.hpp"

namespace tspr {

// On-disk frame stack: "LRPR" magic, one version byte (1), one dtype byte,
// then n1, n2, q as little-endian u32 and the payload as little-endian
// float64 in column-major, frame-major order (complex stores re, im pairs).
enum class StackDtype : std::uint8_t { kReal64 = 0, kComplex128 = 1 };

struct FrameStack {
  ComplexTensor3 tensor;
  StackDtype dtype = StackDtype::kComplex128;
};

FrameStack read_stack(const std::filesystem::path& path);
inline ComplexTensor3 ingest(const std::filesystem::path& path) {
  return read_stack(path).tensor;
}

// Writing kReal64 with any nonzero imaginary part refuses rather than
// silently dropping data.
void write_stack(const ComplexTensor3& t, const std::filesystem::path& path, StackDtype dtype);

struct PgmScale {
  double min = 0.0;
  double max = 0.0;
};

// Binary PGM (P5, maxval 255) of |frame|, scaled linearly from [min, max] to
// [0, 255]; a constant frame renders as mid-gray 128.  Rows are n1, columns
// n2.  Returns the scale used.
PgmScale export_pgm(const Mat& frame, const std::filesystem::path& path);

}  // namespace tspr
