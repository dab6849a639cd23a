#include "tspr/stack_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "tspr/errors.hpp"

namespace tspr {

namespace {

constexpr char kMagic[4] = {'L', 'R', 'P', 'R'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 1 + 1 + 3 * 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw ParseError(path.string() + ": " + what);
}

}  // namespace

FrameStack read_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
  if (bytes.size() < kHeaderBytes)
    fail(path, "truncated header: expected at least " + std::to_string(kHeaderBytes) +
                   " bytes, got " + std::to_string(bytes.size()));
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(path, "bad magic at offset 0");
  if (bytes[4] != kVersion)
    fail(path, "unsupported version " + std::to_string(bytes[4]) + " at offset 4");
  if (bytes[5] > 1)
    fail(path, "unknown dtype " + std::to_string(bytes[5]) + " at offset 5");
  const auto dtype = static_cast<StackDtype>(bytes[5]);

  const std::uint32_t n1 = get_u32(bytes.data() + 6);
  const std::uint32_t n2 = get_u32(bytes.data() + 10);
  const std::uint32_t q = get_u32(bytes.data() + 14);
  if (n1 == 0 || n2 == 0 || q == 0) fail(path, "zero dimension in header");

  const std::size_t count = static_cast<std::size_t>(n1) * n2 * q;
  const std::size_t per = dtype == StackDtype::kComplex128 ? 16 : 8;
  const std::size_t want = kHeaderBytes + count * per;
  if (bytes.size() != want)
    fail(path, "payload size mismatch: expected " + std::to_string(want) + " bytes, got " +
                   std::to_string(bytes.size()) + " (payload starts at offset " +
                   std::to_string(kHeaderBytes) + ")");

  Vec data(static_cast<Index>(count));
  const unsigned char* p = bytes.data() + kHeaderBytes;
  if (dtype == StackDtype::kComplex128) {
    for (std::size_t i = 0; i < count; ++i, p += 16)
      data[static_cast<Index>(i)] = Cx(get_f64(p), get_f64(p + 8));
  } else {
    for (std::size_t i = 0; i < count; ++i, p += 8)
      data[static_cast<Index>(i)] = Cx(get_f64(p), 0.0);
  }
  return {ComplexTensor3(std::move(data), n1, n2, q), dtype};
}

void write_stack(const ComplexTensor3& t, const std::filesystem::path& path, StackDtype dtype) {
  if (dtype == StackDtype::kReal64) {
    for (Index i = 0; i < t.size(); ++i)
      if (t.data()[i].imag() != 0.0)
        throw std::invalid_argument(
            "write_stack: real64 dtype requested but tensor has nonzero imaginary parts");
  }
  std::string out;
  out.reserve(kHeaderBytes +
              static_cast<std::size_t>(t.size()) * (dtype == StackDtype::kComplex128 ? 16 : 8));
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  out.push_back(static_cast<char>(dtype));
  put_u32(out, static_cast<std::uint32_t>(t.n1()));
  put_u32(out, static_cast<std::uint32_t>(t.n2()));
  put_u32(out, static_cast<std::uint32_t>(t.q()));
  for (Index i = 0; i < t.size(); ++i) {
    put_f64(out, t.data()[i].real());
    if (dtype == StackDtype::kComplex128) put_f64(out, t.data()[i].imag());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ParseError(path.string() + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ParseError(path.string() + ": short write");
}

PgmScale export_pgm(const Mat& frame, const std::filesystem::path& path) {
  const Index rows = frame.rows(), cols = frame.cols();
  RMat mag = frame.cwiseAbs();
  PgmScale scale{mag.minCoeff(), mag.maxCoeff()};

  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  const double span = scale.max - scale.min;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      int v = 128;
      if (span > 0.0) {
        v = static_cast<int>(std::lround((mag(i, j) - scale.min) / span * 255.0));
        v = std::min(255, std::max(0, v));
      }
      out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
    }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ParseError(path.string() + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ParseError(path.string() + ": short write");
  return scale;
}

}  // namespace tspr
