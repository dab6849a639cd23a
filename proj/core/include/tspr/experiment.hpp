#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tspr/lrpr.hpp"
#include "tspr/metrics.hpp"
#include "tspr/stack_io.hpp"
#include "tspr/tspr.hpp"

namespace tspr {

enum class Algorithm { kTspr, kAltMinLowRap, kAltMinTrunc };

std::string to_string(Algorithm a);
std::string to_string(MeasurementKind k);
Algorithm parse_algorithm(const std::string& s);        // throws ConfigError
MeasurementKind parse_measurement(const std::string& s);  // throws ConfigError

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kTspr;
  MeasurementKind measurement = MeasurementKind::kComplexGaussian;
  double m_ratio = 0.0;   // Gaussian kinds: m = round(m_ratio * n)
  Index cdp_levels = 0;   // CDP: m = cdp_levels * n
  std::vector<Index> ranks;  // 3 entries for the Tucker model, 1 otherwise
  int T = 20;
  int T_rwf = 25;
  int T_cgls = 50;
  double alpha = 3.0;
  double rwf_step = 0.8;
  double cgls_tol = 1e-8;
  std::uint64_t seed = 0;
  bool correction = false;
  // When false, wall_time_s is reported as 0 so identical runs emit
  // byte-identical artifacts.
  bool record_timing = true;
  std::filesystem::path input;
  std::filesystem::path output_dir;
};

void validate(const ExperimentConfig& cfg);  // throws ConfigError
Index resolve_m(const ExperimentConfig& cfg, Index n);

// Exact-Tucker-rank phantom: orthonormal random factors, Gaussian core,
// scaled so ||X||_F = sqrt(q).
ComplexTensor3 synth_tensor(Index n1, Index n2, Index q, std::array<Index, 3> ranks,
                            std::uint64_t seed);

MeasurementEnsemble build_ensemble(const ExperimentConfig& cfg, Index n, Index q);

struct ExperimentOutcome {
  ComplexTensor3 recon;
  ReconstructionReport report;
};

// Simulate measurements of `truth`, reconstruct, optionally model-correct.
// Numerical aborts are captured in report.status ("abort: ...").
ExperimentOutcome run_reconstruction(const ExperimentConfig& cfg, const ComplexTensor3& truth);

// File-level pipeline: ingest cfg.input, reconstruct, then write report.csv,
// trace.csv, reconstruction.lrpr, per-frame PGMs and pgm_scale.csv into
// cfg.output_dir.
ReconstructionReport run_experiment(const ExperimentConfig& cfg);

std::string report_csv_header();
std::string report_csv_row(const ExperimentConfig& cfg, Index n1, Index n2, Index q, Index m,
                           const ReconstructionReport& rep);

}  // namespace tspr
