#include "tspr/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/QR>

#include "tspr/errors.hpp"
#include "tspr/rng.hpp"

namespace tspr {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

Mat random_orthonormal(Index rows, Index cols, std::mt19937_64& gen) {
  Mat g = rng::complex_gaussian_matrix(rows, cols, gen);
  return Eigen::HouseholderQR<Mat>(g).householderQ() * Mat::Identity(rows, cols);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ParseError(path.string() + ": cannot open for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw ParseError(path.string() + ": short write");
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kTspr: return "tspr";
    case Algorithm::kAltMinLowRap: return "altmin-lowrap";
    default: return "altmin-trunc";
  }
}

std::string to_string(MeasurementKind k) {
  switch (k) {
    case MeasurementKind::kRealGaussian: return "real-gaussian";
    case MeasurementKind::kComplexGaussian: return "complex-gaussian";
    default: return "cdp";
  }
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "tspr") return Algorithm::kTspr;
  if (s == "altmin-lowrap") return Algorithm::kAltMinLowRap;
  if (s == "altmin-trunc") return Algorithm::kAltMinTrunc;
  throw ConfigError("unknown algorithm '" + s +
                    "' (expected tspr, altmin-lowrap or altmin-trunc)");
}

MeasurementKind parse_measurement(const std::string& s) {
  if (s == "real-gaussian") return MeasurementKind::kRealGaussian;
  if (s == "complex-gaussian") return MeasurementKind::kComplexGaussian;
  if (s == "cdp") return MeasurementKind::kCdp;
  throw ConfigError("unknown measurement '" + s +
                    "' (expected real-gaussian, complex-gaussian or cdp)");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.algorithm == Algorithm::kTspr) {
    if (cfg.ranks.size() != 3)
      throw ConfigError("tspr needs exactly three ranks (r1,r2,r3)");
  } else if (cfg.ranks.size() != 1) {
    throw ConfigError(to_string(cfg.algorithm) + " needs exactly one rank");
  }
  for (Index r : cfg.ranks)
    if (r < 1) throw ConfigError("ranks must be >= 1");
  if (cfg.measurement == MeasurementKind::kCdp) {
    if (cfg.cdp_levels < 1) throw ConfigError("cdp measurements need cdp_levels >= 1");
  } else if (cfg.m_ratio <= 0.0) {
    throw ConfigError("gaussian measurements need m_ratio > 0");
  }
  if (cfg.T < 0) throw ConfigError("T must be >= 0");
  if (cfg.T_rwf < 0) throw ConfigError("T_rwf must be >= 0");
  if (cfg.T_cgls < 0) throw ConfigError("T_cgls must be >= 0");
  if (cfg.alpha <= 0.0) throw ConfigError("alpha must be > 0");
  if (cfg.rwf_step <= 0.0) throw ConfigError("rwf_step must be > 0");
  if (cfg.cgls_tol < 0.0) throw ConfigError("cgls_tol must be >= 0");
}

Index resolve_m(const ExperimentConfig& cfg, Index n) {
  if (cfg.measurement == MeasurementKind::kCdp) return cfg.cdp_levels * n;
  const auto m = static_cast<Index>(std::llround(cfg.m_ratio * static_cast<double>(n)));
  if (m < 1) throw ConfigError("m_ratio * n rounds to zero measurements");
  return m;
}

ComplexTensor3 synth_tensor(Index n1, Index n2, Index q, std::array<Index, 3> ranks,
                            std::uint64_t seed) {
  const Index dims[3] = {n1, n2, q};
  for (int i = 0; i < 3; ++i)
    if (ranks[i] < 1 || ranks[i] > dims[i])
      throw std::invalid_argument("synth_tensor: rank out of range for its dimension");
  auto gen = rng::substream(seed, rng::Stream::kSynth);
  TuckerFactors f;
  f.D = random_orthonormal(n1, ranks[0], gen);
  f.E = random_orthonormal(n2, ranks[1], gen);
  f.F = random_orthonormal(q, ranks[2], gen);
  f.core = ComplexTensor3(rng::complex_gaussian(ranks[0] * ranks[1] * ranks[2], gen),
                          ranks[0], ranks[1], ranks[2]);
  ComplexTensor3 x = tucker_reconstruct(f);
  const double nx = x.norm();
  if (nx > 0.0) x.data() *= std::sqrt(static_cast<double>(q)) / nx;
  return x;
}

MeasurementEnsemble build_ensemble(const ExperimentConfig& cfg, Index n, Index q) {
  if (cfg.measurement == MeasurementKind::kCdp)
    return gen_cdp(n, cfg.cdp_levels, q, cfg.seed);
  return gen_gaussian(n, resolve_m(cfg, n), q,
                      cfg.measurement == MeasurementKind::kComplexGaussian, cfg.seed);
}

ExperimentOutcome run_reconstruction(const ExperimentConfig& cfg, const ComplexTensor3& truth) {
  validate(cfg);
  const Index n1 = truth.n1(), n2 = truth.n2(), q = truth.q();

  MeasurementEnsemble ens = build_ensemble(cfg, truth.frame_size(), q);
  attach_observations(ens, truth);

  const RwfConfig rwf_cfg{cfg.T_rwf, cfg.rwf_step};
  const CglsConfig cgls_cfg{cfg.T_cgls, cfg.cgls_tol};
  const SpectralInitConfig init_cfg{cfg.alpha};

  ExperimentOutcome out;
  out.recon = ComplexTensor3(n1, n2, q);
  long long params = 0;
  std::vector<double> objective;
  std::string status = "ok";

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (cfg.algorithm == Algorithm::kTspr) {
      TsprConfig tc;
      tc.ranks = {cfg.ranks[0], cfg.ranks[1], cfg.ranks[2]};
      tc.T = cfg.T;
      tc.rwf = rwf_cfg;
      tc.cgls = cgls_cfg;
      tc.init = init_cfg;
      TsprResult res = tspr_run(ens, n1, n2, tc);
      out.recon = std::move(res.X);
      objective = std::move(res.objective);
      params = param_count(TuckerModel{n1, n2, q, cfg.ranks[0], cfg.ranks[1], cfg.ranks[2]});
    } else {
      LrprConfig lc;
      lc.r = cfg.ranks[0];
      lc.T = cfg.T;
      lc.init = init_cfg;
      lc.rwf = rwf_cfg;
      lc.cgls = cgls_cfg;
      LrprResult res = cfg.algorithm == Algorithm::kAltMinLowRap ? altmin_lowrap(ens, lc)
                                                                 : altmin_trunc(ens, lc);
      out.recon = ComplexTensor3::from_frame_matrix(res.X, n1, n2);
      objective = std::move(res.objective);
      params = param_count(MatrixModel{ens.n, q, cfg.ranks[0]});
    }
    if (cfg.correction)
      out.recon = model_correct(ens, out.recon, rwf_cfg).corrected;
  } catch (const NumericalError& e) {
    status = std::string("abort: ") + e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();

  out.report = make_report(out.recon, truth, params, objective);
  out.report.status = sanitize(status);
  out.report.wall_time_s =
      cfg.record_timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
  return out;
}

ReconstructionReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("run_experiment needs an input stack");
  if (cfg.output_dir.empty()) throw ConfigError("run_experiment needs an output directory");
  ComplexTensor3 truth = ingest(cfg.input);
  ExperimentOutcome out = run_reconstruction(cfg, truth);

  std::filesystem::create_directories(cfg.output_dir);
  write_stack(out.recon, cfg.output_dir / "reconstruction.lrpr", StackDtype::kComplex128);

  std::string report = report_csv_header() + "\n" +
                       report_csv_row(cfg, truth.n1(), truth.n2(), truth.q(),
                                      resolve_m(cfg, truth.frame_size()), out.report) +
                       "\n";
  write_text(cfg.output_dir / "report.csv", report);

  std::string trace = "iter,objective\n";
  for (std::size_t i = 0; i < out.report.objective_trace.size(); ++i)
    trace += std::to_string(i) + "," + fmt(out.report.objective_trace[i]) + "\n";
  write_text(cfg.output_dir / "trace.csv", trace);

  std::string scales = "frame,min,max\n";
  for (Index k = 0; k < out.recon.q(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03lld.pgm", static_cast<long long>(k));
    PgmScale sc = export_pgm(out.recon.frame(k), cfg.output_dir / name);
    scales += std::to_string(k) + "," + fmt(sc.min) + "," + fmt(sc.max) + "\n";
  }
  write_text(cfg.output_dir / "pgm_scale.csv", scales);
  return out.report;
}

std::string report_csv_header() {
  return "algorithm,measurement,n1,n2,q,m,ranks,params,T,T_rwf,T_cgls,alpha,seed,"
         "mat_dist,relative_error,wall_time_s,status";
}

std::string report_csv_row(const ExperimentConfig& cfg, Index n1, Index n2, Index q, Index m,
                           const ReconstructionReport& rep) {
  std::string ranks;
  for (std::size_t i = 0; i < cfg.ranks.size(); ++i) {
    if (i) ranks += "x";
    ranks += std::to_string(cfg.ranks[i]);
  }
  std::string row;
  row += to_string(cfg.algorithm) + "," + to_string(cfg.measurement) + ",";
  row += std::to_string(n1) + "," + std::to_string(n2) + "," + std::to_string(q) + ",";
  row += std::to_string(m) + "," + ranks + "," + std::to_string(rep.param_count) + ",";
  row += std::to_string(cfg.T) + "," + std::to_string(cfg.T_rwf) + "," +
         std::to_string(cfg.T_cgls) + ",";
  row += fmt(cfg.alpha) + "," + std::to_string(cfg.seed) + ",";
  row += fmt(rep.mat_dist) + "," + fmt(rep.relative_error) + "," + fmt(rep.wall_time_s) + ",";
  row += rep.status;
  return row;
}

}  // namespace tspr
