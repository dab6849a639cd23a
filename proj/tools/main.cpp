#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tspr/errors.hpp"
#include "tspr/experiment.hpp"

namespace {

std::array<tspr::Index, 3> ranks3(const std::vector<long long>& r) {
  if (r.size() != 3) throw tspr::ConfigError("expected exactly three ranks (r1,r2,r3)");
  return {static_cast<tspr::Index>(r[0]), static_cast<tspr::Index>(r[1]),
          static_cast<tspr::Index>(r[2])};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tucker-structured low-rank phase retrieval toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Key=value file; subcommand options live under a [subcommand] section "
                 "and command-line flags override the file");
  int exit_code = 0;

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Write an exact-rank synthetic frame stack");
  struct {
    long long n1 = 16, n2 = 16, q = 20;
    std::vector<long long> ranks{4, 4, 3};
    std::uint64_t seed = 0;
    std::string output;
  } sy;
  synth->add_option("--n1", sy.n1, "Frame rows")->capture_default_str();
  synth->add_option("--n2", sy.n2, "Frame columns")->capture_default_str();
  synth->add_option("--q", sy.q, "Number of frames")->capture_default_str();
  synth->add_option("--ranks", sy.ranks, "Tucker ranks r1,r2,r3")
      ->delimiter(',')
      ->capture_default_str();
  synth->add_option("--seed", sy.seed, "RNG seed")->capture_default_str();
  synth->add_option("--output", sy.output, "Output stack path")->required();
  synth->callback([&] {
    auto x = tspr::synth_tensor(sy.n1, sy.n2, sy.q, ranks3(sy.ranks), sy.seed);
    tspr::write_stack(x, sy.output, tspr::StackDtype::kComplex128);
    const double self = tspr::mat_dist(x, x);
    std::printf("wrote %s (%lld x %lld x %lld), self mat-dist %.12g\n", sy.output.c_str(),
                sy.n1, sy.n2, sy.q, self);
  });

  // simulate ---------------------------------------------------------------
  auto* simulate =
      app.add_subcommand("simulate", "Write magnitude observations of a frame stack");
  struct {
    std::string input, output;
    std::string measurement = "complex-gaussian";
    double m_ratio = 0.0;
    long long cdp_levels = 0;
    std::uint64_t seed = 0;
  } sim;
  simulate->add_option("--input", sim.input, "Truth stack path")->required();
  simulate->add_option("--output", sim.output, "Observations stack path (real64, m x 1 x q)")
      ->required();
  simulate
      ->add_option("--measurement", sim.measurement,
                   "real-gaussian, complex-gaussian or cdp")
      ->capture_default_str();
  simulate->add_option("--m-ratio", sim.m_ratio, "Measurements per frame as a fraction of n");
  simulate->add_option("--cdp-levels", sim.cdp_levels, "CDP mask count");
  simulate->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  simulate->callback([&] {
    tspr::ExperimentConfig cfg;
    cfg.measurement = tspr::parse_measurement(sim.measurement);
    cfg.m_ratio = sim.m_ratio;
    cfg.cdp_levels = sim.cdp_levels;
    cfg.seed = sim.seed;
    cfg.ranks = {1};
    cfg.algorithm = tspr::Algorithm::kAltMinLowRap;  // irrelevant; validates measurement
    tspr::validate(cfg);
    auto truth = tspr::ingest(sim.input);
    auto ens = tspr::build_ensemble(cfg, truth.frame_size(), truth.q());
    auto y = tspr::observe(ens, truth);
    tspr::ComplexTensor3 obs(ens.m, 1, ens.q);
    for (tspr::Index k = 0; k < ens.q; ++k) obs.set_frame_vec(k, y[k].cast<tspr::Cx>());
    tspr::write_stack(obs, sim.output, tspr::StackDtype::kReal64);
    std::printf("wrote %s (%lld measurements x %lld frames)\n", sim.output.c_str(),
                static_cast<long long>(ens.m), static_cast<long long>(ens.q));
  });

  // reconstruct --------------------------------------------------------------
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct a frame stack from magnitudes");
  struct {
    std::string algorithm = "tspr";
    std::string measurement = "complex-gaussian";
    double m_ratio = 0.0;
    long long cdp_levels = 0;
    std::vector<long long> ranks;
    int T = 20, T_rwf = 25, T_cgls = 50;
    double alpha = 3.0, rwf_step = 0.8, cgls_tol = 1e-8;
    std::uint64_t seed = 0;
    bool correction = false, no_timing = false;
    std::string input, output_dir;
  } rc;
  rec->add_option("--algorithm", rc.algorithm, "tspr, altmin-lowrap or altmin-trunc")
      ->capture_default_str();
  rec->add_option("--measurement", rc.measurement, "real-gaussian, complex-gaussian or cdp")
      ->capture_default_str();
  rec->add_option("--m-ratio", rc.m_ratio, "Measurements per frame as a fraction of n");
  rec->add_option("--cdp-levels", rc.cdp_levels, "CDP mask count");
  rec->add_option("--ranks", rc.ranks, "Model ranks: r1,r2,r3 for tspr, r otherwise")
      ->delimiter(',')
      ->required();
  rec->add_option("--T", rc.T, "Outer iterations")->capture_default_str();
  rec->add_option("--T-rwf", rc.T_rwf, "Inner RWF iterations")->capture_default_str();
  rec->add_option("--T-cgls", rc.T_cgls, "Inner CGLS iterations")->capture_default_str();
  rec->add_option("--alpha", rc.alpha, "Spectral truncation level")->capture_default_str();
  rec->add_option("--rwf-step", rc.rwf_step, "RWF step size")->capture_default_str();
  rec->add_option("--cgls-tol", rc.cgls_tol, "CGLS relative tolerance")->capture_default_str();
  rec->add_option("--seed", rc.seed, "RNG seed")->capture_default_str();
  rec->add_flag("--correction", rc.correction, "Per-frame refinement of the model estimate");
  rec->add_flag("--no-timing", rc.no_timing,
                "Report wall_time_s as 0 for byte-reproducible artifacts");
  rec->add_option("--input", rc.input, "Truth stack path")->required();
  rec->add_option("--output-dir", rc.output_dir, "Artifact directory")->required();
  rec->callback([&] {
    tspr::ExperimentConfig cfg;
    cfg.algorithm = tspr::parse_algorithm(rc.algorithm);
    cfg.measurement = tspr::parse_measurement(rc.measurement);
    cfg.m_ratio = rc.m_ratio;
    cfg.cdp_levels = rc.cdp_levels;
    for (long long r : rc.ranks) cfg.ranks.push_back(static_cast<tspr::Index>(r));
    cfg.T = rc.T;
    cfg.T_rwf = rc.T_rwf;
    cfg.T_cgls = rc.T_cgls;
    cfg.alpha = rc.alpha;
    cfg.rwf_step = rc.rwf_step;
    cfg.cgls_tol = rc.cgls_tol;
    cfg.seed = rc.seed;
    cfg.correction = rc.correction;
    cfg.record_timing = !rc.no_timing;
    cfg.input = rc.input;
    cfg.output_dir = rc.output_dir;
    auto rep = tspr::run_experiment(cfg);
    std::printf("mat_dist %.12g, relative_error %.12g, params %lld, status %s\n", rep.mat_dist,
                rep.relative_error, rep.param_count, rep.status.c_str());
    if (rep.status != "ok") exit_code = 3;
  });

  // evaluate -----------------------------------------------------------------
  auto* eval = app.add_subcommand("evaluate", "Phase-invariant distance between two stacks");
  struct {
    std::string truth, estimate, per_frame;
  } ev;
  eval->add_option("--truth", ev.truth, "Reference stack")->required();
  eval->add_option("--estimate", ev.estimate, "Estimate stack")->required();
  eval->add_option("--per-frame", ev.per_frame, "Optional per-frame CSV output path");
  eval->callback([&] {
    auto truth = tspr::ingest(ev.truth);
    auto est = tspr::ingest(ev.estimate);
    const double d = tspr::mat_dist(est, truth);
    const double tn = truth.norm();
    std::printf("mat_dist %.12g\nrelative_error %.12g\n", d, tn > 0 ? d / tn : d);
    if (!ev.per_frame.empty()) {
      std::string csv = "frame,dist\n";
      auto dists = tspr::frame_dists(est, truth);
      for (std::size_t k = 0; k < dists.size(); ++k) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", k, dists[k]);
        csv += buf;
      }
      std::FILE* f = std::fopen(ev.per_frame.c_str(), "wb");
      if (!f) throw tspr::ParseError(ev.per_frame + ": cannot open for writing");
      std::fwrite(csv.data(), 1, csv.size(), f);
      std::fclose(f);
    }
  });

  // render -------------------------------------------------------------------
  auto* render = app.add_subcommand("render", "Export stack frames as PGM images");
  struct {
    std::string input, output_dir, prefix = "frame";
  } rd;
  render->add_option("--input", rd.input, "Stack path")->required();
  render->add_option("--output-dir", rd.output_dir, "Image directory")->required();
  render->add_option("--prefix", rd.prefix, "Image name prefix")->capture_default_str();
  render->callback([&] {
    auto x = tspr::ingest(rd.input);
    std::filesystem::create_directories(rd.output_dir);
    std::string scales = "frame,min,max\n";
    for (tspr::Index k = 0; k < x.q(); ++k) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%03lld.pgm", rd.prefix.c_str(),
                    static_cast<long long>(k));
      auto sc = tspr::export_pgm(x.frame(k), std::filesystem::path(rd.output_dir) / name);
      char row[96];
      std::snprintf(row, sizeof(row), "%lld,%.12g,%.12g\n", static_cast<long long>(k), sc.min,
                    sc.max);
      scales += row;
    }
    std::FILE* f = std::fopen(
        (std::filesystem::path(rd.output_dir) / (rd.prefix + "_scale.csv")).c_str(), "wb");
    if (!f) throw tspr::ParseError(rd.output_dir + ": cannot open scale CSV for writing");
    std::fwrite(scales.data(), 1, scales.size(), f);
    std::fclose(f);
    std::printf("wrote %lld images to %s\n", static_cast<long long>(x.q()),
                rd.output_dir.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const tspr::NumericalError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  } catch (const tspr::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const tspr::ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return exit_code;
}
