#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "hom/error.hpp"
#include "hom/tools/pipeline.hpp"

#ifndef HOM_VERSION
#define HOM_VERSION "unknown"
#endif

namespace {

using hom::tools::SweepSpec;

struct CommonFlags {
  std::string config;
  std::vector<double> pt_ns;
  double delta_f = 0.0;
  double linewidth = 0.0;
  double counts = 0.0;
  bool noise = false;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out;

  CLI::Option* o_pt = nullptr;
  CLI::Option* o_delta_f = nullptr;
  CLI::Option* o_linewidth = nullptr;
  CLI::Option* o_counts = nullptr;
  CLI::Option* o_noise = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_jobs = nullptr;
  CLI::Option* o_out = nullptr;

  void attach(CLI::App* app, bool single_pt) {
    app->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
    o_pt = app->add_option("--pt", pt_ns, single_pt ? "Gate width (ns)" : "Gate widths (ns)")
               ->delimiter(',');
    if (single_pt) o_pt->expected(1);
    o_delta_f = app->add_option("--delta-f", delta_f, "Detuning f1 - f2 (Hz), default 100e6");
    o_linewidth = app->add_option("--linewidth", linewidth, "Laser linewidth FWHM (Hz), default 10e6");
    o_counts = app->add_option("--counts", counts, "Mean counts per bin, default 1000");
    o_noise = app->add_option("--noise", noise, "Poisson noise (true/false), default false");
    o_seed = app->add_option("--seed", seed, "RNG seed, default 1");
    o_jobs = app->add_option("--jobs", jobs, "Parallel workers, default 1")->check(CLI::PositiveNumber);
    o_out = app->add_option("--out", out, "Output directory, default out");
  }

  SweepSpec spec() const {
    SweepSpec s;
    if (!config.empty())
      s = hom::tools::sweep_spec_from_json(nlohmann::json::parse(hom::tools::read_file(config)));
    if (o_pt->count()) {
      s.pt.clear();
      for (double p : pt_ns) s.pt.push_back(p * 1e-9);
    }
    if (o_delta_f->count()) s.delta_f_hz = delta_f;
    if (o_linewidth->count()) s.linewidth_hz = linewidth;
    if (o_counts->count()) s.counts = counts;
    if (o_noise->count()) s.noise = noise;
    if (o_seed->count()) s.seed = seed;
    if (o_jobs->count()) s.jobs = jobs;
    if (o_out->count()) s.out = out;
    return s;
  }
};

void report_failures(const hom::tools::SweepResult& result) {
  for (const auto& f : result.failures)
    std::cerr << "warning: pt = " << f.pt * 1e9 << " ns failed: " << f.message << "\n";
}

int run_sweep_command(const CommonFlags& flags) {
  const auto spec = flags.spec();
  const auto result = hom::tools::run_sweep(spec);
  report_failures(result);
  std::printf("%10s %9s %9s %9s %9s %9s  %s\n", "pt_ns", "K", "Vcal", "S", "sigma_S", "K_raw",
              "flags");
  for (const auto& r : result.records) {
    std::string flags_text;
    for (const auto& f : r.flags) flags_text += (flags_text.empty() ? "" : ",") + f;
    std::printf("%10.4g %9.5f %9.5f %9.5f %9.2e %9.5f  %s\n", r.pt * 1e9, r.k, r.vcal, r.s,
                r.sigma_s, r.k_raw, flags_text.c_str());
  }
  std::printf("wrote %s\n", spec.out.string().c_str());
  return 0;
}

int run_simulate_command(const CommonFlags& flags) {
  const auto spec = flags.spec();
  if (spec.pt.size() != 1) throw hom::Error("simulate needs exactly one --pt value");
  const auto result = hom::tools::run_sweep(spec);
  report_failures(result);
  if (result.records.empty()) return 1;
  std::cout << hom::tools::record_to_json(result.records.front()).dump(2) << "\n";
  return 0;
}

int run_oracle_command(const CommonFlags& flags, std::size_t samples, std::size_t points) {
  auto spec = flags.spec();
  if (spec.pt.empty()) spec.pt = {6e-9};
  spec.validate();
  if (points < 2) throw hom::Error("need at least 2 delay points");
  bool all_ok = true;
  for (double pt : spec.pt) {
    const auto cfg = spec.config_for(pt);
    const double half = 0.5 * cfg.delays.span();
    std::printf("pt = %g ns, %zu samples\n%12s %10s %10s %10s %6s\n", pt * 1e9, samples, "tau_ns",
                "analytic", "mc", "se", "ok");
    for (std::size_t i = 0; i < points; ++i) {
      const double tau = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
      const double exact = hom::coincidence_rate(cfg, tau);
      const auto mc = hom::mc_coincidence_oracle(cfg, tau, samples, spec.jobs);
      const bool ok = std::abs(mc.rate - exact) <= std::max(1e-3, 3.0 * mc.standard_error);
      all_ok = all_ok && ok;
      std::printf("%12.4f %10.6f %10.6f %10.2e %6s\n", tau * 1e9, exact, mc.rate,
                  mc.standard_error, ok ? "yes" : "NO");
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon interference simulator for gated weak coherent states"};
  app.set_version_flag("--version", HOM_VERSION);
  app.require_subcommand(1);

  CommonFlags sim_flags, sweep_flags, oracle_flags;
  auto* simulate = app.add_subcommand("simulate", "Simulate and analyze a single gate width");
  sim_flags.attach(simulate, true);
  auto* sweep = app.add_subcommand("sweep", "Sweep gate widths and tabulate complementarity");
  sweep_flags.attach(sweep, false);

  auto* analyze = app.add_subcommand("analyze", "Analyze measured spectra and interferogram CSVs");
  std::string spectrum1, spectrum2, interferogram;
  double analyze_pt_ns = NAN;
  double outer_fraction = 0.2;
  analyze->add_option("--spectrum1", spectrum1, "Spectrum CSV of arm 1")->required()->check(CLI::ExistingFile);
  analyze->add_option("--spectrum2", spectrum2, "Spectrum CSV of arm 2")->required()->check(CLI::ExistingFile);
  analyze->add_option("--interferogram", interferogram, "Interferogram CSV")->required()->check(CLI::ExistingFile);
  analyze->add_option("--pt", analyze_pt_ns, "Gate width (ns), recorded in the output");
  analyze->add_option("--outer-fraction", outer_fraction, "Delay-span fraction used for R_dist")
      ->check(CLI::Range(0.01, 0.99));

  auto* oracle = app.add_subcommand("oracle", "Cross-check the analytic rate against Monte Carlo");
  oracle_flags.attach(oracle, false);
  std::size_t samples = 100000;
  std::size_t points = 20;
  oracle->add_option("--samples", samples, "Monte Carlo samples per delay")->check(CLI::Range(10000ul, 100000000ul));
  oracle->add_option("--points", points, "Number of delays");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate_command(sim_flags);
    if (*sweep) return run_sweep_command(sweep_flags);
    if (*oracle) return run_oracle_command(oracle_flags, samples, points);
    if (*analyze) {
      const auto rec = hom::tools::analyze_files(spectrum1, spectrum2, interferogram,
                                                 analyze_pt_ns * 1e-9, outer_fraction);
      for (const auto& f : rec.flags)
        if (f == "resampled") std::cerr << "warning: non-uniform grid resampled\n";
      std::cout << hom::tools::record_to_json(rec).dump(2) << "\n";
      return 0;
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
