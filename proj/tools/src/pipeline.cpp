#include "hom/tools/pipeline.hpp"

#include <Eigen/Core>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hom/error.hpp"
#include "hom/parallel.hpp"

#ifndef HOM_VERSION
#define HOM_VERSION "unknown"
#endif

namespace hom::tools {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double ns_to_s(double ns) { return ns * 1e-9; }

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string("config key '") + key + "' has the wrong type");
  }
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

std::string complementarity_csv(const std::vector<ComplementarityRecord>& records) {
  std::string out = "pt_s,K,sigma_K,V,sigma_V,Vcal,sigma_Vcal,S,sigma_S,K_raw,flags\n";
  for (const auto& r : records) {
    for (double x : {r.pt, r.k, r.sigma_k, r.v, r.sigma_v, r.vcal, r.sigma_vcal, r.s, r.sigma_s,
                     r.k_raw})
      out += format_double(x) + ",";
    out += join_flags(r.flags) + "\n";
  }
  return out;
}

std::string gnuplot_script() {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set logscale x\n"
         "set xlabel 'p_t (ns)'\n"
         "set yrange [0:1.2]\n"
         "plot 'complementarity.csv' using ($1*1e9):($2**2) with linespoints title 'K^2', \\\n"
         "     '' using ($1*1e9):($6**2) with linespoints title 'V^2', \\\n"
         "     '' using ($1*1e9):8:9 with yerrorbars title 'S', \\\n"
         "     1 with lines dashtype 2 title 'S = 1'\n";
}

struct PointOutput {
  std::optional<ComplementarityRecord> record;
  std::string error;
  bool written = false;
};

}  // namespace

void SweepSpec::validate() const {
  if (pt.empty()) throw Error("pt list is empty");
  for (double p : pt)
    if (!(p > 0.0) || !std::isfinite(p)) throw Error("pt values must be positive");
  if (!std::isfinite(delta_f_hz)) throw Error("delta_f must be finite");
  if (!(linewidth_hz > 0.0) || !std::isfinite(linewidth_hz)) throw Error("linewidth must be positive");
  if (!(center_frequency_hz > 0.0)) throw Error("center frequency must be positive");
  if (!(counts > 0.0) || !std::isfinite(counts)) throw Error("counts must be positive");
  if (jobs == 0) throw Error("jobs must be at least 1");
  if (!(delay_step > 0.0)) throw Error("delay step must be positive");
  if (delay_half_span < 0.0) throw Error("delay half span must be >= 0");
  if (!(outer_fraction > 0.0 && outer_fraction < 1.0)) throw Error("outer fraction must be in (0, 1)");
}

ExperimentConfig SweepSpec::config_for(double p) const {
  const double sigma = sigma_for_linewidth(linewidth_hz);
  const double w0 = kTwoPi * center_frequency_hz;
  const double dw = kTwoPi * delta_f_hz;
  ExperimentConfig cfg;
  cfg.packet1 = WavePacket{0.0, sigma, w0 + dw / 2.0, 0.0};
  cfg.packet2 = WavePacket{0.0, sigma, w0 - dw / 2.0, 0.0};
  cfg.gate = GateConfig{p, gate_center};
  const double half = delay_half_span > 0.0 ? delay_half_span : 6.0 * sigma + p;
  cfg.delays = symmetric_delays(half, delay_step);
  cfg.mean_counts_per_bin = counts;
  cfg.noise_enabled = noise;
  cfg.rng_seed = derive_seed(seed, std::bit_cast<std::uint64_t>(p));
  return cfg;
}

double SweepSpec::spectrum_window_hz(double p) const {
  return std::abs(delta_f_hz) / 2.0 + 6.0 / p + 6.0 * linewidth_hz;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  static const char* const known[] = {"pt_ns",         "delta_f_hz",         "linewidth_hz",
                                      "center_frequency_hz", "counts",       "noise",
                                      "seed",          "jobs",               "out",
                                      "delay_step_ns", "delay_half_span_ns", "gate_center_ns",
                                      "outer_fraction", "gnuplot"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw Error("unknown config key '" + key + "'");
  }
  SweepSpec s;
  for (double p : get_or<std::vector<double>>(j, "pt_ns", {})) s.pt.push_back(ns_to_s(p));
  s.delta_f_hz = get_or(j, "delta_f_hz", s.delta_f_hz);
  s.linewidth_hz = get_or(j, "linewidth_hz", s.linewidth_hz);
  s.center_frequency_hz = get_or(j, "center_frequency_hz", s.center_frequency_hz);
  s.counts = get_or(j, "counts", s.counts);
  s.noise = get_or(j, "noise", s.noise);
  s.seed = get_or(j, "seed", s.seed);
  s.jobs = get_or(j, "jobs", s.jobs);
  s.out = get_or<std::string>(j, "out", s.out.string());
  s.delay_step = ns_to_s(get_or(j, "delay_step_ns", s.delay_step * 1e9));
  s.delay_half_span = ns_to_s(get_or(j, "delay_half_span_ns", s.delay_half_span * 1e9));
  s.gate_center = ns_to_s(get_or(j, "gate_center_ns", s.gate_center * 1e9));
  s.outer_fraction = get_or(j, "outer_fraction", s.outer_fraction);
  s.gnuplot = get_or(j, "gnuplot", s.gnuplot);
  return s;
}

nlohmann::json sweep_spec_to_json(const SweepSpec& s) {
  std::vector<double> pt_ns;
  for (double p : s.pt) pt_ns.push_back(p * 1e9);
  return {{"pt_ns", pt_ns},
          {"delta_f_hz", s.delta_f_hz},
          {"linewidth_hz", s.linewidth_hz},
          {"center_frequency_hz", s.center_frequency_hz},
          {"counts", s.counts},
          {"noise", s.noise},
          {"seed", s.seed},
          {"jobs", s.jobs},
          {"out", s.out.string()},
          {"delay_step_ns", s.delay_step * 1e9},
          {"delay_half_span_ns", s.delay_half_span * 1e9},
          {"gate_center_ns", s.gate_center * 1e9},
          {"outer_fraction", s.outer_fraction},
          {"gnuplot", s.gnuplot}};
}

std::string pt_label(double pt) {
  std::ostringstream ss;
  ss.precision(6);
  ss << pt * 1e9;
  return "pt" + ss.str() + "ns";
}

ComplementarityRecord analyze_tables(const SpectrumTable& s1, const SpectrumTable& s2,
                                     const InterferogramTable& interferogram, double pt,
                                     double outer_fraction) {
  bool r1 = false, r2 = false, r3 = false;
  const auto i1 = to_intensity_spectrum(s1, &r1);
  const auto i2 = to_intensity_spectrum(s2, &r2);
  const auto data = to_interferogram(interferogram, &r3);
  FringeFitOptions options;
  options.outer_fraction = outer_fraction;
  auto rec = estimate_complementarity(i1, i2, data, pt, options);
  if (r1 || r2 || r3) rec.flags.push_back("resampled");
  return rec;
}

ComplementarityRecord analyze_files(const std::filesystem::path& spectrum1,
                                    const std::filesystem::path& spectrum2,
                                    const std::filesystem::path& interferogram, double pt,
                                    double outer_fraction) {
  return analyze_tables(read_spectrum_csv(spectrum1), read_spectrum_csv(spectrum2),
                        read_interferogram_csv(interferogram), pt, outer_fraction);
}

nlohmann::json record_to_json(const ComplementarityRecord& r) {
  nlohmann::json j;
  j["pt_s"] = std::isfinite(r.pt) ? nlohmann::json(r.pt) : nlohmann::json(nullptr);
  j["K"] = r.k;
  j["sigma_K"] = r.sigma_k;
  j["V"] = r.v;
  j["sigma_V"] = r.sigma_v;
  j["Vcal"] = r.vcal;
  j["sigma_Vcal"] = r.sigma_vcal;
  j["S"] = r.s;
  j["sigma_S"] = r.sigma_s;
  j["K_raw"] = r.k_raw;
  j["flags"] = r.flags;
  return j;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(spec.out, ec);
  if (ec || !std::filesystem::is_directory(spec.out))
    throw Error("cannot create output directory " + spec.out.string() +
                (ec ? ": " + ec.message() : ""));

  std::vector<PointOutput> outputs(spec.pt.size());
  parallel_for(spec.pt.size(), spec.jobs, [&](std::size_t i) {
    const double pt = spec.pt[i];
    const auto label = pt_label(pt);
    SpectrumTable t1, t2;
    InterferogramTable ti;
    try {
      const auto cfg = spec.config_for(pt);
      const auto [i1, i2] = gated_spectra(cfg);
      const double window = spec.spectrum_window_hz(pt);
      t1 = spectrum_table(i1, window);
      t2 = spectrum_table(i2, window);
      ti = interferogram_table(synthesize_interferogram(cfg, 1));
    } catch (const std::exception& e) {
      outputs[i].error = e.what();
      return;
    }
    // Write failures are fatal for the whole run; fit failures are per point.
    write_atomically(spec.out / ("spectrum1_" + label + ".csv"), to_csv(t1));
    write_atomically(spec.out / ("spectrum2_" + label + ".csv"), to_csv(t2));
    write_atomically(spec.out / ("interferogram_" + label + ".csv"), to_csv(ti));
    outputs[i].written = true;
    try {
      outputs[i].record = analyze_tables(t1, t2, ti, pt, spec.outer_fraction);
    } catch (const std::exception& e) {
      outputs[i].error = e.what();
    }
  });

  SweepResult result;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].record)
      result.records.push_back(*outputs[i].record);
    else
      result.failures.push_back(PointFailure{spec.pt[i], outputs[i].error});
  }

  write_atomically(spec.out / "complementarity.csv", complementarity_csv(result.records));
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.records) records.push_back(record_to_json(r));
  write_atomically(spec.out / "records.json", records.dump(2) + "\n");
  if (spec.gnuplot) write_atomically(spec.out / "plot.gp", gnuplot_script());

  auto config = sweep_spec_to_json(spec);
  // Excluded so that output bytes do not depend on scheduling or location.
  config.erase("jobs");
  config.erase("out");
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) failures.push_back({{"pt_s", f.pt}, {"error", f.message}});
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.pt.size(); ++i) {
    if (!outputs[i].written) continue;
    const auto label = pt_label(spec.pt[i]);
    for (const char* stem : {"spectrum1_", "spectrum2_", "interferogram_"})
      files.push_back(std::string(stem) + label + ".csv");
  }
  nlohmann::json manifest = {
      {"config", config},
      {"seed", spec.seed},
      {"versions",
       {{"homsim", HOM_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
      {"files", files},
      {"failures", failures}};
  write_atomically(spec.out / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace hom::tools
