#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hom/estimation.hpp"
#include "hom/tools/io.hpp"

namespace hom::tools {

/// One gate-width sweep over the detuned two-laser configuration.
struct SweepSpec {
  std::vector<double> pt;                // gate widths, s
  double delta_f_hz = 100e6;             // f1 - f2
  double linewidth_hz = 10e6;            // intensity FWHM of each laser
  double center_frequency_hz = 193.25e12;
  double counts = 1000.0;                // mean distinguishable counts per bin
  bool noise = false;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::filesystem::path out = "out";
  double delay_step = 0.1e-9;            // s
  double delay_half_span = 0.0;          // s; 0 selects 6 sigma + p_t
  double gate_center = 0.0;              // s
  double outer_fraction = 0.2;
  bool gnuplot = false;

  void validate() const;
  ExperimentConfig config_for(double pt) const;
  /// Spectra are written out to |f| <= this bound (Hz).
  double spectrum_window_hz(double pt) const;
};

/// Config file keys (JSON object): pt_ns, delta_f_hz, linewidth_hz,
/// center_frequency_hz, counts, noise, seed, jobs, out, delay_step_ns,
/// delay_half_span_ns, gate_center_ns, outer_fraction, gnuplot.
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
nlohmann::json sweep_spec_to_json(const SweepSpec& spec);

struct PointFailure {
  double pt = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<ComplementarityRecord> records;  // successful points, in p_t order
  std::vector<PointFailure> failures;
};

/// Runs every p_t point, writes per-point spectra and interferogram CSVs,
/// complementarity.csv, records.json, optionally plot.gp, and manifest.json last.
/// Throws Error if the output directory cannot be written.
SweepResult run_sweep(const SweepSpec& spec);

/// Estimation pipeline on tabulated data (shared by run_sweep and analyze).
ComplementarityRecord analyze_tables(const SpectrumTable& s1, const SpectrumTable& s2,
                                     const InterferogramTable& interferogram, double pt,
                                     double outer_fraction = 0.2);

ComplementarityRecord analyze_files(const std::filesystem::path& spectrum1,
                                    const std::filesystem::path& spectrum2,
                                    const std::filesystem::path& interferogram, double pt,
                                    double outer_fraction = 0.2);

/// Record JSON: pt_s, K, sigma_K, V, sigma_V, Vcal, sigma_Vcal, S, sigma_S, K_raw, flags[].
nlohmann::json record_to_json(const ComplementarityRecord& r);

/// File-name stem fragment for a gate width, e.g. "pt4ns", "pt2.5ns".
std::string pt_label(double pt);

}  // namespace hom::tools
