#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hom/interference.hpp"
#include "hom/spectral.hpp"

namespace hom::tools {

/// Spectrum CSV: header `freq_hz,intensity`; freq_hz is the detuning from the
/// optical reference frequency.
struct SpectrumTable {
  std::vector<double> freq_hz;
  std::vector<double> intensity;
};

/// Interferogram CSV: header `tau_s,counts`.
struct InterferogramTable {
  std::vector<double> tau_s;
  std::vector<double> counts;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

SpectrumTable spectrum_table(const IntensitySpectrum& spectrum, double max_abs_freq_hz);
InterferogramTable interferogram_table(const Interferogram& data);

std::string to_csv(const SpectrumTable& t);
std::string to_csv(const InterferogramTable& t);

/// Parsers throw Error naming the source, line and column on schema violations.
SpectrumTable parse_spectrum_csv(std::string_view text, const std::string& source = "<spectrum>");
InterferogramTable parse_interferogram_csv(std::string_view text,
                                           const std::string& source = "<interferogram>");

SpectrumTable read_spectrum_csv(const std::filesystem::path& path);
InterferogramTable read_interferogram_csv(const std::filesystem::path& path);

/// Converts to the library types. Non-uniform abscissae are linearly resampled
/// onto a uniform grid; `resampled` reports whether that happened.
IntensitySpectrum to_intensity_spectrum(const SpectrumTable& t, bool* resampled = nullptr);
Interferogram to_interferogram(const InterferogramTable& t, bool* resampled = nullptr);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace hom::tools
