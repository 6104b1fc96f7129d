#include "hom/tools/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hom/error.hpp"

namespace hom::tools {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(const std::string& source, std::size_t line, std::size_t column) {
  return source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
}

// Parses a two-column numeric CSV with an exact header.
std::pair<std::vector<double>, std::vector<double>> parse_two_columns(std::string_view text,
                                                                      std::string_view header,
                                                                      const std::string& source) {
  std::vector<double> a, b;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header)
        throw Error(where(source, line_no, 1) + "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos)
      throw Error(where(source, line_no, line.size() + 1) + "expected 2 columns");
    const std::string_view fields[2] = {trim(line.substr(0, comma)), trim(line.substr(comma + 1))};
    if (fields[1].find(',') != std::string_view::npos)
      throw Error(where(source, line_no, comma + 2) + "expected 2 columns, found more");
    double values[2] = {0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
      const auto f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[c]);
      if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(values[c]))
        throw Error(where(source, line_no, c == 0 ? 1 : comma + 2) + "column " +
                    std::to_string(c + 1) + ": not a finite number: '" + std::string(f) + "'");
    }
    a.push_back(values[0]);
    b.push_back(values[1]);
  }
  if (!seen_header) throw Error(where(source, 1, 1) + "missing header");
  if (a.size() < 2) throw Error(where(source, line_no, 1) + "need at least 2 data rows");
  for (std::size_t i = 1; i < a.size(); ++i)
    if (!(a[i] > a[i - 1]))
      throw Error(where(source, i + 2, 1) + "abscissa must be strictly increasing");
  return {std::move(a), std::move(b)};
}

bool is_uniform(const std::vector<double>& x) {
  const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double expect = x.front() + static_cast<double>(i) * step;
    if (std::abs(x[i] - expect) > 1e-6 * step) return false;
  }
  return true;
}

// Linear interpolation of (x, y) onto a uniform grid with the smallest spacing.
std::pair<double, std::vector<double>> resample_uniform(const std::vector<double>& x,
                                                        const std::vector<double>& y) {
  double step = x[1] - x[0];
  for (std::size_t i = 2; i < x.size(); ++i) step = std::min(step, x[i] - x[i - 1]);
  const auto n = static_cast<std::size_t>(std::floor((x.back() - x.front()) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x.front() + static_cast<double>(i) * step;
    while (k + 2 < x.size() && x[k + 1] < xi) ++k;
    const double frac = std::clamp((xi - x[k]) / (x[k + 1] - x[k]), 0.0, 1.0);
    out[i] = y[k] * (1.0 - frac) + y[k + 1] * frac;
  }
  return {step, std::move(out)};
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, ptr);
}

SpectrumTable spectrum_table(const IntensitySpectrum& spectrum, double max_abs_freq_hz) {
  const auto& s = spectrum.samples();
  SpectrumTable t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = s.abscissa(i) / kTwoPi;
    if (std::abs(f) > max_abs_freq_hz) continue;
    t.freq_hz.push_back(f);
    t.intensity.push_back(s[i]);
  }
  return t;
}

InterferogramTable interferogram_table(const Interferogram& data) {
  return InterferogramTable{data.delays, data.counts};
}

std::string to_csv(const SpectrumTable& t) {
  std::string out = "freq_hz,intensity\n";
  for (std::size_t i = 0; i < t.freq_hz.size(); ++i)
    out += format_double(t.freq_hz[i]) + "," + format_double(t.intensity[i]) + "\n";
  return out;
}

std::string to_csv(const InterferogramTable& t) {
  std::string out = "tau_s,counts\n";
  for (std::size_t i = 0; i < t.tau_s.size(); ++i)
    out += format_double(t.tau_s[i]) + "," + format_double(t.counts[i]) + "\n";
  return out;
}

SpectrumTable parse_spectrum_csv(std::string_view text, const std::string& source) {
  auto [f, v] = parse_two_columns(text, "freq_hz,intensity", source);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 0.0)
      throw Error(where(source, i + 2, 1) + "column 2: intensity must be >= 0");
  return SpectrumTable{std::move(f), std::move(v)};
}

InterferogramTable parse_interferogram_csv(std::string_view text, const std::string& source) {
  auto [tau, c] = parse_two_columns(text, "tau_s,counts", source);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] < 0.0) throw Error(where(source, i + 2, 1) + "column 2: counts must be >= 0");
  return InterferogramTable{std::move(tau), std::move(c)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpectrumTable read_spectrum_csv(const std::filesystem::path& path) {
  return parse_spectrum_csv(read_file(path), path.string());
}

InterferogramTable read_interferogram_csv(const std::filesystem::path& path) {
  return parse_interferogram_csv(read_file(path), path.string());
}

IntensitySpectrum to_intensity_spectrum(const SpectrumTable& t, bool* resampled) {
  const bool uniform = is_uniform(t.freq_hz);
  if (resampled) *resampled = !uniform;
  const std::size_t n = t.freq_hz.size();
  if (uniform) {
    const double step = (t.freq_hz.back() - t.freq_hz.front()) / static_cast<double>(n - 1);
    GridSpec g{kTwoPi * t.freq_hz.front(), kTwoPi * step, n, AxisKind::angular_frequency};
    return IntensitySpectrum(RealSignal(g, t.intensity));
  }
  auto [step, values] = resample_uniform(t.freq_hz, t.intensity);
  GridSpec g{kTwoPi * t.freq_hz.front(), kTwoPi * step, values.size(), AxisKind::angular_frequency};
  return IntensitySpectrum(RealSignal(g, std::move(values)));
}

Interferogram to_interferogram(const InterferogramTable& t, bool* resampled) {
  const bool uniform = is_uniform(t.tau_s);
  if (resampled) *resampled = !uniform;
  Interferogram out;
  if (uniform) {
    out.delays = t.tau_s;
    out.counts = t.counts;
    return out;
  }
  auto [step, values] = resample_uniform(t.tau_s, t.counts);
  out.delays.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out.delays[i] = t.tau_s.front() + static_cast<double>(i) * step;
  out.counts = std::move(values);
  return out;
}

void write_atomically(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace hom::tools
