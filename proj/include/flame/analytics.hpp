#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "flame/error.hpp"
#include "flame/io/text.hpp"

namespace flame::analytics {

/// Population (divide-by-n) central moments of a sample, with skewness
/// m3 / m2^1.5 and Fisher excess kurtosis m4 / m2^2 - 3.
struct MomentStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

template <class T>
MomentStats moments(std::span<const T> values) {
  if (values.size() < 2) fail(ErrorCode::TooFewValues, "moments need at least two values");
  const auto n = static_cast<long double>(values.size());
  long double sum = 0;
  for (auto v : values) sum += static_cast<long double>(v);
  const long double mean = sum / n;
  long double s2 = 0, s3 = 0, s4 = 0;
  for (auto v : values) {
    const long double d = static_cast<long double>(v) - mean;
    const long double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  MomentStats out;
  out.n = values.size();
  out.mean = static_cast<double>(mean);
  out.m2 = static_cast<double>(s2 / n);
  out.m3 = static_cast<double>(s3 / n);
  out.m4 = static_cast<double>(s4 / n);
  if (!(s2 > 0)) fail(ErrorCode::DegenerateVariance, "all values are equal");
  const long double m2 = s2 / n;
  out.skewness = static_cast<double>((s3 / n) / std::pow(m2, 1.5L));
  out.excess_kurtosis = static_cast<double>((s4 / n) / (m2 * m2) - 3.0L);
  return out;
}

inline MomentStats moments(const std::vector<std::int64_t>& values) {
  return moments(std::span<const std::int64_t>(values));
}
inline MomentStats moments(const std::vector<double>& values) { return moments(std::span<const double>(values)); }

struct HistogramSpec {
  std::int64_t bin_width = 10;
  bool log10_counts = false;
};

struct HistogramBin {
  std::int64_t lower = 0;
  std::int64_t count = 0;
  /// log10(count); empty for an empty bin.
  std::optional<double> log10_count;
};

/// Bins [k*w, (k+1)*w) from 0 up to the bin holding the largest value,
/// empty bins included.
inline std::vector<HistogramBin> histogram(std::span<const std::int64_t> values, HistogramSpec spec = {}) {
  if (spec.bin_width < 1) fail(ErrorCode::InvalidArgument, "bin width must be >= 1");
  std::vector<HistogramBin> bins;
  if (values.empty()) return bins;
  for (auto v : values)
    if (v < 0) fail(ErrorCode::InvalidArgument, "wealth values must be >= 0");
  const std::int64_t top = *std::max_element(values.begin(), values.end());
  bins.resize(static_cast<std::size_t>(top / spec.bin_width + 1));
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k].lower = static_cast<std::int64_t>(k) * spec.bin_width;
  for (auto v : values) ++bins[static_cast<std::size_t>(v / spec.bin_width)].count;
  if (spec.log10_counts)
    for (auto& b : bins)
      if (b.count > 0) b.log10_count = std::log10(static_cast<double>(b.count));
  return bins;
}

struct CdfPoint {
  std::int64_t value = 0;
  double fraction = 0.0;  // share of the sample with wealth <= value
};

inline std::vector<CdfPoint> cumulative_distribution(std::span<const std::int64_t> values) {
  if (values.empty()) fail(ErrorCode::TooFewValues, "cumulative distribution of an empty sample");
  std::vector<std::int64_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CdfPoint> out;
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i + 1 == sorted.size() || sorted[i + 1] != sorted[i])
      out.push_back({sorted[i], static_cast<double>(i + 1) / n});
  return out;
}

/// Share of total wealth held by the richest ceil(fraction * n) members.
inline double top_share(std::span<const std::int64_t> values, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) fail(ErrorCode::InvalidArgument, "fraction must be in (0, 1]");
  if (values.empty()) fail(ErrorCode::TooFewValues, "top share of an empty sample");
  std::vector<std::int64_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::int64_t total = 0;
  for (auto v : sorted) total += v;
  if (total <= 0) fail(ErrorCode::ZeroTotalWealth, "total wealth is zero");
  // The epsilon keeps products like 0.2 * 5 from rounding up to the next head count.
  auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size()) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  std::int64_t top = 0;
  for (std::size_t i = 0; i < k; ++i) top += sorted[i];
  return static_cast<double>(top) / static_cast<double>(total);
}

// CSV writers; optional values print as empty fields.

inline void write_moments_header(std::ostream& os) { os << "scenario,iteration,n,mean,skewness,excess_kurtosis\n"; }

inline void write_moments_row(std::ostream& os, const std::string& scenario, std::int64_t iteration, std::size_t n,
                              double mean, std::optional<double> skewness, std::optional<double> excess_kurtosis) {
  os << scenario << ',' << iteration << ',' << n << ',' << io::format_real(mean) << ',';
  if (skewness) os << io::format_real(*skewness);
  os << ',';
  if (excess_kurtosis) os << io::format_real(*excess_kurtosis);
  os << '\n';
}

inline void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& bins) {
  os << "bin_lower,count,log10_count\n";
  for (const auto& b : bins) {
    os << b.lower << ',' << b.count << ',';
    if (b.log10_count) os << io::format_real(*b.log10_count);
    os << '\n';
  }
}

inline void write_cdf_csv(std::ostream& os, const std::vector<CdfPoint>& cdf) {
  os << "value,fraction\n";
  for (const auto& p : cdf) os << p.value << ',' << io::format_real(p.fraction) << '\n';
}

}  // namespace flame::analytics
