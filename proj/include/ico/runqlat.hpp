#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "ico/errors.hpp"
#include "ico/util.hpp"

namespace ico {

// Scheduling-latency histogram with 200 fixed 5 ns bins. Bin k counts
// observations with latency in [k*5, k*5+5) nanoseconds; the last bin is
// open-ended and holds everything at or above 995 ns. Counters are 64-bit
// and saturate instead of wrapping.
class RunqlatHistogram {
 public:
  static constexpr std::size_t kBins = 200;
  static constexpr double kBinWidthNs = 5.0;
  // Lower edge of the last bin; also the largest representable average.
  static constexpr double kMaxAvgNs = 995.0;

  constexpr RunqlatHistogram() = default;

  std::uint64_t bin(std::size_t k) const { return bins_[k]; }
  void set_bin(std::size_t k, std::uint64_t count) { bins_[k] = count; }
  const std::array<std::uint64_t, kBins>& bins() const { return bins_; }

  static std::size_t bin_index(double latency_ns) {
    if (!(latency_ns > 0.0)) return 0;
    if (latency_ns >= kMaxAvgNs) return kBins - 1;
    return static_cast<std::size_t>(latency_ns / kBinWidthNs);
  }

  void record(double latency_ns) {
    std::size_t k = bin_index(latency_ns);
    bins_[k] = saturating_add(bins_[k], 1);
  }

  std::uint64_t total_count() const {
    std::uint64_t total = 0;
    for (std::uint64_t c : bins_) total = saturating_add(total, c);
    return total;
  }

  // Average scheduling latency with each observation valued at its bin's
  // lower edge (k*5 ns). An empty histogram averages to 0: an idle service
  // contributes no interference. The result always lies in [0, 995].
  double avg_ns() const {
    std::uint64_t total = 0;
    unsigned __int128 weighted = 0;
    for (std::size_t k = 0; k < kBins; ++k) {
      total = saturating_add(total, bins_[k]);
      weighted += static_cast<unsigned __int128>(bins_[k]) * (k * 5);
    }
    if (total == 0) return 0.0;
    return static_cast<double>(weighted) / static_cast<double>(total);
  }

  void merge_in(const RunqlatHistogram& other) {
    for (std::size_t k = 0; k < kBins; ++k) {
      bins_[k] = saturating_add(bins_[k], other.bins_[k]);
    }
  }

  bool operator==(const RunqlatHistogram&) const = default;

 private:
  static std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    return (a > max - b) ? max : a + b;
  }

  std::array<std::uint64_t, kBins> bins_{};
};

inline RunqlatHistogram merge(const RunqlatHistogram& a, const RunqlatHistogram& b) {
  RunqlatHistogram out = a;
  out.merge_in(b);
  return out;
}

inline double avg_runqlat(const RunqlatHistogram& h) { return h.avg_ns(); }

// CSV field name for serialized histograms.
inline constexpr const char* kRunqlatBinsField = "runqlat_bins";

// Flat serialized form: 200 unsigned counts joined by commas.
inline std::string runqlat_to_csv_field(const RunqlatHistogram& h) {
  std::string out;
  out.reserve(RunqlatHistogram::kBins * 2);
  for (std::size_t k = 0; k < RunqlatHistogram::kBins; ++k) {
    if (k) out.push_back(',');
    out += std::to_string(h.bin(k));
  }
  return out;
}

inline RunqlatHistogram runqlat_from_csv_field(std::string_view field) {
  RunqlatHistogram h;
  std::size_t k = 0;
  std::size_t pos = 0;
  while (pos <= field.size()) {
    std::size_t next = field.find(',', pos);
    if (next == std::string_view::npos) next = field.size();
    std::string_view tok = field.substr(pos, next - pos);
    if (k >= RunqlatHistogram::kBins) throw ParseError("runqlat_bins: more than 200 counts");
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw ParseError("runqlat_bins: bad count '" + std::string(tok) + "'");
    }
    h.set_bin(k++, v);
    pos = next + 1;
    if (next == field.size()) break;
  }
  if (k != RunqlatHistogram::kBins) {
    throw ParseError("runqlat_bins: expected 200 counts, got " + std::to_string(k));
  }
  return h;
}

}  // namespace ico
