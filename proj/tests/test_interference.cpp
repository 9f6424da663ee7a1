#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "ico/interference.hpp"

using ico::InterferenceDiagnostics;
using ico::InterferenceWeights;
using ico::RunqlatHistogram;

namespace {

RunqlatHistogram hist_with_avg_bin(std::size_t bin, std::uint64_t count = 1) {
  RunqlatHistogram h;
  h.set_bin(bin, count);
  return h;
}

}  // namespace

TEST_CASE("weight bounds are enforced at construction", "[interference]") {
  CHECK_NOTHROW(InterferenceWeights(2.0, 1.5, 1.0, 995.0));
  CHECK_THROWS_AS(InterferenceWeights(1.0, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(InterferenceWeights(2.0, 0.9, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(InterferenceWeights(2.0, 1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(InterferenceWeights(2.0, 1.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("node interference of an empty node is zero", "[interference]") {
  const auto w = InterferenceWeights::defaults();
  CHECK(ico::node_interference({}, {}, w) == 0.0);
}

TEST_CASE("node interference matches hand-evaluated sums", "[interference]") {
  // One online service with average 50 ns, w_a = 2, normalized by 995.
  std::vector<RunqlatHistogram> online{hist_with_avg_bin(10)};  // avg 50
  InterferenceWeights w(2.0, 1.5, 1.0, 995.0);
  CHECK(ico::node_interference(online, {}, w) == Catch::Approx(100.0 / 995.0).epsilon(1e-12));

  // One online (avg 50) + one offline (avg 100) with norm 1 recovers the raw sum.
  std::vector<RunqlatHistogram> offline{hist_with_avg_bin(20)};  // avg 100
  InterferenceWeights raw(2.0, 1.5, 1.0, 1.0);
  CHECK(ico::node_interference(online, offline, raw) == 250.0);
}

TEST_CASE("node interference is additive over service list splits", "[interference]") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> bin(0, 199);
  std::uniform_int_distribution<std::uint64_t> count(0, 30);
  const auto w = InterferenceWeights::defaults();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RunqlatHistogram> all;
    for (int i = 0; i < 8; ++i) {
      RunqlatHistogram h;
      for (int j = 0; j < 5; ++j) h.set_bin(bin(rng), count(rng));
      all.push_back(h);
    }
    std::span<const RunqlatHistogram> span(all);
    const double combined = ico::node_interference(span, {}, w);
    const double split = ico::node_interference(span.subspan(0, 3), {}, w) +
                         ico::node_interference(span.subspan(3), {}, w);
    CHECK(combined == Catch::Approx(split).margin(1e-9));
  }
}

TEST_CASE("scaling norm_ns rescales both scores", "[interference]") {
  std::vector<RunqlatHistogram> online{hist_with_avg_bin(40, 3)};
  std::vector<RunqlatHistogram> offline{hist_with_avg_bin(90, 2)};
  // Exact for power-of-two factors; approximate otherwise.
  for (double c : {2.0, 4.0, 256.0}) {
    InterferenceWeights base(2.0, 1.5, 1.0, 1.0);
    InterferenceWeights scaled(2.0, 1.5, 1.0, c);
    CHECK(ico::node_interference(online, offline, scaled) ==
          ico::node_interference(online, offline, base) / c);
    CHECK(ico::pod_interference(123.0, scaled) == ico::pod_interference(123.0, base) / c);
  }
  InterferenceWeights base(2.0, 1.5, 1.0, 1.0);
  InterferenceWeights odd(2.0, 1.5, 1.0, 3.7);
  CHECK(ico::node_interference(online, offline, odd) ==
        Catch::Approx(ico::node_interference(online, offline, base) / 3.7).epsilon(1e-12));
}

TEST_CASE("pod interference evaluates the weighted prediction", "[interference]") {
  InterferenceWeights norm(2.0, 1.5, 1.0, 995.0);
  CHECK(ico::pod_interference(0.0, norm) == 0.0);
  CHECK(ico::pod_interference(100.0, norm) == Catch::Approx(100.0 / 995.0).epsilon(1e-12));

  InterferenceWeights raw(2.0, 1.5, 0.5, 1.0);
  CHECK(ico::pod_interference(200.0, raw) == 100.0);
}

TEST_CASE("negative predictions clamp to zero and are counted", "[interference]") {
  InterferenceDiagnostics diag;
  const auto w = InterferenceWeights::defaults();
  CHECK(ico::pod_interference(-5.0, w, &diag) == 0.0);
  CHECK(diag.negative_predictions == 1);
  CHECK(ico::pod_interference(10.0, w, &diag) > 0.0);
  CHECK(diag.negative_predictions == 1);
}
