#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "ico/runqlat.hpp"

using ico::RunqlatHistogram;

namespace {

// Independent oracle: average of raw latencies quantized to their bin's
// lower edge, accumulated in integer arithmetic.
double brute_force_avg(const std::vector<double>& raw_ns) {
  if (raw_ns.empty()) return 0.0;
  unsigned __int128 sum = 0;
  for (double ns : raw_ns) {
    sum += static_cast<unsigned __int128>(RunqlatHistogram::bin_index(ns) * 5);
  }
  return static_cast<double>(sum) / static_cast<double>(raw_ns.size());
}

RunqlatHistogram from_raw(const std::vector<double>& raw_ns) {
  RunqlatHistogram h;
  for (double ns : raw_ns) h.record(ns);
  return h;
}

}  // namespace

TEST_CASE("record bins by 5 ns lower edges", "[runqlat]") {
  RunqlatHistogram h;
  h.record(0.0);
  CHECK(h.bin(0) == 1);
  h.record(50.0);
  CHECK(h.bin(10) == 1);
  h.record(2000.0);
  CHECK(h.bin(199) == 1);
  h.record(995.0);
  CHECK(h.bin(199) == 2);
  h.record(994.999);
  CHECK(h.bin(198) == 1);
  CHECK(h.total_count() == 5);
}

TEST_CASE("merge is an elementwise sum with identities", "[runqlat]") {
  RunqlatHistogram empty;
  CHECK(merge(empty, empty) == empty);

  RunqlatHistogram h;
  h.set_bin(3, 2);
  CHECK(merge(h, empty) == h);

  RunqlatHistogram g;
  g.set_bin(3, 5);
  g.set_bin(7, 1);
  RunqlatHistogram m = merge(h, g);
  CHECK(m.bin(3) == 7);
  CHECK(m.bin(7) == 1);
  CHECK(m.total_count() == 8);
}

TEST_CASE("avg uses bin lower edges and defines empty as zero", "[runqlat]") {
  RunqlatHistogram empty;
  CHECK(empty.avg_ns() == 0.0);

  RunqlatHistogram one;
  one.set_bin(10, 1);
  CHECK(one.avg_ns() == 50.0);

  RunqlatHistogram two;
  two.set_bin(1, 1);
  two.set_bin(3, 1);
  CHECK(two.avg_ns() == 10.0);  // (5 + 15) / 2
}

TEST_CASE("avg equals the brute-force oracle on random data", "[runqlat]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(0.0, 1400.0);
  std::uniform_int_distribution<int> n_obs(0, 400);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> raw(static_cast<std::size_t>(n_obs(rng)));
    for (double& v : raw) v = lat(rng);
    RunqlatHistogram h = from_raw(raw);
    CHECK(h.avg_ns() == brute_force_avg(raw));
    CHECK(h.total_count() == raw.size());
  }
}

TEST_CASE("avg is bounded and merge conserves counts", "[runqlat]") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> count(0, 1000);
  std::uniform_int_distribution<std::size_t> bin(0, 199);
  for (int trial = 0; trial < 300; ++trial) {
    RunqlatHistogram a, b;
    for (int i = 0; i < 20; ++i) {
      a.set_bin(bin(rng), count(rng));
      b.set_bin(bin(rng), count(rng));
    }
    CHECK(a.avg_ns() >= 0.0);
    CHECK(a.avg_ns() <= RunqlatHistogram::kMaxAvgNs);
    RunqlatHistogram m = merge(a, b);
    CHECK(m.total_count() == a.total_count() + b.total_count());
    if (a.total_count() > 0 && b.total_count() > 0) {
      const double lo = std::min(a.avg_ns(), b.avg_ns());
      const double hi = std::max(a.avg_ns(), b.avg_ns());
      CHECK(m.avg_ns() >= lo - 1e-9);
      CHECK(m.avg_ns() <= hi + 1e-9);
    }
  }
}

TEST_CASE("moving one observation to a higher bin raises the average", "[runqlat]") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> bin(0, 198);
  std::uniform_int_distribution<std::uint64_t> count(1, 50);
  for (int trial = 0; trial < 200; ++trial) {
    RunqlatHistogram h;
    for (int i = 0; i < 10; ++i) h.set_bin(bin(rng), count(rng));
    std::size_t from = bin(rng);
    h.set_bin(from, h.bin(from) + 1);  // ensure the source bin is populated
    std::uniform_int_distribution<std::size_t> higher(from + 1, 199);
    std::size_t to = higher(rng);

    RunqlatHistogram moved = h;
    moved.set_bin(from, moved.bin(from) - 1);
    moved.set_bin(to, moved.bin(to) + 1);
    CHECK(moved.avg_ns() > h.avg_ns());
  }
}

TEST_CASE("counters saturate instead of wrapping", "[runqlat]") {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  RunqlatHistogram h;
  h.set_bin(0, max);
  h.record(0.0);
  CHECK(h.bin(0) == max);
}

TEST_CASE("csv field round-trips and validates", "[runqlat]") {
  RunqlatHistogram h;
  h.set_bin(0, 3);
  h.set_bin(42, 7);
  h.set_bin(199, 1);
  const std::string field = ico::runqlat_to_csv_field(h);
  CHECK(ico::runqlat_from_csv_field(field) == h);

  CHECK_THROWS_AS(ico::runqlat_from_csv_field("1,2,3"), ico::ParseError);
  CHECK_THROWS_AS(ico::runqlat_from_csv_field(field + ",0"), ico::ParseError);
  CHECK_THROWS_AS(ico::runqlat_from_csv_field("a" + field.substr(1)), ico::ParseError);
}
