#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "ico/scheduler.hpp"

using ico::CandidateScore;
using ico::Dataset;
using ico::FeatureVector;
using ico::ForestModel;
using ico::ForestParams;
using ico::InterferenceWeights;
using ico::NodeSnapshot;
using ico::PodRequest;
using ico::RoundRobinCursor;
using ico::ScheduleDecision;
using ico::SchedulerWeights;
using ico::ServiceClass;
using ico::ServiceState;

namespace {

NodeSnapshot make_node(int id, double cpu_cur, double cpu_sum, double mem_cur, double mem_sum) {
  NodeSnapshot n;
  n.node_id = id;
  n.cpu_cur = cpu_cur;
  n.cpu_sum = cpu_sum;
  n.mem_cur = mem_cur;
  n.mem_sum = mem_sum;
  return n;
}

PodRequest make_pod(double qps, double cpu_pred, double mem_pred,
                    ServiceClass cls = ServiceClass::Online) {
  PodRequest p;
  p.pod_id = 1;
  p.kind = "web-search-like";
  p.cls = cls;
  p.qps = qps;
  p.cpu_pred = cpu_pred;
  p.mem_pred = mem_pred;
  return p;
}

// A small forest trained on load-correlated synthetic rows so that intf_p
// actually varies across candidate nodes.
ForestModel tiny_forest() {
  Dataset d;
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    FeatureVector f;
    f[ico::kQpsFeature] = u(rng) * 400.0;
    f[ico::kPerfFeatureOffset + ico::perf::kCpuUtilization] = u(rng);
    f[ico::kHwFeatureOffset + ico::hw::kCpuCycles] = u(rng) * 1e9;
    const double target = 20.0 + 500.0 * f[ico::kPerfFeatureOffset] + 0.1 * f[ico::kQpsFeature];
    d.push(f, std::min(target, 995.0));
  }
  ForestParams params;
  params.n_trees = 10;
  params.max_depth = 6;
  params.seed = 99;
  return ico::train_forest(d, params);
}

NodeSnapshot random_node(int id, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NodeSnapshot n = make_node(id, 0.0, 16.0, 0.0, 64.0e9);
  n.cpu_cur = u(rng) * 14.0;
  n.mem_cur = u(rng) * 60.0e9;
  n.perf_metrics[ico::perf::kCpuUtilization] = n.cpu_cur / n.cpu_sum;
  n.perf_metrics[ico::perf::kMemoryUsage] = n.mem_cur / n.mem_sum;
  n.hw_events[ico::hw::kCpuCycles] = n.cpu_cur * 1e8;
  std::uniform_int_distribution<int> n_svc(0, 4);
  std::uniform_int_distribution<std::size_t> bin(0, 199);
  std::uniform_int_distribution<std::uint64_t> count(1, 40);
  const int services = n_svc(rng);
  for (int s = 0; s < services; ++s) {
    ServiceState svc;
    svc.cls = u(rng) < 0.5 ? ServiceClass::Online : ServiceClass::Offline;
    svc.qps = svc.cls == ServiceClass::Online ? u(rng) * 300.0 : 0.0;
    for (int b = 0; b < 3; ++b) svc.runqlat.set_bin(bin(rng), count(rng));
    n.services.push_back(svc);
  }
  return n;
}

// Exhaustive oracle: score every node that passes the filters, then argmax
// with explicit lowest-id tie-breaking.
std::optional<int> oracle_select(const std::vector<NodeSnapshot>& nodes, const PodRequest& pod,
                                 const ForestModel& forest, const InterferenceWeights& iw,
                                 const SchedulerWeights& sw, bool hup) {
  std::optional<int> best_id;
  double best_score = 0.0;
  for (const auto& node : nodes) {
    const double u_cpu = (node.cpu_cur + sw.w_d * pod.cpu_pred) / node.cpu_sum;
    const double u_mem = (node.mem_cur + sw.w_e * pod.mem_pred) / node.mem_sum;
    if (u_cpu > sw.cpu_threshold || u_mem > sw.mem_threshold) continue;
    if (pod.cpu_pred > node.cpu_sum - node.cpu_cur + 1e-9) continue;
    if (pod.mem_pred > node.mem_sum - node.mem_cur + 1e-9) continue;
    double online_sum = 0.0, offline_sum = 0.0;
    for (const auto& svc : node.services) {
      (svc.cls == ServiceClass::Online ? online_sum : offline_sum) += svc.runqlat.avg_ns();
    }
    const double intf_h = (iw.w_a() * online_sum + iw.w_b() * offline_sum) / iw.norm_ns();
    const double predicted =
        ico::predict_latency(forest, ico::build_feature_vector(node, pod.qps));
    const double intf_p = iw.w_c() * std::max(predicted, 0.0) / iw.norm_ns();
    const double util = hup ? u_cpu * u_mem : (1.0 - u_cpu) * (1.0 - u_mem);
    const double score = util - intf_h - intf_p;
    if (!best_id || score > best_score || (score == best_score && node.node_id < *best_id)) {
      best_id = node.node_id;
      best_score = score;
    }
  }
  return best_id;
}

}  // namespace

TEST_CASE("utilization projection folds headroom factors", "[scheduler]") {
  SchedulerWeights sw;
  auto idle = make_node(1, 0.0, 32.0, 0.0, 64.0e9);
  auto zero = make_pod(0.0, 0.0, 0.0);
  auto u = ico::utilization_projection(idle, zero, sw);
  CHECK(u.u_cpu == 0.0);
  CHECK(u.u_mem == 0.0);

  auto node = make_node(1, 8.0, 32.0, 32.0e9, 64.0e9);
  auto pod = make_pod(100.0, 2.0, 8.0e9);
  u = ico::utilization_projection(node, pod, sw);
  CHECK(u.u_cpu == Catch::Approx((8.0 + 1.2 * 2.0) / 32.0).epsilon(1e-12));  // 0.325
  CHECK(u.u_mem == Catch::Approx((32.0e9 + 1.25 * 8.0e9) / 64.0e9).epsilon(1e-12));  // 0.65625
}

TEST_CASE("ico and hup scores match hand evaluation", "[scheduler]") {
  SchedulerWeights sw;
  auto idle = make_node(1, 0.0, 32.0, 0.0, 64.0e9);
  auto zero = make_pod(0.0, 0.0, 0.0);
  CHECK(ico::ico_score(idle, zero, 0.0, 0.0, sw) == 1.0);
  CHECK(ico::hup_score(idle, zero, 0.0, 0.0, sw) == 0.0);

  auto node = make_node(1, 8.0, 32.0, 32.0e9, 64.0e9);
  auto pod = make_pod(100.0, 2.0, 8.0e9);
  const double expected = 0.675 * 0.34375 - 0.1 - 0.05;
  CHECK(ico::ico_score(node, pod, 0.1, 0.05, sw) == Catch::Approx(expected).epsilon(1e-12));

  // Raising intf_h by delta lowers the score by exactly delta.
  const double base = ico::ico_score(node, pod, 0.1, 0.05, sw);
  CHECK(ico::ico_score(node, pod, 0.1 + 0.03, 0.05, sw) ==
        Catch::Approx(base - 0.03).epsilon(1e-12));

  auto half = make_node(2, 0.0, 2.0, 0.0, 2.0);
  auto half_pod = make_pod(10.0, 1.0 / 1.2, 1.0 / 1.25);
  CHECK(ico::hup_score(half, half_pod, 0.1, 0.0, sw) == Catch::Approx(0.15).epsilon(1e-12));

  auto full = make_node(3, 2.0, 2.0, 2.0, 2.0);
  CHECK(ico::hup_score(full, make_pod(0.0, 0.0, 0.0), 0.0, 0.0, sw) == 1.0);
}

TEST_CASE("ico selection breaks ties by lowest node id", "[scheduler]") {
  const auto forest = tiny_forest();
  const auto iw = InterferenceWeights::defaults();
  SchedulerWeights sw;
  std::vector<NodeSnapshot> nodes{make_node(7, 0.0, 16.0, 0.0, 64.0e9),
                                  make_node(2, 0.0, 16.0, 0.0, 64.0e9)};
  auto pod = make_pod(50.0, 1.0, 1.0e9);
  auto d = ico::select_node_ico(nodes, pod, forest, iw, sw);
  REQUIRE(d.node_id.has_value());
  CHECK(*d.node_id == 2);
}

TEST_CASE("nodes above the utilization threshold are skipped", "[scheduler]") {
  const auto forest = tiny_forest();
  const auto iw = InterferenceWeights::defaults();
  SchedulerWeights sw;
  // Node 1 projects over the CPU threshold; node 2 is lightly loaded but has
  // lots of interference. The filter, not the score, removes node 1.
  auto hot = make_node(1, 12.0, 16.0, 0.0, 64.0e9);
  auto cool = make_node(2, 4.8, 16.0, 0.0, 64.0e9);
  ServiceState noisy;
  noisy.cls = ServiceClass::Offline;
  noisy.runqlat.set_bin(199, 100);
  cool.services.assign(4, noisy);
  std::vector<NodeSnapshot> nodes{hot, cool};
  auto pod = make_pod(50.0, 0.5, 1.0e9);
  auto d = ico::select_node_ico(nodes, pod, forest, iw, sw);
  REQUIRE(d.node_id.has_value());
  CHECK(*d.node_id == 2);
  CHECK_FALSE(d.candidates[0].feasible);
}

TEST_CASE("ico matches the exhaustive oracle on random instances", "[scheduler]") {
  const auto forest = tiny_forest();
  const auto iw = InterferenceWeights::defaults();
  SchedulerWeights sw;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_nodes(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<NodeSnapshot> nodes;
    const int n = n_nodes(rng);
    for (int i = 0; i < n; ++i) nodes.push_back(random_node(i + 10, rng));
    auto pod = make_pod(u(rng) * 300.0, u(rng) * 4.0, u(rng) * 8.0e9);
    auto got = ico::select_node_ico(nodes, pod, forest, iw, sw);
    auto want = oracle_select(nodes, pod, forest, iw, sw, false);
    CHECK(got.node_id == want);
  }
}

TEST_CASE("selection is invariant under node list permutation", "[scheduler]") {
  const auto forest = tiny_forest();
  const auto iw = InterferenceWeights::defaults();
  SchedulerWeights sw;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<NodeSnapshot> nodes;
    for (int i = 0; i < 6; ++i) nodes.push_back(random_node(i + 1, rng));
    auto pod = make_pod(120.0, 1.0, 2.0e9);
    auto before = ico::select_node_ico(nodes, pod, forest, iw, sw);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    auto after = ico::select_node_ico(nodes, pod, forest, iw, sw);
    CHECK(before.node_id == after.node_id);
  }
}

TEST_CASE("equal-utilization ranking follows ascending interference", "[scheduler]") {
  const auto forest = tiny_forest();
  const auto iw = InterferenceWeights::defaults();
  SchedulerWeights sw;
  // Identical utilization; increasing histogram mass with node id.
  std::vector<NodeSnapshot> nodes;
  for (int i = 0; i < 5; ++i) {
    auto n = make_node(i + 1, 4.0, 16.0, 8.0e9, 64.0e9);
    ServiceState svc;
    svc.cls = ServiceClass::Online;
    svc.qps = 100.0;
    svc.runqlat.set_bin(100, static_cast<std::uint64_t>(10 * (i + 1)));
    // Same average, larger count does not change avg; use different bins.
    svc.runqlat = {};
    svc.runqlat.set_bin(static_cast<std::size_t>(20 * (i + 1)), 10);
    n.services.push_back(svc);
    nodes.push_back(n);
  }
  auto pod = make_pod(50.0, 0.0, 0.0);
  auto d = ico::select_node_ico(nodes, pod, forest, iw, sw);
  REQUIRE(d.node_id.has_value());
  CHECK(*d.node_id == 1);

  std::vector<CandidateScore> feasible;
  for (const auto& c : d.candidates) {
    if (c.feasible) feasible.push_back(c);
  }
  REQUIRE(feasible.size() == 5);
  for (std::size_t i = 0; i + 1 < feasible.size(); ++i) {
    CHECK(feasible[i].intf_h + feasible[i].intf_p <
          feasible[i + 1].intf_h + feasible[i + 1].intf_p);
    CHECK(feasible[i].total > feasible[i + 1].total);
  }
}

TEST_CASE("hup prefers the higher utilization product", "[scheduler]") {
  const auto forest = tiny_forest();
  const auto iw = InterferenceWeights::defaults();
  SchedulerWeights sw;
  // u products roughly 0.06 vs 0.25 with equal (zero) interference.
  auto low = make_node(1, 16.0 * 0.3, 16.0, 64.0e9 * 0.2, 64.0e9);
  auto high = make_node(2, 16.0 * 0.5, 16.0, 64.0e9 * 0.5, 64.0e9);
  std::vector<NodeSnapshot> nodes{low, high};
  auto pod = make_pod(0.0, 0.0, 0.0);
  auto d = ico::select_node_hup(nodes, pod, forest, iw, sw);
  REQUIRE(d.node_id.has_value());
  CHECK(*d.node_id == 2);

  // Both above threshold: no feasible node.
  auto hot1 = make_node(1, 12.0, 16.0, 0.0, 64.0e9);
  auto hot2 = make_node(2, 13.0, 16.0, 0.0, 64.0e9);
  std::vector<NodeSnapshot> hot{hot1, hot2};
  auto d2 = ico::select_node_hup(hot, make_pod(10.0, 0.0, 0.0), forest, iw, sw);
  CHECK_FALSE(d2.node_id.has_value());

  // Identical nodes: lowest id.
  std::vector<NodeSnapshot> same{make_node(5, 4.0, 16.0, 8.0e9, 64.0e9),
                                 make_node(3, 4.0, 16.0, 8.0e9, 64.0e9)};
  auto d3 = ico::select_node_hup(same, make_pod(10.0, 0.0, 0.0), forest, iw, sw);
  REQUIRE(d3.node_id.has_value());
  CHECK(*d3.node_id == 3);
}

TEST_CASE("hup matches the exhaustive oracle on random instances", "[scheduler]") {
  const auto forest = tiny_forest();
  const auto iw = InterferenceWeights::defaults();
  SchedulerWeights sw;
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> n_nodes(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<NodeSnapshot> nodes;
    const int n = n_nodes(rng);
    for (int i = 0; i < n; ++i) nodes.push_back(random_node(i + 1, rng));
    auto pod = make_pod(u(rng) * 300.0, u(rng) * 4.0, u(rng) * 8.0e9);
    auto got = ico::select_node_hup(nodes, pod, forest, iw, sw);
    auto want = oracle_select(nodes, pod, forest, iw, sw, true);
    CHECK(got.node_id == want);
  }
}

TEST_CASE("round robin cycles and skips full nodes", "[scheduler]") {
  std::vector<NodeSnapshot> nodes{make_node(1, 0.0, 16.0, 0.0, 64.0e9),
                                  make_node(2, 0.0, 16.0, 0.0, 64.0e9),
                                  make_node(3, 0.0, 16.0, 0.0, 64.0e9)};
  RoundRobinCursor cursor;
  auto pod = make_pod(10.0, 0.1, 1.0e6);
  std::vector<int> sequence;
  for (int i = 0; i < 6; ++i) {
    auto d = ico::select_node_rr(cursor, nodes, pod);
    REQUIRE(d.node_id.has_value());
    sequence.push_back(*d.node_id);
  }
  CHECK(sequence == std::vector<int>{1, 2, 3, 1, 2, 3});

  nodes[1].cpu_cur = 16.0;  // node 2 has no remaining capacity
  cursor = {};
  sequence.clear();
  for (int i = 0; i < 4; ++i) {
    auto d = ico::select_node_rr(cursor, nodes, pod);
    REQUIRE(d.node_id.has_value());
    sequence.push_back(*d.node_id);
  }
  CHECK(sequence == std::vector<int>{1, 3, 1, 3});

  for (auto& n : nodes) n.cpu_cur = n.cpu_sum;
  cursor = {};
  auto d = ico::select_node_rr(cursor, nodes, pod);
  CHECK_FALSE(d.node_id.has_value());
}

TEST_CASE("round robin is fair when every node fits", "[scheduler]") {
  const int n = 5, k = 8;
  std::vector<NodeSnapshot> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back(make_node(i + 1, 0.0, 1e9, 0.0, 1e15));
  RoundRobinCursor cursor;
  std::vector<int> placements(static_cast<std::size_t>(n), 0);
  auto pod = make_pod(10.0, 0.5, 1.0e6);
  for (int i = 0; i < n * k; ++i) {
    auto d = ico::select_node_rr(cursor, nodes, pod);
    REQUIRE(d.node_id.has_value());
    ++placements[static_cast<std::size_t>(*d.node_id - 1)];
  }
  for (int c : placements) CHECK(c == k);
}

TEST_CASE("lqp picks the minimal online qps sum", "[scheduler]") {
  auto with_qps = [](int id, std::vector<double> qps) {
    auto n = make_node(id, 1.0, 16.0, 1.0e9, 64.0e9);
    for (double q : qps) {
      ServiceState svc;
      svc.cls = ServiceClass::Online;
      svc.qps = q;
      n.services.push_back(svc);
    }
    return n;
  };
  std::vector<NodeSnapshot> nodes{with_qps(10, {300.0, 200.0}), with_qps(11, {200.0}),
                                  with_qps(12, {300.0})};
  auto pod = make_pod(50.0, 0.5, 1.0e6);
  auto d = ico::select_node_lqp(nodes, pod);
  REQUIRE(d.node_id.has_value());
  CHECK(*d.node_id == 11);

  // Offline services do not count toward the sum.
  ServiceState off;
  off.cls = ServiceClass::Offline;
  nodes[1].services.push_back(off);
  d = ico::select_node_lqp(nodes, pod);
  CHECK(*d.node_id == 11);

  // All equal: lowest id. All zero (offline-only cluster): lowest id.
  std::vector<NodeSnapshot> equal{with_qps(4, {100.0}), with_qps(2, {100.0})};
  CHECK(*ico::select_node_lqp(equal, pod).node_id == 2);
  std::vector<NodeSnapshot> zero{make_node(9, 0, 16.0, 0, 64.0e9),
                                 make_node(8, 0, 16.0, 0, 64.0e9)};
  CHECK(*ico::select_node_lqp(zero, pod).node_id == 8);
}

TEST_CASE("lqp selection is minimal among feasible nodes", "[scheduler]") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<NodeSnapshot> nodes;
    for (int i = 0; i < 8; ++i) nodes.push_back(random_node(i + 1, rng));
    auto pod = make_pod(100.0, u(rng) * 6.0, u(rng) * 16.0e9);
    auto d = ico::select_node_lqp(nodes, pod);
    if (!d.node_id) {
      for (const auto& n : nodes) CHECK_FALSE(ico::raw_capacity_fits(n, pod));
      continue;
    }
    auto online_sum = [](const NodeSnapshot& n) {
      double s = 0.0;
      for (const auto& svc : n.services) {
        if (svc.cls == ServiceClass::Online) s += svc.qps;
      }
      return s;
    };
    const auto& chosen = *std::find_if(nodes.begin(), nodes.end(), [&](const NodeSnapshot& n) {
      return n.node_id == *d.node_id;
    });
    for (const auto& n : nodes) {
      if (ico::raw_capacity_fits(n, pod)) CHECK(online_sum(chosen) <= online_sum(n));
    }
  }
}

TEST_CASE("threshold safety holds over random trials", "[scheduler]") {
  const auto forest = tiny_forest();
  const auto iw = InterferenceWeights::defaults();
  SchedulerWeights sw;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<NodeSnapshot> nodes;
    for (int i = 0; i < 6; ++i) nodes.push_back(random_node(i + 1, rng));
    auto pod = make_pod(u(rng) * 200.0, u(rng) * 8.0, u(rng) * 30.0e9);
    for (bool hup : {false, true}) {
      auto d = hup ? ico::select_node_hup(nodes, pod, forest, iw, sw)
                   : ico::select_node_ico(nodes, pod, forest, iw, sw);
      if (!d.node_id) continue;
      const auto& chosen = *std::find_if(nodes.begin(), nodes.end(), [&](const NodeSnapshot& n) {
        return n.node_id == *d.node_id;
      });
      auto proj = ico::utilization_projection(chosen, pod, sw);
      CHECK(proj.u_cpu <= sw.cpu_threshold);
      CHECK(proj.u_mem <= sw.mem_threshold);
    }
  }
}
