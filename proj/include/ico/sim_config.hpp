#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ico/errors.hpp"
#include "ico/forest.hpp"
#include "ico/interference.hpp"
#include "ico/scheduler.hpp"
#include "ico/util.hpp"

namespace ico {

inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;
inline constexpr double kMiB = 1024.0 * 1024.0;

// An online workload kind: linear resource demand in QPS, a base per-request
// service time, and the runnable-thread pressure each unit of QPS adds.
struct OnlineKind {
  std::string name;
  double cpu_per_qps = 0.0;     // cores per qps
  double cpu_base = 0.0;        // cores
  double mem_per_qps = 0.0;     // bytes per qps
  double mem_base = 0.0;        // bytes
  double base_service_ms = 0.0;
  double threads_per_qps = 0.0;
  double qps_target = 0.0;
};

struct OfflineKind {
  std::string name;
  double cores = 0.0;
  double mem_bytes = 0.0;
  double duration_s = 0.0;
  // Batch jobs typically keep more runnable threads than reserved cores.
  double thread_factor = 1.5;
};

struct ClusterConfig {
  int nodes = 8;
  double cores_per_node = 16.0;
  double mem_per_node_bytes = 64.0 * kGiB;
};

struct WorkloadsConfig {
  std::vector<OnlineKind> online_kinds;
  std::vector<OfflineKind> offline_kinds;
  double offline_fraction = 0.65;   // share of arrivals that are offline jobs
  double arrival_mean_s = 45.0;     // exponential inter-arrival mean; 0 disables arrivals
  double online_lifetime_s = 0.0;   // 0 = online services run to the horizon
  double qps_jitter = 0.25;         // pod target = kind target * U(1 +- jitter)
  std::string qps_profile_csv;      // optional trace replacing the random walk
};

struct QpsWalk {
  double step_sigma = 4.0;
  double floor = 1.0;
  double cap = 2000.0;
  double mean_reversion = 0.1;
};

struct ContentionParams {
  double lambda0_ns = 20.0;   // baseline latency
  double lambda1_ns = 500.0;  // pressure coefficient
  double rho0 = 0.3;          // pressure onset
  double gamma = 2.0;         // onset exponent
  double dispersion = 0.5;    // gamma-distribution variance scale
  int samples_per_window = 800;
};

struct ResponseParams {
  double s0 = 1.0;
  double s1 = 3.0;
  double noise_sigma_ms = 2.0;
};

struct SimSection {
  double horizon_s = 3600.0;
  double window_s = 60.0;
  std::uint64_t seed = 42;
  bool record_responses = true;
};

struct InterferenceConfig {
  double w_a = 2.0;
  double w_b = 1.5;
  double w_c = 1.0;
  double norm_ns = 5000.0;

  InterferenceWeights weights() const { return {w_a, w_b, w_c, norm_ns}; }
};

struct ExperimentConfig {
  int n_seeds = 5;
  int dataset_runs = 160;
  std::vector<std::string> policies = {"ico", "rr", "hup", "lqp"};
};

struct MotivationConfig {
  double exp1_qps = 300.0;
  std::vector<double> exp1_offline_cores = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  double exp2_offline_cores = 8.0;
  std::vector<double> exp2_qps = {200, 400, 600, 800, 1000, 1200, 1400, 1600, 1800, 2000};
  int windows_per_point = 12;
  int warmup_windows = 2;
};

struct AppConfig {
  ClusterConfig cluster;
  WorkloadsConfig workloads;
  QpsWalk qps_walk;
  ContentionParams contention;
  ResponseParams response;
  SimSection sim;
  InterferenceConfig interference;
  SchedulerWeights scheduler;
  ForestParams forest;
  ExperimentConfig experiment;
  MotivationConfig motivation;
};

inline AppConfig default_config() {
  AppConfig c;
  c.workloads.online_kinds = {
      {"web-search-like", 0.02, 0.5, 8.0 * kMiB, 1536.0 * kMiB, 20.0, 0.05, 18.0},
      {"data-caching-like", 0.008, 0.25, 16.0 * kMiB, 4096.0 * kMiB, 5.0, 0.02, 30.0},
      {"media-streaming-like", 0.03, 1.0, 4.0 * kMiB, 2048.0 * kMiB, 45.0, 0.08, 10.0},
  };
  c.workloads.offline_kinds = {
      {"analytics-like", 3.0, 6.0 * kGiB, 1200.0, 1.5},
      {"graph-analytics-like", 2.0, 10.0 * kGiB, 900.0, 1.5},
      {"batch-encode-like", 4.0, 3.0 * kGiB, 600.0, 1.5},
  };
  c.forest.seed = 7;
  return c;
}

namespace detail {

// Strict section reader: typed getters with defaults, and a final unknown-key
// sweep so config typos fail loudly with the offending key path.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string key(const char* name) const { return path_ + "." + name; }

  double num(const char* name, double def) {
    const auto* v = find(name);
    if (v == nullptr) return def;
    if (!v->is_number()) throw ConfigError(key(name), "expected a number");
    return v->get<double>();
  }

  int integer(const char* name, int def) {
    const auto* v = find(name);
    if (v == nullptr) return def;
    if (!v->is_number_integer()) throw ConfigError(key(name), "expected an integer");
    return v->get<int>();
  }

  std::uint64_t u64(const char* name, std::uint64_t def) {
    const auto* v = find(name);
    if (v == nullptr) return def;
    if (!v->is_number_unsigned() && !v->is_number_integer()) {
      throw ConfigError(key(name), "expected an unsigned integer");
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const char* name, bool def) {
    const auto* v = find(name);
    if (v == nullptr) return def;
    if (!v->is_boolean()) throw ConfigError(key(name), "expected a boolean");
    return v->get<bool>();
  }

  std::string str(const char* name, const std::string& def) {
    const auto* v = find(name);
    if (v == nullptr) return def;
    if (!v->is_string()) throw ConfigError(key(name), "expected a string");
    return v->get<std::string>();
  }

  const nlohmann::json* array(const char* name) {
    const auto* v = find(name);
    if (v == nullptr) return nullptr;
    if (!v->is_array()) throw ConfigError(key(name), "expected an array");
    return v;
  }

  const nlohmann::json* object(const char* name) {
    const auto* v = find(name);
    if (v == nullptr) return nullptr;
    if (!v->is_object()) throw ConfigError(key(name), "expected an object");
    return v;
  }

  void done() {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError(path_ + "." + k, "unknown key");
    }
  }

 private:
  const nlohmann::json* find(const char* name) {
    seen_.insert(name);
    auto it = j_.find(name);
    return it == j_.end() ? nullptr : &*it;
  }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void require(bool ok, const std::string& key, const char* message) {
  if (!ok) throw ConfigError(key, message);
}

inline std::vector<double> num_array(const nlohmann::json& arr, const std::string& key) {
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError(key, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

// Parses and validates a full config; every field is optional and falls back
// to the default. Unknown keys and out-of-range values raise ConfigError with
// the dotted key path.
inline AppConfig parse_config(const nlohmann::json& root) {
  using detail::require;
  AppConfig c = default_config();
  detail::Section top(root, "config");

  if (const auto* j = top.object("cluster")) {
    detail::Section s(*j, "cluster");
    c.cluster.nodes = s.integer("nodes", c.cluster.nodes);
    c.cluster.cores_per_node = s.num("cores_per_node", c.cluster.cores_per_node);
    c.cluster.mem_per_node_bytes =
        s.num("mem_gib_per_node", c.cluster.mem_per_node_bytes / kGiB) * kGiB;
    s.done();
    require(c.cluster.nodes >= 1, "cluster.nodes", "must be >= 1");
    require(c.cluster.cores_per_node > 0, "cluster.cores_per_node", "must be > 0");
    require(c.cluster.mem_per_node_bytes > 0, "cluster.mem_gib_per_node", "must be > 0");
  }

  if (const auto* j = top.object("workloads")) {
    detail::Section s(*j, "workloads");
    if (const auto* arr = s.array("online_kinds")) {
      c.workloads.online_kinds.clear();
      std::size_t i = 0;
      for (const auto& kj : *arr) {
        const std::string path = "workloads.online_kinds[" + std::to_string(i++) + "]";
        detail::Section k(kj, path);
        OnlineKind kind;
        kind.name = k.str("name", "");
        kind.cpu_per_qps = k.num("cpu_per_qps", 0.0);
        kind.cpu_base = k.num("cpu_base", 0.0);
        kind.mem_per_qps = k.num("mem_per_qps_mib", 0.0) * kMiB;
        kind.mem_base = k.num("mem_base_mib", 0.0) * kMiB;
        kind.base_service_ms = k.num("base_service_ms", 10.0);
        kind.threads_per_qps = k.num("threads_per_qps", 0.01);
        kind.qps_target = k.num("qps_target", 50.0);
        k.done();
        require(!kind.name.empty(), path + ".name", "must be non-empty");
        require(kind.cpu_per_qps >= 0, path + ".cpu_per_qps", "must be >= 0");
        require(kind.cpu_base >= 0, path + ".cpu_base", "must be >= 0");
        require(kind.base_service_ms > 0, path + ".base_service_ms", "must be > 0");
        require(kind.threads_per_qps >= 0, path + ".threads_per_qps", "must be >= 0");
        require(kind.qps_target > 0, path + ".qps_target", "must be > 0");
        c.workloads.online_kinds.push_back(kind);
      }
    }
    if (const auto* arr = s.array("offline_kinds")) {
      c.workloads.offline_kinds.clear();
      std::size_t i = 0;
      for (const auto& kj : *arr) {
        const std::string path = "workloads.offline_kinds[" + std::to_string(i++) + "]";
        detail::Section k(kj, path);
        OfflineKind kind;
        kind.name = k.str("name", "");
        kind.cores = k.num("cores", 0.0);
        kind.mem_bytes = k.num("mem_gib", 0.0) * kGiB;
        kind.duration_s = k.num("duration_s", 600.0);
        kind.thread_factor = k.num("thread_factor", 1.5);
        k.done();
        require(!kind.name.empty(), path + ".name", "must be non-empty");
        require(kind.cores > 0, path + ".cores", "must be > 0");
        require(kind.mem_bytes > 0, path + ".mem_gib", "must be > 0");
        require(kind.duration_s > 0, path + ".duration_s", "must be > 0");
        require(kind.thread_factor > 0, path + ".thread_factor", "must be > 0");
        c.workloads.offline_kinds.push_back(kind);
      }
    }
    c.workloads.offline_fraction = s.num("offline_fraction", c.workloads.offline_fraction);
    c.workloads.arrival_mean_s = s.num("arrival_mean_s", c.workloads.arrival_mean_s);
    c.workloads.online_lifetime_s = s.num("online_lifetime_s", c.workloads.online_lifetime_s);
    c.workloads.qps_jitter = s.num("qps_jitter", c.workloads.qps_jitter);
    c.workloads.qps_profile_csv = s.str("qps_profile_csv", c.workloads.qps_profile_csv);
    s.done();
    require(!c.workloads.online_kinds.empty(), "workloads.online_kinds", "must be non-empty");
    require(!c.workloads.offline_kinds.empty(), "workloads.offline_kinds", "must be non-empty");
    require(c.workloads.offline_fraction >= 0 && c.workloads.offline_fraction <= 1,
            "workloads.offline_fraction", "must be in [0,1]");
    require(c.workloads.arrival_mean_s >= 0, "workloads.arrival_mean_s", "must be >= 0");
    require(c.workloads.online_lifetime_s >= 0, "workloads.online_lifetime_s", "must be >= 0");
    require(c.workloads.qps_jitter >= 0 && c.workloads.qps_jitter < 1, "workloads.qps_jitter",
            "must be in [0,1)");
  }

  if (const auto* j = top.object("qps_walk")) {
    detail::Section s(*j, "qps_walk");
    c.qps_walk.step_sigma = s.num("step_sigma", c.qps_walk.step_sigma);
    c.qps_walk.floor = s.num("floor", c.qps_walk.floor);
    c.qps_walk.cap = s.num("cap", c.qps_walk.cap);
    c.qps_walk.mean_reversion = s.num("mean_reversion", c.qps_walk.mean_reversion);
    s.done();
    require(c.qps_walk.step_sigma >= 0, "qps_walk.step_sigma", "must be >= 0");
    require(c.qps_walk.floor >= 0, "qps_walk.floor", "must be >= 0");
    require(c.qps_walk.cap >= c.qps_walk.floor, "qps_walk.cap", "must be >= floor");
    require(c.qps_walk.mean_reversion >= 0 && c.qps_walk.mean_reversion <= 1,
            "qps_walk.mean_reversion", "must be in [0,1]");
  }

  if (const auto* j = top.object("contention")) {
    detail::Section s(*j, "contention");
    c.contention.lambda0_ns = s.num("lambda0_ns", c.contention.lambda0_ns);
    c.contention.lambda1_ns = s.num("lambda1_ns", c.contention.lambda1_ns);
    c.contention.rho0 = s.num("rho0", c.contention.rho0);
    c.contention.gamma = s.num("gamma", c.contention.gamma);
    c.contention.dispersion = s.num("dispersion", c.contention.dispersion);
    c.contention.samples_per_window = s.integer("samples_per_window", c.contention.samples_per_window);
    s.done();
    require(c.contention.lambda0_ns >= 0, "contention.lambda0_ns", "must be >= 0");
    require(c.contention.lambda1_ns >= 0, "contention.lambda1_ns", "must be >= 0");
    require(c.contention.rho0 >= 0, "contention.rho0", "must be >= 0");
    require(c.contention.gamma > 0, "contention.gamma", "must be > 0");
    require(c.contention.dispersion >= 0, "contention.dispersion", "must be >= 0");
    require(c.contention.samples_per_window >= 1, "contention.samples_per_window", "must be >= 1");
  }

  if (const auto* j = top.object("response")) {
    detail::Section s(*j, "response");
    c.response.s0 = s.num("s0", c.response.s0);
    c.response.s1 = s.num("s1", c.response.s1);
    c.response.noise_sigma_ms = s.num("noise_sigma_ms", c.response.noise_sigma_ms);
    s.done();
    require(c.response.s0 > 0, "response.s0", "must be > 0");
    require(c.response.s1 >= 0, "response.s1", "must be >= 0");
    require(c.response.noise_sigma_ms >= 0, "response.noise_sigma_ms", "must be >= 0");
  }

  if (const auto* j = top.object("sim")) {
    detail::Section s(*j, "sim");
    c.sim.horizon_s = s.num("horizon_s", c.sim.horizon_s);
    c.sim.window_s = s.num("window_s", c.sim.window_s);
    c.sim.seed = s.u64("seed", c.sim.seed);
    c.sim.record_responses = s.boolean("record_responses", c.sim.record_responses);
    s.done();
    require(c.sim.window_s > 0, "sim.window_s", "must be > 0");
    require(c.sim.horizon_s >= 10 * c.sim.window_s, "sim.horizon_s",
            "must cover at least 10 windows");
  }

  if (const auto* j = top.object("interference")) {
    detail::Section s(*j, "interference");
    c.interference.w_a = s.num("w_a", c.interference.w_a);
    c.interference.w_b = s.num("w_b", c.interference.w_b);
    c.interference.w_c = s.num("w_c", c.interference.w_c);
    c.interference.norm_ns = s.num("norm_ns", c.interference.norm_ns);
    s.done();
    require(c.interference.w_a > 1, "interference.w_a", "must be > 1");
    require(c.interference.w_b > 1, "interference.w_b", "must be > 1");
    require(c.interference.w_c > 0, "interference.w_c", "must be > 0");
    require(c.interference.norm_ns > 0, "interference.norm_ns", "must be > 0");
  }

  if (const auto* j = top.object("scheduler")) {
    detail::Section s(*j, "scheduler");
    c.scheduler.w_d = s.num("w_d", c.scheduler.w_d);
    c.scheduler.w_e = s.num("w_e", c.scheduler.w_e);
    c.scheduler.cpu_threshold = s.num("cpu_threshold", c.scheduler.cpu_threshold);
    c.scheduler.mem_threshold = s.num("mem_threshold", c.scheduler.mem_threshold);
    s.done();
    require(c.scheduler.w_d > 1, "scheduler.w_d", "must be > 1");
    require(c.scheduler.w_e > 1, "scheduler.w_e", "must be > 1");
    require(c.scheduler.cpu_threshold > 0 && c.scheduler.cpu_threshold <= 1,
            "scheduler.cpu_threshold", "must be in (0,1]");
    require(c.scheduler.mem_threshold > 0 && c.scheduler.mem_threshold <= 1,
            "scheduler.mem_threshold", "must be in (0,1]");
  }

  if (const auto* j = top.object("forest")) {
    detail::Section s(*j, "forest");
    c.forest.n_trees = s.integer("n_trees", c.forest.n_trees);
    c.forest.max_depth = s.integer("max_depth", c.forest.max_depth);
    c.forest.min_samples_leaf = s.integer("min_samples_leaf", c.forest.min_samples_leaf);
    c.forest.features_per_split = s.integer("features_per_split", c.forest.features_per_split);
    c.forest.bootstrap = s.boolean("bootstrap", c.forest.bootstrap);
    c.forest.seed = s.u64("seed", c.forest.seed);
    s.done();
    require(c.forest.n_trees >= 1, "forest.n_trees", "must be >= 1");
    require(c.forest.max_depth >= 1, "forest.max_depth", "must be >= 1");
    require(c.forest.min_samples_leaf >= 1, "forest.min_samples_leaf", "must be >= 1");
    require(c.forest.features_per_split >= 1 &&
                c.forest.features_per_split <= static_cast<int>(kFeatureCount),
            "forest.features_per_split", "must be in [1,246]");
  }

  if (const auto* j = top.object("experiment")) {
    detail::Section s(*j, "experiment");
    c.experiment.n_seeds = s.integer("n_seeds", c.experiment.n_seeds);
    c.experiment.dataset_runs = s.integer("dataset_runs", c.experiment.dataset_runs);
    if (const auto* arr = s.array("policies")) {
      c.experiment.policies.clear();
      for (const auto& v : *arr) {
        if (!v.is_string()) throw ConfigError("experiment.policies", "expected strings");
        c.experiment.policies.push_back(v.get<std::string>());
      }
    }
    s.done();
    require(c.experiment.n_seeds >= 1, "experiment.n_seeds", "must be >= 1");
    require(c.experiment.dataset_runs >= 1, "experiment.dataset_runs", "must be >= 1");
    require(!c.experiment.policies.empty(), "experiment.policies", "must be non-empty");
    for (const auto& p : c.experiment.policies) {
      require(p == "ico" || p == "rr" || p == "hup" || p == "lqp", "experiment.policies",
              "must be drawn from {ico, rr, hup, lqp}");
    }
  }

  if (const auto* j = top.object("motivation")) {
    detail::Section s(*j, "motivation");
    c.motivation.exp1_qps = s.num("exp1_qps", c.motivation.exp1_qps);
    if (const auto* arr = s.array("exp1_offline_cores")) {
      c.motivation.exp1_offline_cores = detail::num_array(*arr, "motivation.exp1_offline_cores");
    }
    c.motivation.exp2_offline_cores = s.num("exp2_offline_cores", c.motivation.exp2_offline_cores);
    if (const auto* arr = s.array("exp2_qps")) {
      c.motivation.exp2_qps = detail::num_array(*arr, "motivation.exp2_qps");
    }
    c.motivation.windows_per_point = s.integer("windows_per_point", c.motivation.windows_per_point);
    c.motivation.warmup_windows = s.integer("warmup_windows", c.motivation.warmup_windows);
    s.done();
    require(c.motivation.exp1_qps > 0, "motivation.exp1_qps", "must be > 0");
    require(!c.motivation.exp1_offline_cores.empty(), "motivation.exp1_offline_cores",
            "must be non-empty");
    require(c.motivation.exp2_offline_cores > 0, "motivation.exp2_offline_cores", "must be > 0");
    require(!c.motivation.exp2_qps.empty(), "motivation.exp2_qps", "must be non-empty");
    require(c.motivation.windows_per_point >= 1, "motivation.windows_per_point", "must be >= 1");
    require(c.motivation.warmup_windows >= 0, "motivation.warmup_windows", "must be >= 0");
  }

  top.done();
  return c;
}

inline nlohmann::json to_json(const AppConfig& c) {
  nlohmann::json j;
  j["cluster"] = {{"nodes", c.cluster.nodes},
                  {"cores_per_node", c.cluster.cores_per_node},
                  {"mem_gib_per_node", c.cluster.mem_per_node_bytes / kGiB}};

  nlohmann::json online = nlohmann::json::array();
  for (const auto& k : c.workloads.online_kinds) {
    online.push_back({{"name", k.name},
                      {"cpu_per_qps", k.cpu_per_qps},
                      {"cpu_base", k.cpu_base},
                      {"mem_per_qps_mib", k.mem_per_qps / kMiB},
                      {"mem_base_mib", k.mem_base / kMiB},
                      {"base_service_ms", k.base_service_ms},
                      {"threads_per_qps", k.threads_per_qps},
                      {"qps_target", k.qps_target}});
  }
  nlohmann::json offline = nlohmann::json::array();
  for (const auto& k : c.workloads.offline_kinds) {
    offline.push_back({{"name", k.name},
                       {"cores", k.cores},
                       {"mem_gib", k.mem_bytes / kGiB},
                       {"duration_s", k.duration_s},
                       {"thread_factor", k.thread_factor}});
  }
  j["workloads"] = {{"online_kinds", std::move(online)},
                    {"offline_kinds", std::move(offline)},
                    {"offline_fraction", c.workloads.offline_fraction},
                    {"arrival_mean_s", c.workloads.arrival_mean_s},
                    {"online_lifetime_s", c.workloads.online_lifetime_s},
                    {"qps_jitter", c.workloads.qps_jitter},
                    {"qps_profile_csv", c.workloads.qps_profile_csv}};

  j["qps_walk"] = {{"step_sigma", c.qps_walk.step_sigma},
                   {"floor", c.qps_walk.floor},
                   {"cap", c.qps_walk.cap},
                   {"mean_reversion", c.qps_walk.mean_reversion}};
  j["contention"] = {{"lambda0_ns", c.contention.lambda0_ns},
                     {"lambda1_ns", c.contention.lambda1_ns},
                     {"rho0", c.contention.rho0},
                     {"gamma", c.contention.gamma},
                     {"dispersion", c.contention.dispersion},
                     {"samples_per_window", c.contention.samples_per_window}};
  j["response"] = {{"s0", c.response.s0},
                   {"s1", c.response.s1},
                   {"noise_sigma_ms", c.response.noise_sigma_ms}};
  j["sim"] = {{"horizon_s", c.sim.horizon_s},
              {"window_s", c.sim.window_s},
              {"seed", c.sim.seed},
              {"record_responses", c.sim.record_responses}};
  j["interference"] = {{"w_a", c.interference.w_a},
                       {"w_b", c.interference.w_b},
                       {"w_c", c.interference.w_c},
                       {"norm_ns", c.interference.norm_ns}};
  j["scheduler"] = {{"w_d", c.scheduler.w_d},
                    {"w_e", c.scheduler.w_e},
                    {"cpu_threshold", c.scheduler.cpu_threshold},
                    {"mem_threshold", c.scheduler.mem_threshold}};
  j["forest"] = {{"n_trees", c.forest.n_trees},
                 {"max_depth", c.forest.max_depth},
                 {"min_samples_leaf", c.forest.min_samples_leaf},
                 {"features_per_split", c.forest.features_per_split},
                 {"bootstrap", c.forest.bootstrap},
                 {"seed", c.forest.seed}};
  j["experiment"] = {{"n_seeds", c.experiment.n_seeds},
                     {"dataset_runs", c.experiment.dataset_runs},
                     {"policies", c.experiment.policies}};
  j["motivation"] = {{"exp1_qps", c.motivation.exp1_qps},
                     {"exp1_offline_cores", c.motivation.exp1_offline_cores},
                     {"exp2_offline_cores", c.motivation.exp2_offline_cores},
                     {"exp2_qps", c.motivation.exp2_qps},
                     {"windows_per_point", c.motivation.windows_per_point},
                     {"warmup_windows", c.motivation.warmup_windows}};
  return j;
}

inline AppConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
  return parse_config(j);
}

// Stable short identifier for run directories and report metadata.
inline std::string config_hash(const AppConfig& c) {
  return to_hex16(fnv1a64(to_json(c).dump()));
}

}  // namespace ico
