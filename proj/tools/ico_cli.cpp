// Experiment CLI: dataset generation, model training, simulation runs,
// policy comparisons and the motivation curve-fit study, all reproducible
// from a config file and a seed.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ico/experiment.hpp"
#include "ico/model_io.hpp"
#include "ico/sim_config.hpp"
#include "ico/version.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "runs";
  int parallelism = 0;  // 0 = hardware concurrency
  std::vector<std::string> policies;
  std::string models_path;
  std::string policy = "ico";
  std::string format = "table";
  std::string dump_out;
  bool verbose = false;
};

int effective_parallelism(const Options& opt) {
  if (opt.parallelism > 0) return opt.parallelism;
  const auto hw = static_cast<int>(std::thread::hardware_concurrency());
  return hw > 0 ? hw : 1;
}

ico::AppConfig load_config(const Options& opt) {
  ico::AppConfig cfg = ico::load_config_file(opt.config_path);
  if (opt.seed) cfg.sim.seed = *opt.seed;
  return cfg;
}

void log_verbose(const Options& opt, const std::string& message) {
  if (opt.verbose) std::cerr << "[ico] " << message << "\n";
}

int cmd_dump_default_config(const Options& opt) {
  const auto j = ico::to_json(ico::default_config());
  if (opt.dump_out.empty()) {
    std::cout << j.dump(1) << "\n";
  } else {
    ico::write_json_file(opt.dump_out, j);
  }
  return 0;
}

int cmd_gen_dataset(const Options& opt) {
  const auto cfg = load_config(opt);
  const auto dir = ico::make_run_dir(opt.out, cfg, cfg.sim.seed);
  ico::write_config_snapshot(dir, cfg, cfg.sim.seed);
  log_verbose(opt, "generating dataset (" + std::to_string(cfg.experiment.dataset_runs) +
                       " randomized runs)");
  const auto split =
      ico::generate_training_dataset(cfg, cfg.experiment.dataset_runs, cfg.sim.seed);
  ico::write_dataset_csv(dir / "dataset_train.csv", split.train);
  ico::write_dataset_csv(dir / "dataset_test.csv", split.test);
  std::cout << "dataset: " << split.train.size() << " train / " << split.test.size()
            << " test samples -> " << dir.string() << "\n";
  return 0;
}

ico::ModelBundle train_bundle(const Options& opt, const ico::AppConfig& cfg,
                              ico::EvalMetrics* forest_eval, ico::EvalMetrics* linear_eval) {
  log_verbose(opt, "fitting per-kind resource models");
  ico::ModelBundle bundle;
  bundle.resources = ico::fit_resource_models(cfg, cfg.sim.seed);
  log_verbose(opt, "generating training dataset");
  const auto split =
      ico::generate_training_dataset(cfg, cfg.experiment.dataset_runs, cfg.sim.seed);
  log_verbose(opt, "training forest on " + std::to_string(split.train.size()) + " samples");
  bundle.forest = ico::train_forest(split.train, cfg.forest, effective_parallelism(opt));

  if (forest_eval != nullptr && !split.test.y.empty()) {
    std::vector<double> preds;
    preds.reserve(split.test.size());
    for (const auto& f : split.test.x) preds.push_back(ico::predict_latency(bundle.forest, f));
    *forest_eval = ico::evaluate(preds, split.test.y);
  }
  if (linear_eval != nullptr && !split.test.y.empty()) {
    std::vector<std::pair<double, double>> qps_only;
    qps_only.reserve(split.train.size());
    for (std::size_t i = 0; i < split.train.size(); ++i) {
      qps_only.emplace_back(split.train.x[i][ico::kQpsFeature], split.train.y[i]);
    }
    const auto linear = ico::fit_linear(qps_only, "qps", "avg_runqlat_ns");
    std::vector<double> lp;
    lp.reserve(split.test.size());
    for (const auto& f : split.test.x) lp.push_back(linear(f[ico::kQpsFeature]));
    *linear_eval = ico::evaluate(lp, split.test.y);
  }
  return bundle;
}

int cmd_train(const Options& opt) {
  const auto cfg = load_config(opt);
  const auto dir = ico::make_run_dir(opt.out, cfg, cfg.sim.seed);
  ico::write_config_snapshot(dir, cfg, cfg.sim.seed);

  ico::EvalMetrics forest_eval, linear_eval;
  const auto bundle = train_bundle(opt, cfg, &forest_eval, &linear_eval);
  ico::save_models(dir / "models.json", bundle);

  nlohmann::json eval;
  eval["forest"] = {{"mae", forest_eval.mae},
                    {"mse", forest_eval.mse},
                    {"mape", forest_eval.mape},
                    {"r2", forest_eval.r2}};
  eval["linear_qps_only"] = {{"mae", linear_eval.mae},
                             {"mse", linear_eval.mse},
                             {"mape", linear_eval.mape},
                             {"r2", linear_eval.r2}};
  ico::write_json_file(dir / "eval.json", eval);

  std::printf("forest held-out:  mae %.4f  mse %.4f  mape %.4f  r2 %.4f\n", forest_eval.mae,
              forest_eval.mse, forest_eval.mape, forest_eval.r2);
  std::printf("linear(qps only): mae %.4f  mse %.4f  mape %.4f  r2 %.4f\n", linear_eval.mae,
              linear_eval.mse, linear_eval.mape, linear_eval.r2);
  std::cout << "models -> " << (dir / "models.json").string() << "\n";
  return 0;
}

ico::ModelBundle obtain_models(const Options& opt, const ico::AppConfig& cfg,
                               bool needs_predictor) {
  if (!opt.models_path.empty()) return ico::load_models(opt.models_path);
  if (!needs_predictor) return {};
  log_verbose(opt, "no --models given; training in-process");
  return train_bundle(opt, cfg, nullptr, nullptr);
}

void print_policy_line(const std::string& name, const ico::PolicyMetrics& m) {
  std::printf("%-6s avg %9.3f ms  p90 %9.3f ms  p99 %9.3f ms  cpu_std %7.3f  mem_std %7.3f  "
              "placed %lld  unplaceable %lld\n",
              name.c_str(), m.avg_response_ms, m.p90_ms, m.p99_ms, m.cpu_std_pct, m.mem_std_pct,
              static_cast<long long>(m.placements), static_cast<long long>(m.no_feasible));
}

int cmd_simulate(const Options& opt) {
  const auto cfg = load_config(opt);
  const bool needs_predictor = opt.policy == "ico" || opt.policy == "hup";
  const auto models = obtain_models(opt, cfg, needs_predictor);

  const auto dir = ico::make_run_dir(opt.out, cfg, cfg.sim.seed);
  ico::write_config_snapshot(dir, cfg, cfg.sim.seed);
  const std::vector<std::string> policies{opt.policy};
  std::map<std::string, ico::PolicyRunResult> outputs;
  const auto report = ico::run_comparison(cfg, models, cfg.sim.seed, policies, &outputs, 1);
  ico::write_json_file(dir / "report.json", ico::report_to_json(report));
  ico::write_requests_csv(dir / "requests.csv", outputs);
  ico::write_decisions_csv(dir / "decisions.csv", outputs);

  print_policy_line(opt.policy, report.policies.at(opt.policy));
  std::cout << "run -> " << dir.string() << "\n";
  return 0;
}

struct SummaryRow {
  double avg = 0, p90 = 0, p99 = 0, cpu_std = 0, mem_std = 0;
};

std::map<std::string, SummaryRow> summarize(const std::vector<ico::ExperimentReport>& reports) {
  std::map<std::string, SummaryRow> rows;
  std::map<std::string, int> counts;
  for (const auto& report : reports) {
    for (const auto& [policy, m] : report.policies) {
      auto& row = rows[policy];
      row.avg += m.avg_response_ms;
      row.p90 += m.p90_ms;
      row.p99 += m.p99_ms;
      row.cpu_std += m.cpu_std_pct;
      row.mem_std += m.mem_std_pct;
      ++counts[policy];
    }
  }
  for (auto& [policy, row] : rows) {
    const auto n = static_cast<double>(counts[policy]);
    row.avg /= n;
    row.p90 /= n;
    row.p99 /= n;
    row.cpu_std /= n;
    row.mem_std /= n;
  }
  return rows;
}

void print_summary(const std::map<std::string, SummaryRow>& rows, const std::string& format) {
  if (format == "json") {
    nlohmann::json j;
    for (const auto& [policy, r] : rows) {
      j[policy] = {{"avg_response_ms", r.avg},
                   {"p90_ms", r.p90},
                   {"p99_ms", r.p99},
                   {"cpu_std_pct", r.cpu_std},
                   {"mem_std_pct", r.mem_std}};
    }
    std::cout << j.dump(1) << "\n";
    return;
  }
  if (format == "csv") {
    std::cout << "policy,avg_response_ms,p90_ms,p99_ms,cpu_std_pct,mem_std_pct\n";
    for (const auto& [policy, r] : rows) {
      std::cout << policy << ',' << ico::format_double(r.avg) << ',' << ico::format_double(r.p90)
                << ',' << ico::format_double(r.p99) << ',' << ico::format_double(r.cpu_std) << ','
                << ico::format_double(r.mem_std) << "\n";
    }
    return;
  }
  std::printf("%-8s %12s %12s %12s %10s %10s\n", "policy", "avg_ms", "p90_ms", "p99_ms", "cpu_std",
              "mem_std");
  for (const auto& [policy, r] : rows) {
    std::printf("%-8s %12.3f %12.3f %12.3f %10.3f %10.3f\n", policy.c_str(), r.avg, r.p90, r.p99,
                r.cpu_std, r.mem_std);
  }
}

int cmd_compare(const Options& opt) {
  const auto cfg = load_config(opt);
  std::vector<std::string> policies = opt.policies.empty() ? cfg.experiment.policies : opt.policies;
  for (const auto& p : policies) {
    if (std::find(ico::known_policies().begin(), ico::known_policies().end(), p) ==
        ico::known_policies().end()) {
      throw ico::ConfigError("policies", "unknown policy '" + p + "'");
    }
  }
  const bool needs_predictor =
      std::find(policies.begin(), policies.end(), "ico") != policies.end() ||
      std::find(policies.begin(), policies.end(), "hup") != policies.end();
  const auto models = obtain_models(opt, cfg, needs_predictor);

  std::vector<ico::ExperimentReport> reports;
  for (int i = 0; i < cfg.experiment.n_seeds; ++i) {
    const std::uint64_t seed = cfg.sim.seed + static_cast<std::uint64_t>(i);
    log_verbose(opt, "running seed " + std::to_string(seed));
    std::map<std::string, ico::PolicyRunResult> outputs;
    auto report =
        ico::run_comparison(cfg, models, seed, policies, &outputs, effective_parallelism(opt));
    const auto dir = ico::make_run_dir(opt.out, cfg, seed);
    ico::write_config_snapshot(dir, cfg, seed);
    ico::write_json_file(dir / "report.json", ico::report_to_json(report));
    ico::write_requests_csv(dir / "requests.csv", outputs);
    ico::write_decisions_csv(dir / "decisions.csv", outputs);
    reports.push_back(std::move(report));
  }
  print_summary(summarize(reports), opt.format);
  return 0;
}

int cmd_motivation(const Options& opt) {
  const auto cfg = load_config(opt);
  const auto dir = ico::make_run_dir(opt.out, cfg, cfg.sim.seed);
  ico::write_config_snapshot(dir, cfg, cfg.sim.seed);
  const auto fit = ico::motivation_fit(cfg, cfg.sim.seed);
  ico::write_json_file(dir / "fit_report.json", ico::fit_report_to_json(fit));
  std::printf("%-24s %10s %10s\n", "fit", "MAPE", "R2");
  for (const auto& e : fit.entries) {
    std::printf("%-24s %10.4f %10.4f\n", e.name.c_str(), e.mape, e.r2);
  }
  std::cout << "fit report -> " << (dir / "fit_report.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{std::string("icosched: interference-aware co-located container scheduling "
                           "testbed (") +
               ico::kCodeVersion + ")"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Path to the JSON config file")->required();
    sub->add_option("--seed", opt.seed, "Override sim.seed from the config");
    sub->add_option("--out", opt.out, "Output directory for run artifacts (default: runs)");
    sub->add_option("--parallelism", opt.parallelism,
                    "Worker threads (default: number of processors)");
    sub->add_flag("-v,--verbose", opt.verbose, "Progress notes on stderr");
  };

  auto* dump = app.add_subcommand("dump-default-config", "Print the default config as JSON");
  dump->add_option("--out", opt.dump_out, "Write to a file instead of stdout");

  auto* gen = app.add_subcommand("gen-dataset",
                                 "Generate a latency-prediction dataset (train/test CSV)");
  add_common(gen);

  auto* train = app.add_subcommand("train", "Train resource models and the latency forest");
  add_common(train);

  auto* simulate = app.add_subcommand("simulate", "Run one policy over the configured horizon");
  add_common(simulate);
  simulate->add_option("--policy", opt.policy, "Scheduling policy (ico|rr|hup|lqp)")
      ->check(CLI::IsMember({"ico", "rr", "hup", "lqp"}));
  simulate->add_option("--models", opt.models_path, "models.json from a train run");

  auto* compare =
      app.add_subcommand("compare", "Run all policies with common random numbers and compare");
  add_common(compare);
  compare->add_option("--policies", opt.policies, "Subset of policies to run (comma separated)")
      ->delimiter(',');
  compare->add_option("--models", opt.models_path, "models.json from a train run");
  compare->add_option("--format", opt.format, "Summary format")
      ->check(CLI::IsMember({"table", "json", "csv"}));

  auto* motivation =
      app.add_subcommand("motivation", "Curve-fit study: response vs runqlat and CPU");
  add_common(motivation);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (dump->parsed()) return cmd_dump_default_config(opt);
    if (gen->parsed()) return cmd_gen_dataset(opt);
    if (train->parsed()) return cmd_train(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (compare->parsed()) return cmd_compare(opt);
    if (motivation->parsed()) return cmd_motivation(opt);
  } catch (const ico::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
