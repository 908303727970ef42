#include "isodiam/experiment.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <thread>

namespace {

int run_one(const std::string& path, const isodiam::RunOptions& opts) {
  using namespace isodiam;
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::load(path);
  } catch (const Error& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  }
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResult res = run_experiment(cfg, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%s] %s\n", res.id.c_str(), res.kind.c_str(), res.reference.c_str());
    for (const auto& a : res.assertions)
      std::printf("  %-4s %-36s %.10g  (%s)\n", a.pass ? "ok" : "FAIL", a.name.c_str(), a.value, a.requirement.c_str());
    std::printf("%s in %.2f s -> %s\n", res.pass ? "PASS" : "FAIL", secs, (opts.out / (res.id + ".json")).c_str());
    return res.pass ? 0 : 1;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) {
      std::cerr << "invalid config: " << e.what() << '\n';
      return 2;
    }
    std::cerr << "experiment failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << '\n';
    return 1;
  }
}

int run_suite(const std::string& dir, const std::string& filter, const isodiam::RunOptions& opts, int jobs) {
  using namespace isodiam;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SuiteEntry> entries;
  try {
    entries = isodiam::run_suite(dir, filter, opts, jobs);
    std::filesystem::create_directories(opts.out);
    write_summary_csv(entries, opts.out / "summary.csv");
  } catch (const std::exception& e) {
    std::cerr << "suite failed: " << e.what() << '\n';
    return 1;
  }
  std::printf("%-34s %-9s %-6s %8s  %s\n", "experiment", "kind", "result", "seconds", "reference");
  bool ok = !entries.empty();
  for (const auto& e : entries) {
    const char* status = e.exit_code == 0 ? "pass" : e.exit_code == 2 ? "config" : "FAIL";
    std::printf("%-34s %-9s %-6s %8.2f  %s\n", e.id.c_str(), e.kind.c_str(), status, e.seconds, e.reference.c_str());
    if (!e.error.empty()) std::printf("    %s\n", e.error.c_str());
    ok = ok && e.exit_code == 0;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%zu experiments, %s, %.1f s\n", entries.size(), ok ? "all pass" : "failures", secs);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for rad * P against volume on model surfaces"};
  std::string config, configs = "configs", filter, out = "results";
  bool suite = false;
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  int jobs = int(std::max(1u, std::thread::hardware_concurrency()));

  auto* cfg_opt = app.add_option("--config", config, "Experiment config (JSON)");
  auto* suite_opt = app.add_flag("--suite", suite, "Run every config in --configs");
  cfg_opt->excludes(suite_opt);
  app.add_option("--configs", configs, "Config directory for --suite")->capture_default_str();
  app.add_option("--filter", filter, "Only configs whose file name, id or kind contains this");
  auto* seed_opt = app.add_option("--seed", seed, "Override every config's seed");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--tol-scale", tol_scale, "Multiply every tolerance")->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "Worker threads for --suite")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!suite && config.empty()) {
    std::cerr << app.help();
    return 2;
  }
  isodiam::RunOptions opts;
  opts.out = out;
  opts.tol_scale = tol_scale;
  if (*seed_opt) opts.seed = seed;
  return suite ? run_suite(configs, filter, opts, jobs) : run_one(config, opts);
}
