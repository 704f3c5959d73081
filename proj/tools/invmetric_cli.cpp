// Command-line front end: `run` executes a configured task, `describe` summarizes a domain.

#include <iostream>

#include "CLI11.hpp"

#include "invmetric/runner.hpp"

namespace {

using invmetric::io::json;

int run_command(const std::string& config_path, const invmetric::RunOverrides& ov, bool quiet) {
  json cfg;
  try {
    cfg = invmetric::io::read_json_file(config_path);
  } catch (const invmetric::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invmetric::kExitConfig;
  }
  const auto res = invmetric::run_config(cfg, ov);
  if (res.summary.contains("error")) {
    std::cerr << "error: " << res.summary.value("error", "invalid config") << "\n";
    return res.exit_code;
  }
  if (!quiet) {
    if (res.files.empty()) std::cout << res.csv;
    else
      for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
    std::cout << "task " << res.task << ": exit " << res.exit_code << "\n";
  }
  return res.exit_code;
}

int describe_command(const std::string& path) {
  try {
    const json j = invmetric::io::read_json_file(path);
    const json& dj = j.contains("domain") ? j.at("domain") : j;
    std::cout << invmetric::describe(invmetric::io::domain_from_json(dj));
    return invmetric::kExitOk;
  } catch (const invmetric::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return invmetric::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant metrics on bounded domains: sandwich bounds, inequality checks and geodesics"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the task described by a JSON config");
  std::string config;
  std::uint64_t seed = 0;
  std::string out, task;
  unsigned threads = 0;
  bool quiet = false;
  run->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  auto* out_opt = run->add_option("--out", out, "output directory");
  auto* task_opt = run->add_option("--task", task, "override the config task")
                       ->check(CLI::IsMember(invmetric::task_names()));
  auto* threads_opt = run->add_option("--threads", threads, "worker threads (0 = all cores)");
  run->add_flag("--quiet", quiet, "suppress progress output");

  auto* desc = app.add_subcommand("describe", "summarize a domain from a domain or config JSON");
  std::string desc_path;
  desc->add_option("path", desc_path, "domain JSON or config with a \"domain\" key")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : invmetric::kExitConfig;
  }

  if (*run) {
    invmetric::RunOverrides ov;
    if (*seed_opt) ov.seed = seed;
    if (*out_opt) ov.out_dir = out;
    if (*task_opt) ov.task = task;
    if (*threads_opt) ov.threads = threads;
    return run_command(config, ov, quiet);
  }
  return describe_command(desc_path);
}
