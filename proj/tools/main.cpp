#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "handles.hpp"

namespace {

constexpr int kChecksFailed = 1;
constexpr int kModuleError = 2;
constexpr int kUsageError = 64;

std::string join(const std::vector<double>& v) {
  std::string out;
  char buf[40];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += (out.empty() ? "" : ",") + std::string(buf);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular Moser-Trudinger laboratory"};
  std::string experiment, config_path, out_dir, eps_list;
  std::optional<int> level;
  std::optional<double> beta;
  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(cli::experiment_names()));
  app.add_option("--config", config_path, "Config file ([section] key = value)")->required();
  app.add_option("--out", out_dir, "Output directory (overrides run.output_dir)");
  app.add_option("--level", level, "Mesh refinement level (overrides domain.level)");
  app.add_option("--beta", beta, "Singularity exponent (overrides run.beta)");
  app.add_option("--eps-list", eps_list, "Comma-separated eps values (overrides the experiment's eps list)");
  CLI11_PARSE(app, argc, argv);

  cli::Config config;
  cli::Settings settings;
  try {
    config = cli::Config::load(config_path);
    if (!out_dir.empty()) config.set("run.output_dir", out_dir);
    if (level) config.set("domain.level", std::to_string(*level));
    if (beta) config.set("run.beta", join({*beta}));
    if (!eps_list.empty()) {
      auto values = join(cli::parse_list(eps_list, "--eps-list"));
      config.set(experiment == "test_family" ? "test_family.eps_list" : "sweep.eps_list", values);
    }
    settings = cli::make_settings(experiment, config);
  } catch (const cli::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    auto manifest = cli::run_experiment(settings, config);
    int failed = 0;
    for (const auto& c : manifest["checks"])
      if (!c["pass"].get<bool>()) {
        ++failed;
        std::cout << "FAIL " << c["name"].get<std::string>() << ": " << c["value"].dump() << ' '
                  << c["relation"].get<std::string>() << ' ' << c["limit"].dump() << '\n';
      }
    std::cout << experiment << ": " << manifest["checks"].size() - failed << '/' << manifest["checks"].size()
              << " checks passed; manifest at "
              << (std::filesystem::path(settings.output_dir) / "manifest.json").string() << '\n';
    return failed ? kChecksFailed : 0;
  } catch (const cli::ModuleError& e) {
    std::cerr << "error (" << smtlab_status_name(e.status) << "): " << e.what() << '\n';
    nlohmann::ordered_json m;
    m["experiment"] = experiment;
    m["error"] = {{"status", smtlab_status_name(e.status)}, {"message", e.what()}};
    m["pass"] = false;
    std::filesystem::create_directories(settings.output_dir);
    std::ofstream(std::filesystem::path(settings.output_dir) / "manifest.json") << m.dump(2) << '\n';
    return kModuleError;
  } catch (const cli::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kModuleError;
  }
}
