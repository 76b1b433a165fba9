// Experiment runner for the primal-averaging optimizer library.
//
// Subcommands:
//   run <config.json>          execute one configured run, write its CSV
//   sweep <config-dir>         run every *.json config in a directory
//   compare <csv...> --baseline <name>   speedup report against a baseline
//   convert --mu <m> --inner-steps <H>   print the (mu_x, mu_y) conversion
//   verify                     execute the full verification suite
//
// Exit codes: 0 success, 1 internal/verification failure, 2 divergence,
// 3 configuration error.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "gpa/gpa.hpp"
#include "gpa/harness.hpp"
#include "gpa/verify.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path, const std::string& output_override) {
  gpa::RunConfig config = gpa::load_run_config(config_path);
  if (!output_override.empty()) config.output_path = output_override;
  if (config.output_path.empty()) config.output_path = config.name + ".csv";
  const gpa::RunRecord record = gpa::run(config);
  std::cout << "run " << config.name << ": wrote " << config.output_path << " ("
            << record.rows.size() << " rows)\n";
  if (record.diverged) {
    std::cout << "run " << config.name << ": DIVERGED\n";
    return 2;
  }
  std::cout << "final loss " << record.final_loss() << ", best loss " << record.best_loss()
            << "\n";
  return 0;
}

int cmd_sweep(const std::string& dir, const std::string& summary_path, int threads) {
  std::vector<gpa::RunConfig> grid;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const fs::path& p : paths) {
    gpa::RunConfig config = gpa::load_run_config(p.string());
    if (config.output_path.empty()) {
      config.output_path = (fs::path(dir) / (config.name + ".csv")).string();
    }
    grid.push_back(std::move(config));
  }
  if (grid.empty()) throw gpa::ConfigError("sweep: no *.json configs in " + dir);
  const gpa::SweepSummary summary = gpa::sweep(grid, threads);
  std::cout << summary.to_table();
  const std::string out =
      summary_path.empty() ? (fs::path(dir) / "sweep_summary.json").string() : summary_path;
  std::ofstream file(out);
  file << summary.to_json() << "\n";
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& csv_paths, const std::string& baseline) {
  std::map<std::string, gpa::RunRecord> records;
  for (const std::string& path : csv_paths) {
    records[fs::path(path).stem().string()] = gpa::read_csv(path);
  }
  const gpa::CompareReport report = gpa::compare(records, baseline);
  std::cout << report.to_table();
  return 0;
}

int cmd_convert(double mu, std::int64_t inner_steps) {
  const auto [mu_x, mu_y] = gpa::map_diloco_to_gpa(mu, inner_steps);
  std::cout << "mu_x " << mu_x << "\nmu_y " << mu_y << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primal-averaging optimizer benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, output_override;
  auto* run_cmd = app.add_subcommand("run", "execute one configured run");
  run_cmd->add_option("config", config_path, "JSON run config")->required();
  run_cmd->add_option("--output", output_override, "override the CSV output path");

  std::string sweep_dir, summary_path;
  int threads = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every config in a directory");
  sweep_cmd->add_option("config-dir", sweep_dir, "directory of *.json configs")->required();
  sweep_cmd->add_option("--output", summary_path, "summary JSON path");
  sweep_cmd->add_option("--threads", threads, "parallel workers");

  std::vector<std::string> csv_paths;
  std::string baseline;
  auto* compare_cmd = app.add_subcommand("compare", "speedup report against a baseline record");
  compare_cmd->add_option("records", csv_paths, "run CSV files")->required()->expected(-1);
  compare_cmd->add_option("--baseline", baseline, "baseline record name (file stem)")->required();

  double mu = 0.0;
  std::int64_t inner_steps = 0;
  auto* convert_cmd = app.add_subcommand("convert", "inner-step recipe to interpolation constants");
  convert_cmd->add_option("--mu", mu, "momentum of the inner-step recipe")->required();
  convert_cmd->add_option("--inner-steps", inner_steps, "number of inner steps")->required();

  auto* verify_cmd = app.add_subcommand("verify", "run the full verification suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;  // bad command line is a configuration error
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, output_override);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_dir, summary_path, threads);
    if (compare_cmd->parsed()) return cmd_compare(csv_paths, baseline);
    if (convert_cmd->parsed()) return cmd_convert(mu, inner_steps);
    if (verify_cmd->parsed()) return gpa::print_acceptance(std::cout) ? 0 : 1;
  } catch (const gpa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
