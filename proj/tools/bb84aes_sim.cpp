// Command-line front end: single scenarios, xi sweeps and the two batch runs.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bb84aes/error.hpp"
#include "bb84aes/harness.hpp"

using namespace bb84aes;

int main(int argc, char** argv) {
  CLI::App app{"BB84-AES quantum key distribution simulator"};
  app.require_subcommand(1);

  std::string out_path = "-";
  std::string format = "csv";
  std::uint64_t seed = 1;
  bool seed_given = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output file, '-' for stdout");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s; seed_given = true; }, "Root seed");
  };

  std::string config_path;
  std::vector<std::string> overrides;
  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  common(run);
  run->add_option("--config", config_path, "Scenario file (key = value with [sections])")->check(CLI::ExistingFile);
  run->add_option("--set", overrides, "Override, e.g. --set channel.qber=0.05");

  int xi_min = 2;
  int xi_max = 12;
  std::vector<int> widths = {64, 128};
  double clock_hz = 5e6;
  CLI::App* sweep = app.add_subcommand("sweep", "Dense-mode resource sweep over xi");
  common(sweep);
  sweep->add_option("--xi-min", xi_min)->check(CLI::Range(2, 20));
  sweep->add_option("--xi-max", xi_max)->check(CLI::Range(2, 20));
  sweep->add_option("--tag-bits", widths)->check(CLI::IsMember({64, 128}));
  sweep->add_option("--clock", clock_hz, "Pulse clock in Hz")->check(CLI::PositiveNumber);

  std::size_t pulses = 0;
  CLI::App* t1 = app.add_subcommand("table1", "Blind tag-flip error rates, all eight cells");
  common(t1);
  t1->add_option("--pulses", pulses, "Pulses per cell (default 100000)");

  CLI::App* att = app.add_subcommand("attacks", "Attacks against BB84-AES and the baselines");
  common(att);
  att->add_option("--pulses", pulses, "Pulses per round (default 300000)");

  CLI11_PARSE(app, argc, argv);

  try {
    const ReportFormat fmt = report_format_from_string(format);
    std::string text;
    if (*run) {
      if (seed_given) overrides.push_back("scenario.seed=" + std::to_string(seed));
      const ScenarioConfig config =
          config_path.empty() ? parse_config("", overrides) : load_config(config_path, overrides);
      text = emit_report(run_scenario(config), fmt);
    } else if (*sweep) {
      text = emit_sweep(sweep_xi(xi_min, xi_max, widths, clock_hz, seed), fmt);
    } else if (*t1) {
      text = emit_table1(table1(seed, pulses == 0 ? 100000 : pulses), fmt);
    } else if (*att) {
      text = emit_attacks(attacks(seed, pulses == 0 ? 300000 : pulses), fmt);
    }
    write_output(text, out_path);
  } catch (const Error& e) {
    std::cerr << "bb84aes_sim: " << e.what() << '\n';
    return e.code() == ErrorCode::ParseError || e.code() == ErrorCode::RangeError ? 2 : 1;
  }
  return 0;
}
