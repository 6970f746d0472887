#include <clocale>
#include <iostream>

#include <CLI11.hpp>

#include "lorasg/commands.hpp"

int main(int argc, char** argv) {
  // CSV output promises '.' decimal separators regardless of the environment
  std::setlocale(LC_NUMERIC, "C");

  CLI::App app{
      "LoRa uplink capacity model: closed-form per-class reception "
      "probabilities with a Monte Carlo cross-check"};
  app.require_subcommand(1);

  namespace cmd = lorasg::commands;
  cmd::AirtimeArgs airtime;
  cmd::AnalyzeArgs analyze;
  cmd::EqualizeArgs equalize;
  cmd::SimulateArgs simulate;
  cmd::SweepArgs sweep;
  cmd::ValidateArgs validate;

  CLI::App* c_air =
      app.add_subcommand("airtime", "Packet on-air times per spreading factor");
  c_air->add_option("--sf", airtime.sf, "Spreading factor 6..12 (default: all)")
      ->check(CLI::Range(6, 12));
  c_air->add_option("--bw-hz", airtime.bw_hz, "Bandwidth in Hz");
  c_air->add_option("--n-preamble-extra", airtime.n_preamble_extra,
                    "Programmed preamble symbol count");
  c_air->add_option("--payload-bytes", airtime.payload_bytes,
                    "Payload length in bytes");
  c_air->add_option("--header", airtime.header, "present or absent");
  c_air->add_flag("--low-rate-opt", airtime.low_rate_opt,
                  "Enable low data rate optimization");
  c_air->add_option("--cr", airtime.cr, "Coding rate, 4/5..4/8 or 1..4");

  CLI::App* c_an = app.add_subcommand(
      "analyze", "Closed-form reception probabilities per class");
  c_an->add_option("--config", analyze.config, "Scenario file (INI or JSON)");
  c_an->add_option("--nodes", analyze.nodes,
                   "Density sweep FROM:TO:STEP in node counts");

  CLI::App* c_eq = app.add_subcommand(
      "equalize",
      "Sensitivity thresholds giving every class the same reception probability");
  c_eq->add_option("--config", equalize.config, "Scenario file (INI or JSON)");
  c_eq->add_option("--target-pi", equalize.target_pi,
                   "Target reception probability in (0, 1)");
  c_eq->add_flag("--compare-paper", equalize.compare_reference,
                 "Compare with the published reference thresholds, running both "
                 "infinite-plane and finite-disk modes");

  CLI::App* c_sim = app.add_subcommand(
      "simulate", "Monte Carlo estimates next to the closed-form values");
  c_sim->add_option("--config", simulate.config, "Scenario file (INI or JSON)");
  c_sim->add_option("--replications", simulate.replications,
                    "Replications per class");
  c_sim->add_option("--seed", simulate.seed, "Simulation seed");
  c_sim->add_option("--mode", simulate.mode, "spatial or power");
  c_sim->add_option("--disk-truncation", simulate.disk_truncation_m,
                    "Restrict transmitters to a disk of this radius in meters");

  CLI::App* c_sw = app.add_subcommand("sweep", "Figure-ready CSV sweeps");
  c_sw->add_option("--kind", sweep.kind, "figure2, figure3, or figure4")
      ->required();
  c_sw->add_option("--config", sweep.config, "Scenario file (INI or JSON)");
  c_sw->add_option("--out", sweep.out_path, "Output CSV path (default: stdout)");

  CLI::App* c_val = app.add_subcommand(
      "validate", "Check sampled arrival counts against the power-law intensity");
  c_val->add_option("--config", validate.config, "Scenario file (INI or JSON)");
  c_val->add_option("--window", validate.window_s, "Observation window in seconds");
  c_val->add_option("--replications", validate.replications,
                    "Sampled windows");
  c_val->add_option("--seed", validate.seed, "Simulation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cmd::kExitValidation;
  }

  if (*c_air) return cmd::cmd_airtime(airtime, std::cout, std::cerr);
  if (*c_an) return cmd::cmd_analyze(analyze, std::cout, std::cerr);
  if (*c_eq) return cmd::cmd_equalize(equalize, std::cout, std::cerr);
  if (*c_sim) return cmd::cmd_simulate(simulate, std::cout, std::cerr);
  if (*c_sw) return cmd::cmd_sweep(sweep, std::cout, std::cerr);
  if (*c_val) return cmd::cmd_validate(validate, std::cout, std::cerr);
  return cmd::kExitValidation;
}
