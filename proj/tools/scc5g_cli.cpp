#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "scc5g/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SCC5G toolkit: enrollment, certificate database, handshake demos and the "
               "authentication-overhead simulator"};
  app.require_subcommand(1);

  std::string workspace = "workspace";
  app.add_option("--workspace", workspace, "workspace directory")->capture_default_str();

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "deterministic seed");

  // enroll
  auto* enroll = app.add_subcommand("enroll", "create keys, device and image for a new user");
  std::string user_id;
  unsigned m = 8;
  std::string params_name = "default";
  enroll->add_option("--user", user_id, "user id")->required();
  enroll->add_option("--m", m, "device challenge bits (2^m image rows)")->capture_default_str();
  enroll->add_option("--params", params_name, "parameter profile: default|toy")
      ->capture_default_str();

  // init-db
  auto* init_db = app.add_subcommand("init-db", "build the authority database from all images");

  // handshake
  auto* handshake = app.add_subcommand("handshake", "run a local mutual authentication");
  std::string initiator_id, responder_id;
  std::optional<std::string> adversary;
  handshake->add_option("--initiator", initiator_id, "initiating user")->required();
  handshake->add_option("--responder", responder_id, "responding user")->required();
  handshake->add_option("--adversary", adversary,
                        "drill mode: mitm|spoof|tamper-cert|tamper-verdict");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the traffic/latency simulation");
  std::optional<std::string> scenario_file;
  std::optional<std::string> out_csv;
  simulate->add_option("--scenario", scenario_file, "scenario config file (default: full sweep)");
  simulate->add_option("--out", out_csv, "CSV output path");

  // report
  auto* report = app.add_subcommand("report", "aggregate a CSV and emit trend plots");
  std::optional<std::string> report_csv;
  report->add_option("--csv", report_csv, "CSV input path (default: workspace out/sim.csv)");

  CLI11_PARSE(app, argc, argv);

  const std::filesystem::path ws(workspace);
  if (enroll->parsed())
    return scc5g::cli::cmd_enroll(ws, user_id, m, params_name, seed, std::cout, std::cerr);
  if (init_db->parsed()) return scc5g::cli::cmd_init_db(ws, std::cout, std::cerr);
  if (handshake->parsed())
    return scc5g::cli::cmd_handshake(ws, initiator_id, responder_id, adversary, seed, std::cout,
                                     std::cerr);
  if (simulate->parsed()) {
    std::optional<std::filesystem::path> sc, oc;
    if (scenario_file) sc = *scenario_file;
    if (out_csv) oc = *out_csv;
    return scc5g::cli::cmd_simulate(ws, sc, oc, seed, std::cout, std::cerr);
  }
  if (report->parsed()) {
    std::optional<std::filesystem::path> rc;
    if (report_csv) rc = *report_csv;
    return scc5g::cli::cmd_report(ws, rc, std::cout, std::cerr);
  }
  return 2;
}
