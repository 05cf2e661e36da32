// Command-line front end.
//
//   cvcluster simulate --network linear4 --squeezing-db -6 --format text
//   cvcluster sweep --axis eta --from 1 --to 0 --steps 11 --network tshape4 --squeezing-db -6
//   cvcluster verify-decompositions
//   cvcluster netlist --network linear4
//
// Exit status: 0 success, 1 internal error, 2 configuration error,
// 3 witness requested for a graph without a defined witness.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvcluster/cvcluster.hpp"
#include "cvcluster/report_io.hpp"

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUnsupportedGraph = 3;

struct ScenarioOptions {
  std::string config_file;
  std::string network;
  std::string graph;
  std::vector<double> squeezing_db;
  std::vector<double> antisqueezing_db;
  std::vector<double> loss;
  std::string loss_placement;
  std::vector<double> jitter;
  std::vector<std::uint64_t> jitter_mc;
  std::string format;
  bool no_witness = false;
  bool verify = false;
};

void add_scenario_options(CLI::App* cmd, ScenarioOptions& o) {
  cmd->add_option("--config", o.config_file, "JSON scenario config (same layout as a report's \"config\")");
  cmd->add_option("--network", o.network, "linear4 | square4 | tshape4 | path to a netlist file");
  cmd->add_option("--graph", o.graph, "graph for nullifiers: a named graph or edges like 1-2,2-3");
  cmd->add_option("--squeezing-db", o.squeezing_db, "input squeezing, one value or one per mode")
      ->delimiter(',');
  cmd->add_option("--antisqueezing-db", o.antisqueezing_db, "input antisqueezing (omit for pure inputs)")
      ->delimiter(',');
  cmd->add_option("--loss", o.loss, "transmissivity eta per mode")->delimiter(',');
  cmd->add_option("--loss-placement", o.loss_placement, "apply loss before (pre) or after (post) the network");
  cmd->add_option("--jitter", o.jitter, "phase jitter sigma in radians per output mode")->delimiter(',');
  cmd->add_option("--jitter-mc", o.jitter_mc, "debug: Monte-Carlo jitter with <samples> <seed>")
      ->expected(2);
  cmd->add_option("--format", o.format, "json | text");
  cmd->add_flag("--no-witness", o.no_witness, "skip the inseparability witness");
  cmd->add_flag("--verify-decompositions", o.verify, "append the decomposition check to the report");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cvcluster::ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

cvcluster::ScenarioConfig build_config(const ScenarioOptions& o) {
  cvcluster::ScenarioConfig cfg;
  if (!o.config_file.empty()) cfg = cvcluster::parse_config(read_file(o.config_file));
  if (!o.network.empty()) cfg.network = o.network;
  if (!o.graph.empty()) cfg.graph = o.graph;
  if (!o.squeezing_db.empty()) cfg.squeezing_db = o.squeezing_db;
  if (!o.antisqueezing_db.empty()) cfg.antisqueezing_db = o.antisqueezing_db;
  if (!o.loss.empty()) cfg.loss_eta = o.loss;
  if (!o.loss_placement.empty()) cfg.loss_placement = cvcluster::parse_loss_placement(o.loss_placement);
  if (!o.jitter.empty()) cfg.jitter_sigma = o.jitter;
  if (!o.jitter_mc.empty()) cfg.jitter_mc = cvcluster::JitterMonteCarlo{o.jitter_mc[0], o.jitter_mc[1]};
  if (!o.format.empty()) cfg.format = cvcluster::parse_output_format(o.format);
  if (o.no_witness) cfg.witness = false;
  if (o.verify) cfg.verify_decompositions = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian cluster-state generation by linear optics"};
  app.require_subcommand(1);

  ScenarioOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "run one scenario and print its report");
  add_scenario_options(simulate, sim_opts);

  ScenarioOptions sweep_opts;
  std::string axis;
  double from = 0;
  double to = 0;
  std::size_t steps = 0;
  auto* sweep = app.add_subcommand("sweep", "run a scenario over a parameter grid, CSV to stdout");
  add_scenario_options(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "squeezing_db | antisqueezing_db | eta | sigma")->required();
  sweep->add_option("--from", from, "first grid value")->required();
  sweep->add_option("--to", to, "last grid value")->required();
  sweep->add_option("--steps", steps, "number of grid points")->required();

  std::string verify_format = "text";
  auto* verify = app.add_subcommand("verify-decompositions", "compare factor strings against literal matrices");
  verify->add_option("--format", verify_format, "json | text");

  std::string netlist_network;
  auto* netlist = app.add_subcommand("netlist", "print the factor string of a named network as a netlist");
  netlist->add_option("--network", netlist_network, "linear4 | tshape4")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) {
      const auto cfg = build_config(sim_opts);
      const auto report = cvcluster::run_scenario(cfg);
      std::cout << (cfg.format == cvcluster::OutputFormat::Json ? cvcluster::emit_report_json(report)
                                                                 : cvcluster::report_to_text(report));
    } else if (*sweep) {
      const auto cfg = build_config(sweep_opts);
      const cvcluster::SweepSpec spec{cvcluster::parse_sweep_axis(axis), from, to, steps};
      std::cout << cvcluster::sweep_to_csv(cvcluster::run_sweep(cfg, spec));
    } else if (*verify) {
      const auto format = cvcluster::parse_output_format(verify_format);
      const auto report = cvcluster::verify_decompositions();
      std::cout << (format == cvcluster::OutputFormat::Json
                        ? cvcluster::decomposition_to_json(report).dump(2) + "\n"
                        : cvcluster::decomposition_to_text(report));
    } else if (*netlist) {
      if (netlist_network == "linear4") {
        std::cout << cvcluster::emit_netlist(cvcluster::linear_program());
      } else if (netlist_network == "tshape4") {
        std::cout << cvcluster::emit_netlist(cvcluster::tshape_program());
      } else {
        throw cvcluster::ConfigError("network", "no factor string for '" + netlist_network + "'");
      }
    }
  } catch (const cvcluster::UnsupportedGraph& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnsupportedGraph;
  } catch (const cvcluster::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cvcluster::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
