// stripesim command-line front end: single-point simulation, parameter
// sweeps, and a self-check mode that reruns the core numerical
// invariants on fresh random scenarios.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stripesim/coordination.hpp"
#include "stripesim/experiment.hpp"

namespace {

using namespace stripesim;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> schemes;
  std::string hybrid;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--seed", args.seed, "master RNG seed")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--trials", args.trials, "Monte-Carlo trial count");
  cmd->add_option("--scheme", args.schemes,
                  "schemes: mmse-opt mrc-opt mmse-naive mrc-naive")
      ->delimiter(',');
  cmd->add_option("--hybrid", args.hybrid, "hybrid mode: proposed|random|off")
      ->check(CLI::IsMember({"proposed", "random", "off"}));
  cmd->add_option("--out", args.out_path, "output CSV path ('-' = stdout)");
}

ExperimentSpec build_spec(const CommonArgs& args) {
  ExperimentSpec spec = args.config_path.empty()
                            ? parse_config_text("{}")
                            : parse_config(args.config_path);
  if (args.seed_set) spec.base.seed = args.seed;
  if (args.trials > 0) spec.base.trials = args.trials;
  if (!args.schemes.empty()) {
    std::string joined = "{\"schemes\":[";
    for (std::size_t i = 0; i < args.schemes.size(); ++i)
      joined += (i ? ",\"" : "\"") + args.schemes[i] + "\"";
    joined += "]}";
    spec.schemes = parse_config_text(joined).schemes;
  }
  if (!args.hybrid.empty()) {
    spec.hybrid = args.hybrid == "proposed"
                      ? HybridMode::kProposed
                      : (args.hybrid == "random" ? HybridMode::kRandom
                                                 : HybridMode::kOff);
  }
  if (!args.out_path.empty()) spec.output_path = args.out_path;
  return spec;
}

int cmd_simulate(const CommonArgs& args) {
  ExperimentSpec spec = build_spec(args);
  spec.sweep_axis = SweepAxis::kNone;
  spec.sweep_values.clear();
  write_csv(spec, run_experiment(spec));
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis,
              const std::vector<double>& values) {
  ExperimentSpec spec = build_spec(args);
  if (!axis.empty()) {
    if (axis == "C_F")
      spec.sweep_axis = SweepAxis::kFronthaul;
    else if (axis == "M")
      spec.sweep_axis = SweepAxis::kStripes;
    else if (axis == "P_tx")
      spec.sweep_axis = SweepAxis::kTxPower;
    else if (axis == "N")
      spec.sweep_axis = SweepAxis::kAntennas;
    else
      throw std::invalid_argument("unknown sweep axis: " + axis);
  }
  if (!values.empty()) spec.sweep_values = values;
  if (spec.sweep_axis == SweepAxis::kNone || spec.sweep_values.empty())
    throw std::invalid_argument(
        "sweep requires a sweep axis and sweep values (flags or config)");
  spec.validate();
  write_csv(spec, run_experiment(spec));
  return 0;
}

bool check(const char* name, bool ok, int& failures) {
  std::printf("%-52s %s\n", name, ok ? "PASS" : "FAIL");
  if (!ok) ++failures;
  return ok;
}

/// Quick self-verification on random desk-scale scenarios: constraint
/// activeness, KKT residuals, protocol equivalence, scheme ordering.
int cmd_verify(const CommonArgs& args) {
  SystemConfig cfg;
  cfg.stripes = 2;
  cfg.aps_per_stripe = 3;
  cfg.antennas = 6;
  cfg.ues = 3;
  cfg.fronthaul_bits = 6.0;
  cfg.seed = args.seed_set ? args.seed : 7;
  const int trials = args.trials > 0 ? args.trials : 10;

  int failures = 0;
  double max_fh_err = 0.0, max_kkt = 0.0;
  bool protocol_ok = true, bound_ok = true;
  for (int t = 0; t < trials; ++t) {
    const Scenario sc = make_scenario(cfg, trial_seed(cfg.seed, t));
    Rng rng(0);
    const InpStrategy strategy =
        design_network(sc, cfg.fronthaul_bits, SchemeOptions{}, rng);
    const RateReport report = evaluate(sc, strategy, cfg.fronthaul_bits);
    bound_ok = bound_ok && report.sum_rate_lb <= report.cutset + 1e-6;
    for (const auto& stripe : report.per_ap_fh_rate)
      for (double r : stripe)
        max_fh_err = std::max(max_fh_err, std::abs(r - cfg.fronthaul_bits));
    for (const auto& stripe : strategy.stripes) {
      for (const ApStrategy& ap : stripe) {
        for (Eigen::Index k = 0; k < ap.a.size(); ++k) {
          if (ap.a(k) <= 0.0) continue;
          const double g = ap.gamma_eig(k);
          const double resid =
              (1.0 - ap.lambda) * (g + 1.0) / (1.0 + ap.a(k) * (g + 1.0)) -
              1.0 / (1.0 + ap.a(k));
          max_kkt = std::max(max_kkt, std::abs(resid));
        }
      }
    }
    // protocol vs monolithic designer
    for (int m = 0; m < cfg.stripes; ++m) {
      std::vector<StripeInput> inputs;
      for (const ApChannelState& ap : sc.aps[m])
        inputs.push_back({&ap.H_hat, &ap.Sigma_w});
      auto mono = run_stripe(inputs, sc.Sigma_x, cfg.fronthaul_bits);
      auto proto = run_protocol(m, inputs, sc.Sigma_x, cfg.fronthaul_bits);
      auto bit_equal = [](const CMat& a, const CMat& b) {
        return a.rows() == b.rows() && a.cols() == b.cols() &&
               (a.array() == b.array()).all();
      };
      for (std::size_t i = 0; i < mono.first.size(); ++i) {
        protocol_ok = protocol_ok &&
                      bit_equal(mono.first[i].Omega,
                                proto.first.first[i].Omega) &&
                      bit_equal(mono.first[i].U, proto.first.first[i].U);
      }
    }
  }
  check("fronthaul constraint active (|f_FH - C_F| < 1e-6)",
        max_fh_err < 1e-6, failures);
  check("KKT stationarity residual < 1e-8", max_kkt < 1e-8, failures);
  check("sum-rate lower bound <= cutset bound", bound_ok, failures);
  check("protocol bit-identical to monolithic design", protocol_ok,
        failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink cell-free massive MIMO simulator with sequential "
               "in-network processing over parallel radio stripes"};
  app.require_subcommand(1);

  CommonArgs sim_args, sweep_args, verify_args;
  std::string sweep_axis;
  std::vector<double> sweep_values;

  CLI::App* sim = app.add_subcommand("simulate", "single operating point");
  add_common_flags(sim, sim_args);

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
  add_common_flags(sweep, sweep_args);
  sweep->add_option("--axis", sweep_axis, "sweep axis: C_F|M|P_tx|N");
  sweep->add_option("--values", sweep_values, "sweep values")->delimiter(',');

  CLI::App* verify = app.add_subcommand("verify", "run numerical self-checks");
  add_common_flags(verify, verify_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_axis, sweep_values);
    if (verify->parsed()) return cmd_verify(verify_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
