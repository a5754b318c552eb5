// dps: delay-power tradeoff toolkit.
//
//   dps pareto   --alpha 0.4 --A 2 --M 3 --Q 5 --power 0,1,4,9 [--out-dir D] [--no-cloud]
//   dps lp       ... --pth 1.6 | --sweep 0.8:1.6:9 [--out sweep.csv]
//   dps verify   ... [--seed 1] [--trials 50] [--tol 1e-9]
//   dps simulate ... --policy p.csv [--slots 1000000] [--seed 1] [--trace t.csv]
//   dps policy   ... --thresholds 0,1,7,7 [--out p.csv]
//   dps evaluate ... --policy p.csv [--transition-csv T.csv] [--stationary-csv pi.csv]
//
// Exit codes: 0 success, 1 failed check or runtime error, 2 bad arguments,
// 3 enumeration too large (pareto still writes the curve).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dps/io.hpp"
#include "dps/lp.hpp"
#include "dps/mrp.hpp"
#include "dps/pareto.hpp"
#include "dps/policies.hpp"
#include "dps/sim.hpp"
#include "dps/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTooLarge = 3;

struct ParamFlags {
  std::string config;
  std::optional<double> alpha;
  std::optional<int> packet_bits;
  std::optional<int> max_bits;
  std::optional<int> buffer_bits;
  std::optional<std::string> power;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "parameter file (key = value); flags override it");
    app->add_option("--alpha", alpha, "arrival probability per slot");
    app->add_option("--A", packet_bits, "bits per arriving packet");
    app->add_option("--M", max_bits, "max bits transmitted per slot");
    app->add_option("--Q", buffer_bits, "buffer capacity in bits");
    app->add_option("--power", power, "power table P_0..P_M, comma-separated");
  }

  [[nodiscard]] dps::ModelParams resolve() const {
    dps::ParamSource file;
    if (!config.empty()) file = dps::read_param_file(config);
    dps::ParamSource flags{alpha, packet_bits, max_bits, buffer_bits, std::nullopt};
    if (power) flags.power = dps::parse_number_list(*power);
    return dps::validate_params(dps::merge_params(file, flags));
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(const dps::Error& e) {
  switch (e.code()) {
    case dps::ErrorCode::EnumerationTooLarge: return kExitTooLarge;
    case dps::ErrorCode::NonPositiveAlpha:
    case dps::ErrorCode::AlphaAboveOne:
    case dps::ErrorCode::MLessThanA:
    case dps::ErrorCode::PowerNotIncreasingPerBit:
    case dps::ErrorCode::PowerZeroNonzero:
    case dps::ErrorCode::InvalidParameter:
    case dps::ErrorCode::InvalidPolicy:
    case dps::ErrorCode::InfeasibleThresholds:
    case dps::ErrorCode::StateOutOfRange:
    case dps::ErrorCode::ParseError:
    case dps::ErrorCode::IoError: return kExitUsage;
    default: return kExitFailed;
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw dps::Error(dps::ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void print_curve(const dps::ParetoCurve& curve) {
  std::printf("%-4s %-22s %-22s %s\n", "#", "power", "delay", "thresholds");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& v = curve.vertices()[i];
    std::string t;
    if (v.thresholds) {
      for (std::size_t m = 0; m < v.thresholds->thresholds.size(); ++m)
        t += (m ? "," : "") + std::to_string(v.thresholds->thresholds[m]);
    }
    std::printf("%-4zu %-22s %-22s (%s)\n", i, dps::format_double(v.point.power).c_str(),
                dps::format_double(v.point.delay).c_str(), t.c_str());
  }
}

// ---------------------------------------------------------------------------

struct ParetoArgs {
  ParamFlags params;
  std::string out_dir = ".";
  bool no_cloud = false;
  std::uint64_t max_policies = dps::kDefaultEnumerationCap;
};

int run_pareto(const ParetoArgs& args) {
  const auto params = args.params.resolve();
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);

  const auto curve = dps::algorithm1(params);
  {
    auto out = open_out(dir / "curve.csv");
    dps::write_curve_csv(out, params, curve);
  }
  {
    auto out = open_out(dir / "curve.json");
    out << dps::curve_to_json(params, curve);
  }
  {
    auto out = open_out(dir / "curve.dat");
    dps::write_points_dat(out, curve.points());
  }
  std::cout << "optimal tradeoff curve: " << curve.size() << " vertices\n";
  print_curve(curve);

  int status = 0;
  bool have_cloud = false;
  if (!args.no_cloud) {
    try {
      const auto brute = dps::brute_force_frontier(params, args.max_policies);
      {
        auto out = open_out(dir / "cloud.csv");
        dps::write_cloud_csv(out, params, brute);
      }
      std::vector<dps::DelayPowerPoint> all;
      std::vector<dps::DelayPowerPoint> thresholds;
      const dps::DeterministicPolicySpace space(params, args.max_policies);
      for (std::size_t i = 0; i < brute.cloud.size(); ++i) {
        if (brute.singular[i]) continue;
        all.push_back(brute.cloud[i]);
        if (dps::is_threshold(params, space.policy(i))) thresholds.push_back(brute.cloud[i]);
      }
      {
        auto out = open_out(dir / "cloud.dat");
        dps::write_points_dat(out, all);
      }
      {
        auto out = open_out(dir / "thresholds.dat");
        dps::write_points_dat(out, thresholds);
      }
      have_cloud = true;
      std::cout << "deterministic policies: " << brute.cloud.size() << " (" << brute.singular_count
                << " skipped: more than one recurrent class)\n";
    } catch (const dps::Error& e) {
      if (e.code() != dps::ErrorCode::EnumerationTooLarge) throw;
      std::cerr << "dps pareto: " << e.what() << "; point cloud skipped\n";
      status = kExitTooLarge;
    }
  }
  auto gp = open_out(dir / "plot.gp");
  dps::write_gnuplot_script(gp, have_cloud ? "cloud.dat" : "", have_cloud ? "thresholds.dat" : "", "curve.dat", "");
  return status;
}

// ---------------------------------------------------------------------------

struct LpArgs {
  ParamFlags params;
  std::optional<double> pth;
  std::optional<std::string> sweep;
  std::string out = "lp_sweep.csv";
  std::string dat;
  std::string mps;
  std::string policy_out;
};

std::vector<double> parse_sweep(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) throw UsageError("--sweep expects lo:hi:n");
  double lo = 0.0;
  double hi = 0.0;
  long n = 0;
  try {
    lo = std::stod(text.substr(0, a));
    hi = std::stod(text.substr(a + 1, b - a - 1));
    n = std::stol(text.substr(b + 1));
  } catch (const std::exception&) {
    throw UsageError("--sweep expects lo:hi:n");
  }
  if (n < 1 || hi < lo || lo < 0.0) throw UsageError("--sweep needs 0 <= lo <= hi and n >= 1");
  std::vector<double> budgets;
  for (long i = 0; i < n; ++i) budgets.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return budgets;
}

int run_lp(const LpArgs& args) {
  const auto params = args.params.resolve();
  if (args.pth.has_value() == args.sweep.has_value()) throw UsageError("give exactly one of --pth or --sweep");

  if (args.pth) {
    const auto lp = dps::build_lp(params, *args.pth);
    if (!args.mps.empty()) {
      auto out = open_out(args.mps);
      dps::write_mps(out, lp.program, "DPSLP");
    }
    const auto sol = dps::solve_simplex(lp);
    std::printf("p_th %s\n", dps::format_double(*args.pth).c_str());
    if (sol.status == dps::LpStatus::Optimal) {
      std::printf("delay %.6f\npower %.6f\n", sol.delay, sol.power);
    }
    std::printf("status %s\n", dps::to_string(sol.status));
    if (!args.policy_out.empty() && sol.status == dps::LpStatus::Optimal) {
      auto out = open_out(args.policy_out);
      dps::write_policy_csv(out, dps::recover_policy(lp, sol));
    }
    return 0;
  }

  const auto budgets = parse_sweep(*args.sweep);
  const auto points = dps::sweep(params, budgets);
  {
    auto out = open_out(args.out);
    dps::write_sweep_csv(out, points);
  }
  if (!args.dat.empty()) {
    std::vector<dps::DelayPowerPoint> pts;
    for (const auto& p : points)
      if (p.solution.status == dps::LpStatus::Optimal) pts.push_back({p.budget, p.solution.delay});
    auto out = open_out(args.dat);
    dps::write_points_dat(out, pts);
  }
  dps::write_sweep_csv(std::cout, points);
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  ParamFlags params;
  dps::VerifyOptions options;
};

int run_verify(const VerifyArgs& args) {
  const auto params = args.params.resolve();
  if (args.options.trials < 1) throw UsageError("--trials must be >= 1");
  const auto checks = dps::run_verification(params, args.options);
  bool ok = true;
  std::printf("%-36s %-6s %-12s %-12s %s\n", "check", "result", "worst", "tolerance", "detail");
  for (const auto& c : checks) {
    std::printf("%-36s %-6s %-12.3e %-12.3e %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.worst, c.tolerance,
                c.detail.c_str());
    ok = ok && c.passed;
  }
  std::printf("%s\n", ok ? "all checks passed" : "some checks FAILED");
  return ok ? 0 : kExitFailed;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  ParamFlags params;
  std::string policy;
  long long slots = 1'000'000;
  std::uint64_t seed = 1;
  std::string trace;
};

int run_simulate(const SimulateArgs& args) {
  const auto params = args.params.resolve();
  if (args.slots < 1) throw UsageError("--slots must be >= 1");
  const auto policy = dps::read_policy_csv(args.policy, params);
  std::optional<std::ofstream> trace;
  if (!args.trace.empty()) trace.emplace(open_out(args.trace));
  const auto r = dps::simulate(params, policy, static_cast<std::uint64_t>(args.slots), args.seed,
                               trace ? &*trace : nullptr);
  dps::write_simulation_summary(std::cout, r);
  try {
    const auto exact = dps::evaluate(params, policy);
    std::cout << "analytic_power " << dps::format_double(exact.power) << '\n'
              << "analytic_delay " << dps::format_double(exact.delay) << '\n';
  } catch (const dps::Error& e) {
    if (e.code() != dps::ErrorCode::SingularChain) throw;
    std::cout << "analytic values unavailable: " << e.what() << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct PolicyArgs {
  ParamFlags params;
  std::string thresholds;
  std::string randomize;
  std::string out;
};

int run_policy(const PolicyArgs& args) {
  const auto params = args.params.resolve();
  dps::ThresholdPolicy tp;
  for (double v : dps::parse_number_list(args.thresholds)) tp.thresholds.push_back(static_cast<int>(v));
  if (!args.randomize.empty()) {
    const auto colon = args.randomize.find(':');
    if (colon == std::string::npos) throw UsageError("--randomize expects m:weight");
    tp.randomized = dps::RandomizedThreshold{std::stoi(args.randomize.substr(0, colon)),
                                             std::stod(args.randomize.substr(colon + 1))};
  }
  const auto policy = dps::threshold_to_policy(params, tp);
  if (args.out.empty()) {
    dps::write_policy_csv(std::cout, policy);
  } else {
    auto out = open_out(args.out);
    dps::write_policy_csv(out, policy);
  }
  return 0;
}

struct EvaluateArgs {
  ParamFlags params;
  std::string policy;
  std::string transition_csv;
  std::string stationary_csv;
};

int run_evaluate(const EvaluateArgs& args) {
  const auto params = args.params.resolve();
  const auto policy = dps::read_policy_csv(args.policy, params);
  const auto t = dps::build_transition_enumerative(params, policy);
  if (!args.transition_csv.empty()) {
    auto out = open_out(args.transition_csv);
    dps::write_matrix_csv(out, t.lambda);
  }
  const auto pi = dps::stationary_distribution(t);
  if (!args.stationary_csv.empty()) {
    auto out = open_out(args.stationary_csv);
    dps::write_vector_csv(out, pi.pi);
  }
  std::cout << "power " << dps::format_double(dps::average_power(params, policy, pi)) << '\n'
            << "delay " << dps::format_double(dps::average_delay(params, pi)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-power tradeoff for buffer-aware adaptive transmission"};
  app.require_subcommand(1);

  ParetoArgs pareto;
  auto* pareto_cmd = app.add_subcommand("pareto", "optimal tradeoff curve and deterministic point cloud");
  pareto.params.attach(pareto_cmd);
  pareto_cmd->add_option("--out-dir", pareto.out_dir, "output directory");
  pareto_cmd->add_flag("--no-cloud", pareto.no_cloud, "skip the brute-force point cloud");
  pareto_cmd->add_option("--max-policies", pareto.max_policies, "enumeration cap");

  LpArgs lp;
  auto* lp_cmd = app.add_subcommand("lp", "minimum delay under a power budget");
  lp.params.attach(lp_cmd);
  lp_cmd->add_option("--pth", lp.pth, "single power budget");
  lp_cmd->add_option("--sweep", lp.sweep, "budgets lo:hi:n");
  lp_cmd->add_option("--out", lp.out, "sweep CSV path");
  lp_cmd->add_option("--dat", lp.dat, "optional gnuplot data for the sweep");
  lp_cmd->add_option("--mps", lp.mps, "write the program in fixed MPS format");
  lp_cmd->add_option("--policy-out", lp.policy_out, "write the recovered policy CSV");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "run the cross-validation battery");
  verify.params.attach(verify_cmd);
  verify_cmd->add_option("--seed", verify.options.seed, "random seed");
  verify_cmd->add_option("--trials", verify.options.trials, "random policies / pairs per check");
  verify_cmd->add_option("--tol", verify.options.tolerance, "tolerance for the mixing-geometry checks");
  verify_cmd->add_option("--slots", verify.options.sim_slots, "slots per simulation");
  verify_cmd->add_option("--sim-policies", verify.options.sim_policies, "policies simulated");
  verify_cmd->add_option("--budgets", verify.options.lp_budgets, "LP budgets along the curve");

  SimulateArgs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo simulation of a policy");
  simulate.params.attach(sim_cmd);
  sim_cmd->add_option("--policy", simulate.policy, "policy CSV")->required();
  sim_cmd->add_option("--slots", simulate.slots, "number of slots");
  sim_cmd->add_option("--seed", simulate.seed, "random seed");
  sim_cmd->add_option("--trace", simulate.trace, "trace CSV (first 100000 slots)");

  PolicyArgs policy;
  auto* policy_cmd = app.add_subcommand("policy", "write the policy CSV of a threshold vector");
  policy.params.attach(policy_cmd);
  policy_cmd->add_option("--thresholds", policy.thresholds, "k_0..k_M, comma-separated")->required();
  policy_cmd->add_option("--randomize", policy.randomize, "m:weight split at k_m");
  policy_cmd->add_option("--out", policy.out, "output path (default stdout)");

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "average power and delay of a policy");
  evaluate.params.attach(eval_cmd);
  eval_cmd->add_option("--policy", evaluate.policy, "policy CSV")->required();
  eval_cmd->add_option("--transition-csv", evaluate.transition_csv, "write lambda(j, i)");
  eval_cmd->add_option("--stationary-csv", evaluate.stationary_csv, "write the stationary distribution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*pareto_cmd) return run_pareto(pareto);
    if (*lp_cmd) return run_lp(lp);
    if (*verify_cmd) return run_verify(verify);
    if (*sim_cmd) return run_simulate(simulate);
    if (*policy_cmd) return run_policy(policy);
    if (*eval_cmd) return run_evaluate(evaluate);
  } catch (const UsageError& e) {
    std::cerr << "dps: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const dps::Error& e) {
    std::cerr << "dps: " << e.what() << '\n';
    const int code = exit_code_for(e);
    if (code == kExitUsage) std::cerr << "run 'dps " << app.get_subcommands().front()->get_name() << " --help' for usage\n";
    return code;
  }
  return kExitUsage;
}
