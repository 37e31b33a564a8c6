#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "causalboot/bootstrap.hpp"
#include "causalboot/estimators.hpp"
#include "causalboot/fisher.hpp"
#include "causalboot/format.hpp"
#include "causalboot/observed_sample.hpp"
#include "causalboot/simulation.hpp"

namespace {

using namespace causalboot;

// Exit codes: 0 success, 2 malformed input data, 3 degenerate strata or
// resampling, 4 infeasible configuration.
constexpr int kExitOk = 0;
constexpr int kExitBadData = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitBadConfig = 4;

struct CiOptions {
  std::string data_path;
  std::string method = "cboot-pivotal-agl";
  double level = 0.95;
  int B = 999;
  long long N = 0;  // 0: population equals the sample
  std::string assignment = "complete";
  std::uint64_t seed = 0;
  double grid_step = 0.0;  // fisher only; 0 selects the default grid
};

struct SimulateOptions {
  std::string design;
  std::string methods;  // comma separated; empty selects the full matrix
  int reps = 5000;
  int B = 999;
  double level = 0.95;
  std::string assignment = "complete";
  std::uint64_t seed = 0;
  int threads = 0;  // 0: CAUSAL_BOOT_THREADS, then hardware
  std::string out_prefix;
};

AssignmentMode parse_assignment(const std::string& token) {
  if (token == "complete") return AssignmentMode::kComplete;
  if (token == "bernoulli") return AssignmentMode::kBernoulli;
  throw std::invalid_argument("unknown assignment \"" + token + "\"");
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("CAUSAL_BOOT_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 0;  // run_coverage falls back to the hardware count
}

std::vector<std::string> split_tokens(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t pos = csv.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(csv.substr(start));
      break;
    }
    out.push_back(csv.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

int run_ci(const CiOptions& opt) {
  InferenceMethod method;
  AssignmentMode assignment;
  try {
    if (!(opt.level > 0.0 && opt.level < 1.0)) {
      throw std::invalid_argument("confidence level out of range");
    }
    if (opt.B < 1) {
      throw std::invalid_argument("replication count must be positive");
    }
    if (opt.N < 0) throw std::invalid_argument("population size must be positive");
    assignment = parse_assignment(opt.assignment);
    method = InferenceMethod::from_token(opt.method, opt.B, assignment);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }

  std::optional<ObservedSample> loaded;
  try {
    loaded.emplace(load_observed_csv_file(opt.data_path));
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  }
  const ObservedSample& s = *loaded;

  const long long N = opt.N == 0 ? s.n() : opt.N;
  if (N < s.n()) {
    std::cerr << "error: population smaller than sample\n";
    return kExitBadConfig;
  }

  try {
    const int n = s.n();
    const double tau_hat = ate_estimate(s);
    const SeedSpec seed{opt.seed, 0};

    ConfidenceInterval ci;
    double sigma_hat = 0.0;
    int skipped = 0;
    if (method.fisher) {
      sigma_hat = std::sqrt(n * fisher_implicit_variance(s));
      ci = fisher_ci(s, opt.level, opt.grid_step, opt.B, seed);
    } else if (method.spec.flavor == BootstrapFlavor::kNone) {
      const double v = method.spec.variance == VarianceEstimator::kNeyman
                           ? neyman_variance(s).v
                           : agl_variance(s, N).v;
      sigma_hat = std::sqrt(n * v);
      ci = gaussian_confidence_interval(tau_hat, sigma_hat, n, opt.level);
    } else {
      const TDrawSet draws = method.spec.flavor == BootstrapFlavor::kCausal
                                 ? causal_bootstrap(s, N, method.spec, seed)
                                 : standard_bootstrap(s, method.spec, seed);
      skipped = draws.skipped;
      if (method.spec.pivotal) {
        const double v = method.spec.variance == VarianceEstimator::kNeyman
                             ? neyman_variance(s).v
                             : agl_variance(s, N).v;
        sigma_hat = std::sqrt(n * v);
        ci = confidence_interval(tau_hat, sigma_hat, n, draws, opt.level);
      } else {
        sigma_hat = std::sqrt(n * variance_from_draws(draws));
        ci = gaussian_confidence_interval(tau_hat, sigma_hat, n, opt.level);
      }
    }

    std::cout << "{\n"
              << "  \"method\": \"" << method.name << "\",\n"
              << "  \"n\": " << n << ",\n"
              << "  \"n0\": " << s.n0 << ",\n"
              << "  \"n1\": " << s.n1 << ",\n"
              << "  \"N\": " << N << ",\n"
              << "  \"level\": " << fmt_g6(opt.level) << ",\n"
              << "  \"tau_hat\": " << fmt_g6(tau_hat) << ",\n"
              << "  \"sigma_hat\": " << fmt_g6(sigma_hat) << ",\n"
              << "  \"ci_lo\": " << fmt_g6(ci.lo) << ",\n"
              << "  \"ci_hi\": " << fmt_g6(ci.hi) << ",\n"
              << "  \"implied_se\": " << fmt_g6(ci.implied_se) << ",\n"
              << "  \"skipped\": " << skipped << ",\n"
              << "  \"degenerate\": " << (ci.degenerate ? "true" : "false")
              << ",\n"
              << "  \"seed\": " << opt.seed << "\n"
              << "}\n";
    return kExitOk;
  } catch (const std::runtime_error& e) {
    // degenerate resampling (e.g. constant strata)
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
}

int run_simulate(const SimulateOptions& opt) {
  DesignSpec design;
  std::vector<InferenceMethod> methods;
  AssignmentMode assignment;
  try {
    if (!(opt.level > 0.0 && opt.level < 1.0)) {
      throw std::invalid_argument("confidence level out of range");
    }
    if (opt.reps < 1 || opt.B < 1) {
      throw std::invalid_argument("replication count must be positive");
    }
    design = DesignSpec::from_token(opt.design);
    assignment = parse_assignment(opt.assignment);
    const std::vector<std::string> tokens =
        opt.methods.empty() ? default_method_tokens() : split_tokens(opt.methods);
    for (const std::string& token : tokens) {
      methods.push_back(InferenceMethod::from_token(token, opt.B, assignment));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }

  try {
    const CoverageReport report =
        run_coverage(design, methods, opt.reps, opt.B, opt.level,
                     SeedSpec{opt.seed, 0}, resolve_threads(opt.threads));

    const std::string csv = report.to_csv();
    const std::string json = report.to_json();
    {
      std::ofstream f(opt.out_prefix + ".csv", std::ios::binary);
      if (!f) throw std::ios_base::failure("cannot write " + opt.out_prefix + ".csv");
      f << csv;
    }
    {
      std::ofstream f(opt.out_prefix + ".json", std::ios::binary);
      if (!f) throw std::ios_base::failure("cannot write " + opt.out_prefix + ".json");
      f << json;
    }
    std::cout << csv;
    return kExitOk;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomization-based effect estimates and intervals"};
  app.require_subcommand(1);

  CiOptions ci;
  CLI::App* ci_cmd =
      app.add_subcommand("ci", "Confidence interval from experiment data");
  ci_cmd->add_option("--data", ci.data_path, "CSV file with columns y,w")
      ->required();
  ci_cmd->add_option("--method", ci.method, "Interval method token");
  ci_cmd->add_option("--level", ci.level, "Confidence level");
  ci_cmd->add_option("--B", ci.B, "Bootstrap / reference draws");
  ci_cmd->add_option("--N", ci.N, "Population size (0: equal to sample)");
  ci_cmd->add_option("--assignment", ci.assignment, "complete or bernoulli");
  ci_cmd->add_option("--seed", ci.seed, "Root seed");
  ci_cmd->add_option("--grid-step", ci.grid_step,
                     "Grid step for fisher inversion (0: automatic)");

  SimulateOptions sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Coverage experiment over a design");
  sim_cmd->add_option("--design", sim.design,
                      "1|2|3|4|coupling:RHO:N0:N1|mixture:N0:N1")
      ->required();
  sim_cmd->add_option("--methods", sim.methods,
                      "Comma-separated method tokens (default: all)");
  sim_cmd->add_option("--reps", sim.reps, "Simulation replications");
  sim_cmd->add_option("--B", sim.B, "Bootstrap / reference draws");
  sim_cmd->add_option("--level", sim.level, "Confidence level");
  sim_cmd->add_option("--assignment", sim.assignment, "complete or bernoulli");
  sim_cmd->add_option("--seed", sim.seed, "Root seed");
  sim_cmd->add_option("--threads", sim.threads,
                      "Worker threads (0: CAUSAL_BOOT_THREADS, then cores)");
  sim_cmd->add_option("--out", sim.out_prefix, "Output prefix for .csv/.json")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (ci_cmd->parsed()) return run_ci(ci);
  return run_simulate(sim);
}
