#include "causalboot/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "causalboot/estimators.hpp"
#include "causalboot/fisher.hpp"
#include "causalboot/format.hpp"

namespace causalboot {

namespace {

// Substream layout inside one coverage replication.  Replication r owns
// the block starting at r * kRepStride; bootstrap engines get room for
// 2^29 replication streams each, so blocks cannot collide.
constexpr std::uint64_t kRepStride = 1ULL << 32;
constexpr std::uint64_t kPopDraw = 0;
constexpr std::uint64_t kAssign = 1;
constexpr std::uint64_t kCausalBlock = 1ULL << 30;
constexpr std::uint64_t kBernoulliOffset = 1ULL << 29;
constexpr std::uint64_t kStandardBlock = 2ULL << 30;
constexpr std::uint64_t kFisherBlock = 3ULL << 30;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

int parse_size(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid " + what + " \"" + s + "\"");
  }
  if (used != s.size() || v < 2) {
    throw std::invalid_argument("invalid " + what + " \"" + s + "\"");
  }
  return v;
}

}  // namespace

DesignSpec DesignSpec::from_token(const std::string& token) {
  if (token == "1") return {DesignKind::kDesign1, 100, 100, 0.0};
  if (token == "2") return {DesignKind::kDesign2, 100, 100, 0.0};
  if (token == "3") return {DesignKind::kDesign3, 20, 20, 0.0};
  if (token == "4") return {DesignKind::kDesign4, 20, 20, 0.0};

  const std::vector<std::string> parts = split(token, ':');
  if (parts[0] == "coupling" && parts.size() == 4) {
    DesignSpec d;
    d.kind = DesignKind::kGaussianCoupling;
    if (parts[1] == "-1") {
      d.rho = -1.0;
    } else if (parts[1] == "0") {
      d.rho = 0.0;
    } else if (parts[1] == "1") {
      d.rho = 1.0;
    } else {
      throw std::invalid_argument("coupling correlation must be -1, 0 or 1");
    }
    d.n0 = parse_size(parts[2], "stratum size");
    d.n1 = parse_size(parts[3], "stratum size");
    return d;
  }
  if (parts[0] == "mixture" && parts.size() == 3) {
    DesignSpec d;
    d.kind = DesignKind::kScaleMixture;
    d.n0 = parse_size(parts[1], "stratum size");
    d.n1 = parse_size(parts[2], "stratum size");
    return d;
  }
  throw std::invalid_argument("unknown design \"" + token + "\"");
}

std::string DesignSpec::token() const {
  switch (kind) {
    case DesignKind::kDesign1: return "1";
    case DesignKind::kDesign2: return "2";
    case DesignKind::kDesign3: return "3";
    case DesignKind::kDesign4: return "4";
    case DesignKind::kGaussianCoupling:
      return "coupling:" + fmt_g6(rho) + ":" + std::to_string(n0) + ":" +
             std::to_string(n1);
    case DesignKind::kScaleMixture:
      return "mixture:" + std::to_string(n0) + ":" + std::to_string(n1);
  }
  return "";
}

PotentialPopulation draw_population(const DesignSpec& d, SeedSpec seed) {
  Rng rng(seed);
  const long long N = d.population_size();
  std::vector<double> y0, y1;
  y0.reserve(N);
  y1.reserve(N);

  for (long long i = 0; i < N; ++i) {
    switch (d.kind) {
      case DesignKind::kDesign1: {
        const double z = rng.normal();
        y0.push_back(z);
        y1.push_back(z);
        break;
      }
      case DesignKind::kDesign2:
      case DesignKind::kDesign3: {
        y0.push_back(rng.normal());
        y1.push_back(0.0);
        break;
      }
      case DesignKind::kDesign4: {
        const double sd = rng.uniform01() < 0.1 ? 4.0 : 1.0;
        y0.push_back(sd * rng.normal());
        y1.push_back(0.0);
        break;
      }
      case DesignKind::kGaussianCoupling: {
        const double a = std::sqrt(0.5) * rng.normal();
        y0.push_back(a);
        if (d.rho == 0.0) {
          y1.push_back(std::sqrt(2.0) * rng.normal());
        } else {
          y1.push_back(d.rho * 2.0 * a);  // sd ratio sqrt(2)/sqrt(0.5) == 2
        }
        break;
      }
      case DesignKind::kScaleMixture: {
        const double sd = rng.uniform01() < 0.1 ? 4.0 : 1.0;
        y0.push_back(0.0);
        y1.push_back(sd * rng.normal());
        break;
      }
    }
  }
  return PotentialPopulation(std::move(y0), std::move(y1));
}

InferenceMethod InferenceMethod::from_token(const std::string& token, int B,
                                            AssignmentMode assignment) {
  InferenceMethod m;
  m.name = token;
  m.spec.replications = B;
  m.spec.assignment = assignment;

  if (token == "fisher") {
    m.fisher = true;
    return m;
  }
  if (token == "neyman-gauss") {
    m.spec = {VarianceEstimator::kNeyman, BootstrapFlavor::kNone, false,
              assignment, B};
    return m;
  }
  if (token == "agl-gauss") {
    m.spec = {VarianceEstimator::kAgl, BootstrapFlavor::kNone, false,
              assignment, B};
    return m;
  }
  if (token == "sboot-gauss") {
    m.spec = {VarianceEstimator::kNeyman, BootstrapFlavor::kStandard, false,
              assignment, B};
    return m;
  }
  if (token == "cboot-gauss") {
    m.spec = {VarianceEstimator::kNeyman, BootstrapFlavor::kCausal, false,
              assignment, B};
    return m;
  }
  if (token == "sboot-pivotal-neyman") {
    m.spec = {VarianceEstimator::kNeyman, BootstrapFlavor::kStandard, true,
              assignment, B};
    return m;
  }
  if (token == "sboot-pivotal-agl") {
    m.spec = {VarianceEstimator::kAgl, BootstrapFlavor::kStandard, true,
              assignment, B};
    return m;
  }
  if (token == "cboot-pivotal-neyman") {
    m.spec = {VarianceEstimator::kNeyman, BootstrapFlavor::kCausal, true,
              assignment, B};
    return m;
  }
  if (token == "cboot-pivotal-agl") {
    m.spec = {VarianceEstimator::kAgl, BootstrapFlavor::kCausal, true,
              assignment, B};
    return m;
  }
  throw std::invalid_argument("unknown method \"" + token + "\"");
}

std::vector<std::string> default_method_tokens() {
  return {"neyman-gauss",         "agl-gauss",
          "sboot-gauss",          "cboot-gauss",
          "sboot-pivotal-neyman", "sboot-pivotal-agl",
          "cboot-pivotal-neyman", "cboot-pivotal-agl",
          "fisher"};
}

namespace {

struct Cell {
  bool ok = false;
  bool hit = false;
  double implied_se = 0.0;
  int skipped_draws = 0;
};

struct EngineNeeds {
  bool causal_complete = false;
  bool causal_bernoulli = false;
  bool standard = false;
};

void run_one_rep(const DesignSpec& d, const std::vector<InferenceMethod>& methods,
                 const EngineNeeds& needs, int B, double level, SeedSpec seed,
                 long long rep, Cell* cells) {
  const int n = d.n0 + d.n1;
  const long long N = n;
  const std::uint64_t base =
      seed.stream_id + static_cast<std::uint64_t>(rep) * kRepStride;
  const auto stream = [&](std::uint64_t off) {
    return SeedSpec{seed.root_seed, base + off};
  };

  const PotentialPopulation pop = draw_population(d, stream(kPopDraw));
  long double acc = 0.0L;
  for (std::size_t i = 0; i < pop.y0.size(); ++i) acc += pop.y1[i] - pop.y0[i];
  const double tau_pop = static_cast<double>(acc / pop.size());

  const std::vector<std::uint8_t> w =
      complete_randomization(n, d.n1, stream(kAssign));
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = w[i] ? pop.y1[i] : pop.y0[i];
  const ObservedSample s(std::move(y), w);

  const double tau_hat = ate_estimate(s);
  const double sig_ney = std::sqrt(n * neyman_variance(s).v);
  const double sig_agl = std::sqrt(n * agl_variance(s, N).v);

  BootstrapDraws causal_complete, causal_bernoulli, standard;
  if (needs.causal_complete) {
    causal_complete = run_causal_bootstrap(s, N, AssignmentMode::kComplete, B,
                                           stream(kCausalBlock));
  }
  if (needs.causal_bernoulli) {
    causal_bernoulli = run_causal_bootstrap(
        s, N, AssignmentMode::kBernoulli, B,
        stream(kCausalBlock + kBernoulliOffset));
  }
  if (needs.standard) {
    standard = run_standard_bootstrap(s, B, stream(kStandardBlock));
  }

  for (std::size_t j = 0; j < methods.size(); ++j) {
    const InferenceMethod& m = methods[j];
    Cell& cell = cells[j];
    try {
      ConfidenceInterval ci;
      int skipped = 0;
      if (m.fisher) {
        ci = fisher_ci(s, level, 0.0, B, stream(kFisherBlock));
      } else if (m.spec.flavor == BootstrapFlavor::kNone) {
        const double sig =
            m.spec.variance == VarianceEstimator::kNeyman ? sig_ney : sig_agl;
        ci = gaussian_confidence_interval(tau_hat, sig, n, level);
      } else {
        const BootstrapDraws& draws =
            m.spec.flavor == BootstrapFlavor::kStandard
                ? standard
                : (m.spec.assignment == AssignmentMode::kComplete
                       ? causal_complete
                       : causal_bernoulli);
        const TDrawSet t = studentize_draws(draws, tau_hat, n, m.spec.variance);
        skipped = t.skipped;
        if (m.spec.pivotal) {
          const double sig =
              m.spec.variance == VarianceEstimator::kNeyman ? sig_ney : sig_agl;
          ci = confidence_interval(tau_hat, sig, n, t, level);
        } else {
          const double sig = std::sqrt(n * variance_from_draws(t));
          ci = gaussian_confidence_interval(tau_hat, sig, n, level);
        }
      }
      cell.ok = true;
      cell.hit = ci.lo <= tau_pop && tau_pop <= ci.hi;
      cell.implied_se = ci.implied_se;
      cell.skipped_draws = skipped;
    } catch (const std::exception&) {
      cell.ok = false;
    }
  }
}

}  // namespace

CoverageReport run_coverage(const DesignSpec& d,
                            const std::vector<InferenceMethod>& methods,
                            int reps, int B, double level, SeedSpec seed,
                            int threads) {
  if (reps < 1) throw std::invalid_argument("replication count must be positive");
  if (B < 1) throw std::invalid_argument("replication count must be positive");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level out of range");
  }
  if (methods.empty()) throw std::invalid_argument("no methods requested");
  if (threads < 1) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }

  EngineNeeds needs;
  for (const InferenceMethod& m : methods) {
    if (m.fisher || m.spec.flavor == BootstrapFlavor::kNone) continue;
    if (m.spec.flavor == BootstrapFlavor::kStandard) {
      needs.standard = true;
    } else if (m.spec.assignment == AssignmentMode::kComplete) {
      needs.causal_complete = true;
    } else {
      needs.causal_bernoulli = true;
    }
  }

  const std::size_t M = methods.size();
  std::vector<Cell> cells(static_cast<std::size_t>(reps) * M);

  // Replications are handed out by an atomic counter; each writes a
  // disjoint slot, so aggregation below is order-independent and the
  // report does not depend on the thread count.
  std::atomic<long long> next{0};
  auto worker = [&]() {
    while (true) {
      const long long r = next.fetch_add(1);
      if (r >= reps) return;
      run_one_rep(d, methods, needs, B, level, seed, r,
                  &cells[static_cast<std::size_t>(r) * M]);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  CoverageReport report;
  report.design = d;
  report.reps = reps;
  report.B = B;
  report.level = level;
  report.seed = seed.root_seed;
  report.assignment = methods.front().spec.assignment;
  report.rows.reserve(M);

  std::vector<double> ses;
  for (std::size_t j = 0; j < M; ++j) {
    MethodCoverage row;
    row.name = methods[j].name;
    long long valid = 0, hits = 0, skipped_draws = 0;
    ses.clear();
    for (long long r = 0; r < reps; ++r) {
      const Cell& cell = cells[static_cast<std::size_t>(r) * M + j];
      if (!cell.ok) continue;
      ++valid;
      hits += cell.hit ? 1 : 0;
      skipped_draws += cell.skipped_draws;
      ses.push_back(cell.implied_se);
    }
    row.skipped_reps = static_cast<int>(reps - valid);
    if (valid > 0) {
      row.coverage = static_cast<double>(hits) / static_cast<double>(valid);
      row.mean_skipped_draws =
          static_cast<double>(skipped_draws) / static_cast<double>(valid);
      std::sort(ses.begin(), ses.end());
      const std::size_t m = ses.size();
      row.median_implied_se = m % 2 == 1
                                  ? ses[m / 2]
                                  : 0.5 * (ses[m / 2 - 1] + ses[m / 2]);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string CoverageReport::to_csv() const {
  std::string out =
      "method,coverage,median_implied_se,skipped_reps,mean_skipped_draws\n";
  for (const MethodCoverage& row : rows) {
    out += row.name;
    out += ',';
    out += fmt_g6(row.coverage);
    out += ',';
    out += fmt_g6(row.median_implied_se);
    out += ',';
    out += std::to_string(row.skipped_reps);
    out += ',';
    out += fmt_g6(row.mean_skipped_draws);
    out += '\n';
  }
  return out;
}

std::string CoverageReport::to_json() const {
  std::string out = "{\n";
  out += "  \"design\": \"" + design.token() + "\",\n";
  out += "  \"n0\": " + std::to_string(design.n0) + ",\n";
  out += "  \"n1\": " + std::to_string(design.n1) + ",\n";
  if (design.kind == DesignKind::kGaussianCoupling) {
    out += "  \"rho\": " + fmt_g6(design.rho) + ",\n";
  }
  out += "  \"reps\": " + std::to_string(reps) + ",\n";
  out += "  \"B\": " + std::to_string(B) + ",\n";
  out += "  \"level\": " + fmt_g6(level) + ",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += std::string("  \"assignment\": \"") +
         (assignment == AssignmentMode::kComplete ? "complete" : "bernoulli") +
         "\",\n";
  out += "  \"methods\": [\n";
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const MethodCoverage& row = rows[j];
    out += "    {\"method\": \"" + row.name + "\", \"coverage\": " +
           fmt_g6(row.coverage) + ", \"median_implied_se\": " +
           fmt_g6(row.median_implied_se) + ", \"skipped_reps\": " +
           std::to_string(row.skipped_reps) + ", \"mean_skipped_draws\": " +
           fmt_g6(row.mean_skipped_draws) + "}";
    out += j + 1 < rows.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

KernelCheckResult kernel_check(const PotentialPopulation& p, int n0, int n1,
                               const std::vector<double>& grid0,
                               const std::vector<double>& grid1, int reps,
                               SeedSpec seed) {
  if (reps < 2) {
    throw std::invalid_argument("replication count must be positive");
  }
  const int n = n0 + n1;
  const long long N = p.size();
  if (n > N) throw std::invalid_argument("population smaller than sample");

  const double q = static_cast<double>(n) / static_cast<double>(N);
  const double prop = static_cast<double>(n1) / static_cast<double>(n);
  const KernelBlocks H = randomization_cov_kernel(p, prop, q, grid0, grid1);

  const std::size_t g0 = grid0.size();
  const std::size_t g1 = grid1.size();
  const auto R = static_cast<std::size_t>(reps);

  // keep every replication's evaluated processes so each kernel entry gets
  // a covariance estimate over all reps plus a standard error taken from
  // the spread of its own per-replication influence values
  std::vector<double> xs(R * g0), ys(R * g1);

  std::vector<int> idx(N);
  for (std::size_t r = 0; r < R; ++r) {
    Rng rng(seed.sub(static_cast<std::uint64_t>(r)));
    std::iota(idx.begin(), idx.end(), 0);
    if (n < N) detail::partial_shuffle(rng, idx, static_cast<int>(N), n);
    detail::partial_shuffle(rng, idx, n, n1);
    // idx[0..n1) treated, idx[n1..n) control

    for (std::size_t a = 0; a < g0; ++a) {
      int count = 0;
      for (int i = n1; i < n; ++i) count += p.y0[idx[i]] <= grid0[a] ? 1 : 0;
      xs[r * g0 + a] = static_cast<double>(count) / n0;
    }
    for (std::size_t b = 0; b < g1; ++b) {
      int count = 0;
      for (int i = 0; i < n1; ++i) count += p.y1[idx[i]] <= grid1[b] ? 1 : 0;
      ys[r * g1 + b] = static_cast<double>(count) / n1;
    }
  }

  std::vector<double> mean_x(g0, 0.0), mean_y(g1, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t a = 0; a < g0; ++a) mean_x[a] += xs[r * g0 + a];
    for (std::size_t b = 0; b < g1; ++b) mean_y[b] += ys[r * g1 + b];
  }
  for (double& v : mean_x) v /= static_cast<double>(R);
  for (double& v : mean_y) v /= static_cast<double>(R);

  KernelCheckResult out;
  const double dn = static_cast<double>(n);
  std::size_t entries = 0;
  double dev_sum = 0.0;
  auto scan = [&](std::size_t ga, std::size_t gb, const std::vector<double>& va,
                  const std::vector<double>& ma, const std::vector<double>& vb,
                  const std::vector<double>& mb, const std::vector<double>& h) {
    for (std::size_t a = 0; a < ga; ++a) {
      for (std::size_t b = 0; b < gb; ++b) {
        // influence value of replication r on this entry: the centered
        // cross product w_r = n * (x_r - mean_x)(y_r - mean_y); the entry
        // estimate is mean(w) and its standard error sd(w) / sqrt(reps)
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
          const double w =
              dn * (va[r * ga + a] - ma[a]) * (vb[r * gb + b] - mb[b]);
          s1 += w;
          s2 += w * w;
        }
        const double est = s1 / static_cast<double>(R);
        const double var_w =
            (s2 - est * s1) / static_cast<double>(R - 1);
        const double se = std::sqrt(std::max(var_w, 0.0) /
                                    static_cast<double>(R));
        const double dev = std::fabs(est - h[a * gb + b]);
        out.max_abs_dev = std::max(out.max_abs_dev, dev);
        double units;
        if (se > 0.0) {
          units = dev / se;
        } else {
          units = dev > 0.0 ? 1e300 : 0.0;
        }
        out.max_dev_se_units = std::max(out.max_dev_se_units, units);
        dev_sum += units;
        ++entries;
      }
    }
  };
  scan(g0, g0, xs, mean_x, xs, mean_x, H.h00);
  scan(g0, g1, xs, mean_x, ys, mean_y, H.h01);
  scan(g1, g1, ys, mean_y, ys, mean_y, H.h11);
  out.mean_dev_se_units = entries > 0 ? dev_sum / static_cast<double>(entries) : 0.0;
  return out;
}

}  // namespace causalboot
