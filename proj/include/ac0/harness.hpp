#pragma once

// End-to-end experiments: sample -> contaminate -> filter -> L1 regression ->
// threshold -> evaluate, with provenance accounting of what the filter removed.
//
// Accounting sets (by provenance, after filtering):
//   S1 = adversarial examples removed by the filter
//   S2 = adversarial examples that survive
//   S3 = clean examples removed by the filter
// so |S1| + |S2| = floor(eta * N).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <nlohmann/json.hpp>

#include "ac0/concepts.hpp"
#include "ac0/contamination.hpp"
#include "ac0/hypercube.hpp"
#include "ac0/io.hpp"
#include "ac0/outlier_removal.hpp"
#include "ac0/random.hpp"
#include "ac0/regression.hpp"

namespace ac0 {

/// Pr_{x ~ Unif}[h(x) != c(x)] by enumerating the cube.
inline double exact_error(const PTFHypothesis& h, const Circuit& c, int dim) {
  if (dim > kMaxEnumerationDim) {
    throw DimensionError("exact_error: d > 20 is not enumerable; use monte_carlo_error");
  }
  if (h.p.dim() != dim || c.dim() != dim) throw DimensionError("exact_error: dimension mismatch");
  const std::uint32_t n = 1u << dim;
  std::uint64_t wrong = 0;
  for (std::uint32_t t = 0; t < n; ++t) {
    const Point x = Point::from_index(dim, t);
    wrong += h.predict(x) != c.eval(x);
  }
  return static_cast<double>(wrong) / static_cast<double>(n);
}

struct ErrorEstimate {
  double estimate = 0.0;
  double lower = 0.0;  // 95% Clopper-Pearson bounds
  double upper = 1.0;
  std::size_t samples = 0;
};

/// Exact binomial (Clopper-Pearson) 95% interval. When no or all trials fail
/// the open side is one-sided at 5%, so 0/n gives the rule-of-three bound
/// 1 - 0.05^(1/n) < 3/n.
inline ErrorEstimate binomial_interval(std::size_t failures, std::size_t n) {
  if (n == 0) throw std::invalid_argument("binomial_interval: n must be >= 1");
  constexpr double alpha = 0.05;
  const double k = static_cast<double>(failures);
  const double nn = static_cast<double>(n);
  ErrorEstimate e;
  e.samples = n;
  e.estimate = k / nn;
  if (failures == 0) {
    e.lower = 0.0;
    e.upper = 1.0 - std::pow(alpha, 1.0 / nn);
  } else if (failures == n) {
    e.lower = std::pow(alpha, 1.0 / nn);
    e.upper = 1.0;
  } else {
    e.lower = boost::math::quantile(boost::math::beta_distribution<>(k, nn - k + 1.0), alpha / 2);
    e.upper = boost::math::quantile(boost::math::beta_distribution<>(k + 1.0, nn - k), 1.0 - alpha / 2);
  }
  return e;
}

inline ErrorEstimate monte_carlo_error(const PTFHypothesis& h, const Circuit& c, int dim, std::size_t samples,
                                       std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("monte_carlo_error: samples must be >= 1");
  if (h.p.dim() != dim || c.dim() != dim) throw DimensionError("monte_carlo_error: dimension mismatch");
  Rng rng(seed);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point x = uniform_point(rng, dim);
    wrong += h.predict(x) != c.eval(x);
  }
  return binomial_interval(wrong, samples);
}

struct AccountingReport {
  std::size_t adversary_removed = 0;  // |S_cln \ S_inp| = floor(eta N)
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  std::size_t s3 = 0;
  double clean_error = 0.0;   // mistakes of h on the full clean sample / N
  double exact_error = 0.0;   // uniform error of h against the concept
  double predicted_bound = 0.0;  // 2 eta + C eps
};

/// Fills per-iteration clean/adversarial removal counts and returns the
/// S1/S2/S3 sizes. Uses provenance the filter never saw.
inline AccountingReport account(FilterReport& report, const LabeledSet& input) {
  if (input.size() != report.n) throw std::invalid_argument("account: report and sample sizes differ");
  AccountingReport a;
  a.adversary_removed = input.removed.size();
  for (auto& it : report.iterations) {
    std::size_t clean = 0;
    std::size_t adv = 0;
    for (std::size_t i : it.removed) {
      if (input.tags[i] == Provenance::Clean) ++clean;
      else ++adv;
    }
    it.removed_clean = clean;
    it.removed_adversarial = adv;
    a.s1 += adv;
    a.s3 += clean;
  }
  for (std::size_t i : report.kept) a.s2 += input.tags[i] == Provenance::Adversarial;
  return a;
}

/// Upper bound on the clean-set error implied by the accounting:
/// (|S_cln \ S_inp| + |S3| + |S2|) / N + 2 eps.
inline double mistake_budget(const AccountingReport& r, double eps, std::size_t n) {
  if (n == 0) throw std::invalid_argument("mistake_budget: N must be >= 1");
  return static_cast<double>(r.adversary_removed + r.s3 + r.s2) / static_cast<double>(n) + 2.0 * eps;
}

/// Mistakes on `s` of the best member of a small explicit family: the truth,
/// the truth with one input negated, both constants, and +-x^S for |S| <= k.
/// This under-approximates the minimum over the whole truth class.
inline std::size_t family_min_mistakes(const Circuit& truth, const LabeledSample& s, int k) {
  const int dim = truth.dim();
  auto mistakes = [&](auto&& f) {
    std::size_t m = 0;
    for (const auto& e : s.examples) m += f(e.x) != e.label;
    return m;
  };
  std::size_t plus = 0;
  for (const auto& e : s.examples) plus += e.label != 1;
  std::size_t best = std::min(plus, s.size() - plus);
  best = std::min(best, mistakes([&](const Point& x) { return truth.eval(x); }));
  for (int i = 0; i < dim; ++i) {
    best = std::min(best, mistakes([&](const Point& x) {
      return truth.eval(Point(dim, x.negative_bits() ^ (1u << i)));
    }));
  }
  for (Monomial m : enumerate_monomials(dim, k)) {
    const std::size_t pos = mistakes([&](const Point& x) { return eval_monomial(x, m); });
    best = std::min({best, pos, s.size() - pos});
  }
  return best;
}

struct ExperimentConfig {
  int d = 8;
  int k = 2;
  std::size_t n = 2000;
  double eta = 0.1;
  double eps = 0.1;
  double delta = 0.1;  // nominal confidence parameter, recorded only
  std::string concept_spec = "tribes:w=2,m=3";
  std::string adversary = "point_concentration";
  std::vector<std::uint64_t> seeds{1};
  std::optional<double> coef_bound;
  std::optional<double> filter_delta;
  std::optional<std::size_t> ref_size;
  std::optional<std::size_t> max_iters;
  double error_constant = 3.0;  // C in 2 eta + C eps
  bool baseline = true;         // also regress on the unfiltered sample
  bool traces = false;          // write per-seed filter traces
  unsigned threads = 0;         // 0 = hardware concurrency
  // Optional assertions; the CLI exits nonzero when an enabled one fails.
  std::optional<double> assert_soundness_frequency;   // freq of |S3| <= |S1|
  std::optional<double> assert_error_frequency;       // freq of error <= 2 eta + C eps
  std::optional<double> assert_baseline_worse_frequency;  // freq of unfiltered error > filtered error

  FilterParams filter_params() const {
    FilterParams p;
    p.eps = eps;
    p.k = k;
    p.coef_bound = coef_bound;
    p.delta = filter_delta;
    p.ref_size = ref_size;
    p.max_iters = max_iters;
    return p;
  }

  double error_bound() const { return 2.0 * eta + error_constant * eps; }

  void validate() const {
    if (d < 1 || d > kMaxEnumerationDim) throw std::invalid_argument("config: d must be in [1, 20]");
    if (k < 0 || k > d) throw std::invalid_argument("config: need 0 <= k <= d");
    if (n < 1) throw std::invalid_argument("config: N must be >= 1");
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("config: eta must lie in [0, 1)");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("config: eps must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("config: delta must lie in (0, 1)");
    if (seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty");
    if (!(error_constant >= 0.0)) throw std::invalid_argument("config: error_constant must be >= 0");
    filter_params().validate(d);
    make_named(concept_spec, d);
    parse_adversary(adversary, d);
  }
};

inline ExperimentConfig config_from_json(const json& j) {
  static const char* known[] = {"d", "k", "N", "eta", "eps", "delta", "concept", "adversary", "seeds", "B",
                                "Delta", "ref_size", "max_iters", "error_constant", "baseline", "traces", "threads",
                                "assert"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return key == s; }) == std::end(known)) {
      throw FormatError("config: unknown key '" + key + "'");
    }
  }
  ExperimentConfig c;
  c.d = j.at("d").get<int>();
  c.k = j.at("k").get<int>();
  c.n = j.at("N").get<std::size_t>();
  c.eta = j.at("eta").get<double>();
  c.eps = j.at("eps").get<double>();
  c.delta = j.value("delta", c.delta);
  c.concept_spec = j.at("concept").get<std::string>();
  c.adversary = j.value("adversary", c.adversary);
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    if (s.is_number_integer()) {
      c.seeds.clear();
      for (std::uint64_t i = 0; i < s.get<std::uint64_t>(); ++i) c.seeds.push_back(i);
    } else {
      c.seeds = s.get<std::vector<std::uint64_t>>();
    }
  }
  if (j.contains("B")) c.coef_bound = j.at("B").get<double>();
  if (j.contains("Delta")) c.filter_delta = j.at("Delta").get<double>();
  if (j.contains("ref_size")) c.ref_size = j.at("ref_size").get<std::size_t>();
  if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<std::size_t>();
  c.error_constant = j.value("error_constant", c.error_constant);
  c.baseline = j.value("baseline", c.baseline);
  c.traces = j.value("traces", c.traces);
  c.threads = j.value("threads", c.threads);
  if (j.contains("assert")) {
    const auto& a = j.at("assert");
    if (a.contains("soundness_frequency")) c.assert_soundness_frequency = a.at("soundness_frequency").get<double>();
    if (a.contains("error_frequency")) c.assert_error_frequency = a.at("error_frequency").get<double>();
    if (a.contains("baseline_worse_frequency")) {
      c.assert_baseline_worse_frequency = a.at("baseline_worse_frequency").get<double>();
    }
  }
  c.validate();
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  json j{{"d", c.d},           {"k", c.k},
         {"N", c.n},           {"eta", c.eta},
         {"eps", c.eps},       {"delta", c.delta},
         {"concept", c.concept_spec}, {"adversary", c.adversary},
         {"seeds", c.seeds},   {"error_constant", c.error_constant},
         {"baseline", c.baseline}, {"traces", c.traces}};
  if (c.coef_bound) j["B"] = *c.coef_bound;
  if (c.filter_delta) j["Delta"] = *c.filter_delta;
  if (c.ref_size) j["ref_size"] = *c.ref_size;
  if (c.max_iters) j["max_iters"] = *c.max_iters;
  json a = json::object();
  if (c.assert_soundness_frequency) a["soundness_frequency"] = *c.assert_soundness_frequency;
  if (c.assert_error_frequency) a["error_frequency"] = *c.assert_error_frequency;
  if (c.assert_baseline_worse_frequency) a["baseline_worse_frequency"] = *c.assert_baseline_worse_frequency;
  if (!a.empty()) j["assert"] = a;
  return j;
}

struct SeedRun {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  AccountingReport accounting;
  FilterReport filter;
  PTFHypothesis hypothesis;
  double l1_loss = 0.0;
  std::optional<double> unfiltered_error;
  double budget = 0.0;
  bool within_budget = false;
  bool within_bound = false;
  bool s3_le_s1 = false;
  std::size_t filtered_mistakes = 0;     // h on S_filt (labeled)
  std::size_t family_mistakes = 0;       // best explicit family member on S_filt
  bool proof_chain_ok = false;           // filtered_mistakes <= family + 2 eps N
};

struct ExperimentSummary {
  std::size_t runs = 0;
  std::size_t failed_runs = 0;
  double soundness_frequency = 0.0;       // |S3| <= |S1|
  double error_frequency = 0.0;           // exact error <= 2 eta + C eps
  double budget_frequency = 0.0;          // clean error <= mistake budget
  double proof_chain_frequency = 0.0;
  std::optional<double> baseline_worse_frequency;
  double mean_exact_error = 0.0;
  std::optional<double> mean_unfiltered_error;
  std::size_t total_fallbacks = 0;
  bool all_converged = true;
  std::size_t max_iterations = 0;
  std::vector<std::string> failed_assertions;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SeedRun> runs;
  ExperimentSummary summary;
};

/// Stream indices for deriving per-stage seeds from a run seed.
enum : std::uint64_t { kSampleStream = 0, kAdversaryStream = 1, kReferenceStream = 2 };

inline SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedRun run;
  run.seed = seed;
  try {
    const Circuit truth = make_named(cfg.concept_spec, cfg.d);
    const AdversaryStrategy adv = parse_adversary(cfg.adversary, cfg.d);
    const LabeledSet clean = sample_clean(truth, cfg.n, mix_seed(seed, kSampleStream));
    const LabeledSet input = contaminate(clean, cfg.eta, adv, truth, mix_seed(seed, kAdversaryStream));
    const LabeledSample view = input.view();

    run.filter = filter(view, cfg.filter_params(), mix_seed(seed, kReferenceStream));
    run.accounting = account(run.filter, input);

    const L1Fit fit = fit_l1(run.filter.filtered, cfg.k);
    run.l1_loss = fit.loss;
    run.hypothesis = choose_threshold(fit.p, run.filter.filtered);

    auto& a = run.accounting;
    a.exact_error = exact_error(run.hypothesis, truth, cfg.d);
    a.clean_error = static_cast<double>(count_mistakes(run.hypothesis, clean.view())) / static_cast<double>(cfg.n);
    a.predicted_bound = cfg.error_bound();
    run.budget = mistake_budget(a, cfg.eps, cfg.n);
    run.within_budget = a.clean_error <= run.budget;
    run.within_bound = a.exact_error <= a.predicted_bound;
    run.s3_le_s1 = a.s3 <= a.s1;

    run.filtered_mistakes = count_mistakes(run.hypothesis, run.filter.filtered);
    run.family_mistakes = family_min_mistakes(truth, run.filter.filtered, cfg.k);
    run.proof_chain_ok = static_cast<double>(run.filtered_mistakes) <=
                         static_cast<double>(run.family_mistakes) + 2.0 * cfg.eps * static_cast<double>(cfg.n);

    if (cfg.baseline) {
      const L1Fit raw = fit_l1(view, cfg.k);
      run.unfiltered_error = exact_error(choose_threshold(raw.p, view), truth, cfg.d);
    }
    run.ok = true;
  } catch (const std::exception& e) {
    run.ok = false;
    run.error = e.what();
  }
  return run;
}

inline ExperimentSummary summarize(const ExperimentConfig& cfg, const std::vector<SeedRun>& runs) {
  ExperimentSummary s;
  s.runs = runs.size();
  std::size_t ok = 0, sound = 0, bound = 0, budget = 0, chain = 0, worse = 0, base = 0;
  double err = 0.0, uerr = 0.0;
  for (const auto& r : runs) {
    if (!r.ok) {
      ++s.failed_runs;
      continue;
    }
    ++ok;
    sound += r.s3_le_s1;
    bound += r.within_bound;
    budget += r.within_budget;
    chain += r.proof_chain_ok;
    err += r.accounting.exact_error;
    s.total_fallbacks += r.filter.fallback_count();
    s.all_converged = s.all_converged && r.filter.converged;
    s.max_iterations = std::max(s.max_iterations, r.filter.iterations.size());
    if (r.unfiltered_error) {
      ++base;
      uerr += *r.unfiltered_error;
      worse += *r.unfiltered_error > r.accounting.exact_error;
    }
  }
  // Failed runs count against every frequency.
  const double denom = static_cast<double>(std::max<std::size_t>(runs.size(), 1));
  s.soundness_frequency = sound / denom;
  s.error_frequency = bound / denom;
  s.budget_frequency = budget / denom;
  s.proof_chain_frequency = chain / denom;
  s.mean_exact_error = ok ? err / static_cast<double>(ok) : 0.0;
  if (cfg.baseline) {
    s.baseline_worse_frequency = worse / denom;
    s.mean_unfiltered_error = base ? uerr / static_cast<double>(base) : 0.0;
  }
  if (cfg.assert_soundness_frequency && s.soundness_frequency < *cfg.assert_soundness_frequency) {
    s.failed_assertions.push_back("soundness_frequency");
  }
  if (cfg.assert_error_frequency && s.error_frequency < *cfg.assert_error_frequency) {
    s.failed_assertions.push_back("error_frequency");
  }
  if (cfg.assert_baseline_worse_frequency &&
      s.baseline_worse_frequency.value_or(0.0) < *cfg.assert_baseline_worse_frequency) {
    s.failed_assertions.push_back("baseline_worse_frequency");
  }
  return s;
}

/// Runs every seed (concurrently) and aggregates. Results are ordered as the
/// seeds in the config, so output does not depend on scheduling.
inline ExperimentResult run_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.config = cfg;
  res.runs.resize(cfg.seeds.size());
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cfg.seeds.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) res.runs[i] = run_seed(cfg, cfg.seeds[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  res.summary = summarize(cfg, res.runs);
  return res;
}

inline json to_json(const ExperimentSummary& s) {
  json j{{"runs", s.runs},
         {"failed_runs", s.failed_runs},
         {"soundness_frequency", s.soundness_frequency},
         {"error_frequency", s.error_frequency},
         {"budget_frequency", s.budget_frequency},
         {"proof_chain_frequency", s.proof_chain_frequency},
         {"mean_exact_error", s.mean_exact_error},
         {"total_fallbacks", s.total_fallbacks},
         {"all_converged", s.all_converged},
         {"max_iterations", s.max_iterations},
         {"failed_assertions", s.failed_assertions},
         {"family_oracle", "lower bound: min over truth, single-input negations, constants, +-parities of size <= k"}};
  if (s.baseline_worse_frequency) j["baseline_worse_frequency"] = *s.baseline_worse_frequency;
  if (s.mean_unfiltered_error) j["mean_unfiltered_error"] = *s.mean_unfiltered_error;
  return j;
}

inline void write_runs_csv(std::ostream& os, const std::vector<SeedRun>& runs) {
  os.precision(17);
  os << "seed,ok,adversary_removed,s1,s2,s3,filtered_size,iterations,fallbacks,converged,l1_loss,theta,"
        "exact_error,unfiltered_error,clean_error,mistake_budget,within_budget,predicted_bound,within_bound,"
        "filtered_mistakes,family_mistakes,proof_chain_ok,error\n";
  for (const auto& r : runs) {
    const auto& a = r.accounting;
    os << r.seed << "," << r.ok << "," << a.adversary_removed << "," << a.s1 << "," << a.s2 << "," << a.s3 << ","
       << r.filter.kept.size() << "," << r.filter.iterations.size() << "," << r.filter.fallback_count() << ","
       << r.filter.converged << "," << r.l1_loss << "," << r.hypothesis.theta << "," << a.exact_error << ",";
    if (r.unfiltered_error) os << *r.unfiltered_error;
    os << "," << a.clean_error << "," << r.budget << "," << r.within_budget << "," << a.predicted_bound << ","
       << r.within_bound << "," << r.filtered_mistakes << "," << r.family_mistakes << "," << r.proof_chain_ok << ",";
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    os << msg << "\n";
  }
}

/// Writes runs.csv, summary.json and (if enabled) traces/seed_<s>.json.
inline void write_experiment(const ExperimentResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "runs.csv");
    write_runs_csv(out, res.runs);
  }
  {
    std::ofstream out(dir / "summary.json");
    out << json{{"config", to_json(res.config)}, {"summary", to_json(res.summary)}}.dump(2) << "\n";
  }
  if (res.config.traces) {
    std::filesystem::create_directories(dir / "traces");
    for (const auto& r : res.runs) {
      if (!r.ok) continue;
      std::ofstream out(dir / "traces" / ("seed_" + std::to_string(r.seed) + ".json"));
      out << json{{"seed", r.seed},
                  {"filter", to_json(r.filter, false)},
                  {"hypothesis", to_json(r.hypothesis)}}
                 .dump(2)
          << "\n";
    }
  }
}

}  // namespace ac0
