// ac0learn: command-line front end for the filter, regression, sandwiching and
// experiment harness.
//
// Exit codes: 0 success, 1 an enabled experiment assertion failed, 2 bad
// input or arguments, 3 solver failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ac0/concepts.hpp"
#include "ac0/contamination.hpp"
#include "ac0/harness.hpp"
#include "ac0/io.hpp"
#include "ac0/lp.hpp"
#include "ac0/outlier_removal.hpp"
#include "ac0/regression.hpp"
#include "ac0/sandwiching.hpp"

namespace {

using ac0::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << j.dump(2) << "\n";
}

// Learners never see provenance; a harness-mode file's tag column is dropped.
ac0::LabeledSample load_sample(const std::string& path) { return ac0::read_csv_file(path).sample; }

// A truth-table file, a circuit JSON file, or a named family (needs --d).
std::pair<std::vector<int>, int> load_function(const std::string& spec, std::optional<int> dim) {
  if (std::filesystem::is_regular_file(spec)) {
    std::ifstream in(spec);
    if (spec.ends_with(".json")) {
      const ac0::Circuit c = ac0::circuit_from_json(json::parse(in));
      return {c.truth_table(), c.dim()};
    }
    return ac0::read_truth_table(in);
  }
  if (!dim) throw UsageError("--d is required for a named function");
  const ac0::Circuit c = ac0::make_named(spec, *dim);
  return {c.truth_table(), c.dim()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning from contaminated uniform samples: outlier filter, L1 regression, sandwiching"};
  app.require_subcommand(1);

  // filter
  std::string f_input, f_report, f_output, f_dump;
  ac0::FilterParams fp;
  double f_B = 0.0, f_Delta = 0.0;
  std::size_t f_ref = 0, f_max = 0;
  std::uint64_t f_seed = 0;
  auto* cmd_filter = app.add_subcommand("filter", "run the outlier-removal filter on a labeled CSV");
  cmd_filter->add_option("--input", f_input, "labeled sample CSV")->required()->check(CLI::ExistingFile);
  cmd_filter->add_option("--eps", fp.eps, "accuracy parameter")->required();
  cmd_filter->add_option("--k", fp.k, "degree")->required();
  auto* opt_B = cmd_filter->add_option("--B", f_B, "coefficient-norm bound (default 3^k d^(k/2))");
  auto* opt_D = cmd_filter->add_option("--Delta", f_Delta, "tail margin (default eps/(2B))");
  auto* opt_ref = cmd_filter->add_option("--ref-size", f_ref, "reference sample size (default N)");
  auto* opt_max = cmd_filter->add_option("--max-iters", f_max, "iteration cap (default N)");
  cmd_filter->add_option("--seed", f_seed, "seed for the reference sample")->required();
  cmd_filter->add_option("--report", f_report, "report JSON path ('-' for stdout)")->required();
  cmd_filter->add_option("--output", f_output, "write the surviving examples as CSV");
  cmd_filter->add_option("--dump-lp", f_dump, "write the first-iteration program in LP text format");

  // learn
  std::string l_input, l_out;
  int l_k = 0;
  auto* cmd_learn = app.add_subcommand("learn", "L1 polynomial regression plus threshold");
  cmd_learn->add_option("--input", l_input, "labeled sample CSV")->required()->check(CLI::ExistingFile);
  cmd_learn->add_option("--k", l_k, "degree")->required();
  cmd_learn->add_option("--out-hypothesis", l_out, "hypothesis JSON path ('-' for stdout)")->required();

  // sandwich / sandwich-degree
  std::string s_fn;
  int s_k = 0;
  int s_d = 0;
  double s_eps = 0.0;
  auto* cmd_sand = app.add_subcommand("sandwich", "optimal degree-k sandwiching pair of a function");
  cmd_sand->add_option("--function", s_fn, "named family, truth-table file or circuit JSON")->required();
  cmd_sand->add_option("--k", s_k, "degree")->required();
  auto* opt_sd = cmd_sand->add_option("--d", s_d, "dimension for named families");
  auto* cmd_sdeg = app.add_subcommand("sandwich-degree", "smallest k with sandwiching gap <= eps");
  cmd_sdeg->add_option("--function", s_fn, "named family, truth-table file or circuit JSON")->required();
  cmd_sdeg->add_option("--eps", s_eps, "gap target")->required();
  auto* opt_sdd = cmd_sdeg->add_option("--d", s_d, "dimension for named families");

  // experiment
  std::string e_config, e_out;
  auto* cmd_exp = app.add_subcommand("experiment", "seeded end-to-end runs with accounting");
  cmd_exp->add_option("--config", e_config, "experiment config JSON")->required()->check(CLI::ExistingFile);
  cmd_exp->add_option("--out", e_out, "output directory")->required();

  // sample
  std::string g_concept = "tribes:w=2,m=3", g_adv = "point_concentration", g_out;
  int g_d = 6;
  std::size_t g_n = 1000;
  double g_eta = 0.0;
  std::uint64_t g_seed = 0;
  bool g_tags = false;
  auto* cmd_sample = app.add_subcommand("sample", "draw a clean sample and contaminate it");
  cmd_sample->add_option("--concept", g_concept, "named concept")->capture_default_str();
  cmd_sample->add_option("--d", g_d, "dimension")->capture_default_str();
  cmd_sample->add_option("--N", g_n, "sample size")->capture_default_str();
  cmd_sample->add_option("--eta", g_eta, "contamination rate")->capture_default_str();
  cmd_sample->add_option("--adversary", g_adv, "adversary spec")->capture_default_str();
  cmd_sample->add_option("--seed", g_seed, "seed")->capture_default_str();
  cmd_sample->add_option("--out", g_out, "CSV path ('-' for stdout)")->required();
  cmd_sample->add_flag("--tags", g_tags, "include the provenance column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*cmd_filter) {
      if (*opt_B) fp.coef_bound = f_B;
      if (*opt_D) fp.delta = f_Delta;
      if (*opt_ref) fp.ref_size = f_ref;
      if (*opt_max) fp.max_iters = f_max;
      const ac0::LabeledSample s = load_sample(f_input);
      const ac0::FilterReport rep = ac0::filter(s, fp, f_seed);
      write_json(f_report, ac0::to_json(rep));
      if (!f_output.empty()) {
        std::ofstream out(f_output);
        if (!out) throw UsageError("cannot write " + f_output);
        ac0::write_csv(out, rep.filtered);
      }
      if (!f_dump.empty()) {
        std::ofstream out(f_dump);
        if (!out) throw UsageError("cannot write " + f_dump);
        const auto pts = s.points();
        ac0::write_lp_format(ac0::build_program_P(pts, rep.reference, pts, rep.n, fp), out);
      }
    } else if (*cmd_learn) {
      const ac0::LabeledSample s = load_sample(l_input);
      const ac0::L1Fit fit = ac0::fit_l1(s, l_k);
      const ac0::PTFHypothesis h = ac0::choose_threshold(fit.p, s);
      json j = ac0::to_json(h);
      j["l1_loss"] = fit.loss;
      j["training_mistakes"] = ac0::count_mistakes(h, s);
      write_json(l_out, j);
    } else if (*cmd_sand) {
      const auto [table, dim] = load_function(s_fn, *opt_sd ? std::optional<int>(s_d) : std::nullopt);
      const ac0::SandwichPair pair = ac0::best_sandwich(table, dim, s_k);
      json j = ac0::to_json(pair);
      j["k"] = s_k;
      j["dim"] = dim;
      write_json("-", j);
    } else if (*cmd_sdeg) {
      const auto [table, dim] = load_function(s_fn, *opt_sdd ? std::optional<int>(s_d) : std::nullopt);
      json gaps = json::array();
      int degree = dim;
      for (int k = 0; k <= dim; ++k) {
        const double gap = ac0::best_sandwich(table, dim, k).gap;
        gaps.push_back(gap);
        if (gap <= s_eps + ac0::kGapTol) {
          degree = k;
          break;
        }
      }
      write_json("-", json{{"dim", dim}, {"eps", s_eps}, {"degree", degree}, {"gaps", gaps}});
    } else if (*cmd_exp) {
      std::ifstream in(e_config);
      const ac0::ExperimentConfig cfg = ac0::config_from_json(json::parse(in));
      const ac0::ExperimentResult res = ac0::run_pipeline(cfg);
      ac0::write_experiment(res, e_out);
      std::cout << ac0::to_json(res.summary).dump(2) << "\n";
      if (!res.summary.failed_assertions.empty()) return 1;
    } else if (*cmd_sample) {
      const ac0::Circuit c = ac0::make_named(g_concept, g_d);
      const ac0::LabeledSet clean = ac0::sample_clean(c, g_n, ac0::mix_seed(g_seed, ac0::kSampleStream));
      const ac0::LabeledSet input = ac0::contaminate(clean, g_eta, ac0::parse_adversary(g_adv, g_d), c,
                                                     ac0::mix_seed(g_seed, ac0::kAdversaryStream));
      if (g_out == "-") {
        ac0::write_csv(std::cout, input, g_tags);
      } else {
        std::ofstream out(g_out);
        if (!out) throw UsageError("cannot write " + g_out);
        ac0::write_csv(out, input, g_tags);
      }
    }
  } catch (const ac0::LPSolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
