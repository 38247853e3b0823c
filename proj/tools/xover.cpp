// Command-line surface: construct orthogonal arrays, validate design files,
// evaluate optimality criteria, sweep efficiency over a covariance
// parameter, search the binary design class, and run Monte Carlo dispersion
// validation. Every JSON artifact carries a version field and an echo of
// the resolved configuration; identical invocations produce byte-identical
// output. Exit codes: 0 success, 1 validation error, 2 computation
// degeneracy, 3 I/O error.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "xover/design.hpp"
#include "xover/information.hpp"
#include "xover/jsonio.hpp"
#include "xover/optimality.hpp"
#include "xover/simulate.hpp"

namespace {

using nlohmann::json;
using namespace xover;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(sig10(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit(const json& payload) { std::cout << payload.dump(2) << "\n"; }

// t <= 0 means "infer from the file" (largest label seen).
Design load_design(const std::string& path, int t) {
  const std::string text = read_text_file(path);
  return parse_design(text, t > 0 ? t : infer_treatment_count(text));
}

struct OaArgs {
  int t = 3;
  int lambda = 1;
  std::string out;
  bool letters = false;
};

int run_oa(const OaArgs& args) {
  const Design d = construct_oa(OaSpec{args.t, args.lambda});
  write_text_file(args.out, serialize_design(d, args.letters));
  emit({{"version", kVersion},
        {"config",
         {{"t", args.t},
          {"lambda", args.lambda},
          {"out", args.out},
          {"letters", args.letters}}},
        {"n", d.n()},
        {"p", d.p()},
        {"oaTypeI", true}});
  return 0;
}

struct CheckArgs {
  std::string design;
  int t = 0;
};

int run_check(const CheckArgs& args) {
  const Design d = load_design(args.design, args.t);
  json out = {{"version", kVersion},
              {"config", {{"design", args.design}, {"t", d.t}}},
              {"n", d.n()},
              {"p", d.p()},
              {"binary", is_binary(d)},
              {"uniformOnSubjects", is_uniform_on_subjects(d)}};
  if (d.p() == d.t) {
    const OaCheck oa = is_oa_type1_strength2(d);
    out["oaTypeI"] = oa.is_oa;
    out["lambda"] = oa.is_oa ? json(oa.lambda) : json(nullptr);
  } else {
    out["oaTypeI"] = false;
    out["lambda"] = nullptr;
  }
  emit(out);
  return 0;
}

struct EvalArgs {
  std::string design;
  std::string config;
  int t = 0;
};

int run_eval(const EvalArgs& args) {
  const StudyConfig cfg = load_study_config(args.config);
  const Design d = load_design(args.design, args.t);
  const CriteriaValues vals = criteria(d, cfg);
  json zetas = json::array();
  for (const auto& block : vals.per_block_zetas) {
    json z = json::array();
    for (Eigen::Index i = 0; i < block.size(); ++i) z.push_back(sig10(block[i]));
    zetas.push_back(std::move(z));
  }
  emit({{"version", kVersion},
        {"config",
         {{"design", args.design},
          {"t", d.t},
          {"config", args.config},
          {"study", study_config_to_json(cfg)}}},
        {"phiA", sig10(vals.phiA)},
        {"logPhiD", sig10(vals.logPhiD)},
        {"phiE", sig10(vals.phiE)},
        {"zetas", zetas},
        {"estimable", vals.estimable}});
  return 0;
}

struct SweepArgs {
  std::string design;
  std::string ref = "auto";
  std::string config;
  int t = 0;
  double r_min = -0.45;
  double r_max = 0.95;
  int steps = 141;
  std::string out;
  std::string summary_out;
};

int run_sweep(const SweepArgs& args) {
  const StudyConfig cfg = load_study_config(args.config);
  const Design d0 = load_design(args.design, args.t);

  Design ref;
  if (args.ref == "auto") {
    const int pairs = d0.t * (d0.t - 1);
    if (d0.n() % pairs != 0)
      throw ValidationError(
          "sweep: no lambda gives an OA with n = " + std::to_string(d0.n()) +
          " (need n divisible by t(t-1) = " + std::to_string(pairs) + ")");
    ref = construct_oa(OaSpec{d0.t, d0.n() / pairs});
  } else {
    ref = load_design(args.ref, d0.t);
  }

  const SweepResult res =
      sweep(d0, ref, cfg, make_r_grid(args.r_min, args.r_max, args.steps));

  std::string csv = "r,effA,effD,effE\n";
  for (const SweepRow& row : res.rows)
    csv += format_sig10(row.r) + "," + format_sig10(row.effA) + "," +
           format_sig10(row.effD) + "," + format_sig10(row.effE) + "\n";
  write_text_file(args.out, csv);

  const json summary = {{"version", kVersion},
                        {"config",
                         {{"design", args.design},
                          {"ref", args.ref},
                          {"t", d0.t},
                          {"config", args.config},
                          {"study", study_config_to_json(cfg)},
                          {"rMin", sig10(args.r_min)},
                          {"rMax", sig10(args.r_max)},
                          {"steps", args.steps},
                          {"out", args.out}}},
                        {"maxA", sig10(res.summary.maxA)},
                        {"argmaxA", sig10(res.summary.argmaxA)},
                        {"maxD", sig10(res.summary.maxD)},
                        {"argmaxD", sig10(res.summary.argmaxD)},
                        {"maxE", sig10(res.summary.maxE)},
                        {"argmaxE", sig10(res.summary.argmaxE)},
                        {"rows", res.rows.size()},
                        {"skipped", res.summary.skipped}};
  emit(summary);
  if (!args.summary_out.empty())
    write_text_file(args.summary_out, summary.dump(2) + "\n");
  return 0;
}

struct SearchArgs {
  int t = 3;
  int n = 6;
  std::string config;
  std::string criterion = "A";
  std::string mode = "exhaustive";
  std::uint64_t seed = 0;
  int restarts = 8;
  std::uint64_t cap = BinaryDesignEnumerator::kDefaultCap;
  std::string out;
};

int run_search(const SearchArgs& args) {
  const StudyConfig cfg = load_study_config(args.config);
  const Criterion crit = criterion_from_string(args.criterion);

  SearchResult res;
  if (args.mode == "exhaustive")
    res = exhaustive_search(args.t, args.n, cfg, crit, args.cap);
  else if (args.mode == "exchange")
    res = exchange_search(args.t, args.n, cfg, crit, args.restarts, args.seed);
  else
    throw ValidationError("search: mode must be 'exhaustive' or 'exchange'");

  constexpr std::size_t kMaxListed = 100;
  json optima = json::array();
  for (std::size_t i = 0; i < res.optima_set.size() && i < kMaxListed; ++i)
    optima.push_back(res.optima_set[i]);

  if (res.finite && !args.out.empty())
    write_text_file(args.out, serialize_design(res.best_design));

  emit({{"version", kVersion},
        {"config",
         {{"t", args.t},
          {"n", args.n},
          {"config", args.config},
          {"study", study_config_to_json(cfg)},
          {"criterion", criterion_name(crit)},
          {"mode", args.mode},
          {"seed", args.seed},
          {"restarts", args.restarts},
          {"out", args.out}}},
        {"criterion", criterion_name(crit)},
        {"evaluated", res.evaluated},
        {"finite", res.finite},
        {"bestValue", res.finite ? sig10(res.best_value) : json(nullptr)},
        {"bestDesign",
         res.finite ? json(serialize_design(res.best_design)) : json(nullptr)},
        {"optimaCount", res.optima_set.size()},
        {"optima", optima},
        {"optimaTruncated", res.optima_set.size() > kMaxListed}});
  return 0;
}

struct SimulateArgs {
  std::string design;
  std::string config;
  int t = 0;
  std::uint64_t reps = 10000;
  std::uint64_t seed = 0;
  std::string out;
  std::string estimates_out;
};

int run_simulate(const SimulateArgs& args) {
  const StudyConfig cfg = load_study_config(args.config);
  const Design d = load_design(args.design, args.t);
  const ContrastSet contrasts = helmert_contrast_set(d.t, cfg.g());
  const ParamSet theta = default_params(d, cfg.g());
  const SimConfig sim{args.reps, args.seed};

  const SimReport report =
      validate_dispersion(d, cfg, theta, contrasts, sim);

  if (!args.estimates_out.empty()) {
    const GlsEstimator estimator(d, cfg, contrasts);
    const ResponseSimulator simulator(d, cfg, theta, args.seed);
    std::string csv;
    for (std::uint64_t i = 0; i < args.reps; ++i) {
      const Eigen::VectorXd est = estimator.estimate(simulator.replicate(i));
      for (Eigen::Index c = 0; c < est.size(); ++c) {
        if (c) csv += ",";
        csv += format_sig10(est[c]);
      }
      csv += "\n";
    }
    write_text_file(args.estimates_out, csv);
  }

  const json out = {{"version", kVersion},
                    {"config",
                     {{"design", args.design},
                      {"t", d.t},
                      {"config", args.config},
                      {"study", study_config_to_json(cfg)}}},
                    {"relFrobeniusError", sig10(report.rel_frobenius_error)},
                    {"crossBlockRel", sig10(report.cross_block_rel)},
                    {"reps", report.reps_used},
                    {"seed", report.seed},
                    {"theoreticalG", matrix_to_json(report.theoretical_G)},
                    {"empiricalG", matrix_to_json(report.empirical_G)}};
  emit(out);
  if (!args.out.empty()) write_text_file(args.out, out.dump(2) + "\n");
  return 0;
}

void emit_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", message}, {"kind", kind}}.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"multivariate crossover design toolkit"};
  app.require_subcommand(1);

  OaArgs oa_args;
  auto* oa_cmd = app.add_subcommand(
      "oa", "construct an orthogonal array design OA_I(lambda*t*(t-1), t, t, 2)");
  oa_cmd->add_option("--t", oa_args.t, "treatment count (>= 3)")->required();
  oa_cmd->add_option("--lambda", oa_args.lambda, "replication integer")->required();
  oa_cmd->add_option("--out", oa_args.out, "output design CSV path")->required();
  oa_cmd->add_flag("--letters", oa_args.letters, "emit letter labels A..");

  CheckArgs check_args;
  auto* check_cmd =
      app.add_subcommand("check", "validate a design file (binary / uniform / OA)");
  check_cmd->add_option("--design", check_args.design, "design CSV path")->required();
  check_cmd->add_option("--t", check_args.t,
                        "treatment count (default: inferred from the file)");

  EvalArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("eval", "evaluate A/D/E criteria for a design");
  eval_cmd->add_option("--design", eval_args.design, "design CSV path")->required();
  eval_cmd->add_option("--config", eval_args.config, "study config JSON path")
      ->required();
  eval_cmd->add_option("--t", eval_args.t,
                       "treatment count (default: inferred from the file)");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "efficiency of a design against the OA reference over an r grid");
  sweep_cmd->add_option("--design", sweep_args.design, "design CSV path")->required();
  sweep_cmd->add_option("--ref", sweep_args.ref,
                        "'auto' (OA with matching n) or a design CSV path");
  sweep_cmd->add_option("--config", sweep_args.config, "study config JSON path")
      ->required();
  sweep_cmd->add_option("--t", sweep_args.t,
                        "treatment count (default: inferred from the file)");
  sweep_cmd->add_option("--r-min", sweep_args.r_min, "grid start");
  sweep_cmd->add_option("--r-max", sweep_args.r_max, "grid end");
  sweep_cmd->add_option("--steps", sweep_args.steps, "grid point count");
  sweep_cmd->add_option("--out", sweep_args.out, "output CSV path")->required();
  sweep_cmd->add_option("--summary-out", sweep_args.summary_out,
                        "also write the summary JSON here");

  SearchArgs search_args;
  auto* search_cmd =
      app.add_subcommand("search", "search the binary design class (p = t)");
  search_cmd->add_option("--t", search_args.t, "treatment count")->required();
  search_cmd->add_option("--n", search_args.n, "subject count")->required();
  search_cmd->add_option("--config", search_args.config, "study config JSON path")
      ->required();
  search_cmd->add_option("--criterion", search_args.criterion, "A, D or E")
      ->required();
  search_cmd->add_option("--mode", search_args.mode, "exhaustive or exchange");
  search_cmd->add_option("--seed", search_args.seed, "exchange RNG seed");
  search_cmd->add_option("--restarts", search_args.restarts, "exchange restarts");
  search_cmd->add_option("--cap", search_args.cap, "enumeration cap");
  search_cmd->add_option("--out", search_args.out, "best design CSV path");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo validation of the contrast dispersion");
  sim_cmd->add_option("--design", sim_args.design, "design CSV path")->required();
  sim_cmd->add_option("--config", sim_args.config, "study config JSON path")
      ->required();
  sim_cmd->add_option("--t", sim_args.t,
                      "treatment count (default: inferred from the file)");
  sim_cmd->add_option("--reps", sim_args.reps, "replicate count (>= 2)");
  sim_cmd->add_option("--seed", sim_args.seed, "simulation seed");
  sim_cmd->add_option("--out", sim_args.out, "also write the report JSON here");
  sim_cmd->add_option("--estimates-out", sim_args.estimates_out,
                      "raw per-replicate estimates CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 1;
  }

  try {
    if (app.got_subcommand(oa_cmd)) return run_oa(oa_args);
    if (app.got_subcommand(check_cmd)) return run_check(check_args);
    if (app.got_subcommand(eval_cmd)) return run_eval(eval_args);
    if (app.got_subcommand(sweep_cmd)) return run_sweep(sweep_args);
    if (app.got_subcommand(search_cmd)) return run_search(search_args);
    if (app.got_subcommand(sim_cmd)) return run_simulate(sim_args);
  } catch (const ValidationError& e) {
    emit_error("validation", e.what());
    return 1;
  } catch (const SizeError& e) {
    emit_error("validation", e.what());
    return 1;
  } catch (const DegeneracyError& e) {
    emit_error("degeneracy", e.what());
    return 2;
  } catch (const IoError& e) {
    emit_error("io", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
  return 0;
}
