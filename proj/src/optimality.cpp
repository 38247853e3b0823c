#include "xover/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "xover/linalg.hpp"
#include "xover/parallel.hpp"

namespace xover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieRel = 1e-9;

bool tie_close(double a, double b) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= kTieRel * scale;
}

double criterion_value(const CriteriaValues& v, Criterion c) {
  switch (c) {
    case Criterion::A: return v.phiA;
    case Criterion::D: return v.logPhiD;
    case Criterion::E: return v.phiE;
  }
  return kInf;
}

// Canonical multiset form: columns sorted lexicographically.
Design sort_columns(const Design& d) {
  std::vector<std::vector<int>> cols(d.n());
  for (int j = 0; j < d.n(); ++j) {
    cols[j].resize(d.p());
    for (int i = 0; i < d.p(); ++i) cols[j][i] = d.layout(i, j);
  }
  std::sort(cols.begin(), cols.end());
  return design_from_columns(d.t, cols);
}

} // namespace

Criterion criterion_from_string(const std::string& name) {
  if (name == "A" || name == "a") return Criterion::A;
  if (name == "D" || name == "d") return Criterion::D;
  if (name == "E" || name == "e") return Criterion::E;
  throw ValidationError("unknown criterion '" + name + "', expected A, D or E");
}

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::A: return "A";
    case Criterion::D: return "D";
    case Criterion::E: return "E";
  }
  return "?";
}

CriteriaValues criteria_from_info(const InfoMatrix& info) {
  CriteriaValues out;
  out.estimable = true;
  for (std::size_t k = 0; k < info.blocks.size(); ++k) {
    out.per_block_zetas.push_back(info.blocks[k].positive_eigs);
    if (!info.blocks[k].estimable) out.estimable = false;
  }
  if (!out.estimable) {
    out.phiA = out.logPhiD = out.phiE = kInf;
    return out;
  }
  out.phiE = 0.0;
  for (std::size_t k = 0; k < info.blocks.size(); ++k) {
    const double sigma2 = info.sigma2s[k];
    const Eigen::VectorXd& zetas = info.blocks[k].positive_eigs;
    for (Eigen::Index w = 0; w < zetas.size(); ++w) {
      out.phiA += sigma2 / zetas[w];
      out.logPhiD += std::log(sigma2 / zetas[w]);
    }
    out.phiE = std::max(out.phiE, sigma2 / zetas[0]);
  }
  return out;
}

CriteriaValues criteria(const Design& d, const StudyConfig& cfg,
                        const Tolerances& tol) {
  return criteria_from_info(info_matrix(d, cfg, tol));
}

EfficiencyValues efficiency(const Design& d0, const Design& ref,
                            const StudyConfig& cfg, const Tolerances& tol) {
  if (d0.t != ref.t || d0.p() != ref.p() || d0.n() != ref.n())
    throw ValidationError("efficiency: designs must share t, p and n");
  const CriteriaValues ref_vals = criteria(ref, cfg, tol);
  if (!ref_vals.estimable)
    throw DegeneracyError("efficiency: reference design is not estimable");
  const CriteriaValues d0_vals = criteria(d0, cfg, tol);
  EfficiencyValues out;
  out.d0_estimable = d0_vals.estimable;
  if (!d0_vals.estimable) return out; // all-zero efficiencies
  out.effA = ref_vals.phiA / d0_vals.phiA;
  out.effD = std::exp(ref_vals.logPhiD - d0_vals.logPhiD);
  out.effE = ref_vals.phiE / d0_vals.phiE;
  return out;
}

StudyConfig config_with_r(const StudyConfig& cfg, double r) {
  StudyConfig out = cfg;
  for (auto& response : out.responses)
    if (response.cov.kind == CovKind::Ar1 ||
        response.cov.kind == CovKind::EquiCorr)
      response.cov.r = r;
  return out;
}

std::vector<double> make_r_grid(double r_min, double r_max, int steps) {
  if (steps < 1) throw ValidationError("make_r_grid: need steps >= 1");
  if (steps > 1 && !(r_max > r_min))
    throw ValidationError("make_r_grid: need r_max > r_min");
  std::vector<double> grid;
  const double step = steps > 1 ? (r_max - r_min) / (steps - 1) : 0.0;
  for (int i = 0; i < steps; ++i) {
    double r = r_min + i * step;
    r = std::round(r * 1e12) / 1e12 + 0.0; // snap fp dust, normalize -0
    grid.push_back(r);
  }
  return grid;
}

SweepResult sweep(const Design& d0, const Design& ref,
                  const StudyConfig& base_cfg, const std::vector<double>& r_grid,
                  const Tolerances& tol) {
  if (d0.t != ref.t || d0.p() != ref.p() || d0.n() != ref.n())
    throw ValidationError("sweep: designs must share t, p and n");
  if (!is_oa_type1_strength2(ref).is_oa)
    throw ValidationError("sweep: reference design must be an orthogonal "
                          "array of type I and strength 2");
  base_cfg.validate();

  std::vector<double> grid = r_grid;
  std::sort(grid.begin(), grid.end());

  SweepResult out;
  const int t = d0.t;
  for (double r : grid) {
    StudyConfig cfg = config_with_r(base_cfg, r);
    std::vector<Eigen::MatrixXd> vs;
    bool in_range = true;
    for (const auto& response : cfg.responses) {
      try {
        vs.push_back(build_cov(response.cov, d0.p(), tol));
      } catch (const ValidationError&) {
        in_range = false;
        break;
      }
    }
    if (!in_range) {
      ++out.summary.skipped;
      continue;
    }

    const CriteriaValues d0_vals = criteria(d0, cfg, tol);
    if (!d0_vals.estimable) {
      ++out.summary.skipped;
      continue;
    }

    // Reference criteria from the closed form in the as-displayed scale
    // convention: factor = det(Q) / q22 with the raw trace denominator, a
    // (t-1)-fold eigenvalue per response.
    double ref_phiA = 0.0, ref_logD = 0.0, ref_phiE = 0.0;
    for (std::size_t k = 0; k < cfg.responses.size(); ++k) {
      const auto [c_cf, q] = oa_closed_form(ref, vs[k], tol);
      (void)c_cf;
      const double factor = q.detQ / q.q22;
      const double sigma2 = cfg.responses[k].sigma2;
      ref_phiA += (t - 1) * sigma2 / factor;
      ref_logD += (t - 1) * std::log(sigma2 / factor);
      ref_phiE = std::max(ref_phiE, sigma2 / factor);
    }

    SweepRow row;
    row.r = r;
    row.effA = ref_phiA / d0_vals.phiA;
    row.effD = std::exp(ref_logD - d0_vals.logPhiD);
    row.effE = ref_phiE / d0_vals.phiE;
    out.rows.push_back(row);
  }

  for (const SweepRow& row : out.rows) {
    if (row.effA > out.summary.maxA) {
      out.summary.maxA = row.effA;
      out.summary.argmaxA = row.r;
    }
    if (row.effD > out.summary.maxD) {
      out.summary.maxD = row.effD;
      out.summary.argmaxD = row.r;
    }
    if (row.effE > out.summary.maxE) {
      out.summary.maxE = row.effE;
      out.summary.argmaxE = row.r;
    }
  }
  return out;
}

SearchResult exhaustive_search(int t, int n, const StudyConfig& cfg,
                               Criterion crit, std::uint64_t cap,
                               const Tolerances& tol) {
  cfg.validate();
  BinaryDesignEnumerator stream(t, n, cap);

  SearchResult result;
  result.criterion = crit;
  result.best_value = kInf;

  std::vector<Design> optima;
  constexpr std::size_t kChunk = 512;
  std::vector<Design> chunk;
  std::vector<double> values;
  chunk.reserve(kChunk);

  const int workers = worker_count();
  bool saw_any = false;
  while (true) {
    chunk.clear();
    while (chunk.size() < kChunk) {
      auto d = stream.next();
      if (!d) break;
      chunk.push_back(std::move(*d));
    }
    if (chunk.empty()) break;
    saw_any = true;

    values.assign(chunk.size(), kInf);
    parallel_indexed(chunk.size(), workers, [&](std::size_t i) {
      values[i] = criterion_value(criteria(chunk[i], cfg, tol), crit);
    });

    // Deterministic sequential reduction in enumeration order: the first
    // design attaining the optimum is the lexicographically smallest
    // serialized layout.
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      ++result.evaluated;
      const double v = values[i];
      if (!std::isfinite(v)) continue;
      if (!result.finite || (v < result.best_value && !tie_close(v, result.best_value))) {
        result.finite = true;
        result.best_value = v;
        optima.clear();
        optima.push_back(chunk[i]);
        result.best_design = chunk[i];
      } else if (tie_close(v, result.best_value)) {
        optima.push_back(chunk[i]);
      }
    }
  }
  if (!saw_any)
    throw ValidationError("exhaustive_search: empty enumeration");

  for (const Design& d : optima)
    result.optima_set.push_back(serialize_design(d));
  std::sort(result.optima_set.begin(), result.optima_set.end());
  if (!result.finite) result.best_value = kInf;
  return result;
}

ExchangeOutcome exchange_local_search(const Design& start, const StudyConfig& cfg,
                                      Criterion crit, const Tolerances& tol) {
  if (start.p() != start.t)
    throw ValidationError("exchange_local_search: needs p = t");
  const auto perms = permutation_sequences(start.t);

  std::vector<std::vector<int>> cols(start.n());
  for (int j = 0; j < start.n(); ++j) {
    cols[j].resize(start.p());
    for (int i = 0; i < start.p(); ++i) cols[j][i] = start.layout(i, j);
  }

  ExchangeOutcome out;
  auto evaluate = [&](const std::vector<std::vector<int>>& c) {
    ++out.evaluated;
    return criterion_value(criteria(design_from_columns(start.t, c), cfg, tol),
                           crit);
  };

  double current = evaluate(cols);
  bool improved = true;
  while (improved) {
    improved = false;
    for (int j = 0; j < start.n(); ++j) {
      const std::vector<int> keep = cols[j];
      double best_v = current;
      std::vector<int> best_col = keep;
      for (const auto& candidate : perms) {
        if (candidate == keep) continue;
        cols[j] = candidate;
        const double v = evaluate(cols);
        // Strict improvement only; a tie never moves, so orthogonal-array
        // optima are fixed points.
        if (v < best_v && !tie_close(v, best_v)) {
          best_v = v;
          best_col = candidate;
        }
      }
      cols[j] = best_col;
      if (best_col != keep) {
        current = best_v;
        ++out.exchanges;
        improved = true;
      }
    }
  }
  out.design = sort_columns(design_from_columns(start.t, cols));
  out.value = current;
  return out;
}

SearchResult exchange_search(int t, int n, const StudyConfig& cfg, Criterion crit,
                             int restarts, std::uint64_t seed,
                             const Tolerances& tol) {
  cfg.validate();
  if (restarts < 1) throw ValidationError("exchange_search: need restarts >= 1");
  const auto perms = permutation_sequences(t);
  std::mt19937_64 rng(seed);

  SearchResult result;
  result.criterion = crit;
  result.best_value = kInf;
  std::set<std::string> optima;

  for (int rs = 0; rs < restarts; ++rs) {
    std::vector<std::vector<int>> cols(n);
    for (int j = 0; j < n; ++j)
      cols[j] = perms[rng() % perms.size()];
    ExchangeOutcome local =
        exchange_local_search(design_from_columns(t, cols), cfg, crit, tol);
    result.evaluated += local.evaluated;
    if (!std::isfinite(local.value)) continue;
    if (!result.finite ||
        (local.value < result.best_value && !tie_close(local.value, result.best_value))) {
      result.finite = true;
      result.best_value = local.value;
      optima.clear();
      optima.insert(serialize_design(local.design));
    } else if (tie_close(local.value, result.best_value)) {
      optima.insert(serialize_design(local.design));
    }
  }

  result.optima_set.assign(optima.begin(), optima.end());
  if (result.finite)
    result.best_design = parse_design(result.optima_set.front(), t);
  return result;
}

} // namespace xover
