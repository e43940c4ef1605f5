#include "gibbsfit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "gibbsfit/errors.hpp"
#include "gibbsfit/io.hpp"
#include "gibbsfit/parallel.hpp"
#include "gibbsfit/rng.hpp"
#include "gibbsfit/thermo.hpp"

namespace gibbsfit {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// thresholds pinned from the verification targets
constexpr double kRateLimitTol = 0.03;        // |-(1/n) log Z_n - min V| at n_max
constexpr double kOutsideMassMax = 0.05;      // posterior mass off the target
constexpr double kBiteTol = 0.05;             // |(1/n) log pi_n(target)|
constexpr double kHiddenMassMin = 0.9;        // mass within one grid step of the class
constexpr double kSplitTol = 1e-6;            // duplicate-point mass ratio vs prior ratio
constexpr double kZeroLimitTol = 1e-12;

std::size_t min_passing_replicates(std::size_t replicates) {
  // 7-of-8 allowance, scaled to the configured replicate count
  if (replicates <= 1) return replicates;
  return replicates - std::max<std::size_t>(1, replicates / 8);
}

struct Inputs {
  SftPtr sft;  // may be null
  std::optional<PotentialFamily> family;
  std::optional<LossSpec> loss;
};

Inputs load_inputs(const ScenarioConfig& cfg) {
  Inputs in;
  if (!cfg.sft_file.empty()) in.sft = io::load_sft_file(cfg.sft_file);
  in.family = io::load_family_file(cfg.family_file, in.sft);
  if (!cfg.loss_file.empty()) in.loss = io::load_loss_file(cfg.loss_file);
  return in;
}

std::size_t theta_star_index(const ScenarioConfig& cfg, const PotentialFamily& family) {
  if (!cfg.theta_star) {
    throw ConfigError("theta_star: required for scenario " + to_string(cfg.scenario));
  }
  const auto idx = family.grid().index_of(*cfg.theta_star, 1e-9);
  if (!idx) throw ConfigError("theta_star: not a grid point");
  return *idx;
}

// identifiability class: identical potential tables, and identical emission
// rows when an observation map is in play
std::vector<std::size_t> identity_class_of(const PotentialFamily& family,
                                           const LossSpec* loss, std::size_t star) {
  std::vector<std::size_t> cls;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const bool same_f = family.potential(i).identical_table(family.potential(star));
    const bool same_emission = loss == nullptr || loss->rows_identical(i, star);
    if (same_f && same_emission) cls.push_back(i);
  }
  return cls;
}

std::vector<std::uint64_t> replicate_seeds(const ScenarioConfig& cfg) {
  CounterRng master(cfg.seed);
  std::vector<std::uint64_t> seeds;
  seeds.reserve(cfg.replicates);
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    seeds.push_back(master.derive("replicate").derive(r).key());
  }
  return seeds;
}

std::string rep_name(std::size_t r, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "rep%02zu_%s.csv", r, suffix);
  return buf;
}

class CheckSet {
public:
  void add(std::string name, bool pass, double value, double threshold, std::string detail = "") {
    rows_.push_back({std::move(name), pass, value, threshold, std::move(detail)});
  }
  bool all_pass() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const CheckRow& c) { return c.pass; });
  }
  std::vector<CheckRow> take() { return std::move(rows_); }

private:
  std::vector<CheckRow> rows_;
};

void write_summary(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                   const ScenarioResult& result) {
  json j;
  j["scenario"] = to_string(cfg.scenario);
  j["seed"] = cfg.seed;
  j["beta"] = cfg.beta;
  j["replicates"] = cfg.replicates;
  j["n_schedule"] = cfg.n_schedule;
  j["pass"] = result.pass;
  json checks = json::array();
  for (const CheckRow& c : result.checks) {
    json row;
    row["name"] = c.name;
    row["pass"] = c.pass;
    row["value"] = c.value;
    row["threshold"] = c.threshold;
    if (!c.detail.empty()) row["detail"] = c.detail;
    checks.push_back(std::move(row));
  }
  j["checks"] = std::move(checks);
  json tmin = json::array();
  for (std::size_t i : result.theta_min_set) {
    tmin.push_back(result.rates.theta.empty() ? static_cast<double>(i) : result.rates.theta[i]);
  }
  j["theta_min"] = std::move(tmin);
  std::ofstream out(dir / "summary.json", std::ios::binary);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// direct observations: pi_n from exp(-beta ell_n), Bayes from cylinders,
// rates from the loss-weighted observed-cylinder partition function
// ---------------------------------------------------------------------------
ScenarioResult run_direct(const ScenarioConfig& cfg, const RunOptions& opt, Inputs& in,
                          const std::filesystem::path& outdir) {
  PotentialFamily& family = *in.family;
  const std::size_t star = theta_star_index(cfg, family);
  const std::vector<std::size_t> target = identity_class_of(family, nullptr, star);
  const std::size_t n_max = cfg.n_schedule.back();
  const auto range = static_cast<std::size_t>(family.range());
  const std::vector<std::uint64_t> seeds = replicate_seeds(cfg);

  // uniform Gibbs constant over the family, from the audit
  double K = 1.0;
  GibbsAuditReport worst_audit;
  for (std::size_t i = 0; i < family.size(); ++i) {
    GibbsAuditReport rep = gibbs_constant_audit(family.model(i), cfg.audit_depth);
    if (rep.K >= K) {
      K = rep.K;
      worst_audit = rep;
    }
  }
  const io::RunHeader header{cfg.seed, to_string(cfg.scenario), cfg.beta, family.grid().hash()};
  io::write_audit_csv(outdir / "audit.csv", header, worst_audit);

  CheckSet checks;
  std::size_t concentrated = 0;
  double worst_bite = 0.0;
  double worst_rate_err = 0.0;
  double worst_sandwich = kNegInf;
  bool sandwich_ok = true;
  bool consistency_ok = true;

  std::vector<std::vector<double>> v_hat_samples(family.size());
  std::vector<std::size_t> first_n_below;  // earliest scheduled n with outside mass under the bar
  double v_closed_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.size(); ++i) {
    v_closed_min = std::min(v_closed_min, rate_closed_form_direct(family, i, star));
  }

  for (std::size_t r = 0; r < seeds.size(); ++r) {
    const Trajectory y = sample_trajectory(family.model(star), n_max + range - 1, seeds[r]);
    if (cfg.dump_observations) io::write_trajectory_csv(outdir / rep_name(r, "observations"), y);

    std::vector<PosteriorGrid> per_n;
    per_n.reserve(cfg.n_schedule.size());
    for (std::size_t n : cfg.n_schedule) {
      PosteriorGrid pi_n = gibbs_posterior_direct(family, y.symbols, n, cfg.beta);
      // the K^2 sandwich pairs the Bayes posterior with the beta = 1 weights
      const PosteriorGrid bayes_n = bayes_posterior_direct(family, y.symbols, n);
      const PosteriorGrid unit_n = cfg.beta == 1.0
                                       ? pi_n
                                       : gibbs_posterior_direct(family, y.symbols, n, 1.0);
      const SandwichResult sw = k2_sandwich_check(unit_n, bayes_n, K);
      sandwich_ok = sandwich_ok && sw.holds;
      worst_sandwich = std::max(worst_sandwich, sw.max_excess);
      consistency_ok = consistency_ok && rate_consistency_check(pi_n);
      per_n.push_back(std::move(pi_n));
    }
    const std::vector<ConcentrationRow> conc = concentration_report(per_n, target, cfg.radius);
    io::write_posterior_csv(outdir / rep_name(r, "posteriors"), header, per_n);
    io::write_concentration_csv(outdir / rep_name(r, "concentration"), header, conc);

    if (conc.back().outside_mass < kOutsideMassMax) ++concentrated;
    for (const ConcentrationRow& row : conc) {
      if (row.outside_mass < kOutsideMassMax) {
        first_n_below.push_back(row.n);
        break;
      }
    }
    worst_bite = std::max(worst_bite, std::abs(conc.back().target_mass_rate));

    // per-theta partition functions of the direct scenario at n_max
    std::vector<double> rate_weights(family.size());
    parallel_for(family.size(), opt.threads, [&](std::size_t i) {
      rate_weights[i] = log_partition_direct_constrained(family, i, y.symbols, n_max);
    });
    for (std::size_t i = 0; i < family.size(); ++i) {
      v_hat_samples[i].push_back(-rate_weights[i] / static_cast<double>(n_max));
    }
    PosteriorGrid rate_pg = assemble_posterior(family.grid(), n_max, std::move(rate_weights));
    consistency_ok = consistency_ok && rate_consistency_check(rate_pg);
    const double limit_hat = -rate_pg.log_Z / static_cast<double>(n_max);
    worst_rate_err = std::max(worst_rate_err, std::abs(limit_hat - v_closed_min));
  }

  // rate table across replicates
  RateTable rates;
  rates.n_used = n_max;
  rates.theta = family.grid().points();
  for (std::size_t i = 0; i < family.size(); ++i) {
    double mean = 0.0;
    for (double v : v_hat_samples[i]) mean += v;
    mean /= static_cast<double>(v_hat_samples[i].size());
    double var = 0.0;
    for (double v : v_hat_samples[i]) var += (v - mean) * (v - mean);
    const double nrep = static_cast<double>(v_hat_samples[i].size());
    rates.v_hat.push_back(mean);
    rates.std_error.push_back(nrep > 1 ? std::sqrt(var / (nrep - 1.0) / nrep) : 0.0);
    rates.v_closed.push_back(rate_closed_form_direct(family, i, star));
  }
  io::write_rate_csv(outdir / "rates.csv", header, rates);

  checks.add("partition_limit_abs_err", worst_rate_err <= kRateLimitTol, worst_rate_err,
             kRateLimitTol, "max over replicates of |-(1/n) log Z_n - min V_closed|");
  const std::size_t need = min_passing_replicates(cfg.replicates);
  std::string seen_n = "first n under the bar:";
  for (std::size_t n : first_n_below) seen_n += " " + std::to_string(n);
  checks.add("concentration_seats", concentrated >= need, static_cast<double>(concentrated),
             static_cast<double>(need),
             "replicates with outside mass < " + io::format_double(kOutsideMassMax) + "; " +
                 seen_n);
  checks.add("k2_sandwich", sandwich_ok, worst_sandwich, 0.0,
             "max |log Pi - log pi| - 2 log K over logged n");
  checks.add("take_a_bite", worst_bite <= kBiteTol, worst_bite, kBiteTol,
             "max |(1/n) log pi_n(target)| at n_max");
  checks.add("rate_consistency", consistency_ok, consistency_ok ? 1.0 : 0.0, 1.0,
             "logsumexp bracket of -(1/n) log Z_n at every n");

  ScenarioResult result;
  result.rates = std::move(rates);
  result.theta_min_set = theta_min(result.rates);
  result.checks = checks.take();
  result.pass = std::all_of(result.checks.begin(), result.checks.end(),
                            [](const CheckRow& c) { return c.pass; });
  result.output_dir = outdir;
  return result;
}

// ---------------------------------------------------------------------------
// hidden Gibbs: Gaussian emissions, posterior = Bayes posterior
// ---------------------------------------------------------------------------
ScenarioResult run_hidden(const ScenarioConfig& cfg, const RunOptions& opt, Inputs& in,
                          const std::filesystem::path& outdir) {
  PotentialFamily& family = *in.family;
  if (!in.loss || in.loss->kind() != LossKind::neg_log_density) {
    throw ConfigError("loss_file: hidden_gibbs requires a neg_log_density loss");
  }
  const LossSpec& loss = *in.loss;
  if (loss.grid_size() != family.size()) {
    throw ConfigError("loss_file: observation map rows do not match the family grid");
  }
  const std::size_t star = theta_star_index(cfg, family);
  const std::vector<std::size_t> target = identity_class_of(family, &loss, star);
  const std::size_t n_max = cfg.n_schedule.back();
  const std::vector<std::uint64_t> seeds = replicate_seeds(cfg);
  const io::RunHeader header{cfg.seed, to_string(cfg.scenario), cfg.beta, family.grid().hash()};

  CheckSet checks;
  std::size_t concentrated = 0;
  bool consistency_ok = true;
  double worst_split = 0.0;
  double min_inside = 1.0;
  std::vector<std::vector<double>> v_hat_samples(family.size());
  const double one_step = family.grid().step();

  for (std::size_t r = 0; r < seeds.size(); ++r) {
    const Trajectory hidden = sample_trajectory(family.model(star), n_max, seeds[r]);
    const EmissionSequence em =
        emit(hidden, loss, star, seeds[r], family.grid().point(star));
    if (cfg.dump_observations) io::write_emissions_csv(outdir / rep_name(r, "observations"), em);
    const std::vector<Observation> obs = to_observations(std::span<const double>(em.values));

    // one forward pass per theta reports every scheduled prefix
    std::vector<std::vector<double>> weights_by_theta(family.size());
    parallel_for(family.size(), opt.threads, [&](std::size_t i) {
      weights_by_theta[i] =
          log_partition_prefixes(family.model(i), loss, i, obs, cfg.n_schedule, cfg.beta);
    });
    std::vector<PosteriorGrid> per_n;
    for (std::size_t j = 0; j < cfg.n_schedule.size(); ++j) {
      std::vector<double> w(family.size());
      for (std::size_t i = 0; i < family.size(); ++i) w[i] = weights_by_theta[i][j];
      PosteriorGrid pg = assemble_posterior(family.grid(), cfg.n_schedule[j], std::move(w));
      consistency_ok = consistency_ok && rate_consistency_check(pg);
      per_n.push_back(std::move(pg));
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
      v_hat_samples[i].push_back(-per_n.back().log_weights[i] / static_cast<double>(n_max));
    }

    const std::vector<ConcentrationRow> conc =
        concentration_report(per_n, target, one_step + 1e-9);
    io::write_posterior_csv(outdir / rep_name(r, "posteriors"), header, per_n);
    io::write_concentration_csv(outdir / rep_name(r, "concentration"), header, conc);

    const double inside = 1.0 - conc.back().outside_mass;
    min_inside = std::min(min_inside, inside);
    if (inside > kHiddenMassMin) ++concentrated;

    // duplicated grid points with an identical law split mass by the prior
    const PosteriorGrid& last = per_n.back();
    if (target.size() >= 2) {
      for (std::size_t a = 0; a + 1 < target.size(); ++a) {
        const std::size_t i = target[a], j = target[a + 1];
        const double mass_ratio = last.masses[i] / last.masses[j];
        const double prior_ratio = last.prior[i] / last.prior[j];
        worst_split = std::max(worst_split, std::abs(mass_ratio - prior_ratio));
      }
    }
  }

  RateTable rates;
  rates.n_used = n_max;
  rates.theta = family.grid().points();
  for (std::size_t i = 0; i < family.size(); ++i) {
    double mean = 0.0;
    for (double v : v_hat_samples[i]) mean += v;
    mean /= static_cast<double>(v_hat_samples[i].size());
    double var = 0.0;
    for (double v : v_hat_samples[i]) var += (v - mean) * (v - mean);
    const double nrep = static_cast<double>(v_hat_samples[i].size());
    rates.v_hat.push_back(mean);
    rates.std_error.push_back(nrep > 1 ? std::sqrt(var / (nrep - 1.0) / nrep) : 0.0);
    rates.v_closed.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  io::write_rate_csv(outdir / "rates.csv", header, rates);

  const std::size_t need = min_passing_replicates(cfg.replicates);
  checks.add("class_mass_seats", concentrated >= need, static_cast<double>(concentrated),
             static_cast<double>(need),
             "replicates with mass within one grid step of the class > " +
                 io::format_double(kHiddenMassMin) + " (min inside " +
                 io::format_double(min_inside) + ")");
  if (target.size() >= 2) {
    checks.add("duplicate_split", worst_split <= kSplitTol, worst_split, kSplitTol,
               "|mass ratio - prior ratio| across identical-law grid points");
  }
  checks.add("rate_consistency", consistency_ok, consistency_ok ? 1.0 : 0.0, 1.0,
             "logsumexp bracket of -(1/n) log Z_n at every n");

  ScenarioResult result;
  result.rates = std::move(rates);
  result.theta_min_set = theta_min(result.rates);
  result.checks = checks.take();
  result.pass = std::all_of(result.checks.begin(), result.checks.end(),
                            [](const CheckRow& c) { return c.pass; });
  result.output_dir = outdir;
  return result;
}

// ---------------------------------------------------------------------------
// partition_limit / posterior_concentration / misspecified share a generic
// pipeline: observations -> per-n posteriors -> rates -> reports
// ---------------------------------------------------------------------------
struct ObservationSet {
  std::vector<Observation> obs;       // general-recursion input
  std::vector<Symbol> symbols;        // direct input (when symbolic)
  bool symbolic = false;
};

ObservationSet make_observations(const ScenarioConfig& cfg, const PotentialFamily& family,
                                 std::optional<std::size_t> star, std::size_t length,
                                 std::uint64_t seed, const LossSpec* loss) {
  // symbol streams feed real-valued losses through the identity reading
  const bool wants_real = loss != nullptr && loss->kind() != LossKind::discrete;
  ObservationSet out;
  auto adopt_symbols = [&](std::vector<Symbol> symbols) {
    out.symbols = std::move(symbols);
    out.symbolic = true;
    if (wants_real) {
      out.obs.reserve(out.symbols.size());
      for (Symbol s : out.symbols) out.obs.push_back(Observation::real(s));
    } else {
      out.obs = to_observations(std::span<const Symbol>(out.symbols));
    }
  };
  if (!cfg.source_name.empty()) {
    auto sample = misspecified_source(cfg.source_name, length, seed, cfg.source_params);
    if (std::holds_alternative<Trajectory>(sample)) {
      adopt_symbols(std::move(std::get<Trajectory>(sample).symbols));
    } else {
      const auto& em = std::get<EmissionSequence>(sample);
      out.obs = to_observations(std::span<const double>(em.values));
    }
    return out;
  }
  if (!star) throw ConfigError("theta_star: required when no misspecified source is named");
  adopt_symbols(sample_trajectory(family.model(*star), length, seed).symbols);
  return out;
}

ScenarioResult run_generic(const ScenarioConfig& cfg, const RunOptions& opt, Inputs& in,
                           const std::filesystem::path& outdir) {
  PotentialFamily& family = *in.family;
  const bool use_direct_loss = !in.loss.has_value();
  std::optional<std::size_t> star;
  if (cfg.theta_star) star = theta_star_index(cfg, family);

  const std::size_t n_max = cfg.n_schedule.back();
  const auto range = static_cast<std::size_t>(family.range());
  const std::size_t sample_len = use_direct_loss ? n_max + range - 1 : n_max;
  const std::vector<std::uint64_t> seeds = replicate_seeds(cfg);
  const io::RunHeader header{cfg.seed, to_string(cfg.scenario), cfg.beta, family.grid().hash()};

  CheckSet checks;
  bool consistency_ok = true;
  double worst_limit = 0.0;
  std::vector<std::vector<double>> v_hat_samples(family.size());
  std::vector<std::vector<PosteriorGrid>> all_runs;

  for (std::size_t r = 0; r < seeds.size(); ++r) {
    const ObservationSet data = make_observations(cfg, family, star, sample_len, seeds[r],
                                                  in.loss ? &*in.loss : nullptr);
    if (use_direct_loss && !data.symbolic) {
      throw ConfigError("loss_file: required when observations are real-valued");
    }

    std::vector<PosteriorGrid> per_n;
    for (std::size_t n : cfg.n_schedule) {
      PosteriorGrid pg =
          use_direct_loss
              ? gibbs_posterior_direct(family, data.symbols, n, cfg.beta)
              : gibbs_posterior(family, *in.loss, std::span<const Observation>(data.obs).subspan(0, n),
                                cfg.beta, opt.threads);
      consistency_ok = consistency_ok && rate_consistency_check(pg);
      per_n.push_back(std::move(pg));
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
      const double w = use_direct_loss
                           ? log_partition_direct_constrained(family, i, data.symbols, n_max)
                           : per_n.back().log_weights[i];
      v_hat_samples[i].push_back(-w / static_cast<double>(n_max));
    }
    worst_limit = std::max(worst_limit,
                           std::abs(-per_n.back().log_Z / static_cast<double>(n_max)));
    io::write_posterior_csv(outdir / rep_name(r, "posteriors"), header, per_n);
    all_runs.push_back(std::move(per_n));
  }

  RateTable rates;
  rates.n_used = n_max;
  rates.theta = family.grid().points();
  for (std::size_t i = 0; i < family.size(); ++i) {
    double mean = 0.0;
    for (double v : v_hat_samples[i]) mean += v;
    mean /= static_cast<double>(v_hat_samples[i].size());
    double var = 0.0;
    for (double v : v_hat_samples[i]) var += (v - mean) * (v - mean);
    const double nrep = static_cast<double>(v_hat_samples[i].size());
    rates.v_hat.push_back(mean);
    rates.std_error.push_back(nrep > 1 ? std::sqrt(var / (nrep - 1.0) / nrep) : 0.0);
    rates.v_closed.push_back(use_direct_loss && star
                                 ? rate_closed_form_direct(family, i, *star)
                                 : std::numeric_limits<double>::quiet_NaN());
  }
  io::write_rate_csv(outdir / "rates.csv", header, rates);

  ScenarioResult result;
  result.rates = rates;
  result.theta_min_set = theta_min(result.rates);

  // concentration toward theta_star's class when specified, else toward the
  // empirical argmin of the rate estimates
  std::vector<std::size_t> target =
      star ? identity_class_of(family, in.loss ? &*in.loss : nullptr, *star)
           : result.theta_min_set;
  std::size_t concentrated = 0;
  for (std::size_t r = 0; r < all_runs.size(); ++r) {
    const std::vector<ConcentrationRow> conc =
        concentration_report(all_runs[r], target, cfg.radius);
    io::write_concentration_csv(outdir / rep_name(r, "concentration"), header, conc);
    if (conc.back().outside_mass < kOutsideMassMax) ++concentrated;
  }

  checks.add("rate_consistency", consistency_ok, consistency_ok ? 1.0 : 0.0, 1.0,
             "logsumexp bracket of -(1/n) log Z_n at every n");
  if (cfg.expect_zero_limit) {
    checks.add("zero_limit", worst_limit <= kZeroLimitTol, worst_limit, kZeroLimitTol,
               "|-(1/n) log Z_n| with a loss that vanishes identically");
  }
  if (cfg.scenario == ScenarioKind::posterior_concentration) {
    const std::size_t need = min_passing_replicates(cfg.replicates);
    checks.add("concentration_seats", concentrated >= need, static_cast<double>(concentrated),
               static_cast<double>(need),
               "replicates with outside mass < " + io::format_double(kOutsideMassMax));
  }

  result.checks = checks.take();
  result.pass = std::all_of(result.checks.begin(), result.checks.end(),
                            [](const CheckRow& c) { return c.pass; });
  result.output_dir = outdir;
  return result;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::partition_limit: return "partition_limit";
    case ScenarioKind::posterior_concentration: return "posterior_concentration";
    case ScenarioKind::direct_gibbs: return "direct_gibbs";
    case ScenarioKind::hidden_gibbs: return "hidden_gibbs";
    case ScenarioKind::misspecified: return "misspecified";
  }
  return "?";
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(file);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }

  ScenarioConfig cfg;
  cfg.base_dir = path.parent_path();

  if (!j.contains("scenario")) throw ConfigError("scenario: field missing");
  const std::string name = j["scenario"].get<std::string>();
  if (name == "partition_limit") cfg.scenario = ScenarioKind::partition_limit;
  else if (name == "posterior_concentration") cfg.scenario = ScenarioKind::posterior_concentration;
  else if (name == "direct_gibbs") cfg.scenario = ScenarioKind::direct_gibbs;
  else if (name == "hidden_gibbs") cfg.scenario = ScenarioKind::hidden_gibbs;
  else if (name == "misspecified") cfg.scenario = ScenarioKind::misspecified;
  else throw ConfigError("scenario: unknown value '" + name + "'");

  auto resolve = [&](const std::string& key) -> std::filesystem::path {
    if (!j.contains(key)) return {};
    std::filesystem::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : cfg.base_dir / p;
  };
  cfg.sft_file = resolve("sft_file");
  cfg.family_file = resolve("family_file");
  cfg.loss_file = resolve("loss_file");
  if (cfg.family_file.empty()) throw ConfigError("family_file: field missing");

  if (j.contains("theta_star")) cfg.theta_star = j["theta_star"].get<double>();
  if ((cfg.scenario == ScenarioKind::direct_gibbs || cfg.scenario == ScenarioKind::hidden_gibbs) &&
      !cfg.theta_star) {
    throw ConfigError("theta_star: required for scenario " + name);
  }

  if (!j.contains("n_schedule")) throw ConfigError("n_schedule: field missing");
  cfg.n_schedule = j["n_schedule"].get<std::vector<std::size_t>>();
  if (cfg.n_schedule.empty()) throw ConfigError("n_schedule: must be non-empty");
  for (std::size_t i = 0; i + 1 < cfg.n_schedule.size(); ++i) {
    if (cfg.n_schedule[i] >= cfg.n_schedule[i + 1]) {
      throw ConfigError("n_schedule: must be strictly increasing");
    }
  }

  cfg.replicates = j.value("replicates", std::size_t{1});
  if (cfg.replicates < 1) throw ConfigError("replicates: must be >= 1");
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.beta = j.value("beta", 1.0);
  if (!(cfg.beta >= 0.0)) throw ConfigError("beta: must be >= 0");
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  cfg.radius = j.value("radius", 0.05);
  cfg.audit_depth = j.value("audit_depth", 8);
  cfg.expect_zero_limit = j.value("expect_zero_limit", false);
  cfg.dump_observations = j.value("dump_observations", false);

  if (j.contains("source")) {
    const json& s = j["source"];
    if (!s.contains("name")) throw ConfigError("source.name: field missing");
    cfg.source_name = s["name"].get<std::string>();
    if (s.contains("logistic_a")) cfg.source_params.logistic_a = s["logistic_a"].get<double>();
    if (s.contains("period")) cfg.source_params.period = s["period"].get<int>();
    if (s.contains("jitter")) cfg.source_params.jitter = s["jitter"].get<double>();
    if (s.contains("pattern")) cfg.source_params.pattern = s["pattern"].get<std::vector<double>>();
  }
  if (cfg.scenario == ScenarioKind::misspecified && cfg.source_name.empty()) {
    throw ConfigError("source.name: required for scenario misspecified");
  }
  return cfg;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  ScenarioConfig cfg = config;
  if (options.seed_override) cfg.seed = *options.seed_override;

  std::filesystem::path outdir = cfg.output_dir;
  if (const char* env = std::getenv(kOutputDirEnvVar); env != nullptr && *env != '\0') {
    outdir = env;
  }
  if (options.output_dir_override) outdir = *options.output_dir_override;
  std::filesystem::create_directories(outdir);

  Inputs in = load_inputs(cfg);

  ScenarioResult result;
  switch (cfg.scenario) {
    case ScenarioKind::direct_gibbs:
      result = run_direct(cfg, options, in, outdir);
      break;
    case ScenarioKind::hidden_gibbs:
      result = run_hidden(cfg, options, in, outdir);
      break;
    default:
      result = run_generic(cfg, options, in, outdir);
      break;
  }
  write_summary(outdir, cfg, result);
  return result;
}

ScenarioResult run_scenario_file(const std::filesystem::path& config_path,
                                 const RunOptions& options) {
  return run_scenario(load_scenario_config(config_path), options);
}

std::vector<std::string> validate_scenario_file(const std::filesystem::path& config_path) {
  std::vector<std::string> diags;
  ScenarioConfig cfg;
  try {
    cfg = load_scenario_config(config_path);
  } catch (const Error& e) {
    diags.emplace_back(e.what());
    return diags;
  }

  SftPtr sft;
  if (!cfg.sft_file.empty()) {
    try {
      sft = io::load_sft_file(cfg.sft_file);
    } catch (const NotMixing& e) {
      diags.push_back("sft_file " + cfg.sft_file.string() + ": is_mixing = false (" + e.what() + ")");
    } catch (const Error& e) {
      diags.push_back("sft_file " + cfg.sft_file.string() + ": " + e.what());
    }
  }

  std::optional<PotentialFamily> family;
  try {
    family = io::load_family_file(cfg.family_file, sft);
  } catch (const DomainError& e) {
    // a zero or negative prior weight lands here
    diags.push_back("family_file: " + std::string(e.what()) +
                    " (the prior must be fully supported)");
  } catch (const Error& e) {
    diags.push_back("family_file: " + std::string(e.what()));
  }

  if (family && family->size() >= 2) {
    try {
      const RegularityReport rep = regularity_report(*family);
      if (!std::isfinite(rep.modulus)) diags.push_back("family regularity modulus is not finite");
    } catch (const Error& e) {
      diags.push_back(std::string("regularity check: ") + e.what());
    }
  }

  if (!cfg.loss_file.empty()) {
    try {
      const LossSpec loss = io::load_loss_file(cfg.loss_file);
      if (family && loss.kind() != LossKind::discrete && loss.grid_size() != family->size()) {
        diags.push_back("loss_file: observation map rows do not match the family grid");
      }
    } catch (const Error& e) {
      diags.push_back("loss_file: " + std::string(e.what()));
    }
  }

  if (family && cfg.theta_star && !family->grid().index_of(*cfg.theta_star, 1e-9)) {
    diags.push_back("theta_star: not a grid point");
  }
  return diags;
}

}  // namespace gibbsfit
