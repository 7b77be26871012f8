#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <tuple>

#include "bicmp/chain.hpp"
#include "bicmp/cmp.hpp"
#include "bicmp/diagnostics.hpp"
#include "bicmp/io.hpp"
#include "bicmp/runner.hpp"
#include "bicmp/simgen.hpp"
#include "bicmp/version.hpp"

namespace py = pybind11;
using namespace bicmp;

namespace {

using GameTuple =
    std::tuple<std::string, std::string, std::string, std::int64_t,
               std::int64_t, std::string>;

std::vector<GameRecord> games_from_tuples(const std::vector<GameTuple>& rows) {
  std::vector<GameRecord> games;
  games.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& [season, home, away, y1, y2, phase_text] = rows[i];
    const auto phase = phase_from_string(phase_text);
    if (!phase)
      throw std::invalid_argument("row " + std::to_string(i) +
                                  ": unknown phase '" + phase_text + "'");
    GameRecord g;
    g.game_id = static_cast<std::int64_t>(i);
    g.season = season;
    g.home_team = home;
    g.away_team = away;
    g.home_score = y1;
    g.away_score = y2;
    g.phase = *phase;
    games.push_back(std::move(g));
  }
  return games;
}

std::vector<GameTuple> games_to_tuples(const std::vector<GameRecord>& games) {
  std::vector<GameTuple> rows;
  rows.reserve(games.size());
  for (const auto& g : games)
    rows.emplace_back(g.season, g.home_team, g.away_team, g.home_score,
                      g.away_score, to_string(g.phase));
  return rows;
}

mcmc::ModelKind kind_from_string(const std::string& model) {
  if (model == "cmp") return mcmc::ModelKind::cmp;
  if (model == "poisson") return mcmc::ModelKind::poisson;
  if (model == "nb") return mcmc::ModelKind::negative_binomial;
  throw std::invalid_argument("model must be one of cmp/poisson/nb");
}

py::dict fit_games(const std::vector<GameTuple>& rows, const std::string& model,
                   std::int64_t iterations, std::int64_t burn_in,
                   std::int64_t thin, int chains, std::uint64_t seed,
                   double beta_precision, double gamma_precision,
                   double wishart_df, double wishart_scale, bool pin_nu_one,
                   bool compute_dic, std::int64_t dic_r, long dic_samples) {
  const auto games = games_from_tuples(rows);
  const TeamRoster roster = TeamRoster::from_games(games);
  const DesignBundle design = build_design(games, roster);

  run::FitOptions opt;
  opt.kind = kind_from_string(model);
  opt.chain.n_iterations = iterations;
  opt.chain.burn_in = burn_in;
  opt.chain.thin = thin;
  opt.chain.n_chains = chains;
  opt.chain.seed = seed;
  opt.chain.pin_shape_to_poisson = pin_nu_one;
  opt.priors.beta_precision = beta_precision;
  opt.priors.gamma_precision = gamma_precision;
  opt.priors.wishart_df = wishart_df;
  opt.priors.wishart_scale = wishart_scale * Eigen::Matrix2d::Identity();
  opt.dic_r = dic_r;
  opt.dic_samples = dic_samples;
  opt.compute_dic = compute_dic;
  opt.compute_predictive = false;

  const run::FitResult result = run::run_fit(games, design, opt);
  const mcmc::PosteriorDraws pooled = run::pool_draws(result.chains);

  py::dict out;
  out["model"] = model;
  out["ha_before"] = result.ha.before;
  out["ha_during"] = result.ha.during;
  out["ha_after"] = result.ha.after;
  out["p_ha_during_lt_before"] = result.p_ha_during_lt_before;
  out["p_ha_during_lt_after"] = result.p_ha_during_lt_after;
  out["beta_home"] = pooled.beta_home;
  out["beta_away"] = pooled.beta_away;
  if (pooled.has_gamma()) {
    out["gamma_home"] = pooled.gamma_home;
    out["gamma_away"] = pooled.gamma_away;
  }
  out["cov_entries"] = pooled.cov_entries;
  if (pooled.nb_dispersion.size() > 0) out["nb_dispersion"] = pooled.nb_dispersion;
  out["column_names"] =
      mcmc::chain_column_names(pooled.kind, design, pooled.shape_pinned);
  out["design_columns"] = design.column_names;
  out["acceptance_rates"] = result.acceptance_rates;
  if (result.has_dic) {
    py::list dic;
    for (int j = 0; j < 2; ++j) {
      py::dict rep;
      rep["outcome"] = j == 0 ? "y1" : "y2";
      rep["mean_deviance"] = result.dic[j].mean_deviance;
      rep["deviance_at_mean"] = result.dic[j].deviance_at_mean;
      rep["effective_parameters"] = result.dic[j].effective_parameters;
      rep["dic"] = result.dic[j].dic;
      rep["estimator"] =
          result.dic[j].estimator == diag::DicReport::Estimator::exact
              ? "exact"
              : "unbiased_rejection";
      dic.append(rep);
    }
    out["dic"] = dic;
  }
  py::list summary;
  for (const auto& s : result.summaries) {
    py::dict row;
    row["name"] = s.name;
    row["mean"] = s.mean;
    row["sd"] = s.sd;
    row["q025"] = s.q025;
    row["q50"] = s.q50;
    row["q975"] = s.q975;
    row["ess"] = s.ess;
    row["psrf"] = s.psrf;
    summary.append(row);
  }
  out["summary"] = summary;
  return out;
}

}  // namespace

PYBIND11_MODULE(_bicmp, m) {
  m.doc() = "Bayesian bivariate Conway-Maxwell-Poisson regression";
  m.attr("__version__") = kVersion;

  py::class_<cmp::CmpParams>(m, "CmpParams")
      .def(py::init<double, double>(), py::arg("mu"), py::arg("nu"))
      .def_readonly("mu", &cmp::CmpParams::mu)
      .def_readonly("nu", &cmp::CmpParams::nu)
      .def("__repr__", [](const cmp::CmpParams& p) {
        return "CmpParams(mu=" + std::to_string(p.mu) +
               ", nu=" + std::to_string(p.nu) + ")";
      });

  m.def(
      "log_kernel",
      [](std::int64_t y, double mu, double nu) {
        return cmp::log_kernel(y, cmp::CmpParams(mu, nu));
      },
      py::arg("y"), py::arg("mu"), py::arg("nu"));
  m.def(
      "log_normalizing_constant",
      [](double mu, double nu, double rel_tol) {
        return cmp::log_normalizing_constant(cmp::CmpParams(mu, nu), rel_tol);
      },
      py::arg("mu"), py::arg("nu"), py::arg("rel_tol") = 1e-12);
  m.def(
      "approx_mean",
      [](double mu, double nu) { return cmp::approx_mean({mu, nu}); },
      py::arg("mu"), py::arg("nu"));
  m.def(
      "approx_variance",
      [](double mu, double nu) { return cmp::approx_variance({mu, nu}); },
      py::arg("mu"), py::arg("nu"));
  m.def(
      "pmf",
      [](std::int64_t y, double mu, double nu) {
        return cmp::pmf_oracle(y, cmp::CmpParams(mu, nu));
      },
      py::arg("y"), py::arg("mu"), py::arg("nu"));
  m.def(
      "sample",
      [](double mu, double nu, long n, std::uint64_t seed) {
        const cmp::CmpSampler sampler(cmp::CmpParams(mu, nu));
        Rng rng = make_rng(seed);
        Eigen::VectorXi draws(n);
        for (long i = 0; i < n; ++i)
          draws(i) = static_cast<int>(sampler.draw(rng));
        return draws;
      },
      py::arg("mu"), py::arg("nu"), py::arg("n") = 1, py::arg("seed") = 0,
      "Exact CMP draws via the two-envelope rejection sampler");

  m.def("table1_strengths", [] {
    const auto t = sim::table1_strengths();
    py::dict out;
    out["attack_home"] = t.attack_home;
    out["defense_home"] = t.defense_home;
    out["attack_away"] = t.attack_away;
    out["defense_away"] = t.defense_away;
    return out;
  });
  m.def("shape_strengths", [] { return sim::shape_strengths(); });
  m.def(
      "simulate_league",
      [](const std::string& scenario, int n_seasons, std::uint64_t seed,
         double beta_h, double beta_a) {
        sim::ScenarioSpec spec;
        const auto parsed = sim::dispersion_from_string(scenario);
        if (!parsed)
          throw std::invalid_argument("scenario must be equi/over/under");
        spec.dispersion = *parsed;
        spec.n_seasons = n_seasons;
        spec.seed = seed;
        spec.beta_h = beta_h;
        spec.beta_a = beta_a;
        return games_to_tuples(sim::generate_seasons(spec));
      },
      py::arg("scenario") = "equi", py::arg("n_seasons") = 1,
      py::arg("seed") = 1, py::arg("beta_h") = 0.6, py::arg("beta_a") = 0.1,
      "Synthetic league games as (season, home, away, home_score, away_score, "
      "phase) tuples");

  m.def(
      "parse_games",
      [](const std::string& path) {
        return games_to_tuples(io::parse_games(path));
      },
      py::arg("path"));

  m.def("fit", &fit_games, py::arg("games"), py::arg("model") = "cmp",
        py::arg("iterations") = 30000, py::arg("burn_in") = 10000,
        py::arg("thin") = 1, py::arg("chains") = 1, py::arg("seed") = 1,
        py::arg("beta_precision") = 0.1, py::arg("gamma_precision") = 0.1,
        py::arg("wishart_df") = 50.0, py::arg("wishart_scale") = 1.0,
        py::arg("pin_nu_one") = false, py::arg("compute_dic") = false,
        py::arg("dic_r") = 1000, py::arg("dic_samples") = 100,
        "Fit the CMP model (Exchange MCMC) or a Poisson/NB baseline and "
        "return posterior draws, home-advantage functionals and summaries");

  m.def(
      "psrf",
      [](const std::vector<Eigen::MatrixXd>& chains) {
        return diag::psrf(chains);
      },
      py::arg("chains"),
      "Multivariate potential scale reduction factor across chains");
  m.def(
      "ess", [](const Eigen::VectorXd& chain) { return diag::ess(chain); },
      py::arg("chain"));
  m.def(
      "spearman",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return diag::spearman(x, y);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "anova_oneway",
      [](const std::vector<double>& values, const std::vector<int>& groups) {
        const auto res = diag::anova_oneway(values, groups);
        py::dict out;
        out["f_stat"] = res.f_stat;
        out["p_value"] = res.p_value;
        out["df_between"] = res.df_between;
        out["df_within"] = res.df_within;
        out["valid"] = res.valid;
        return out;
      },
      py::arg("values"), py::arg("groups"));
  m.def(
      "rootogram_data",
      [](const Eigen::VectorXd& observed, const Eigen::VectorXd& expected) {
        const auto rows = diag::rootogram_data(observed, expected);
        Eigen::MatrixXd out(static_cast<long>(rows.size()), 3);
        for (size_t r = 0; r < rows.size(); ++r)
          out.row(static_cast<long>(r))
              << static_cast<double>(rows[r].count),
              rows[r].sqrt_expected, rows[r].bar_bottom;
        return out;
      },
      py::arg("observed"), py::arg("expected"),
      "Rows of (count, sqrt_expected, bar_bottom)");
  m.def(
      "dispersion_stat",
      [](const std::vector<GameTuple>& rows, int outcome) {
        const auto games = games_from_tuples(rows);
        const TeamRoster roster = TeamRoster::from_games(games);
        const DesignBundle design = build_design(games, roster);
        return diag::dispersion_stat(games, design, outcome);
      },
      py::arg("games"), py::arg("outcome") = 0,
      "Pearson dispersion statistic of a fixed-effect Poisson fit");
}
