#include <doctest.h>

#include <cmath>
#include <random>

#include "bicmp/diagnostics.hpp"
#include "bicmp/distributions.hpp"
#include "bicmp/simgen.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace bicmp;
using mcmc::ModelKind;
using mcmc::PosteriorDraws;

namespace {

// Minimal hand-built Poisson draws for one A-vs-B game: every draw has
// mu_home = mu_away = mu and b = 0.
PosteriorDraws constant_poisson_draws(const DesignBundle& design, double mu,
                                      long n_draws) {
  PosteriorDraws d;
  d.kind = ModelKind::poisson;
  const int p = design.n_cols();
  d.beta_home = Eigen::MatrixXd::Zero(n_draws, p);
  d.beta_away = Eigen::MatrixXd::Zero(n_draws, p);
  d.beta_home.col(design.intercept_col).setConstant(std::log(mu));
  d.beta_away.col(design.intercept_col).setConstant(std::log(mu));
  d.cov_entries = Eigen::MatrixXd::Zero(n_draws, 3);
  d.cov_entries.col(0).setConstant(1.0);
  d.cov_entries.col(2).setConstant(1.0);
  d.random_effects = Eigen::MatrixXd::Zero(n_draws, 2 * design.n_games());
  for (long r = 0; r < n_draws; ++r) d.random_effect_rows.push_back(r);
  d.n_iterations = n_draws;
  d.thin = 1;
  return d;
}

std::vector<GameRecord> one_game(long y1, long y2) {
  GameRecord g;
  g.home_team = "A";
  g.away_team = "B";
  g.home_score = y1;
  g.away_score = y2;
  return {g};
}

}  // namespace

TEST_CASE("dic_exact: degenerate chain has zero effective parameters") {
  const auto games = one_game(2, 1);
  const auto design = build_design(games, TeamRoster({"A", "B"}));
  const auto draws = constant_poisson_draws(design, 2.0, 5);
  const auto reports = diag::dic_exact(draws, games, design, ModelKind::poisson);
  CHECK(reports[0].effective_parameters == doctest::Approx(0.0).epsilon(1e-12));
  const double expected = -2.0 * oracle::poisson_logpmf(2, 2.0);
  CHECK(reports[0].dic == doctest::Approx(expected).epsilon(1e-10));
  CHECK(reports[0].mean_deviance + reports[0].effective_parameters ==
        doctest::Approx(reports[0].dic));
  CHECK(reports[1].dic ==
        doctest::Approx(-2.0 * oracle::poisson_logpmf(1, 2.0)).epsilon(1e-10));
}

TEST_CASE("dic_exact rejects intractable or mismatched draw kinds") {
  const auto games = one_game(2, 1);
  const auto design = build_design(games, TeamRoster({"A", "B"}));
  auto draws = constant_poisson_draws(design, 2.0, 5);
  CHECK_THROWS_AS(diag::dic_exact(draws, games, design, ModelKind::cmp),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      diag::dic_exact(draws, games, design, ModelKind::negative_binomial),
      std::invalid_argument);
  draws.kind = ModelKind::cmp;
  draws.shape_pinned = false;
  CHECK_THROWS_AS(diag::dic_exact(draws, games, design, ModelKind::poisson),
                  std::invalid_argument);
}

TEST_CASE("dic_cmp equals dic_exact when the shape is pinned at one") {
  const auto games = testutil::make_poisson_league(50, 51);
  const TeamRoster roster = TeamRoster::from_games(games);
  const auto design = build_design(games, roster);
  PriorSpec priors;
  mcmc::ChainConfig cfg;
  cfg.n_iterations = 1500;
  cfg.burn_in = 500;
  cfg.seed = 52;
  cfg.pin_shape_to_poisson = true;
  const auto draws =
      mcmc::run_chain(ModelKind::cmp, games, design, priors, cfg, 0);

  const auto exact = diag::dic_exact(draws, games, design, ModelKind::poisson);
  const auto estimated = diag::dic_cmp(draws, games, design, 1000, 1000, 53);
  for (int j = 0; j < 2; ++j) {
    CHECK(estimated[j].estimator ==
          diag::DicReport::Estimator::unbiased_rejection);
    CHECK(estimated[j].n_posterior_samples_used ==
          exact[j].n_posterior_samples_used);
    CHECK(estimated[j].dic == doctest::Approx(exact[j].dic).epsilon(1e-9));
    CHECK(estimated[j].mean_deviance ==
          doctest::Approx(exact[j].mean_deviance).epsilon(1e-9));
  }
  CHECK_THROWS_AS(diag::dic_cmp(draws, games, design, 1, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("rejection trial counts follow the negative binomial identity") {
  // estimator building block: E[M] = r / p; (M-1)/(r-1) is finite at r = 2
  const double mu = 3.0, nu = 0.5;
  const cmp::CmpSampler sampler(cmp::CmpParams(mu, nu));
  const double p = std::exp(
      cmp::log_normalizing_constant(cmp::CmpParams(mu, nu), 1e-13) -
      sampler.envelope_log_bound() - sampler.envelope_log_norm());
  Rng rng = make_rng(54);
  const long reps = 20000;
  const std::int64_t r = 2;
  double sum_est = 0.0;
  double sum_m = 0.0;
  for (long k = 0; k < reps; ++k) {
    const auto m = sampler.attempts_for_acceptances(r, rng);
    REQUIRE(m >= r);
    const double est = static_cast<double>(m - 1) / static_cast<double>(r - 1);
    REQUIRE(std::isfinite(est));
    sum_est += est;
    sum_m += static_cast<double>(m);
  }
  const double mean_m = sum_m / reps;
  // Var(M) = r (1-p) / p^2 for the trials-until-r-th-acceptance count
  const double se_m = std::sqrt(r * (1.0 - p) / (p * p) / reps);
  CHECK(std::abs(mean_m - r / p) < 3.0 * se_m);
  CHECK(sum_est / reps > 0.0);
}

TEST_CASE("psrf behavior") {
  Rng rng = make_rng(55);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd chain(500, 2);
  for (long i = 0; i < 500; ++i) {
    chain(i, 0) = normal(rng);
    chain(i, 1) = normal(rng) * 2.0;
  }
  SUBCASE("identical chains stay at (n-1)/n") {
    const double r = diag::psrf({chain, chain, chain});
    CHECK(r == doctest::Approx(499.0 / 500.0).epsilon(1e-9));
    CHECK(r <= 1.0);
  }
  SUBCASE("separated chains blow past 1.2") {
    Eigen::MatrixXd shifted = chain;
    shifted.col(0).array() += 10.0;
    CHECK(diag::psrf({chain, shifted}) > 1.2);
  }
  SUBCASE("matched-distribution chains stay near one") {
    Eigen::MatrixXd other(500, 2);
    for (long i = 0; i < 500; ++i) {
      other(i, 0) = normal(rng);
      other(i, 1) = normal(rng) * 2.0;
    }
    const double r = diag::psrf({chain, other});
    CHECK(r < 1.1);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(diag::psrf({chain}), std::invalid_argument);
    Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(500, 2);
    CHECK_THROWS_AS(diag::psrf({constant, constant}), std::runtime_error);
  }
}

TEST_CASE("ess behavior") {
  Rng rng = make_rng(56);
  std::normal_distribution<double> normal(0.0, 1.0);
  SUBCASE("white noise is close to n") {
    const long n = 10000;
    Eigen::VectorXd chain(n);
    for (long i = 0; i < n; ++i) chain(i) = normal(rng);
    const double e = diag::ess(chain);
    CHECK(e >= 0.8 * n);
    CHECK(e <= 1.2 * n);
    CHECK(e <= n);  // capped at the chain length
  }
  SUBCASE("AR(1) with coefficient 0.9") {
    const long n = 50000;
    Eigen::VectorXd chain(n);
    double x = 0.0;
    for (long i = 0; i < n; ++i) {
      x = 0.9 * x + normal(rng);
      chain(i) = x;
    }
    const double expected = n * (1.0 - 0.9) / (1.0 + 0.9);
    const double e = diag::ess(chain);
    CHECK(std::abs(e - expected) < 0.3 * expected);
  }
  SUBCASE("constant chain reports zero") {
    CHECK(diag::ess(Eigen::VectorXd::Ones(100)) == 0.0);
  }
}

TEST_CASE("posterior predictive frequencies") {
  // 2000 copies of the same matchup, identical draws: predictive marginal is
  // a lognormal-mixed Poisson; compare against a direct simulation.
  std::vector<GameRecord> games;
  for (int i = 0; i < 2000; ++i) {
    GameRecord g;
    g.home_team = "A";
    g.away_team = "B";
    g.home_score = 1;
    g.away_score = 0;
    games.push_back(g);
  }
  const auto design = build_design(games, TeamRoster({"A", "B"}));
  PosteriorDraws draws;
  draws.kind = ModelKind::cmp;
  draws.shape_pinned = true;
  const int p = design.n_cols();
  const long n_draws = 500;
  draws.beta_home = Eigen::MatrixXd::Zero(n_draws, p);  // mu = 1
  draws.beta_away = Eigen::MatrixXd::Zero(n_draws, p);
  draws.cov_entries = Eigen::MatrixXd::Zero(n_draws, 3);
  draws.cov_entries.col(0).setConstant(0.09);
  draws.cov_entries.col(1).setConstant(0.03);
  draws.cov_entries.col(2).setConstant(0.09);
  draws.random_effects = Eigen::MatrixXd::Zero(1, 2 * design.n_games());
  draws.random_effect_rows.push_back(0);

  const auto pred = diag::posterior_predictive(draws, design, 77, 500);
  CHECK(pred.expected_home.sum() == doctest::Approx(design.n_games()).epsilon(1e-12));
  CHECK(pred.expected_away.sum() == doctest::Approx(design.n_games()).epsilon(1e-12));

  // direct oracle simulation of the same mixture
  Rng rng = make_rng(78);
  std::normal_distribution<double> normal(0.0, 1.0);
  const long reps = 1000000;
  std::vector<double> oracle_freq;
  for (long i = 0; i < reps; ++i) {
    const double b = 0.3 * normal(rng);
    std::poisson_distribution<long> pois(std::exp(b));
    const long y = pois(rng);
    if (static_cast<long>(oracle_freq.size()) <= y) oracle_freq.resize(y + 1, 0.0);
    oracle_freq[y] += 1.0;
  }
  double tv = 0.0;
  const long len = std::max<long>(oracle_freq.size(), pred.expected_home.size());
  for (long k = 0; k < len; ++k) {
    const double a =
        k < static_cast<long>(oracle_freq.size()) ? oracle_freq[k] / reps : 0.0;
    const double b = k < pred.expected_home.size()
                         ? pred.expected_home(k) / design.n_games()
                         : 0.0;
    tv += std::abs(a - b);
  }
  CHECK(tv / 2.0 < 0.01);
}

TEST_CASE("rootogram identities") {
  Eigen::VectorXd observed(4), expected(4);
  observed << 4.0, 9.0, 1.0, 0.0;
  SUBCASE("perfect fit bottoms out at zero") {
    const auto rows = diag::rootogram_data(observed, observed);
    for (const auto& r : rows) CHECK(r.bar_bottom == doctest::Approx(0.0));
  }
  SUBCASE("zero observed leaves the bar at the curve") {
    expected << 4.0, 9.0, 1.0, 2.25;
    const auto rows = diag::rootogram_data(observed, expected);
    CHECK(rows[3].bar_bottom == doctest::Approx(1.5));
    // reconstruction: sqrt(observed) = curve - bottom
    for (long k = 0; k < 4; ++k)
      CHECK(rows[k].sqrt_expected - rows[k].bar_bottom ==
            doctest::Approx(std::sqrt(observed(k))));
  }
  SUBCASE("grids must agree") {
    Eigen::VectorXd shorter(2);
    shorter << 1.0, 2.0;
    CHECK_THROWS_AS(diag::rootogram_data(observed, shorter),
                    std::invalid_argument);
  }
}

TEST_CASE("index of dispersion cells") {
  std::vector<GameRecord> games;
  for (int i = 0; i < 4; ++i) {
    GameRecord g;
    g.home_team = "A";
    g.away_team = "B";
    g.home_score = 3;  // constant
    g.away_score = i;  // varying
    games.push_back(g);
  }
  GameRecord single;
  single.home_team = "B";
  single.away_team = "A";
  single.home_score = 1;
  single.away_score = 0;
  games.push_back(single);

  const auto summary = diag::index_of_dispersion(games, 0);
  bool found_ab = false, found_ba = false;
  for (const auto& cell : summary.cells) {
    if (cell.home_team == "A" && cell.away_team == "B") {
      found_ab = true;
      REQUIRE(cell.index.has_value());
      CHECK(*cell.index == doctest::Approx(0.0));  // constant counts
      CHECK(cell.n_observations == 4);
    }
    if (cell.home_team == "B" && cell.away_team == "A") {
      found_ba = true;
      CHECK_FALSE(cell.index.has_value());  // a single observation is flagged
    }
  }
  CHECK(found_ab);
  CHECK(found_ba);
}

TEST_CASE("dispersion statistic calibration") {
  SUBCASE("poisson data sits near one") {
    const auto games = testutil::make_poisson_league(5000, 57);
    const TeamRoster roster = TeamRoster::from_games(games);
    const auto design = build_design(games, roster);
    for (int j = 0; j < 2; ++j) {
      const double sigma_p = diag::dispersion_stat(games, design, j);
      CHECK(sigma_p > 0.95);
      CHECK(sigma_p < 1.05);
    }
  }
  SUBCASE("heavily over-dispersed counts push past two") {
    // variance ~ 2.2 x mean, baseball-like
    Rng rng = make_rng(58);
    std::vector<GameRecord> games;
    const auto names = sim::league_team_names();
    const double mu = 4.7, kappa = mu / 1.2;
    for (int i = 0; i < 3000; ++i) {
      GameRecord g;
      g.game_id = i;
      g.home_team = names[i % 20];
      g.away_team = names[(i + 7) % 20];
      g.home_score = dist::sample_negbin(mu, kappa, rng);
      g.away_score = dist::sample_negbin(mu, kappa, rng);
      games.push_back(g);
    }
    const TeamRoster roster = TeamRoster::from_games(games);
    const auto design = build_design(games, roster);
    CHECK(diag::dispersion_stat(games, design, 0) > 2.0);
  }
}

TEST_CASE("spearman correlation") {
  Eigen::VectorXd x(5), y(5);
  x << 1, 2, 3, 4, 5;
  y << 2, 4, 6, 8, 10;
  CHECK(diag::spearman(x, y) == doctest::Approx(1.0));
  Eigen::VectorXd z = -y;
  CHECK(diag::spearman(x, z) == doctest::Approx(-1.0));
  Eigen::VectorXd tie_x(3), tie_y(3);
  tie_x << 1, 1, 2;
  tie_y << 1, 2, 3;
  CHECK(diag::spearman(tie_x, tie_y) == doctest::Approx(std::sqrt(3.0) / 2.0));
  Eigen::VectorXd constant = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(diag::spearman(x, constant), std::invalid_argument);
}

TEST_CASE("one-way anova") {
  SUBCASE("null calibration: equal groups rarely give small p-values") {
    int below = 0;
    const int sims = 200;
    for (int s = 0; s < sims; ++s) {
      Rng rng = make_rng(59, s);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> values;
      std::vector<int> groups;
      for (int g = 0; g < 3; ++g)
        for (int i = 0; i < 40; ++i) {
          values.push_back(normal(rng));
          groups.push_back(g);
        }
      const auto res = diag::anova_oneway(values, groups);
      REQUIRE(res.valid);
      if (res.p_value < 0.01) ++below;
    }
    CHECK(below <= 6);  // ~1% expected under the null
  }
  SUBCASE("separated groups are detected") {
    std::vector<double> values;
    std::vector<int> groups;
    Rng rng = make_rng(60);
    std::normal_distribution<double> normal(0.0, 0.5);
    for (int g = 0; g < 2; ++g)
      for (int i = 0; i < 30; ++i) {
        values.push_back(normal(rng) + (g == 0 ? 0.0 : 3.0));
        groups.push_back(g);
      }
    const auto res = diag::anova_oneway(values, groups);
    CHECK(res.p_value < 1e-6);
  }
  SUBCASE("degenerate groups are rejected or flagged") {
    CHECK_THROWS_AS(diag::anova_oneway({1.0, 2.0, 3.0}, {0, 0, 0}),
                    std::invalid_argument);
    const auto res = diag::anova_oneway({1.0, 1.0, 2.0, 2.0}, {0, 0, 1, 1});
    CHECK_FALSE(res.valid);
  }
}
