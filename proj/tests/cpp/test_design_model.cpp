#include <doctest.h>

#include <cmath>

#include "bicmp/cmp.hpp"
#include "bicmp/design.hpp"
#include "bicmp/model.hpp"
#include "bicmp/rng.hpp"
#include "bicmp/simgen.hpp"
#include "oracles.hpp"

using namespace bicmp;

namespace {

GameRecord make_game(std::string home, std::string away, long y1, long y2,
                     Phase phase = Phase::during) {
  GameRecord g;
  g.home_team = std::move(home);
  g.away_team = std::move(away);
  g.home_score = y1;
  g.away_score = y2;
  g.phase = phase;
  return g;
}

}  // namespace

TEST_CASE("build_design column structure") {
  SUBCASE("reference phase rows carry no phase indicator") {
    const std::vector<GameRecord> games{make_game("A", "B", 1, 0, Phase::during)};
    const auto design = build_design(games, TeamRoster({"A", "B"}));
    CHECK(design.n_cols() == 5);
    CHECK(design.home(0, design.phase_before_col) == 0.0);
    CHECK(design.home(0, design.phase_after_col) == 0.0);
    CHECK(design.away(0, design.phase_before_col) == 0.0);
  }
  SUBCASE("non-reference phases activate their offset column") {
    const std::vector<GameRecord> games{
        make_game("A", "B", 1, 0, Phase::before),
        make_game("B", "A", 0, 0, Phase::after)};
    const auto design = build_design(games, TeamRoster({"A", "B"}));
    CHECK(design.home(0, design.phase_before_col) == 1.0);
    CHECK(design.home(0, design.phase_after_col) == 0.0);
    CHECK(design.home(1, design.phase_after_col) == 1.0);
  }
  SUBCASE("20-team roster yields 19 + 19 free team columns") {
    const auto games = sim::generate_seasons({});
    const TeamRoster roster(sim::league_team_names());
    const auto design = build_design(games, roster);
    CHECK(design.n_cols() == 41);
    CHECK(design.n_free_team_cols == 19);
    CHECK(design.column_names.size() == 41);
    CHECK(design.column_names[0] == "intercept");
  }
  SUBCASE("a full season has 380 rows and 19 home games per team") {
    const auto games = sim::generate_seasons({});
    const TeamRoster roster(sim::league_team_names());
    const auto design = build_design(games, roster);
    CHECK(design.n_games() == 380);
    for (const auto& name : roster.names()) {
      long at_home = 0;
      for (const auto& g : games) at_home += g.home_team == name ? 1 : 0;
      CHECK(at_home == 19);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_design({}, TeamRoster({"A", "B"})),
                    std::invalid_argument);
    const std::vector<GameRecord> games{make_game("A", "C", 1, 0)};
    CHECK_THROWS_AS(build_design(games, TeamRoster({"A", "B"})),
                    UnknownTeamError);
  }
}

TEST_CASE("sum-to-zero coding reconstructs the last team exactly") {
  const std::vector<GameRecord> games{make_game("A", "B", 1, 0),
                                      make_game("B", "C", 2, 2),
                                      make_game("C", "A", 0, 1)};
  const auto design = build_design(games, TeamRoster({"A", "B", "C"}));
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(design.n_cols());
  coef(design.attack_begin) = 0.4;
  coef(design.attack_begin + 1) = -0.1;
  const Eigen::VectorXd effects = expand_team_effects(coef, design, true);
  CHECK(effects.size() == 3);
  CHECK(effects.sum() == 0.0);
  CHECK(effects(2) == -(0.4 - 0.1));
}

TEST_CASE("linear predictors") {
  const std::vector<GameRecord> games{make_game("A", "B", 1, 0)};
  const auto design = build_design(games, TeamRoster({"A", "B"}));
  ModelParameters params = zero_parameters(design);

  SUBCASE("all zero gives unit rates") {
    const auto lp = linear_predictors(params, design, 0);
    CHECK(lp.mu_home == doctest::Approx(1.0));
    CHECK(lp.mu_away == doctest::Approx(1.0));
    CHECK(lp.nu_home == doctest::Approx(1.0));
    CHECK(lp.nu_away == doctest::Approx(1.0));
  }
  SUBCASE("intercept difference is the home advantage") {
    params.beta_home(design.intercept_col) = 0.6;
    params.beta_away(design.intercept_col) = 0.1;
    const auto lp = linear_predictors(params, design, 0);
    CHECK(lp.mu_home / lp.mu_away == doctest::Approx(std::exp(0.5)));
  }
  SUBCASE("random effect multiplies the centering rate only") {
    params.random_effects(0, 0) = std::log(2.0);
    const auto lp = linear_predictors(params, design, 0);
    CHECK(lp.mu_home == doctest::Approx(2.0));
    CHECK(lp.nu_home == doctest::Approx(1.0));
  }
  SUBCASE("dimension mismatch is rejected") {
    params.beta_home = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(linear_predictors(params, design, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("log joint kernel against scalar closed forms") {
  const std::vector<GameRecord> games{make_game("A", "B", 0, 0)};
  const auto design = build_design(games, TeamRoster({"A", "B"}));
  ModelParameters params = zero_parameters(design);
  PriorSpec priors;  // defaults: precision 0.1, df 50, scale I

  SUBCASE("zero scores and zero parameters hit the prior values exactly") {
    const double got = log_joint_kernel(params, games, design, priors);
    const int p = design.n_cols();
    const double expected = 2.0 * oracle::iso_normal_logpdf_at_mean(p, 0.1) +
                            2.0 * oracle::iso_normal_logpdf_at_mean(p, 0.1) +
                            oracle::wishart2_logpdf(1.0, 0.0, 1.0, 50.0, 1.0) +
                            oracle::mvn2_logpdf(0.0, 0.0, 1.0, 0.0, 1.0);
    // kernel terms vanish: q(0 | mu, nu) = 1
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("changing scores shifts the value by the kernel delta alone") {
    const double base = log_joint_kernel(params, games, design, priors);
    auto games2 = games;
    games2[0].home_score = 2;
    games2[0].away_score = 1;
    const double shifted = log_joint_kernel(params, games2, design, priors);
    const auto lp = linear_predictors(params, design, 0);
    const double delta =
        cmp::log_kernel(2, {lp.mu_home, lp.nu_home}) +
        cmp::log_kernel(1, {lp.mu_away, lp.nu_away});
    CHECK(shifted - base == doctest::Approx(delta).epsilon(1e-12));
  }
  SUBCASE("appending a zero-score game adds only its random-effect prior") {
    const double base = log_joint_kernel(params, games, design, priors);
    auto games2 = games;
    games2.push_back(make_game("B", "A", 0, 0));
    const auto design2 = build_design(games2, TeamRoster({"A", "B"}));
    ModelParameters params2 = zero_parameters(design2);
    const double extended = log_joint_kernel(params2, games2, design2, priors);
    CHECK(extended - base ==
          doctest::Approx(oracle::mvn2_logpdf(0.0, 0.0, 1.0, 0.0, 1.0))
              .epsilon(1e-12));
  }
  SUBCASE("scaling B0 at the prior mean changes only the normalizer") {
    PriorSpec scaled = priors;
    scaled.beta_precision *= 4.0;
    const double base = log_joint_kernel(params, games, design, priors);
    const double got = log_joint_kernel(params, games, design, scaled);
    const double delta = 2.0 * 0.5 * design.n_cols() * std::log(4.0);
    CHECK(got - base == doctest::Approx(delta).epsilon(1e-12));
  }
  SUBCASE("non-positive-definite covariance is rejected") {
    params.cov << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(log_joint_kernel(params, games, design, priors),
                    std::domain_error);
  }
}

TEST_CASE("home-advantage functionals") {
  const std::vector<GameRecord> games{make_game("A", "B", 1, 0)};
  const auto design = build_design(games, TeamRoster({"A", "B"}));
  const int p = design.n_cols();

  Eigen::MatrixXd bh = Eigen::MatrixXd::Zero(2, p);
  Eigen::MatrixXd ba = Eigen::MatrixXd::Zero(2, p);

  SUBCASE("intercepts alone set every phase to the same value") {
    bh.col(design.intercept_col).setConstant(0.6);
    ba.col(design.intercept_col).setConstant(0.1);
    const auto ha = ha_functionals(bh, ba, design);
    for (int r = 0; r < 2; ++r) {
      CHECK(ha.during(r) == doctest::Approx(0.5));
      CHECK(ha.before(r) == doctest::Approx(0.5));
      CHECK(ha.after(r) == doctest::Approx(0.5));
    }
  }
  SUBCASE("phase offsets shift only their own functional") {
    bh.col(design.phase_before_col).setConstant(0.2);
    ba.col(design.phase_before_col).setConstant(0.05);
    const auto ha = ha_functionals(bh, ba, design);
    CHECK(ha.before(0) == doctest::Approx(0.15));
    CHECK(ha.during(0) == doctest::Approx(0.0));
    CHECK(ha.after(0) == doctest::Approx(0.0));
  }
  SUBCASE("invariant to a common intercept shift") {
    bh.col(design.intercept_col).setConstant(0.6);
    ba.col(design.intercept_col).setConstant(0.1);
    const auto ha1 = ha_functionals(bh, ba, design);
    bh.col(design.intercept_col).array() += 3.7;
    ba.col(design.intercept_col).array() += 3.7;
    const auto ha2 = ha_functionals(bh, ba, design);
    CHECK(ha1.during(0) == doctest::Approx(ha2.during(0)));
    CHECK(ha1.before(1) == doctest::Approx(ha2.before(1)));
  }
  SUBCASE("missing coefficients raise") {
    Eigen::MatrixXd too_small = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(ha_functionals(too_small, too_small, design),
                    std::invalid_argument);
  }
}

TEST_CASE("model covariance") {
  const std::vector<GameRecord> games{make_game("A", "B", 1, 0)};
  const auto design = build_design(games, TeamRoster({"A", "B"}));
  ModelParameters params = zero_parameters(design);

  SUBCASE("diagonal D gives zero covariance for any design") {
    params.cov << 0.3, 0.0, 0.0, 0.7;
    params.beta_home(0) = 1.1;
    CHECK(model_covariance(params, design, 0) == 0.0);
  }
  SUBCASE("sign follows d12") {
    params.cov << 0.04, 0.02, 0.02, 0.04;
    CHECK(model_covariance(params, design, 0) > 0.0);
    params.cov(0, 1) = params.cov(1, 0) = -0.02;
    CHECK(model_covariance(params, design, 0) < 0.0);
  }
  SUBCASE("closed form matches a Monte Carlo run") {
    // lambda = (2, 1.5) via intercepts, nu = 1
    params.beta_home(design.intercept_col) = std::log(2.0);
    params.beta_away(design.intercept_col) = std::log(1.5);
    params.cov << 0.04, 0.02, 0.02, 0.04;
    const double expected = model_covariance(params, design, 0);
    Rng rng = make_rng(99);
    const Eigen::Matrix2d chol =
        Eigen::LLT<Eigen::Matrix2d>(params.cov).matrixL();
    std::normal_distribution<double> normal(0.0, 1.0);
    const long n = 200000;
    double s1 = 0.0, s2 = 0.0, s12 = 0.0;
    std::vector<double> y1(n), y2(n);
    for (long i = 0; i < n; ++i) {
      Eigen::Vector2d z(normal(rng), normal(rng));
      const Eigen::Vector2d b = chol * z;
      std::poisson_distribution<long> p1(2.0 * std::exp(b(0)));
      std::poisson_distribution<long> p2(1.5 * std::exp(b(1)));
      y1[i] = static_cast<double>(p1(rng));
      y2[i] = static_cast<double>(p2(rng));
      s1 += y1[i];
      s2 += y2[i];
    }
    const double m1 = s1 / n, m2 = s2 / n;
    for (long i = 0; i < n; ++i) s12 += (y1[i] - m1) * (y2[i] - m2);
    const double sample_cov = s12 / (n - 1);
    CHECK(sample_cov == doctest::Approx(expected).epsilon(0.15));
  }
}
