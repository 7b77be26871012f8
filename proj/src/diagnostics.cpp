#include "bicmp/diagnostics.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <stdexcept>

#include "bicmp/cmp.hpp"
#include "bicmp/distributions.hpp"

namespace bicmp::diag {

namespace {

using mcmc::ModelKind;
using mcmc::PosteriorDraws;

double exact_log_lik(ModelKind kind, std::int64_t y, double mu, double kappa) {
  if (kind == ModelKind::poisson) return dist::log_poisson_pmf(y, mu);
  return dist::log_negbin_pmf(y, mu, kappa);
}

// Rows of the retained draws that carry random effects.
std::vector<long> b_row_indices(const PosteriorDraws& draws) {
  std::vector<long> rows(draws.random_effect_rows.size());
  std::iota(rows.begin(), rows.end(), 0L);
  return rows;
}

struct MeanState {
  Eigen::VectorXd beta_home, beta_away, gamma_home, gamma_away;
  Eigen::VectorXd b;  // 2n, interleaved
  double kappa_home = 0.0, kappa_away = 0.0;
};

MeanState mean_over_rows(const PosteriorDraws& draws,
                         const std::vector<long>& b_rows) {
  MeanState m;
  const long n_used = static_cast<long>(b_rows.size());
  m.beta_home = Eigen::VectorXd::Zero(draws.beta_home.cols());
  m.beta_away = Eigen::VectorXd::Zero(draws.beta_away.cols());
  if (draws.has_gamma()) {
    m.gamma_home = Eigen::VectorXd::Zero(draws.gamma_home.cols());
    m.gamma_away = Eigen::VectorXd::Zero(draws.gamma_away.cols());
  }
  m.b = Eigen::VectorXd::Zero(draws.random_effects.cols());
  for (long k : b_rows) {
    const long r = draws.random_effect_rows[k];
    m.beta_home += draws.beta_home.row(r).transpose();
    m.beta_away += draws.beta_away.row(r).transpose();
    if (draws.has_gamma()) {
      m.gamma_home += draws.gamma_home.row(r).transpose();
      m.gamma_away += draws.gamma_away.row(r).transpose();
    }
    m.b += draws.random_effects.row(k).transpose();
    if (draws.nb_dispersion.size() > 0) {
      m.kappa_home += draws.nb_dispersion(r, 0);
      m.kappa_away += draws.nb_dispersion(r, 1);
    }
  }
  const double inv = 1.0 / static_cast<double>(n_used);
  m.beta_home *= inv;
  m.beta_away *= inv;
  if (draws.has_gamma()) {
    m.gamma_home *= inv;
    m.gamma_away *= inv;
  }
  m.b *= inv;
  m.kappa_home *= inv;
  m.kappa_away *= inv;
  return m;
}

}  // namespace

std::array<DicReport, 2> dic_exact(const PosteriorDraws& draws,
                                   const std::vector<GameRecord>& games,
                                   const DesignBundle& design,
                                   ModelKind likelihood_kind) {
  if (likelihood_kind == ModelKind::cmp)
    throw std::invalid_argument("dic_exact: CMP likelihood is intractable, use dic_cmp");
  const bool poisson_ok = draws.kind == ModelKind::poisson ||
                          (draws.kind == ModelKind::cmp && draws.shape_pinned);
  if (likelihood_kind == ModelKind::poisson && !poisson_ok)
    throw std::invalid_argument("dic_exact: draws do not carry a Poisson-mean state");
  if (likelihood_kind == ModelKind::negative_binomial &&
      draws.kind != ModelKind::negative_binomial)
    throw std::invalid_argument("dic_exact: draws carry no dispersion parameters");
  if (draws.random_effect_rows.empty())
    throw std::invalid_argument("dic_exact: no stored random-effect draws");

  const long n = design.n_games();
  const std::vector<long> rows = b_row_indices(draws);
  std::array<double, 2> dbar{0.0, 0.0};
  std::array<Eigen::VectorXd, 2> fe;

  for (long k : rows) {
    const long r = draws.random_effect_rows[k];
    fe[0] = design.home * draws.beta_home.row(r).transpose();
    fe[1] = design.away * draws.beta_away.row(r).transpose();
    const double kappas[2] = {
        draws.nb_dispersion.size() > 0 ? draws.nb_dispersion(r, 0) : 0.0,
        draws.nb_dispersion.size() > 0 ? draws.nb_dispersion(r, 1) : 0.0};
    for (long i = 0; i < n; ++i) {
      const std::int64_t ys[2] = {games[i].home_score, games[i].away_score};
      for (int j = 0; j < 2; ++j) {
        const double mu = std::exp(fe[j](i) + draws.random_effects(k, 2 * i + j));
        dbar[j] += -2.0 * exact_log_lik(likelihood_kind, ys[j], mu, kappas[j]);
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  dbar[0] *= inv;
  dbar[1] *= inv;

  const MeanState m = mean_over_rows(draws, rows);
  fe[0] = design.home * m.beta_home;
  fe[1] = design.away * m.beta_away;
  std::array<double, 2> d_at_mean{0.0, 0.0};
  for (long i = 0; i < n; ++i) {
    const std::int64_t ys[2] = {games[i].home_score, games[i].away_score};
    for (int j = 0; j < 2; ++j) {
      const double mu = std::exp(fe[j](i) + m.b(2 * i + j));
      const double kappa = j == 0 ? m.kappa_home : m.kappa_away;
      d_at_mean[j] += -2.0 * exact_log_lik(likelihood_kind, ys[j], mu, kappa);
    }
  }

  std::array<DicReport, 2> reports;
  for (int j = 0; j < 2; ++j) {
    DicReport& rep = reports[j];
    rep.mean_deviance = dbar[j];
    rep.deviance_at_mean = d_at_mean[j];
    rep.effective_parameters = dbar[j] - d_at_mean[j];
    rep.dic = rep.mean_deviance + rep.effective_parameters;
    rep.n_posterior_samples_used = static_cast<long>(rows.size());
    rep.estimator = DicReport::Estimator::exact;
  }
  return reports;
}

std::array<DicReport, 2> dic_cmp(const PosteriorDraws& draws,
                                 const std::vector<GameRecord>& games,
                                 const DesignBundle& design, std::int64_t r,
                                 long n_samples, std::uint64_t seed) {
  if (draws.kind != ModelKind::cmp)
    throw std::invalid_argument("dic_cmp: draws are not from the CMP model");
  if (r < 2) throw std::invalid_argument("dic_cmp: acceptance budget r must be >= 2");
  if (draws.random_effect_rows.empty())
    throw std::invalid_argument("dic_cmp: no stored random-effect draws");

  const long n = design.n_games();
  std::vector<long> rows = b_row_indices(draws);
  if (static_cast<long>(rows.size()) > n_samples) {
    std::vector<long> picked;
    picked.reserve(n_samples);
    Rng pick_rng = make_rng(seed, 0xD1C);
    std::sample(rows.begin(), rows.end(), std::back_inserter(picked), n_samples,
                pick_rng);
    rows = std::move(picked);
  }
  const long n_used = static_cast<long>(rows.size());
  const double log_r_minus_1 = std::log(static_cast<double>(r - 1));

  // -2 log f-hat for one parameter state (beta/gamma rows + b row); every
  // (state, game) pair owns a substream so threading cannot change results.
  auto deviance_for_state =
      [&](const Eigen::VectorXd& fe_h, const Eigen::VectorXd& fe_a,
          const Eigen::VectorXd& lnu_h, const Eigen::VectorXd& lnu_a,
          const Eigen::VectorXd& b_row,
          std::uint64_t stream) -> std::array<double, 2> {
    std::array<double, 2> dev{0.0, 0.0};
    for (long i = 0; i < n; ++i) {
      const std::int64_t ys[2] = {games[i].home_score, games[i].away_score};
      for (int j = 0; j < 2; ++j) {
        const double log_mu =
            (j == 0 ? fe_h(i) : fe_a(i)) + b_row(2 * i + j);
        const double nu = std::exp(j == 0 ? lnu_h(i) : lnu_a(i));
        const cmp::CmpSampler sampler(log_mu, nu);
        Rng rng = make_rng(seed, stream, static_cast<std::uint64_t>(2 * i + j));
        const std::int64_t attempts = sampler.attempts_for_acceptances(r, rng);
        const double log_inv_z =
            std::log(static_cast<double>(attempts - 1)) - log_r_minus_1 -
            sampler.envelope_log_bound() - sampler.envelope_log_norm();
        const double log_fhat =
            mcmc::cmp_log_kernel_term(ys[j], log_mu, nu) + log_inv_z;
        dev[j] += -2.0 * log_fhat;
      }
    }
    return dev;
  };

  const Eigen::VectorXd zero_nu = Eigen::VectorXd::Zero(n);
  auto state_inputs = [&](long k) {
    const long row = draws.random_effect_rows[k];
    struct Inputs {
      Eigen::VectorXd fe_h, fe_a, lnu_h, lnu_a, b;
    } in;
    in.fe_h = design.home * draws.beta_home.row(row).transpose();
    in.fe_a = design.away * draws.beta_away.row(row).transpose();
    in.lnu_h = draws.has_gamma()
                   ? (design.home * draws.gamma_home.row(row).transpose()).eval()
                   : zero_nu;
    in.lnu_a = draws.has_gamma()
                   ? (design.away * draws.gamma_away.row(row).transpose()).eval()
                   : zero_nu;
    in.b = draws.random_effects.row(k).transpose();
    return in;
  };

  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(n_used)));
  std::vector<std::future<std::array<double, 2>>> futures;
  for (unsigned w = 0; w < n_workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      std::array<double, 2> acc{0.0, 0.0};
      for (long s = w; s < n_used; s += n_workers) {
        const auto in = state_inputs(rows[s]);
        const auto dev = deviance_for_state(in.fe_h, in.fe_a, in.lnu_h,
                                            in.lnu_a, in.b,
                                            static_cast<std::uint64_t>(s + 1));
        acc[0] += dev[0];
        acc[1] += dev[1];
      }
      return acc;
    }));
  }
  std::array<double, 2> dbar{0.0, 0.0};
  for (auto& f : futures) {
    const auto part = f.get();
    dbar[0] += part[0];
    dbar[1] += part[1];
  }
  dbar[0] /= static_cast<double>(n_used);
  dbar[1] /= static_cast<double>(n_used);

  const MeanState m = mean_over_rows(draws, rows);
  const Eigen::VectorXd fe_h = design.home * m.beta_home;
  const Eigen::VectorXd fe_a = design.away * m.beta_away;
  const Eigen::VectorXd lnu_h =
      draws.has_gamma() ? (design.home * m.gamma_home).eval() : zero_nu;
  const Eigen::VectorXd lnu_a =
      draws.has_gamma() ? (design.away * m.gamma_away).eval() : zero_nu;
  const auto d_at_mean = deviance_for_state(fe_h, fe_a, lnu_h, lnu_a, m.b, 0);

  std::array<DicReport, 2> reports;
  for (int j = 0; j < 2; ++j) {
    DicReport& rep = reports[j];
    rep.mean_deviance = dbar[j];
    rep.deviance_at_mean = d_at_mean[j];
    rep.effective_parameters = dbar[j] - d_at_mean[j];
    rep.dic = rep.mean_deviance + rep.effective_parameters;
    rep.n_posterior_samples_used = n_used;
    rep.estimator = DicReport::Estimator::unbiased_rejection;
  }
  return reports;
}

double psrf(const std::vector<Eigen::MatrixXd>& chains) {
  const long m = static_cast<long>(chains.size());
  if (m < 2) throw std::invalid_argument("psrf: need at least 2 chains");
  const long n = chains[0].rows();
  const long d = chains[0].cols();
  if (n < 10) throw std::invalid_argument("psrf: chains must have length >= 10");
  for (const auto& c : chains)
    if (c.rows() != n || c.cols() != d)
      throw std::invalid_argument("psrf: chains must share shape");

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd means(m, d);
  for (long c = 0; c < m; ++c) {
    const Eigen::RowVectorXd mean = chains[c].colwise().mean();
    means.row(c) = mean;
    const Eigen::MatrixXd centered = chains[c].rowwise() - mean;
    w += centered.transpose() * centered / static_cast<double>(n - 1);
  }
  w /= static_cast<double>(m);

  const Eigen::RowVectorXd grand = means.colwise().mean();
  const Eigen::MatrixXd mc = means.rowwise() - grand;
  const Eigen::MatrixXd b_over_n =
      mc.transpose() * mc / static_cast<double>(m - 1);

  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("psrf: singular within-chain covariance");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(b_over_n, w);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("psrf: eigen decomposition failed");
  const double lambda_max = solver.eigenvalues().maxCoeff();

  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return (nn - 1.0) / nn + ((mm + 1.0) / mm) * lambda_max;
}

double psrf_scalar(const std::vector<Eigen::VectorXd>& chains) {
  std::vector<Eigen::MatrixXd> wrapped;
  wrapped.reserve(chains.size());
  for (const auto& c : chains) wrapped.push_back(c);
  return psrf(wrapped);
}

double ess(const Eigen::VectorXd& chain) {
  const long n = chain.size();
  if (n < 10) throw std::invalid_argument("ess: chain must have length >= 10");
  const double mean = chain.mean();
  const Eigen::VectorXd x = chain.array() - mean;
  const double c0 = x.squaredNorm() / static_cast<double>(n);
  if (!(c0 > 0.0)) return 0.0;  // constant chain

  auto rho = [&](long t) {
    double acc = 0.0;
    for (long i = 0; i + t < n; ++i) acc += x(i) * x(i + t);
    return acc / (static_cast<double>(n) * c0);
  };

  double sum_gamma = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (long mlag = 0; 2 * mlag + 1 < n; ++mlag) {
    double gamma = rho(2 * mlag) + rho(2 * mlag + 1);
    if (gamma <= 0.0) break;
    gamma = std::min(gamma, prev);
    sum_gamma += gamma;
    prev = gamma;
  }
  const double tau = std::max(2.0 * sum_gamma - 1.0, 1e-12);
  return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

PredictiveSummary posterior_predictive(const PosteriorDraws& draws,
                                       const DesignBundle& design,
                                       std::uint64_t seed,
                                       long max_replicates) {
  const long total = draws.n_draws();
  if (total == 0) throw std::invalid_argument("posterior_predictive: empty draws");
  const long n = design.n_games();
  const long reps = std::min(total, max_replicates);
  std::vector<double> counts[2];

  for (long rep = 0; rep < reps; ++rep) {
    const long row = (rep * total) / reps;
    Rng rng = make_rng(seed, 0x9ced, static_cast<std::uint64_t>(row));
    Eigen::Matrix2d cov;
    cov << draws.cov_entries(row, 0), draws.cov_entries(row, 1),
        draws.cov_entries(row, 1), draws.cov_entries(row, 2);
    const dist::Mvn2 re_prior(cov);
    const Eigen::VectorXd fe_h = design.home * draws.beta_home.row(row).transpose();
    const Eigen::VectorXd fe_a = design.away * draws.beta_away.row(row).transpose();
    Eigen::VectorXd lnu_h, lnu_a;
    if (draws.kind == ModelKind::cmp && draws.has_gamma()) {
      lnu_h = design.home * draws.gamma_home.row(row).transpose();
      lnu_a = design.away * draws.gamma_away.row(row).transpose();
    }
    for (long i = 0; i < n; ++i) {
      const Eigen::Vector2d b = re_prior.sample(rng);
      for (int j = 0; j < 2; ++j) {
        const double log_mu = (j == 0 ? fe_h(i) : fe_a(i)) + b(j);
        std::int64_t y = 0;
        if (draws.kind == ModelKind::cmp) {
          const double nu =
              draws.has_gamma() ? std::exp(j == 0 ? lnu_h(i) : lnu_a(i)) : 1.0;
          y = cmp::CmpSampler(log_mu, nu).draw(rng);
        } else if (draws.kind == ModelKind::poisson) {
          std::poisson_distribution<std::int64_t> pois(std::exp(log_mu));
          y = pois(rng);
        } else {
          y = dist::sample_negbin(std::exp(log_mu), draws.nb_dispersion(row, j),
                                  rng);
        }
        auto& tab = counts[j];
        if (static_cast<long>(tab.size()) <= y) tab.resize(y + 1, 0.0);
        tab[static_cast<size_t>(y)] += 1.0;
      }
    }
  }

  PredictiveSummary out;
  out.n_replicates = reps;
  out.expected_home =
      Eigen::Map<Eigen::VectorXd>(counts[0].data(), counts[0].size()) /
      static_cast<double>(reps);
  out.expected_away =
      Eigen::Map<Eigen::VectorXd>(counts[1].data(), counts[1].size()) /
      static_cast<double>(reps);
  return out;
}

std::vector<RootogramRow> rootogram_data(const Eigen::VectorXd& observed,
                                         const Eigen::VectorXd& expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("rootogram_data: support grids differ");
  std::vector<RootogramRow> rows(observed.size());
  for (long k = 0; k < observed.size(); ++k) {
    rows[k].count = k;
    rows[k].sqrt_expected = std::sqrt(std::max(0.0, expected(k)));
    rows[k].bar_bottom = rows[k].sqrt_expected - std::sqrt(std::max(0.0, observed(k)));
  }
  return rows;
}

Eigen::VectorXd count_frequencies(const std::vector<GameRecord>& games,
                                  int outcome, long min_length) {
  long max_count = min_length - 1;
  for (const auto& g : games)
    max_count = std::max(max_count, outcome == 0 ? g.home_score : g.away_score);
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(max_count + 1);
  for (const auto& g : games)
    freq(outcome == 0 ? g.home_score : g.away_score) += 1.0;
  return freq;
}

DispersionSummary index_of_dispersion(const std::vector<GameRecord>& games,
                                      int outcome) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (const auto& g : games) {
    cells[{g.home_team, g.away_team}].push_back(
        static_cast<double>(outcome == 0 ? g.home_score : g.away_score));
  }
  DispersionSummary out;
  out.cells.reserve(cells.size());
  for (const auto& [key, values] : cells) {
    DispersionCell cell;
    cell.home_team = key.first;
    cell.away_team = key.second;
    cell.n_observations = static_cast<long>(values.size());
    if (values.size() >= 2) {
      const double mean =
          std::accumulate(values.begin(), values.end(), 0.0) / values.size();
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double var = ss / static_cast<double>(values.size() - 1);
      cell.index = mean > 0.0 ? var / mean : 0.0;
    }
    out.cells.push_back(std::move(cell));
  }
  const TeamRoster roster = TeamRoster::from_games(games);
  const DesignBundle design = build_design(games, roster);
  out.sigma_p = dispersion_stat(games, design, outcome);
  return out;
}

double dispersion_stat(const std::vector<GameRecord>& games,
                       const DesignBundle& design, int outcome) {
  const long n = design.n_games();
  if (n < 2) throw std::invalid_argument("dispersion_stat: need >= 2 games");
  const Eigen::MatrixXd& x = design.outcome(outcome);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i)
    y(i) = static_cast<double>(outcome == 0 ? games[i].home_score
                                            : games[i].away_score);
  const Eigen::VectorXd beta = dist::poisson_glm_fit(x, y);
  const Eigen::VectorXd mu = (x * beta).cwiseMax(-30.0).cwiseMin(30.0).array().exp();
  const double pearson = ((y - mu).array().square() / mu.array()).sum();
  const long rank = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(x).rank();
  if (n <= rank)
    throw std::invalid_argument("dispersion_stat: no residual degrees of freedom");
  return pearson / static_cast<double>(n - rank);
}

double dispersion_stat_pooled(const std::vector<GameRecord>& games,
                              const DesignBundle& design) {
  const long n = design.n_games();
  double pearson = 0.0;
  long df = 0;
  for (int j = 0; j < 2; ++j) {
    const Eigen::MatrixXd& x = design.outcome(j);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i)
      y(i) = static_cast<double>(j == 0 ? games[i].home_score
                                        : games[i].away_score);
    const Eigen::VectorXd beta = dist::poisson_glm_fit(x, y);
    const Eigen::VectorXd mu =
        (x * beta).cwiseMax(-30.0).cwiseMin(30.0).array().exp();
    pearson += ((y - mu).array().square() / mu.array()).sum();
    df += n - Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(x).rank();
  }
  if (df <= 0)
    throw std::invalid_argument("dispersion_stat_pooled: no degrees of freedom");
  return pearson / static_cast<double>(df);
}

namespace {

Eigen::VectorXd ranks_with_ties(const Eigen::VectorXd& v) {
  const long n = v.size();
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(),
            [&](long a, long b) { return v(a) < v(b); });
  Eigen::VectorXd ranks(n);
  long i = 0;
  while (i < n) {
    long j = i;
    while (j + 1 < n && v(order[j + 1]) == v(order[i])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (long k = i; k <= j; ++k) ranks(order[k]) = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("spearman: need equal-length inputs with n >= 3");
  const Eigen::VectorXd rx = ranks_with_ties(x);
  const Eigen::VectorXd ry = ranks_with_ties(y);
  const Eigen::VectorXd cx = rx.array() - rx.mean();
  const Eigen::VectorXd cy = ry.array() - ry.mean();
  const double denom = std::sqrt(cx.squaredNorm() * cy.squaredNorm());
  if (!(denom > 0.0))
    throw std::invalid_argument("spearman: degenerate (constant) input");
  return cx.dot(cy) / denom;
}

AnovaResult anova_oneway(const std::vector<double>& values,
                         const std::vector<int>& groups) {
  if (values.size() != groups.size() || values.size() < 3)
    throw std::invalid_argument("anova_oneway: need n >= 3 matched values/groups");
  std::map<int, std::vector<double>> by_group;
  for (size_t i = 0; i < values.size(); ++i) by_group[groups[i]].push_back(values[i]);
  if (by_group.size() < 2)
    throw std::invalid_argument("anova_oneway: need at least 2 groups");
  for (const auto& [g, vals] : by_group)
    if (vals.size() < 2)
      throw std::invalid_argument("anova_oneway: every group needs >= 2 members");

  const double grand =
      std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& [g, vals] : by_group) {
    const double m =
        std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    ss_between += vals.size() * (m - grand) * (m - grand);
    for (double v : vals) ss_within += (v - m) * (v - m);
  }
  AnovaResult res;
  res.df_between = static_cast<long>(by_group.size()) - 1;
  res.df_within = static_cast<long>(values.size()) - static_cast<long>(by_group.size());
  if (!(ss_within > 0.0) || res.df_within <= 0) {
    res.valid = false;
    res.f_stat = std::numeric_limits<double>::quiet_NaN();
    res.p_value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  res.f_stat = (ss_between / res.df_between) / (ss_within / res.df_within);
  const boost::math::fisher_f f_dist(static_cast<double>(res.df_between),
                                     static_cast<double>(res.df_within));
  res.p_value = boost::math::cdf(boost::math::complement(f_dist, res.f_stat));
  res.valid = true;
  return res;
}

}  // namespace bicmp::diag
