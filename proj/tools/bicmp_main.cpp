// Command-line front end: fit / simulate / compare / sensitivity.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 sampler failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "bicmp/cmp.hpp"
#include "bicmp/io.hpp"
#include "bicmp/runner.hpp"
#include "bicmp/version.hpp"

namespace {

using namespace bicmp;

struct ChainFlags {
  std::int64_t iterations = 30000;
  std::int64_t burn_in = 10000;
  std::int64_t thin = 1;
  int chains = 2;
  std::uint64_t seed = 1;
  double target_acceptance = 0.40;
  bool save_b_full = false;
  bool pin_nu_one = false;
};

struct PriorFlags {
  double beta_mean = 0.0;
  double beta_precision = 0.1;
  double gamma_mean = 0.0;
  double gamma_precision = 0.1;
  double wishart_df = 50.0;
  double wishart_scale = 1.0;  // R0 = scale * I
};

void add_chain_flags(CLI::App* cmd, ChainFlags& f) {
  cmd->add_option("--iterations", f.iterations, "MCMC iterations per chain")
      ->capture_default_str();
  cmd->add_option("--burn-in", f.burn_in, "Burn-in iterations")
      ->capture_default_str();
  cmd->add_option("--thin", f.thin, "Thinning interval")->capture_default_str();
  cmd->add_option("--chains", f.chains, "Number of chains")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  cmd->add_option("--target-accept", f.target_acceptance,
                  "RAM target acceptance rate")
      ->capture_default_str();
  cmd->add_flag("--save-b-full", f.save_b_full,
                "Store random effects for every retained draw");
  cmd->add_flag("--pin-nu-one", f.pin_nu_one,
                "Fix every shape parameter at 1 (Poisson mean structure)");
}

void add_prior_flags(CLI::App* cmd, PriorFlags& f) {
  cmd->add_option("--prior-beta-mean", f.beta_mean, "beta prior mean")
      ->capture_default_str();
  cmd->add_option("--prior-beta-precision", f.beta_precision,
                  "beta prior precision (B0 = value * I)")
      ->capture_default_str();
  cmd->add_option("--prior-gamma-mean", f.gamma_mean, "gamma prior mean")
      ->capture_default_str();
  cmd->add_option("--prior-gamma-precision", f.gamma_precision,
                  "gamma prior precision (G0 = value * I)")
      ->capture_default_str();
  cmd->add_option("--wishart-df", f.wishart_df, "Wishart prior df (v0)")
      ->capture_default_str();
  cmd->add_option("--wishart-scale", f.wishart_scale,
                  "Wishart prior scale (R0 = value * I)")
      ->capture_default_str();
}

mcmc::ChainConfig to_chain_config(const ChainFlags& f) {
  mcmc::ChainConfig cfg;
  cfg.n_iterations = f.iterations;
  cfg.burn_in = f.burn_in;
  cfg.thin = f.thin;
  cfg.n_chains = f.chains;
  cfg.seed = f.seed;
  cfg.target_acceptance = f.target_acceptance;
  cfg.store_random_effects_full = f.save_b_full;
  cfg.pin_shape_to_poisson = f.pin_nu_one;
  return cfg;
}

PriorSpec to_priors(const PriorFlags& f) {
  PriorSpec p;
  p.beta_mean = f.beta_mean;
  p.beta_precision = f.beta_precision;
  p.gamma_mean = f.gamma_mean;
  p.gamma_precision = f.gamma_precision;
  p.wishart_df = f.wishart_df;
  p.wishart_scale = f.wishart_scale * Eigen::Matrix2d::Identity();
  return p;
}

std::string canonical_config(const std::string& command,
                             const std::ostringstream& details) {
  return command + "|" + details.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian bivariate CMP regression for paired score data"};
  app.set_version_flag("--version", bicmp::kVersion);
  app.set_config("--config", "", "Read options from a TOML/INI config file");
  app.require_subcommand(1);

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "Fit a model to a games CSV");
  std::string fit_data, fit_out = "out", fit_model = "cmp";
  ChainFlags fit_chain;
  PriorFlags fit_prior;
  std::int64_t dic_r = 1000;
  long dic_samples = 100;
  long predictive_reps = 500;
  bool no_dic = false, no_predictive = false;
  fit->add_option("--data", fit_data, "Input games CSV")->required();
  fit->add_option("--out", fit_out, "Output directory")->capture_default_str();
  fit->add_option("--model", fit_model, "Model kind")
      ->check(CLI::IsMember({"cmp", "poisson", "nb"}))
      ->capture_default_str();
  add_chain_flags(fit, fit_chain);
  add_prior_flags(fit, fit_prior);
  fit->add_option("--dic-r", dic_r, "Acceptance budget of the 1/Z estimator")
      ->capture_default_str();
  fit->add_option("--dic-samples", dic_samples,
                  "Posterior samples used for the CMP DIC")
      ->capture_default_str();
  fit->add_option("--predictive-reps", predictive_reps,
                  "Posterior draws used for the predictive tables")
      ->capture_default_str();
  fit->add_flag("--no-dic", no_dic, "Skip the DIC report");
  fit->add_flag("--no-predictive", no_predictive,
                "Skip predictive and rootogram outputs");

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic seasons");
  std::string sim_scenario = "equi", sim_out = "out";
  int sim_seasons = 1, sim_replicates = 1;
  std::uint64_t sim_seed = 1;
  double sim_beta_h = 0.6, sim_beta_a = 0.1;
  std::vector<double> sim_re_cov;
  simulate->add_option("--scenario", sim_scenario, "Dispersion scenario")
      ->check(CLI::IsMember({"equi", "over", "under"}))
      ->capture_default_str();
  simulate->add_option("--seasons", sim_seasons, "Seasons per replicate")
      ->capture_default_str();
  simulate->add_option("--replicates", sim_replicates, "Replicate datasets")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
  simulate->add_option("--beta-h", sim_beta_h, "True home intercept")
      ->capture_default_str();
  simulate->add_option("--beta-a", sim_beta_a, "True away intercept")
      ->capture_default_str();
  simulate
      ->add_option("--re-cov", sim_re_cov,
                   "Random-effect covariance d11,d12,d22 (default: none)")
      ->expected(3);
  simulate->add_option("--out", sim_out, "Output directory")->capture_default_str();

  // ---- compare ----
  auto* compare = app.add_subcommand(
      "compare", "Fit CMP/Poisson/NB on replicates and tabulate DIC");
  std::string cmp_scenario = "equi", cmp_out = "out";
  int cmp_seasons = 1, cmp_replicates = 5;
  ChainFlags cmp_chain;
  PriorFlags cmp_prior;
  std::int64_t cmp_dic_r = 1000;
  long cmp_dic_samples = 100;
  compare->add_option("--scenario", cmp_scenario, "Dispersion scenario")
      ->check(CLI::IsMember({"equi", "over", "under"}))
      ->capture_default_str();
  compare->add_option("--seasons", cmp_seasons, "Seasons per replicate")
      ->capture_default_str();
  compare->add_option("--replicates", cmp_replicates, "Replicate datasets")
      ->capture_default_str();
  compare->add_option("--out", cmp_out, "Output directory")->capture_default_str();
  add_chain_flags(compare, cmp_chain);
  add_prior_flags(compare, cmp_prior);
  compare->add_option("--dic-r", cmp_dic_r, "Acceptance budget")->capture_default_str();
  compare->add_option("--dic-samples", cmp_dic_samples, "DIC posterior samples")
      ->capture_default_str();

  // ---- sensitivity ----
  auto* sensitivity = app.add_subcommand(
      "sensitivity", "Prior-sensitivity study over scenarios A-D");
  std::string sens_out = "out";
  int sens_seasons = 1;
  ChainFlags sens_chain;
  sens_chain.chains = 3;
  sensitivity->add_option("--seasons", sens_seasons, "Seasons of data")
      ->capture_default_str();
  sensitivity->add_option("--out", sens_out, "Output directory")
      ->capture_default_str();
  add_chain_flags(sensitivity, sens_chain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    if (*fit) {
      const auto games = io::parse_games(fit_data);
      if (games.empty()) throw io::DataError(fit_data + ": no games");
      const TeamRoster roster = TeamRoster::from_games(games);
      const DesignBundle design = build_design(games, roster);

      run::FitOptions opt;
      if (fit_model == "poisson") opt.kind = mcmc::ModelKind::poisson;
      else if (fit_model == "nb") opt.kind = mcmc::ModelKind::negative_binomial;
      else opt.kind = mcmc::ModelKind::cmp;
      opt.chain = to_chain_config(fit_chain);
      opt.priors = to_priors(fit_prior);
      opt.dic_r = dic_r;
      opt.dic_samples = dic_samples;
      opt.predictive_replicates = predictive_reps;
      opt.compute_dic = !no_dic;
      opt.compute_predictive = !no_predictive;

      std::ostringstream canon;
      canon << "fit|" << fit_data << '|' << fit_model << '|'
            << opt.chain.n_iterations << '|' << opt.chain.burn_in << '|'
            << opt.chain.thin << '|' << opt.chain.n_chains << '|'
            << opt.chain.seed << '|' << opt.priors.beta_precision << '|'
            << opt.priors.gamma_precision << '|' << opt.priors.wishart_df;
      io::Provenance prov{opt.chain.seed, io::config_hash_hex(canon.str())};

      const run::FitResult result = run::run_fit(games, design, opt);
      run::write_fit_outputs(result, design, opt, fit_out, prov);
      std::cout << "fit complete: " << fit_out << "/summary_" << fit_model
                << ".txt\n";
      return 0;
    }

    if (*simulate) {
      sim::ScenarioSpec spec;
      spec.dispersion = *sim::dispersion_from_string(sim_scenario);
      spec.n_seasons = sim_seasons;
      spec.beta_h = sim_beta_h;
      spec.beta_a = sim_beta_a;
      if (!sim_re_cov.empty()) {
        Eigen::Matrix2d cov;
        cov << sim_re_cov[0], sim_re_cov[1], sim_re_cov[1], sim_re_cov[2];
        spec.random_effect_cov = cov;
      }
      std::filesystem::create_directories(sim_out);
      for (int r = 0; r < sim_replicates; ++r) {
        spec.seed = sim_seed + 1000003ULL * static_cast<std::uint64_t>(r);
        const auto games = sim::generate_seasons(spec);
        std::ostringstream canon;
        canon << "simulate|" << sim_scenario << '|' << sim_seasons << '|'
              << spec.seed;
        io::Provenance prov{spec.seed, io::config_hash_hex(canon.str())};
        io::write_games_csv(
            sim_out + "/replicate_" + std::to_string(r) + ".csv", games, prov);
      }
      std::cout << "wrote " << sim_replicates << " replicate(s) to " << sim_out
                << "\n";
      return 0;
    }

    if (*compare) {
      run::CompareOptions opt;
      opt.scenario.dispersion = *sim::dispersion_from_string(cmp_scenario);
      opt.scenario.n_seasons = cmp_seasons;
      opt.scenario.seed = cmp_chain.seed;
      opt.replicates = cmp_replicates;
      opt.priors = to_priors(cmp_prior);
      opt.chain = to_chain_config(cmp_chain);
      opt.dic_r = cmp_dic_r;
      opt.dic_samples = cmp_dic_samples;

      std::ostringstream canon;
      canon << "compare|" << cmp_scenario << '|' << cmp_seasons << '|'
            << cmp_replicates << '|' << opt.chain.n_iterations << '|'
            << opt.chain.seed;
      io::Provenance prov{opt.chain.seed, io::config_hash_hex(canon.str())};

      const run::CompareResult result = run::run_compare(opt);
      run::write_compare_outputs(result, opt, cmp_out, prov);
      std::cout << "compare complete: " << cmp_out << "/dic_table.txt\n";
      return 0;
    }

    if (*sensitivity) {
      run::SensitivityOptions opt;
      opt.seed = sens_chain.seed;
      opt.n_seasons = sens_seasons;
      opt.chain = to_chain_config(sens_chain);

      std::ostringstream canon;
      canon << "sensitivity|" << sens_seasons << '|' << opt.chain.n_iterations
            << '|' << opt.chain.n_chains << '|' << opt.seed;
      io::Provenance prov{opt.seed, io::config_hash_hex(canon.str())};

      const run::SensitivityResult result = run::run_sensitivity(opt);
      run::write_sensitivity_outputs(result, sens_out, prov);
      std::cout << "sensitivity complete: " << sens_out
                << "/sensitivity_mse.csv\n";
      return 0;
    }
  } catch (const io::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const cmp::SamplerStallError& e) {
    std::cerr << "sampler failure: " << e.what() << "\n";
    return 3;
  } catch (const cmp::NonConvergenceError& e) {
    std::cerr << "sampler failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
