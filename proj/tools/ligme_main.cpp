// Command-line driver: Monte-Carlo detection sweeps, convexity certification,
// regularizer landscape scans, and randomized oracle checks of the proximity
// operators.  Exit codes: 0 success, 1 runtime failure, 2 config/usage error,
// 3 certification failed.
#include "ligme/experiment.hpp"
#include "ligme/io.hpp"
#include "ligme/prox.hpp"
#include "ligme/reference.hpp"
#include "ligme/regularizer.hpp"
#include "ligme/rng.hpp"
#include "ligme/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ligme;

// Config-file problems (missing file, bad JSON, schema violations) all map
// to exit code 2, so fold I/O errors on the config path into the
// invalid-argument family here.
std::string load_config(const std::string& path) {
  try {
    return io::read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
}

int cmd_run(const std::string& config_path, const std::optional<int>& trials,
            const std::optional<std::uint64_t>& seed,
            const std::vector<double>& snr, const std::optional<std::string>& out,
            const std::optional<int>& threads, bool epsilon_floor) {
  ExperimentConfig config =
      io::experiment_config_from_json(load_config(config_path));
  if (trials) config.trials = *trials;
  if (seed) config.seed = *seed;
  if (!snr.empty()) config.snr_db = snr;
  if (out) config.output_path = *out;
  if (threads) config.threads = *threads;
  if (epsilon_floor) config.epsilon_floor = true;
  config.validate();

  const SweepResult result = run_sweep(config);
  if (config.output_path.empty()) {
    std::cout << sweep_to_csv(result, config.epsilon_floor);
  } else {
    std::cout << "wrote " << config.output_path << " and "
              << config.output_path << ".meta.json (" << result.cells.size()
              << " rows, " << result.elapsed_seconds << " s)\n";
  }
  return 0;
}

int cmd_certify(const std::string& config_path) {
  io::CertifyConfig cc = io::certify_config_from_json(load_config(config_path));
  const PsdCertification cert =
      certify_overall_convexity(cc.A, cc.gme, cc.mu);
  std::printf("min_eigenvalue %.12e\n", cert.min_eigenvalue);
  std::printf("%s\n", cert.psd ? "certified" : "not certified");
  return cert.psd ? 0 : 3;
}

struct GridArg {
  double lo = 0.0, hi = 0.0, step = 0.0;
};

GridArg parse_grid(const std::string& text) {
  GridArg g;
  char trailing = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &g.lo, &g.hi, &g.step,
                  &trailing) != 3)
    throw std::invalid_argument("--grid expects lo:hi:step, got '" + text +
                                "'");
  if (!(g.step > 0.0) || !(g.hi > g.lo))
    throw std::invalid_argument("--grid needs hi > lo and step > 0");
  return g;
}

double theta_value(const RealVector& x, const LigmeRegularizer& reg) {
  if (reg.gme.kind == GmeSpec::Kind::Zero) return eval_soav(x, reg.seed);
  if (reg.gme.kind == GmeSpec::Kind::ScaledIdentity &&
      reg.seed.variant == SeedNorm::WeightedL1)
    return eval_ligme_closed_form(x, reg);
  return eval_ligme_iterative(x, reg);
}

int cmd_landscape(const std::string& modulation,
                  const std::vector<double>& levels, int order, int n_symbols,
                  double b, const std::string& design, int m_rows, double mu,
                  double total_gamma, std::uint64_t seed,
                  const std::string& grid_text, const std::string& out) {
  Alphabet alphabet = [&] {
    if (modulation == "real") {
      if (levels.empty())
        throw std::invalid_argument("--levels is required for --modulation real");
      return Alphabet::real(levels);
    }
    if (!levels.empty())
      throw std::invalid_argument("--levels applies to --modulation real only");
    if (modulation == "qam") return Alphabet::qam(order);
    if (modulation == "psk") return Alphabet::psk(order);
    throw std::invalid_argument("--modulation must be real, qam or psk");
  }();

  SeedRegularizer seed_reg = SeedRegularizer::for_alphabet(alphabet, n_symbols);
  const int L = seed_reg.count();
  const Eigen::Index D =
      alphabet.is_complex() ? 2 * n_symbols : n_symbols;

  GmeSpec gme = [&] {
    if (design == "identity")
      return b == 0.0 ? GmeSpec::zero(L, D) : GmeSpec::scaled_identity(b, L, D);
    if (design == "sensing") {
      if (m_rows < 1)
        throw std::invalid_argument("--m must be positive for --design sensing");
      RngStream rng(seed);
      RealMatrix A(m_rows, D);
      for (int r = 0; r < m_rows; ++r)
        for (Eigen::Index c = 0; c < D; ++c) A(r, c) = rng.gaussian();
      return build_gme_scaled_sensing(A, mu, L, total_gamma);
    }
    throw std::invalid_argument("--design must be identity or sensing");
  }();
  const LigmeRegularizer reg =
      LigmeRegularizer::make(std::move(seed_reg), std::move(gme), mu);

  const GridArg grid = parse_grid(grid_text);
  const long n_steps = std::lround((grid.hi - grid.lo) / grid.step);
  if (n_steps < 1) throw std::invalid_argument("--grid spans no step");

  std::string csv;
  char buf[128];
  RealVector x = RealVector::Zero(D);
  if (alphabet.modulation == Modulation::Psk) {
    // 2-D slice over the first symbol's (Re, Im) plane, remaining symbols 0.
    csv = "x_re,x_im,theta\n";
    for (long i = 0; i <= n_steps; ++i)
      for (long j = 0; j <= n_steps; ++j) {
        x[0] = grid.lo + i * grid.step;
        x[n_symbols] = grid.lo + j * grid.step;
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.15e\n", x[0],
                      x[n_symbols], theta_value(x, reg));
        csv += buf;
      }
  } else {
    // 1-D slice over the first stacked coordinate, everything else 0.
    csv = "x,theta\n";
    for (long i = 0; i <= n_steps; ++i) {
      x[0] = grid.lo + i * grid.step;
      std::snprintf(buf, sizeof(buf), "%.10g,%.15e\n", x[0],
                    theta_value(x, reg));
      csv += buf;
    }
  }
  if (out.empty())
    std::cout << csv;
  else
    io::write_text_file(out, csv);
  return 0;
}

int cmd_prox_check(std::uint64_t seed, long cases, bool inject_fault) {
  RngStream rng(seed);
  double max_dev = 0.0;
  std::string worst;

  const auto note = [&](double dev, const std::string& desc) {
    if (dev > max_dev) {
      max_dev = dev;
      worst = desc;
    }
  };
  const auto describe = [](const char* kind, const RealVector& u, double gamma,
                           const WeightVector& omega) {
    std::ostringstream ss;
    ss << kind << " gamma=" << gamma << " u=[" << u.transpose() << "] omega=["
       << omega.transpose() << "]";
    return ss.str();
  };

  for (long i = 0; i < cases; ++i) {
    // Weighted l1 against the per-coordinate golden-section oracle.  The
    // fault switch feeds the production operator a perturbed threshold — a
    // negative control that must trip the tolerance.
    {
      const int dim = 1 + static_cast<int>(rng.uniform_int(8));
      const double gamma = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
      WeightVector omega(dim);
      for (int k = 0; k < dim; ++k) omega[k] = 0.05 + 0.95 * rng.uniform();
      RealVector u(dim);
      for (int k = 0; k < dim; ++k) u[k] = 3.0 * rng.gaussian();
      const double gamma_lib = inject_fault ? 1.01 * gamma : gamma;
      const RealVector lib = prox_weighted_l1(u, gamma_lib, omega);
      const RealVector orc = reference::prox_weighted_l1_oracle(u, gamma, omega);
      note((lib - orc).cwiseAbs().maxCoeff(), describe("l1", u, gamma, omega));
    }
    // Weighted l2,1 against the radial golden-section oracle.
    {
      const int pairs = 1 + static_cast<int>(rng.uniform_int(4));
      const double gamma = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
      WeightVector omega(pairs);
      for (int k = 0; k < pairs; ++k) omega[k] = 0.05 + 0.95 * rng.uniform();
      RealVector u(2 * pairs);
      for (int k = 0; k < 2 * pairs; ++k) u[k] = 3.0 * rng.gaussian();
      const RealVector lib = prox_weighted_l21(u, gamma, omega);
      const RealVector orc =
          reference::prox_weighted_l21_oracle(u, gamma, omega);
      note((lib - orc).cwiseAbs().maxCoeff(), describe("l21", u, gamma, omega));
    }
    // Octagon projection against the dense-sampling oracle.
    {
      const double R = 0.5 + 1.5 * rng.uniform();
      const Eigen::Vector2d p(3.0 * rng.gaussian(), 3.0 * rng.gaussian());
      const Eigen::Vector2d lib = project_regular_octagon_pair(p, R);
      double qx = 0.0, qy = 0.0;
      reference::project_octagon_oracle(p.x(), p.y(), R, qx, qy);
      const double dev = std::max(std::abs(lib.x() - qx), std::abs(lib.y() - qy));
      std::ostringstream ss;
      ss << "octagon R=" << R << " p=[" << p.transpose() << "]";
      note(dev, ss.str());
    }
  }

  std::printf("max deviation %.3e over %ld cases\n", max_dev, cases);
  if (max_dev < 1e-6) return 0;
  std::cerr << "tolerance 1e-6 exceeded; worst case: " << worst << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Discrete-valued signal estimation with convexity-preserving "
      "nonconvex regularization"};
  app.set_version_flag("--version", std::string(ligme::kVersion));
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand(
      "run", "Run a Monte-Carlo detection sweep from a JSON config");
  std::string run_config;
  std::optional<int> run_trials, run_threads;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_out;
  std::vector<double> run_snr;
  bool run_eps_floor = false;
  run->add_option("--config", run_config, "Experiment config JSON path")
      ->required();
  run->add_option("--trials", run_trials, "Override the trial count");
  run->add_option("--seed", run_seed, "Override the master seed");
  run->add_option("--snr", run_snr, "Override the SNR grid, e.g. 5,10,15")
      ->delimiter(',');
  run->add_option("--out", run_out, "Override the output CSV path");
  run->add_option("--threads", run_threads,
                  "Worker threads (0 = all hardware threads)");
  run->add_flag("--epsilon-floor", run_eps_floor,
                "Report machine epsilon instead of zero BER (log-axis plots)");

  // certify
  auto* certify = app.add_subcommand(
      "certify", "Check the overall-convexity condition of a design");
  std::string certify_config;
  certify->add_option("--config", certify_config, "Certify config JSON path")
      ->required();

  // landscape
  auto* landscape = app.add_subcommand(
      "landscape", "Tabulate the regularizer over a coordinate slice");
  std::string ls_modulation, ls_design = "identity", ls_grid, ls_out;
  std::vector<double> ls_levels;
  int ls_order = 0, ls_n = 1, ls_m = 0;
  double ls_b = 0.0, ls_mu = 1.0, ls_total_gamma = 0.99;
  std::uint64_t ls_seed = 0;
  landscape->add_option("--modulation", ls_modulation, "real, qam or psk")
      ->required();
  landscape->add_option("--levels", ls_levels,
                        "Real alphabet values, e.g. -1,0,1")
      ->delimiter(',');
  landscape->add_option("--order", ls_order, "Constellation order (qam/psk)");
  landscape->add_option("--n", ls_n, "Number of symbols (default 1)");
  landscape->add_option("--b", ls_b,
                        "Scaled-identity coupling coefficient (0 = convex)");
  landscape->add_option("--design", ls_design, "identity (default) or sensing");
  landscape->add_option("--m", ls_m, "Rows of the Gaussian sensing matrix");
  landscape->add_option("--mu", ls_mu, "Regularization weight (default 1)");
  landscape->add_option("--total-gamma", ls_total_gamma,
                        "Convexity budget of the sensing design");
  landscape->add_option("--seed", ls_seed, "Seed for the sensing matrix");
  landscape->add_option("--grid", ls_grid, "Scan grid lo:hi:step")->required();
  landscape->add_option("--out", ls_out, "Output CSV path (default stdout)");

  // prox-check
  auto* prox_check = app.add_subcommand(
      "prox-check", "Randomized oracle comparison of prox/projection operators");
  std::uint64_t pc_seed = 1;
  long pc_cases = 200;
  bool pc_fault = false;
  prox_check->add_option("--seed", pc_seed, "RNG seed (default 1)");
  prox_check->add_option("--cases", pc_cases, "Cases per operator (default 200)")
      ->check(CLI::PositiveNumber);
  prox_check->add_flag("--inject-fault", pc_fault,
                       "Negative control: perturb the l1 threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return cmd_run(run_config, run_trials, run_seed, run_snr, run_out,
                     run_threads, run_eps_floor);
    if (certify->parsed()) return cmd_certify(certify_config);
    if (landscape->parsed())
      return cmd_landscape(ls_modulation, ls_levels, ls_order, ls_n, ls_b,
                           ls_design, ls_m, ls_mu, ls_total_gamma, ls_seed,
                           ls_grid, ls_out);
    if (prox_check->parsed()) return cmd_prox_check(pc_seed, pc_cases, pc_fault);
  } catch (const ligme::CertificationError& e) {
    std::cerr << "certification error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
