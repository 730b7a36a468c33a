#include "ligme/experiment.hpp"

#include "ligme/io.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

namespace ligme {

ChannelModel ChannelModel::make(int n_tx, int m_rx, double rho) {
  require(n_tx >= 1 && m_rx >= 1,
          "ChannelModel: antenna counts must be positive");
  require(rho >= 0.0 && rho < 1.0,
          "ChannelModel: correlation coefficient must lie in [0, 1)");
  ChannelModel model;
  model.n_tx = n_tx;
  model.m_rx = m_rx;
  model.rho = rho;
  RealMatrix R(m_rx, m_rx);
  for (int r = 0; r < m_rx; ++r)
    for (int c = 0; c < m_rx; ++c) R(r, c) = std::pow(rho, std::abs(r - c));
  // Symmetric PSD square root via eigendecomposition; the exponential
  // correlation profile is positive definite for |rho| < 1, tiny negative
  // eigenvalues from rounding are clamped.
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(R);
  require(es.info() == Eigen::Success,
          "ChannelModel: eigendecomposition of the correlation matrix failed");
  RealVector sqrt_eigs = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  model.sqrt_correlation =
      es.eigenvectors() * sqrt_eigs.asDiagonal() * es.eigenvectors().transpose();
  return model;
}

ComplexMatrix sample_channel(const ChannelModel& model, RngStream& rng) {
  const double stddev = std::sqrt(1.0 / (2.0 * model.m_rx));
  ComplexMatrix G(model.m_rx, model.n_tx);
  for (int c = 0; c < model.n_tx; ++c)
    for (int r = 0; r < model.m_rx; ++r) {
      const double re = stddev * rng.gaussian();
      const double im = stddev * rng.gaussian();
      G(r, c) = std::complex<double>(re, im);
    }
  ComplexMatrix A(model.m_rx, model.n_tx);
  A.real() = model.sqrt_correlation * G.real();
  A.imag() = model.sqrt_correlation * G.imag();
  return A;
}

NoiseSample sample_noise_for_snr(double snr_db, double signal_power, int m_rx,
                                 RngStream& rng) {
  require(std::isfinite(snr_db), "sample_noise_for_snr: snr must be finite");
  require(signal_power > 0.0 && std::isfinite(signal_power),
          "sample_noise_for_snr: signal power must be positive");
  require(m_rx >= 1, "sample_noise_for_snr: dimension must be positive");
  NoiseSample ns;
  ns.variance = signal_power / std::pow(10.0, snr_db / 10.0);
  const double stddev = std::sqrt(ns.variance / 2.0);
  ns.value.resize(m_rx);
  for (int r = 0; r < m_rx; ++r) {
    const double re = stddev * rng.gaussian();
    const double im = stddev * rng.gaussian();
    ns.value[r] = std::complex<double>(re, im);
  }
  return ns;
}

double average_symbol_energy(const Alphabet& alphabet) {
  double s = 0.0;
  for (const auto& p : alphabet.points) s += std::norm(p);
  return s / alphabet.size();
}

std::string DetectorSpec::name() const {
  std::string n = use_gme ? "cLiGME" : "SOAV";
  if (superiorization &&
      superiorization->schedule != SuperiorizationPolicy::Schedule::Zero &&
      superiorization->c != 0.0)
    n = "GS-" + n;
  if (reweighting) n = "IW-" + n;
  return n;
}

void ExperimentConfig::validate() const {
  require(alphabet.is_complex(),
          "ExperimentConfig: the detection harness is defined for complex "
          "modulations (QAM / PSK)");
  require(n_tx >= 1 && m_rx >= 1,
          "ExperimentConfig: antenna counts must be positive");
  require(rho >= 0.0 && rho < 1.0, "ExperimentConfig: rho must lie in [0, 1)");
  require(!snr_db.empty(), "ExperimentConfig: empty snr grid");
  for (double s : snr_db)
    require(std::isfinite(s), "ExperimentConfig: snr values must be finite");
  require(!mu_grid.empty(), "ExperimentConfig: empty mu grid");
  for (double m : mu_grid)
    require(m > 0.0 && std::isfinite(m),
            "ExperimentConfig: mu values must be positive");
  require(trials >= 1, "ExperimentConfig: at least one trial");
  require(max_iter >= 1, "ExperimentConfig: max_iter must be positive");
  require(residual_tol >= 0.0,
          "ExperimentConfig: residual_tol must be nonnegative");
  require(total_gamma > 0.0 && total_gamma <= 1.0,
          "ExperimentConfig: total_gamma must lie in (0, 1]");
  require(kappa > 1.0, "ExperimentConfig: kappa must exceed 1");
  require(!detectors.empty(), "ExperimentConfig: at least one detector");
  for (std::size_t i = 0; i < detectors.size(); ++i)
    for (std::size_t j = i + 1; j < detectors.size(); ++j)
      require(detectors[i].name() != detectors[j].name(),
              "ExperimentConfig: duplicate detector '" + detectors[i].name() +
                  "'");
  require(threads >= 0, "ExperimentConfig: threads must be nonnegative");
}

TrialRealization draw_realization(const ExperimentConfig& config,
                                  const ChannelModel& model, int snr_index,
                                  int trial) {
  require(snr_index >= 0 &&
              snr_index < static_cast<int>(config.snr_db.size()),
          "draw_realization: snr index out of range");
  require(trial >= 0, "draw_realization: trial index must be nonnegative");
  RngStream rng(derive_stream_seed(config.seed,
                                   static_cast<std::uint64_t>(snr_index),
                                   static_cast<std::uint64_t>(trial)));
  TrialRealization r;
  const int N = config.n_tx;
  r.symbol_indices.reserve(static_cast<std::size_t>(N));
  r.x_star.resize(N);
  for (int n = 0; n < N; ++n) {
    const int idx = static_cast<int>(
        rng.uniform_int(static_cast<std::uint64_t>(config.alphabet.size())));
    r.symbol_indices.push_back(idx);
    r.x_star[n] = config.alphabet.points[static_cast<std::size_t>(idx)];
  }
  r.A = sample_channel(model, rng);
  const double signal_power = N * average_symbol_energy(config.alphabet);
  NoiseSample ns =
      sample_noise_for_snr(config.snr_db[static_cast<std::size_t>(snr_index)],
                           signal_power, config.m_rx, rng);
  r.noise = std::move(ns.value);
  r.noise_variance = ns.variance;
  const ComplexVector y = r.A * r.x_star + r.noise;
  r.a_widened = widen_channel(r.A);
  r.y_widened = complex_to_real_stack(y);
  r.gram = r.a_widened.transpose() * r.a_widened;
  // One spectral decomposition of the Gram matrix yields both the norm used
  // by the step sizes and the convexity witness reused by every cell.
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(r.gram, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success,
          "draw_realization: Gram eigendecomposition failed");
  r.a_opnorm_sq = std::max(es.eigenvalues().maxCoeff(), 0.0);
  r.gram_min_eig = es.eigenvalues().minCoeff();
  return r;
}

TrialOutcome run_cell(const ExperimentConfig& config,
                      const TrialRealization& realization, double mu,
                      const DetectorSpec& detector) {
  const Alphabet& alphabet = config.alphabet;
  SeedRegularizer seed = SeedRegularizer::for_alphabet(alphabet, config.n_tx);
  const int L = seed.count();
  const Eigen::Index D = realization.a_widened.cols();

  GmeSpec gme = detector.use_gme
                    ? build_gme_scaled_sensing_from_gram(
                          realization.gram, realization.a_opnorm_sq, mu, L,
                          config.total_gamma)
                    : GmeSpec::zero(L, D);
  // The convexity witness follows from the cached Gram spectrum: the
  // scaled-sensing design leaves (1 - total_gamma)·AᵀA, the zero coupling
  // leaves AᵀA itself.
  const double min_eig = detector.use_gme
                             ? (1.0 - config.total_gamma) * realization.gram_min_eig
                             : realization.gram_min_eig;
  gme.certification = PsdCertification{min_eig >= -1e-10, min_eig};

  LigmeRegularizer reg =
      LigmeRegularizer::make(std::move(seed), std::move(gme), mu);
  RealizedProblem problem = RealizedProblem::make(
      realization.y_widened, realization.a_widened,
      hull_for(alphabet, config.n_tx), std::move(reg), alphabet,
      realization.a_opnorm_sq);
  const StepSizes steps = default_step_sizes(problem, config.kappa);

  SolveOptions options;
  options.max_iter = config.max_iter;
  options.residual_tol = config.residual_tol;
  const SolveReport report =
      solve_modified(problem, steps, SolverState::zero(problem), options,
                     detector.reweighting, detector.superiorization);

  const auto tx_bits = symbols_to_bits(realization.symbol_indices, alphabet);
  const auto rx_bits = symbols_to_bits(report.quantized_indices, alphabet);
  TrialOutcome out;
  out.total_bits = static_cast<long>(tx_bits.size());
  for (std::size_t i = 0; i < tx_bits.size(); ++i)
    out.bit_errors += tx_bits[i] != rx_bits[i];
  out.iterations = report.iterations;
  return out;
}

TrialOutcome run_trial(const ExperimentConfig& config, int snr_index,
                       double mu, const DetectorSpec& detector, int trial) {
  const ChannelModel model =
      ChannelModel::make(config.n_tx, config.m_rx, config.rho);
  const TrialRealization realization =
      draw_realization(config, model, snr_index, trial);
  return run_cell(config, realization, mu, detector);
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const ChannelModel model =
      ChannelModel::make(config.n_tx, config.m_rx, config.rho);

  const std::size_t n_snr = config.snr_db.size();
  const std::size_t n_det = config.detectors.size();
  const std::size_t n_mu = config.mu_grid.size();
  const std::size_t n_trials = static_cast<std::size_t>(config.trials);
  const std::size_t n_tasks = n_snr * n_trials;

  // One slot per (snr, trial); workers never share slots, so the result is
  // independent of how tasks are scheduled across threads.
  std::vector<std::vector<TrialOutcome>> slots(n_tasks);
  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next_task.fetch_add(1);
      if (i >= n_tasks || failed.load()) return;
      try {
        const int s = static_cast<int>(i / n_trials);
        const int t = static_cast<int>(i % n_trials);
        const TrialRealization realization =
            draw_realization(config, model, s, t);
        std::vector<TrialOutcome> outcomes;
        outcomes.reserve(n_det * n_mu);
        for (std::size_t d = 0; d < n_det; ++d)
          for (std::size_t m = 0; m < n_mu; ++m)
            outcomes.push_back(run_cell(config, realization,
                                        config.mu_grid[m],
                                        config.detectors[d]));
        slots[i] = std::move(outcomes);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  int n_threads = config.threads > 0
                      ? config.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(n_tasks)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult result;
  result.cells.reserve(n_snr * n_det * (n_mu + 1));
  for (std::size_t s = 0; s < n_snr; ++s)
    for (std::size_t d = 0; d < n_det; ++d)
      for (std::size_t m = 0; m < n_mu; ++m) {
        SweepCell cell;
        cell.snr_db = config.snr_db[s];
        cell.detector = config.detectors[d].name();
        cell.mu = config.mu_grid[m];
        cell.trials = config.trials;
        for (std::size_t t = 0; t < n_trials; ++t) {
          const TrialOutcome& o = slots[s * n_trials + t][d * n_mu + m];
          cell.bit_errors += o.bit_errors;
          cell.total_bits += o.total_bits;
        }
        cell.ber = static_cast<double>(cell.bit_errors) /
                   static_cast<double>(cell.total_bits);
        result.cells.push_back(std::move(cell));
      }

  // Best-mu summaries: smallest bit error rate, earliest grid entry on ties.
  const std::size_t n_raw = result.cells.size();
  for (std::size_t s = 0; s < n_snr; ++s)
    for (std::size_t d = 0; d < n_det; ++d) {
      const std::size_t base = (s * n_det + d) * n_mu;
      std::size_t best = base;
      for (std::size_t m = 1; m < n_mu; ++m)
        if (result.cells[base + m].ber < result.cells[best].ber)
          best = base + m;
      SweepCell summary = result.cells[best];
      summary.best_row = true;
      result.cells.push_back(std::move(summary));
    }
  (void)n_raw;

  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  if (!config.output_path.empty())
    io::write_sweep_outputs(result, config, config.output_path);
  return result;
}

std::string sweep_to_csv(const SweepResult& result, bool epsilon_floor) {
  std::string out = "snr_db,detector,mu,trials,bit_errors,total_bits,ber\n";
  char buf[256];
  for (const auto& c : result.cells) {
    const double ber =
        (epsilon_floor && c.bit_errors == 0) ? DBL_EPSILON : c.ber;
    const std::string name = c.best_row ? c.detector + ":best" : c.detector;
    std::snprintf(buf, sizeof(buf), "%g,%s,%g,%ld,%ld,%ld,%.6e\n", c.snr_db,
                  name.c_str(), c.mu, c.trials, c.bit_errors, c.total_bits,
                  ber);
    out += buf;
  }
  return out;
}

}  // namespace ligme
