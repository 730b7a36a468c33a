#pragma once

#include "ligme/modifications.hpp"
#include "ligme/rng.hpp"
#include "ligme/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Monte-Carlo detection harness: spatially correlated Rayleigh MIMO channels,
// noise scaled to a target SNR, and a sweep over SNR points, regularization
// weights and detector variants that reports bit error rates.  Every trial of
// a given (snr, trial index) cell reuses one (signal, channel, noise)
// realization across all detectors and regularization weights, so detector
// comparisons are paired.
namespace ligme {

// M_rx x N_tx complex channel with receive-side correlation
// R_{r,c} = rho^{|r-c|} and i.i.d. CN(0, 1/M) entries before correlation.
struct ChannelModel {
  int n_tx = 0;
  int m_rx = 0;
  double rho = 0.5;
  RealMatrix sqrt_correlation;  // symmetric PSD square root of R

  static ChannelModel make(int n_tx, int m_rx, double rho = 0.5);
};

// A = R^{1/2} G with G having independent CN(0, 1/M) entries (each real part
// N(0, 1/(2M))).  Entries are drawn column-major, real part before imaginary.
ComplexMatrix sample_channel(const ChannelModel& model, RngStream& rng);

struct NoiseSample {
  ComplexVector value;
  double variance;  // per complex entry
};

// Circular complex Gaussian noise with variance signal_power / 10^(snr/10)
// per entry, so that 10·log10(signal_power / variance) equals snr_db.
NoiseSample sample_noise_for_snr(double snr_db, double signal_power, int m_rx,
                                 RngStream& rng);

// Mean squared modulus of a uniformly drawn symbol.
double average_symbol_energy(const Alphabet& alphabet);

// One detector variant of the sweep: the convex model (zero coupling) or the
// convexity-preserving enhanced model, optionally with the heuristic
// refinements.
struct DetectorSpec {
  bool use_gme = true;
  std::optional<ReweightingPolicy> reweighting;
  std::optional<SuperiorizationPolicy> superiorization;

  // Display / CSV name: "cLiGME" or "SOAV", prefixed with "IW-" when
  // reweighting is active and "GS-" when superiorization is.
  std::string name() const;
};

struct ExperimentConfig {
  Alphabet alphabet;
  int n_tx = 0;
  int m_rx = 0;
  double rho = 0.5;
  std::vector<double> snr_db;
  std::vector<double> mu_grid;
  int trials = 0;
  long max_iter = 500;
  double residual_tol = 1e-10;
  double total_gamma = 0.99;
  double kappa = 1.001;
  std::uint64_t seed = 0;
  std::vector<DetectorSpec> detectors;
  std::string output_path;     // empty: compute only, write nothing
  bool epsilon_floor = false;  // report machine epsilon instead of 0 BER
  int threads = 0;             // 0: use all hardware threads

  void validate() const;
};

// Everything one (snr, trial) cell shares across detectors and mu values,
// plus cached spectral quantities so per-cell problem setup stays cheap.
struct TrialRealization {
  std::vector<int> symbol_indices;
  ComplexVector x_star;
  ComplexMatrix A;
  ComplexVector noise;
  double noise_variance = 0.0;
  RealMatrix a_widened;
  RealVector y_widened;
  RealMatrix gram;          // a_widenedᵀ · a_widened
  double a_opnorm_sq = 0.0; // ‖a_widened‖²
  double gram_min_eig = 0.0;
};

// Draws the realization of cell (snr index, trial) from the stream derived
// from (config seed, snr index, trial); draw order is symbols, channel, noise.
TrialRealization draw_realization(const ExperimentConfig& config,
                                  const ChannelModel& model, int snr_index,
                                  int trial);

struct TrialOutcome {
  long bit_errors = 0;
  long total_bits = 0;
  long iterations = 0;
};

// Solves one (mu, detector) cell on a given realization and scores its bits.
TrialOutcome run_cell(const ExperimentConfig& config,
                      const TrialRealization& realization, double mu,
                      const DetectorSpec& detector);

// Self-contained single trial: realization plus one cell.  Different
// detectors / mu values at the same (snr_index, trial) redraw the identical
// realization, which is what makes comparisons paired.
TrialOutcome run_trial(const ExperimentConfig& config, int snr_index,
                       double mu, const DetectorSpec& detector, int trial);

struct SweepCell {
  double snr_db = 0.0;
  std::string detector;
  double mu = 0.0;
  long trials = 0;
  long bit_errors = 0;
  long total_bits = 0;
  double ber = 0.0;
  bool best_row = false;  // true for the per-(snr, detector) best-mu summary
};

struct SweepResult {
  std::vector<SweepCell> cells;  // raw rows first, then best-mu summaries
  double elapsed_seconds = 0.0;
};

// Runs the full sweep (parallel over (snr, trial) cells; results independent
// of the thread count), and when config.output_path is set writes the CSV and
// a JSON metadata sidecar next to it.
SweepResult run_sweep(const ExperimentConfig& config);

// CSV serialization of a sweep (header
// `snr_db,detector,mu,trials,bit_errors,total_bits,ber`, LF line endings,
// `%.6e` bit error rates, zero rates replaced by machine epsilon when
// epsilon_floor is set).
std::string sweep_to_csv(const SweepResult& result, bool epsilon_floor);

}  // namespace ligme
