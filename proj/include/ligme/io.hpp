#pragma once

#include "ligme/experiment.hpp"
#include "ligme/regularizer.hpp"

#include <string>

// JSON (de)serialization for the CLI surface and file output helpers.  All
// parsers are strict: unknown keys are rejected at every nesting level and
// type mismatches raise std::invalid_argument with the offending key path.
namespace ligme::io {

// {"modulation": "real", "points": [..]} for real alphabets,
// {"modulation": "qam"|"psk", "order": L, "points": [[re, im], ..]} for
// complex ones.  `points` is informative on output; when present on input it
// must match the canonical constellation exactly.
std::string alphabet_to_json(const Alphabet& alphabet);
Alphabet alphabet_from_json(const std::string& text);

// Full experiment schema; see README for the field list.  Required keys:
// alphabet, n_tx, m_rx, snr_db, mu_grid, trials, detectors.  The remaining
// fields default as in ExperimentConfig.
std::string experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const std::string& text);

// Dense matrix as an array of row arrays.
std::string matrix_to_json(const RealMatrix& m);
RealMatrix matrix_from_json(const std::string& text);

// Input to the convexity-certification command: a sensing matrix (from a
// file, a seeded Gaussian draw, or the identity), the regularization weight
// mu, the number of coupling blocks, and the coupling design itself.
struct CertifyConfig {
  RealMatrix A;
  double mu = 1.0;
  int count = 1;
  GmeSpec gme;  // built but not yet certified
};
CertifyConfig certify_config_from_json(const std::string& text);

// Reads a whole file; throws std::runtime_error naming the path on failure.
std::string read_text_file(const std::string& path);

// Writes content, creating parent directories as needed; throws
// std::runtime_error naming the path on failure.
void write_text_file(const std::string& path, const std::string& content);

// Writes the sweep CSV to csv_path and a metadata sidecar (version, seed,
// timing, timestamp, config echo) to csv_path + ".meta.json".  The CSV is
// written first so it survives a sidecar failure.
void write_sweep_outputs(const SweepResult& result,
                         const ExperimentConfig& config,
                         const std::string& csv_path);

}  // namespace ligme::io
