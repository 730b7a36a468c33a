#include "ligme/io.hpp"

#include "ligme/rng.hpp"
#include "ligme/version.hpp"

#include <json.hpp>

#include <climits>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ligme::io {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

json parse_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(where, std::string("invalid JSON: ") + e.what());
  }
}

bool in_list(const std::string& key,
             std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (key == n) return true;
  return false;
}

// Strict object schema: every required key present, no key outside
// required ∪ optional.
void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!j.is_object()) fail(where, "expected a JSON object");
  for (const char* r : required)
    if (!j.contains(r)) fail(where, std::string("missing key '") + r + "'");
  for (const auto& item : j.items())
    if (!in_list(item.key(), required) && !in_list(item.key(), optional))
      fail(where, "unknown key '" + item.key() + "'");
}

double get_double(const json& j, const std::string& where,
                  const char* key) {
  const json& v = j.at(key);
  if (!v.is_number()) fail(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

long get_long(const json& j, const std::string& where, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer())
    fail(where, std::string("'") + key + "' must be an integer");
  return v.get<long>();
}

int get_int(const json& j, const std::string& where, const char* key) {
  const long v = get_long(j, where, key);
  if (v < INT_MIN || v > INT_MAX)
    fail(where, std::string("'") + key + "' out of range");
  return static_cast<int>(v);
}

std::uint64_t get_uint64(const json& j, const std::string& where,
                         const char* key) {
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const std::int64_t s = v.get<std::int64_t>();
    if (s >= 0) return static_cast<std::uint64_t>(s);
  }
  fail(where, std::string("'") + key + "' must be a nonnegative integer");
}

std::string get_string(const json& j, const std::string& where,
                       const char* key) {
  const json& v = j.at(key);
  if (!v.is_string()) fail(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& j, const std::string& where, const char* key) {
  const json& v = j.at(key);
  if (!v.is_boolean())
    fail(where, std::string("'") + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<double> get_double_array(const json& j, const std::string& where,
                                     const char* key) {
  const json& v = j.at(key);
  if (!v.is_array()) fail(where, std::string("'") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number())
      fail(where, std::string("'") + key + "' entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// --- alphabet ---------------------------------------------------------------

json alphabet_to(const Alphabet& a) {
  json j;
  switch (a.modulation) {
    case Modulation::Real: {
      j["modulation"] = "real";
      json pts = json::array();
      for (const auto& p : a.points) pts.push_back(p.real());
      j["points"] = std::move(pts);
      break;
    }
    case Modulation::Qam:
    case Modulation::Psk: {
      j["modulation"] = a.modulation == Modulation::Qam ? "qam" : "psk";
      j["order"] = a.size();
      json pts = json::array();
      for (const auto& p : a.points)
        pts.push_back(json::array({p.real(), p.imag()}));
      j["points"] = std::move(pts);
      break;
    }
  }
  return j;
}

Alphabet alphabet_from(const json& j, const std::string& where) {
  check_keys(j, where, {"modulation"}, {"points", "order"});
  const std::string tag = get_string(j, where, "modulation");
  if (tag == "real") {
    if (j.contains("order"))
      fail(where, "'order' applies to complex modulations only");
    if (!j.contains("points")) fail(where, "missing key 'points'");
    return Alphabet::real(get_double_array(j, where, "points"));
  }
  if (tag != "qam" && tag != "psk")
    fail(where, "'modulation' must be \"real\", \"qam\" or \"psk\"");
  if (!j.contains("order")) fail(where, "missing key 'order'");
  const int order = get_int(j, where, "order");
  Alphabet a = tag == "qam" ? Alphabet::qam(order) : Alphabet::psk(order);
  if (j.contains("points")) {
    const json& pts = j.at("points");
    if (!pts.is_array() || static_cast<int>(pts.size()) != a.size())
      fail(where, "'points' must list all " + std::to_string(a.size()) +
                      " constellation points");
    for (int i = 0; i < a.size(); ++i) {
      const json& p = pts.at(static_cast<std::size_t>(i));
      if (!p.is_array() || p.size() != 2 || !p.at(0).is_number() ||
          !p.at(1).is_number())
        fail(where, "'points' entries must be [re, im] pairs");
      if (p.at(0).get<double>() != a.points[static_cast<std::size_t>(i)].real() ||
          p.at(1).get<double>() != a.points[static_cast<std::size_t>(i)].imag())
        fail(where, "'points' do not match the canonical " + tag +
                        " constellation at index " + std::to_string(i));
    }
  }
  return a;
}

// --- detectors --------------------------------------------------------------

json detector_to(const DetectorSpec& d) {
  json j;
  j["model"] = d.use_gme ? "cligme" : "soav";
  if (d.reweighting) {
    j["reweighting"] = {{"period", d.reweighting->period},
                        {"delta", d.reweighting->delta}};
  }
  if (d.superiorization) {
    const SuperiorizationPolicy& s = *d.superiorization;
    json sj;
    switch (s.schedule) {
      case SuperiorizationPolicy::Schedule::Zero:
        sj = {{"schedule", "zero"}};
        break;
      case SuperiorizationPolicy::Schedule::Geometric:
        sj = {{"schedule", "geometric"}, {"c", s.c}, {"r", s.r}};
        break;
      case SuperiorizationPolicy::Schedule::InversePower:
        sj = {{"schedule", "inverse_power"}, {"c", s.c}, {"p", s.p}};
        break;
      case SuperiorizationPolicy::Schedule::Constant:
        sj = {{"schedule", "constant"}, {"c", s.c}};
        break;
    }
    j["superiorization"] = std::move(sj);
  }
  return j;
}

DetectorSpec detector_from(const json& j, const std::string& where) {
  check_keys(j, where, {"model"}, {"reweighting", "superiorization"});
  DetectorSpec d;
  const std::string model = get_string(j, where, "model");
  if (model == "soav")
    d.use_gme = false;
  else if (model == "cligme")
    d.use_gme = true;
  else
    fail(where, "'model' must be \"soav\" or \"cligme\"");
  if (j.contains("reweighting")) {
    const json& r = j.at("reweighting");
    const std::string w = where + ".reweighting";
    check_keys(r, w, {}, {"period", "delta"});
    ReweightingPolicy defaults;
    d.reweighting = ReweightingPolicy::make(
        r.contains("period") ? get_long(r, w, "period") : defaults.period,
        r.contains("delta") ? get_double(r, w, "delta") : defaults.delta);
  }
  if (j.contains("superiorization")) {
    const json& s = j.at("superiorization");
    const std::string w = where + ".superiorization";
    if (!s.is_object()) fail(w, "expected a JSON object");
    if (!s.contains("schedule")) fail(w, "missing key 'schedule'");
    const std::string sched = get_string(s, w, "schedule");
    if (sched == "zero") {
      check_keys(s, w, {"schedule"}, {});
      d.superiorization = SuperiorizationPolicy::zero();
    } else if (sched == "geometric") {
      check_keys(s, w, {"schedule", "c", "r"}, {});
      d.superiorization = SuperiorizationPolicy::geometric(
          get_double(s, w, "c"), get_double(s, w, "r"));
    } else if (sched == "inverse_power") {
      check_keys(s, w, {"schedule", "c", "p"}, {});
      d.superiorization = SuperiorizationPolicy::inverse_power(
          get_double(s, w, "c"), get_double(s, w, "p"));
    } else if (sched == "constant") {
      check_keys(s, w, {"schedule", "c"}, {});
      d.superiorization =
          SuperiorizationPolicy::constant(get_double(s, w, "c"));
    } else {
      fail(w, "'schedule' must be \"zero\", \"geometric\", "
              "\"inverse_power\" or \"constant\"");
    }
  }
  return d;
}

// --- experiment config ------------------------------------------------------

json experiment_config_to(const ExperimentConfig& c) {
  json j;
  j["alphabet"] = alphabet_to(c.alphabet);
  j["n_tx"] = c.n_tx;
  j["m_rx"] = c.m_rx;
  j["rho"] = c.rho;
  j["snr_db"] = c.snr_db;
  j["mu_grid"] = c.mu_grid;
  j["trials"] = c.trials;
  j["max_iter"] = c.max_iter;
  j["residual_tol"] = c.residual_tol;
  j["total_gamma"] = c.total_gamma;
  j["kappa"] = c.kappa;
  j["seed"] = c.seed;
  json dets = json::array();
  for (const auto& d : c.detectors) dets.push_back(detector_to(d));
  j["detectors"] = std::move(dets);
  j["output_path"] = c.output_path;
  j["epsilon_floor"] = c.epsilon_floor;
  j["threads"] = c.threads;
  return j;
}

ExperimentConfig experiment_config_from(const json& j) {
  const std::string where = "config";
  check_keys(j, where,
             {"alphabet", "n_tx", "m_rx", "snr_db", "mu_grid", "trials",
              "detectors"},
             {"rho", "max_iter", "residual_tol", "total_gamma", "kappa",
              "seed", "output_path", "epsilon_floor", "threads"});
  ExperimentConfig c;
  c.alphabet = alphabet_from(j.at("alphabet"), where + ".alphabet");
  c.n_tx = get_int(j, where, "n_tx");
  c.m_rx = get_int(j, where, "m_rx");
  if (j.contains("rho")) c.rho = get_double(j, where, "rho");
  c.snr_db = get_double_array(j, where, "snr_db");
  c.mu_grid = get_double_array(j, where, "mu_grid");
  c.trials = get_int(j, where, "trials");
  if (j.contains("max_iter")) c.max_iter = get_long(j, where, "max_iter");
  if (j.contains("residual_tol"))
    c.residual_tol = get_double(j, where, "residual_tol");
  if (j.contains("total_gamma"))
    c.total_gamma = get_double(j, where, "total_gamma");
  if (j.contains("kappa")) c.kappa = get_double(j, where, "kappa");
  if (j.contains("seed")) c.seed = get_uint64(j, where, "seed");
  const json& dets = j.at("detectors");
  if (!dets.is_array()) fail(where, "'detectors' must be an array");
  for (std::size_t i = 0; i < dets.size(); ++i)
    c.detectors.push_back(detector_from(
        dets.at(i), where + ".detectors[" + std::to_string(i) + "]"));
  if (j.contains("output_path"))
    c.output_path = get_string(j, where, "output_path");
  if (j.contains("epsilon_floor"))
    c.epsilon_floor = get_bool(j, where, "epsilon_floor");
  if (j.contains("threads")) c.threads = get_int(j, where, "threads");
  return c;
}

// --- matrices ---------------------------------------------------------------

json matrix_to(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    fail(where, "expected a nonempty array of row arrays");
  const json& first = j.at(0);
  if (!first.is_array() || first.empty())
    fail(where, "rows must be nonempty arrays of numbers");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(first.size());
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(where, "row " + std::to_string(r) + " has inconsistent length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row.at(static_cast<std::size_t>(c));
      if (!e.is_number()) fail(where, "entries must be numbers");
      m(r, c) = e.get<double>();
    }
  }
  return m;
}

}  // namespace

std::string alphabet_to_json(const Alphabet& alphabet) {
  return alphabet_to(alphabet).dump(2) + "\n";
}

Alphabet alphabet_from_json(const std::string& text) {
  return alphabet_from(parse_text(text, "alphabet"), "alphabet");
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  return experiment_config_to(config).dump(2) + "\n";
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  return experiment_config_from(parse_text(text, "config"));
}

std::string matrix_to_json(const RealMatrix& m) {
  return matrix_to(m).dump() + "\n";
}

RealMatrix matrix_from_json(const std::string& text) {
  return matrix_from(parse_text(text, "matrix"), "matrix");
}

CertifyConfig certify_config_from_json(const std::string& text) {
  const std::string where = "certify config";
  const json j = parse_text(text, where);
  check_keys(j, where, {"matrix", "mu", "gme"}, {"count"});

  CertifyConfig c;
  const json& mj = j.at("matrix");
  const std::string mw = where + ".matrix";
  if (!mj.is_object()) fail(mw, "expected a JSON object");
  if (!mj.contains("source")) fail(mw, "missing key 'source'");
  const std::string source = get_string(mj, mw, "source");
  if (source == "gaussian") {
    check_keys(mj, mw, {"source", "rows", "cols"}, {"seed"});
    const int rows = get_int(mj, mw, "rows");
    const int cols = get_int(mj, mw, "cols");
    if (rows < 1 || cols < 1) fail(mw, "'rows'/'cols' must be positive");
    RngStream rng(mj.contains("seed") ? get_uint64(mj, mw, "seed") : 0);
    c.A.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int col = 0; col < cols; ++col) c.A(r, col) = rng.gaussian();
  } else if (source == "identity") {
    check_keys(mj, mw, {"source", "dim"}, {});
    const int dim = get_int(mj, mw, "dim");
    if (dim < 1) fail(mw, "'dim' must be positive");
    c.A = RealMatrix::Identity(dim, dim);
  } else if (source == "file") {
    check_keys(mj, mw, {"source", "path"}, {});
    const std::string path = get_string(mj, mw, "path");
    c.A = matrix_from(parse_text(read_text_file(path), mw), mw);
  } else {
    fail(mw, "'source' must be \"gaussian\", \"identity\" or \"file\"");
  }

  c.mu = get_double(j, where, "mu");
  if (!(c.mu > 0.0) || !std::isfinite(c.mu)) fail(where, "'mu' must be positive");
  c.count = j.contains("count") ? get_int(j, where, "count") : 1;
  if (c.count < 1) fail(where, "'count' must be positive");

  const json& gj = j.at("gme");
  const std::string gw = where + ".gme";
  if (!gj.is_object()) fail(gw, "expected a JSON object");
  if (!gj.contains("kind")) fail(gw, "missing key 'kind'");
  const std::string kind = get_string(gj, gw, "kind");
  if (kind == "zero") {
    check_keys(gj, gw, {"kind"}, {});
    c.gme = GmeSpec::zero(c.count, c.A.cols());
  } else if (kind == "scaled_identity") {
    check_keys(gj, gw, {"kind", "b"}, {});
    c.gme = GmeSpec::scaled_identity(get_double(gj, gw, "b"), c.count,
                                     c.A.cols());
  } else if (kind == "scaled_sensing") {
    check_keys(gj, gw, {"kind", "total_gamma"}, {});
    const double total_gamma = get_double(gj, gw, "total_gamma");
    if (!(total_gamma > 0.0) || !std::isfinite(total_gamma))
      fail(gw, "'total_gamma' must be positive");
    if (total_gamma <= 1.0) {
      c.gme = build_gme_scaled_sensing(c.A, c.mu, c.count, total_gamma);
    } else {
      // Budgets beyond 1 violate the scaled-sensing kind's invariant but are
      // exactly what a certification run wants to reject; express them
      // through the unrestricted explicit kind (same matrices).
      const double scale = std::sqrt(total_gamma / (c.count * c.mu));
      std::vector<RealMatrix> mats(static_cast<std::size_t>(c.count),
                                   scale * c.A);
      c.gme = GmeSpec::explicit_matrices(std::move(mats));
    }
  } else if (kind == "explicit") {
    check_keys(gj, gw, {"kind", "matrices"}, {});
    const json& ms = gj.at("matrices");
    if (!ms.is_array() || ms.empty())
      fail(gw, "'matrices' must be a nonempty array of matrices");
    std::vector<RealMatrix> mats;
    for (std::size_t i = 0; i < ms.size(); ++i)
      mats.push_back(matrix_from(
          ms.at(i), gw + ".matrices[" + std::to_string(i) + "]"));
    if (j.contains("count") &&
        c.count != static_cast<int>(mats.size()))
      fail(where, "'count' disagrees with the number of explicit matrices");
    c.count = static_cast<int>(mats.size());
    c.gme = GmeSpec::explicit_matrices(std::move(mats));
  } else {
    fail(gw, "'kind' must be \"zero\", \"scaled_identity\", "
             "\"scaled_sensing\" or \"explicit\"");
  }
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failed: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec)
      throw std::runtime_error("cannot create directory " +
                               p.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_sweep_outputs(const SweepResult& result,
                         const ExperimentConfig& config,
                         const std::string& csv_path) {
  write_text_file(csv_path, sweep_to_csv(result, config.epsilon_floor));

  json meta;
  meta["version"] = kVersion;
  meta["seed"] = config.seed;
  meta["elapsed_seconds"] = result.elapsed_seconds;
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  meta["timestamp_utc"] = stamp;
  // Realizations are paired: every (snr, trial) cell reuses one
  // (signal, channel, noise) draw across detectors and mu values.
  meta["common_random_numbers"] = true;
  meta["config"] = experiment_config_to(config);
  write_text_file(csv_path + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace ligme::io
