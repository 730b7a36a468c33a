#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ligme/io.hpp"
#include "ligme/version.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

using namespace ligme;

namespace {

// Scratch directory for file-based cases, cleaned up per test.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ligme_io_test_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("alphabet JSON round-trips") {
  for (const Alphabet& a :
       {Alphabet::real({-3.0, -1.0, 1.0, 3.0}), Alphabet::qam(4),
        Alphabet::qam(16), Alphabet::psk(8)}) {
    const Alphabet back = io::alphabet_from_json(io::alphabet_to_json(a));
    CHECK(back.modulation == a.modulation);
    REQUIRE(back.size() == a.size());
    for (int i = 0; i < a.size(); ++i)
      CHECK(back.points[static_cast<std::size_t>(i)] ==
            a.points[static_cast<std::size_t>(i)]);
    CHECK(back.axis_levels == a.axis_levels);
  }
}

TEST_CASE("alphabet parsing accepts canonical input and rejects the rest") {
  // Complex alphabets need only order; points are optional.
  const Alphabet q = io::alphabet_from_json(R"({"modulation":"qam","order":16})");
  CHECK(q.size() == 16);
  const Alphabet p = io::alphabet_from_json(R"({"modulation":"psk","order":8})");
  CHECK(p.size() == 8);

  // Real alphabets require explicit points.
  CHECK_THROWS_AS(io::alphabet_from_json(R"({"modulation":"real"})"),
                  std::invalid_argument);
  CHECK_NOTHROW(
      io::alphabet_from_json(R"({"modulation":"real","points":[-1,0,1]})"));

  // Non-canonical points are rejected.
  CHECK_THROWS_AS(io::alphabet_from_json(
                      R"({"modulation":"qam","order":4,
                          "points":[[2,1],[-1,1],[1,-1],[1,1]]})"),
                  std::invalid_argument);
  // Wrong point count.
  CHECK_THROWS_AS(io::alphabet_from_json(
                      R"({"modulation":"qam","order":4,"points":[[ -1,-1 ]]})"),
                  std::invalid_argument);
  // Unknown modulation, unknown keys, order on real.
  CHECK_THROWS_AS(io::alphabet_from_json(R"({"modulation":"pam","order":4})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      io::alphabet_from_json(R"({"modulation":"psk","order":8,"foo":1})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      io::alphabet_from_json(R"({"modulation":"real","points":[1,-1],"order":2})"),
      std::invalid_argument);
  // Unsupported orders surface the constellation factory's validation.
  CHECK_THROWS_AS(io::alphabet_from_json(R"({"modulation":"qam","order":8})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::alphabet_from_json("not json"), std::invalid_argument);
}

TEST_CASE("experiment config round-trips with every optional set") {
  ExperimentConfig cfg;
  cfg.alphabet = Alphabet::qam(16);
  cfg.n_tx = 12;
  cfg.m_rx = 10;
  cfg.rho = 0.35;
  cfg.snr_db = {5.0, 12.5, 20.0};
  cfg.mu_grid = {1e-4, 1e-2, 1.0};
  cfg.trials = 42;
  cfg.max_iter = 777;
  cfg.residual_tol = 1e-9;
  cfg.total_gamma = 0.87;
  cfg.kappa = 1.25;
  cfg.seed = 987654321ULL;
  cfg.output_path = "out/ber.csv";
  cfg.epsilon_floor = true;
  cfg.threads = 3;
  DetectorSpec soav;
  soav.use_gme = false;
  DetectorSpec fancy;
  fancy.use_gme = true;
  fancy.reweighting = ReweightingPolicy::make(128, 1e-10);
  fancy.superiorization = SuperiorizationPolicy::geometric(0.05, 0.98);
  cfg.detectors = {soav, fancy};

  const ExperimentConfig back =
      io::experiment_config_from_json(io::experiment_config_to_json(cfg));
  CHECK(back.alphabet.modulation == cfg.alphabet.modulation);
  CHECK(back.alphabet.size() == cfg.alphabet.size());
  CHECK(back.n_tx == cfg.n_tx);
  CHECK(back.m_rx == cfg.m_rx);
  CHECK(back.rho == cfg.rho);
  CHECK(back.snr_db == cfg.snr_db);
  CHECK(back.mu_grid == cfg.mu_grid);
  CHECK(back.trials == cfg.trials);
  CHECK(back.max_iter == cfg.max_iter);
  CHECK(back.residual_tol == cfg.residual_tol);
  CHECK(back.total_gamma == cfg.total_gamma);
  CHECK(back.kappa == cfg.kappa);
  CHECK(back.seed == cfg.seed);
  CHECK(back.output_path == cfg.output_path);
  CHECK(back.epsilon_floor == cfg.epsilon_floor);
  CHECK(back.threads == cfg.threads);
  REQUIRE(back.detectors.size() == 2);
  CHECK(back.detectors[0].name() == "SOAV");
  CHECK(back.detectors[1].name() == "IW-GS-cLiGME");
  CHECK(back.detectors[1].reweighting->period == 128);
  CHECK(back.detectors[1].reweighting->delta == 1e-10);
  CHECK(back.detectors[1].superiorization->c == 0.05);
  CHECK(back.detectors[1].superiorization->r == 0.98);
}

TEST_CASE("experiment config parsing is strict at every level") {
  const std::string minimal = R"({
    "alphabet": {"modulation": "psk", "order": 8},
    "n_tx": 4, "m_rx": 6,
    "snr_db": [10], "mu_grid": [0.1], "trials": 2,
    "detectors": [{"model": "cligme"}]
  })";
  CHECK_NOTHROW(io::experiment_config_from_json(minimal));

  auto mutate = [&](const std::string& find, const std::string& replace) {
    std::string s = minimal;
    s.replace(s.find(find), find.size(), replace);
    return s;
  };

  // Unknown top-level key.
  CHECK_THROWS_AS(
      io::experiment_config_from_json(mutate("\"n_tx\"", "\"ntx\"")),
      std::invalid_argument);
  // Missing required key.
  CHECK_THROWS_AS(io::experiment_config_from_json(
                      mutate("\"trials\": 2,", "")),
                  std::invalid_argument);
  // Wrong type.
  CHECK_THROWS_AS(io::experiment_config_from_json(
                      mutate("\"trials\": 2", "\"trials\": \"two\"")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::experiment_config_from_json(
                      mutate("[10]", "10")),
                  std::invalid_argument);
  // Unknown detector model / key.
  CHECK_THROWS_AS(io::experiment_config_from_json(
                      mutate("{\"model\": \"cligme\"}",
                             "{\"model\": \"mmse\"}")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::experiment_config_from_json(
                      mutate("{\"model\": \"cligme\"}",
                             "{\"model\": \"cligme\", \"iters\": 5}")),
                  std::invalid_argument);
  // Unknown alphabet key.
  CHECK_THROWS_AS(io::experiment_config_from_json(
                      mutate("\"order\": 8", "\"order\": 8, \"bits\": 3")),
                  std::invalid_argument);
}

TEST_CASE("detector schedules parse strictly") {
  auto config_with = [](const std::string& detector) {
    return std::string(R"({
      "alphabet": {"modulation": "psk", "order": 8},
      "n_tx": 4, "m_rx": 6,
      "snr_db": [10], "mu_grid": [0.1], "trials": 2,
      "detectors": [)") +
           detector + "]}";
  };

  const ExperimentConfig geo = io::experiment_config_from_json(config_with(
      R"({"model":"cligme","superiorization":{"schedule":"geometric","c":0.1,"r":0.9}})"));
  CHECK(geo.detectors[0].superiorization->schedule ==
        SuperiorizationPolicy::Schedule::Geometric);

  const ExperimentConfig inv = io::experiment_config_from_json(config_with(
      R"({"model":"soav","superiorization":{"schedule":"inverse_power","c":0.2,"p":1.5}})"));
  CHECK(inv.detectors[0].superiorization->p == 1.5);

  const ExperimentConfig cst = io::experiment_config_from_json(config_with(
      R"({"model":"soav","superiorization":{"schedule":"constant","c":0.05}})"));
  CHECK_FALSE(cst.detectors[0].superiorization->summable());

  const ExperimentConfig zero = io::experiment_config_from_json(
      config_with(R"({"model":"soav","superiorization":{"schedule":"zero"}})"));
  CHECK(zero.detectors[0].superiorization->schedule ==
        SuperiorizationPolicy::Schedule::Zero);

  const ExperimentConfig rw = io::experiment_config_from_json(config_with(
      R"({"model":"cligme","reweighting":{"period":64,"delta":1e-9}})"));
  CHECK(rw.detectors[0].reweighting->period == 64);
  // Reweighting defaults apply when the object is empty.
  const ExperimentConfig rwd = io::experiment_config_from_json(
      config_with(R"({"model":"cligme","reweighting":{}})"));
  CHECK(rwd.detectors[0].reweighting->period == 100);

  // Missing or surplus schedule parameters are rejected.
  CHECK_THROWS_AS(io::experiment_config_from_json(config_with(
                      R"({"model":"soav","superiorization":{"schedule":"geometric","c":0.1}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::experiment_config_from_json(config_with(
                      R"({"model":"soav","superiorization":{"schedule":"constant","c":0.1,"r":0.5}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::experiment_config_from_json(config_with(
                      R"({"model":"soav","superiorization":{"schedule":"linear","c":0.1}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::experiment_config_from_json(config_with(
                      R"({"model":"soav","reweighting":{"cadence":5}})")),
                  std::invalid_argument);
}

TEST_CASE("matrix JSON round-trips and rejects ragged input") {
  RealMatrix m(2, 3);
  m << 1.0, -2.5, 3.25, 1e-17, 7.0, -0.125;
  const RealMatrix back = io::matrix_from_json(io::matrix_to_json(m));
  CHECK(back == m);

  CHECK_THROWS_AS(io::matrix_from_json("[[1,2],[3]]"), std::invalid_argument);
  CHECK_THROWS_AS(io::matrix_from_json("[]"), std::invalid_argument);
  CHECK_THROWS_AS(io::matrix_from_json("[[1,\"x\"]]"), std::invalid_argument);
  CHECK_THROWS_AS(io::matrix_from_json("{\"rows\":2}"), std::invalid_argument);
}

TEST_CASE("certify config: matrix sources") {
  const io::CertifyConfig g = io::certify_config_from_json(R"({
    "matrix": {"source": "gaussian", "rows": 6, "cols": 4, "seed": 11},
    "mu": 0.5, "count": 2, "gme": {"kind": "zero"}
  })");
  CHECK(g.A.rows() == 6);
  CHECK(g.A.cols() == 4);
  CHECK(g.mu == 0.5);
  CHECK(g.count == 2);
  CHECK(g.gme.kind == GmeSpec::Kind::Zero);
  // Same seed, same draw.
  const io::CertifyConfig g2 = io::certify_config_from_json(R"({
    "matrix": {"source": "gaussian", "rows": 6, "cols": 4, "seed": 11},
    "mu": 0.5, "count": 2, "gme": {"kind": "zero"}
  })");
  CHECK(g.A == g2.A);

  const io::CertifyConfig id = io::certify_config_from_json(R"({
    "matrix": {"source": "identity", "dim": 5},
    "mu": 1.0, "gme": {"kind": "scaled_identity", "b": 0.7}
  })");
  CHECK(id.A == RealMatrix::Identity(5, 5));
  CHECK(id.count == 1);
  CHECK(id.gme.kind == GmeSpec::Kind::ScaledIdentity);
  CHECK(id.gme.b == 0.7);

  TempDir tmp;
  RealMatrix m(2, 2);
  m << 4.0, 1.0, 1.0, 3.0;
  io::write_text_file(tmp.file("m.json"), io::matrix_to_json(m));
  const io::CertifyConfig f = io::certify_config_from_json(R"({
    "matrix": {"source": "file", "path": ")" + tmp.file("m.json") + R"("},
    "mu": 1.0, "gme": {"kind": "zero"}
  })");
  CHECK(f.A == m);

  CHECK_THROWS_AS(io::certify_config_from_json(R"({
    "matrix": {"source": "random", "rows": 2, "cols": 2},
    "mu": 1.0, "gme": {"kind": "zero"}
  })"),
                  std::invalid_argument);
}

TEST_CASE("certify config: coupling kinds") {
  const std::string head = R"({
    "matrix": {"source": "gaussian", "rows": 8, "cols": 4, "seed": 3},
    "mu": 0.25, "count": 3, "gme": )";

  const io::CertifyConfig within = io::certify_config_from_json(
      head + R"({"kind": "scaled_sensing", "total_gamma": 0.9}})");
  CHECK(within.gme.kind == GmeSpec::Kind::ScaledSensing);
  CHECK(within.gme.count() == 3);

  // Budgets beyond one are representable (so certification can reject them):
  // they come back as explicit matrices with the same Gram blocks.
  const io::CertifyConfig over = io::certify_config_from_json(
      head + R"({"kind": "scaled_sensing", "total_gamma": 2.0}})");
  CHECK(over.gme.kind == GmeSpec::Kind::Explicit);
  CHECK(over.gme.count() == 3);
  const RealMatrix expect =
      (2.0 / (3 * 0.25)) * (over.A.transpose() * over.A);
  CHECK((over.gme.btb_matrix(0) - expect).norm() < 1e-10);

  const io::CertifyConfig ex = io::certify_config_from_json(R"({
    "matrix": {"source": "identity", "dim": 2},
    "mu": 1.0,
    "gme": {"kind": "explicit", "matrices": [[[1, 0], [0, 1]], [[0.5, 0], [0, 0.5]]]}
  })");
  CHECK(ex.gme.kind == GmeSpec::Kind::Explicit);
  CHECK(ex.count == 2);

  // count disagreeing with the explicit matrix list is an error.
  CHECK_THROWS_AS(io::certify_config_from_json(R"({
    "matrix": {"source": "identity", "dim": 2},
    "mu": 1.0, "count": 3,
    "gme": {"kind": "explicit", "matrices": [[[1, 0], [0, 1]]]}
  })"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      io::certify_config_from_json(head + R"({"kind": "diagonal"}})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      io::certify_config_from_json(
          head + R"({"kind": "scaled_sensing", "total_gamma": -1}})"),
      std::invalid_argument);
}

TEST_CASE("text file helpers create directories and report failures") {
  TempDir tmp;
  const std::string nested = tmp.file("a/b/c.txt");
  io::write_text_file(nested, "hello\nworld\n");
  CHECK(io::read_text_file(nested) == "hello\nworld\n");

  const std::string missing = tmp.file("does_not_exist.txt");
  CHECK_THROWS_WITH_AS(io::read_text_file(missing),
                       doctest::Contains(missing.c_str()),
                       std::runtime_error);
}

TEST_CASE("sweep outputs: CSV plus metadata sidecar") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.alphabet = Alphabet::psk(8);
  cfg.n_tx = 4;
  cfg.m_rx = 6;
  cfg.snr_db = {10.0};
  cfg.mu_grid = {0.1};
  cfg.trials = 2;
  cfg.seed = 99;
  cfg.detectors = {DetectorSpec{true, std::nullopt, std::nullopt}};
  cfg.output_path = tmp.file("ber.csv");

  SweepResult res;
  SweepCell cell;
  cell.snr_db = 10.0;
  cell.detector = "cLiGME";
  cell.mu = 0.1;
  cell.trials = 2;
  cell.bit_errors = 1;
  cell.total_bits = 24;
  cell.ber = 1.0 / 24.0;
  res.cells = {cell};
  res.elapsed_seconds = 0.5;

  io::write_sweep_outputs(res, cfg, cfg.output_path);
  CHECK(io::read_text_file(cfg.output_path) == sweep_to_csv(res, false));

  const nlohmann::json meta =
      nlohmann::json::parse(io::read_text_file(cfg.output_path + ".meta.json"));
  CHECK(meta.at("version").get<std::string>() == kVersion);
  CHECK(meta.at("seed").get<std::uint64_t>() == 99);
  CHECK(meta.at("elapsed_seconds").get<double>() == 0.5);
  CHECK(meta.at("common_random_numbers").get<bool>() == true);
  const std::string ts = meta.at("timestamp_utc").get<std::string>();
  REQUIRE(ts.size() == 20);  // e.g. 2026-01-31T12:34:56Z
  CHECK(ts[4] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts.back() == 'Z');
  // The config echo round-trips through the parser.
  const ExperimentConfig echo =
      io::experiment_config_from_json(meta.at("config").dump());
  CHECK(echo.n_tx == cfg.n_tx);
  CHECK(echo.seed == cfg.seed);
  CHECK(echo.detectors.size() == 1);
}
