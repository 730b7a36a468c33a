#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ligme/io.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

// Black-box tests of the command-line binary; LIGME_CLI_PATH is injected by
// the build as the path of the built executable.
#ifndef LIGME_CLI_PATH
#error "LIGME_CLI_PATH must be defined to the CLI executable path"
#endif

using namespace ligme;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

const std::filesystem::path& scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("ligme_cli_test_" + std::to_string(::getpid()));
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string scratch(const std::string& name) {
  return (scratch_dir() / name).string();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out = scratch("stdout_" + std::to_string(counter));
  const std::string err = scratch("stderr_" + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string(LIGME_CLI_PATH) + " " + args + " > " +
                          out + " 2> " + err;
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = io::read_text_file(out);
  r.err = io::read_text_file(err);
  return r;
}

// Small 8-PSK sweep configuration; the caller picks the output path.
ExperimentConfig sweep_config(const std::string& output_path) {
  ExperimentConfig cfg;
  cfg.alphabet = Alphabet::psk(8);
  cfg.n_tx = 4;
  cfg.m_rx = 6;
  cfg.rho = 0.4;
  cfg.snr_db = {5.0, 25.0};
  cfg.mu_grid = {0.01, 0.1};
  cfg.trials = 2;
  cfg.max_iter = 150;
  cfg.seed = 5;
  DetectorSpec cligme;
  DetectorSpec soav;
  soav.use_gme = false;
  cfg.detectors = {cligme, soav};
  cfg.output_path = output_path;
  return cfg;
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char ch : text)
    if (ch == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("version flag") {
  const CliResult r = run_cli("--version");
  CHECK(r.code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("missing subcommand or unknown flag exit with usage errors") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("--nonsense").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("run: sweep to file, determinism across invocations and threads") {
  const std::string cfg_path = scratch("sweep.json");
  const std::string csv_path = scratch("ber.csv");
  io::write_text_file(cfg_path,
                      io::experiment_config_to_json(sweep_config(csv_path)));

  const CliResult r1 = run_cli("run --config " + cfg_path);
  REQUIRE(r1.code == 0);
  CHECK(r1.out.find(csv_path) != std::string::npos);
  const std::string csv1 = io::read_text_file(csv_path);
  CHECK(csv1.rfind("snr_db,detector,mu,trials,bit_errors,total_bits,ber\n",
                   0) == 0);
  // 2 snr x 2 detectors x 2 mu raw rows + 4 best rows + header.
  CHECK(count_lines(csv1) == 13);
  CHECK(csv1.find(":best") != std::string::npos);
  CHECK(std::filesystem::exists(csv_path + ".meta.json"));

  const CliResult r2 = run_cli("run --config " + cfg_path);
  REQUIRE(r2.code == 0);
  CHECK(io::read_text_file(csv_path) == csv1);

  const CliResult r3 = run_cli("run --config " + cfg_path + " --threads 3");
  REQUIRE(r3.code == 0);
  CHECK(io::read_text_file(csv_path) == csv1);
}

TEST_CASE("run: overrides narrow the sweep") {
  const std::string cfg_path = scratch("sweep2.json");
  const std::string csv_path = scratch("ber2.csv");
  io::write_text_file(cfg_path,
                      io::experiment_config_to_json(sweep_config(csv_path)));

  const CliResult r =
      run_cli("run --config " + cfg_path + " --snr 25 --trials 1");
  REQUIRE(r.code == 0);
  const std::string csv = io::read_text_file(csv_path);
  // 1 snr x 2 detectors x 2 mu + 2 best rows + header.
  CHECK(count_lines(csv) == 7);
  CHECK(csv.find("\n5,") == std::string::npos);
  // Every data row reports the overridden trial count.
  CHECK(csv.find(",1,") != std::string::npos);
  CHECK(csv.find(",2,") == std::string::npos);
}

TEST_CASE("run: stdout mode when no output path is configured") {
  const std::string cfg_path = scratch("sweep3.json");
  ExperimentConfig cfg = sweep_config("");
  cfg.snr_db = {25.0};
  cfg.mu_grid = {0.1};
  cfg.trials = 1;
  io::write_text_file(cfg_path, io::experiment_config_to_json(cfg));
  const CliResult r = run_cli("run --config " + cfg_path);
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("snr_db,detector,mu,trials,bit_errors,total_bits,ber\n",
                    0) == 0);
  CHECK(count_lines(r.out) == 5);  // header + 2 raw + 2 best
}

TEST_CASE("run: configuration errors exit with code 2") {
  CHECK(run_cli("run --config " + scratch("missing.json")).code == 2);

  const std::string bad_json = scratch("bad.json");
  io::write_text_file(bad_json, "{ this is not json");
  CHECK(run_cli("run --config " + bad_json).code == 2);

  const std::string bad_schema = scratch("bad_schema.json");
  io::write_text_file(bad_schema, R"({"alphabet": {"modulation": "psk",
    "order": 8}, "n_tx": 4, "m_rx": 6, "snr_db": [10], "mu_grid": [0.1],
    "trials": 2, "detectors": [{"model": "cligme"}], "typo_key": 1})");
  const CliResult r = run_cli("run --config " + bad_schema);
  CHECK(r.code == 2);
  CHECK(r.err.find("config error") != std::string::npos);
}

TEST_CASE("certify: certified and rejected designs") {
  const std::string ok_path = scratch("certify_ok.json");
  io::write_text_file(ok_path, R"({
    "matrix": {"source": "gaussian", "rows": 12, "cols": 6, "seed": 7},
    "mu": 0.5, "count": 3,
    "gme": {"kind": "scaled_sensing", "total_gamma": 0.99}
  })");
  const CliResult ok = run_cli("certify --config " + ok_path);
  CHECK(ok.code == 0);
  CHECK(ok.out.find("min_eigenvalue") != std::string::npos);
  CHECK(ok.out.find("not certified") == std::string::npos);
  CHECK(ok.out.find("certified") != std::string::npos);

  const std::string bad_path = scratch("certify_bad.json");
  io::write_text_file(bad_path, R"({
    "matrix": {"source": "gaussian", "rows": 12, "cols": 6, "seed": 7},
    "mu": 0.5, "count": 3,
    "gme": {"kind": "scaled_sensing", "total_gamma": 2.0}
  })");
  const CliResult bad = run_cli("certify --config " + bad_path);
  CHECK(bad.code == 3);
  CHECK(bad.out.find("not certified") != std::string::npos);

  CHECK(run_cli("certify --config " + scratch("nope.json")).code == 2);
}

TEST_CASE("prox-check: passes clean and fails the negative control") {
  const CliResult ok = run_cli("prox-check --cases 50 --seed 3");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("max deviation") != std::string::npos);

  const CliResult fault = run_cli("prox-check --cases 50 --seed 3 --inject-fault");
  CHECK(fault.code == 1);
}

TEST_CASE("landscape: 1-D real profile and 2-D phase-modulation slice") {
  const CliResult real = run_cli(
      "landscape --modulation real --levels -1,0,1 --b 1.5 --grid "
      "-1.5:1.5:0.1");
  REQUIRE(real.code == 0);
  CHECK(real.out.rfind("x,theta\n", 0) == 0);
  CHECK(count_lines(real.out) == 32);  // header + 31 grid points

  const CliResult psk = run_cli(
      "landscape --modulation psk --order 8 --b 1.2 --grid -1.2:1.2:0.2");
  REQUIRE(psk.code == 0);
  CHECK(psk.out.rfind("x_re,x_im,theta\n", 0) == 0);
  CHECK(count_lines(psk.out) == 170);  // header + 13 x 13 grid points

  // File output.
  const std::string out_path = scratch("landscape.csv");
  const CliResult to_file = run_cli(
      "landscape --modulation real --levels -1,1 --b 0 --grid -1:1:0.5 --out " +
      out_path);
  REQUIRE(to_file.code == 0);
  const std::string written = io::read_text_file(out_path);
  CHECK(written.rfind("x,theta\n", 0) == 0);
  CHECK(count_lines(written) == 6);

  // Malformed grid specification is a usage error.
  CHECK(run_cli("landscape --modulation real --levels -1,1 --grid oops")
            .code == 2);
}
