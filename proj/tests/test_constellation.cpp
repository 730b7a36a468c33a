#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ligme/constellation.hpp"
#include "ligme/rng.hpp"

#include <cmath>
#include <complex>

using namespace ligme;

TEST_CASE("alphabet factories and basic quantities") {
  const Alphabet tern = Alphabet::real({1.0, -1.0, 0.0});
  CHECK(tern.size() == 3);
  CHECK(tern.points[0].real() == -1.0);  // sorted
  CHECK(tern.points[2].real() == 1.0);
  CHECK(tern.min_distance() == doctest::Approx(1.0));
  CHECK(tern.seed_shift_count() == 3);

  const Alphabet q4 = Alphabet::qam(4);
  CHECK(q4.size() == 4);
  CHECK(q4.axis_levels.size() == 2);
  CHECK(q4.axis_levels[0] == -1.0);
  CHECK(q4.axis_levels[1] == 1.0);
  CHECK(q4.min_distance() == doctest::Approx(2.0));
  CHECK(q4.bits_per_symbol() == 2);
  CHECK(q4.seed_shift_count() == 2);  // per-axis levels

  const Alphabet q16 = Alphabet::qam(16);
  CHECK(q16.size() == 16);
  CHECK(q16.axis_levels.size() == 4);
  CHECK(q16.min_distance() == doctest::Approx(2.0));
  CHECK(q16.bits_per_symbol() == 4);
  CHECK(q16.seed_shift_count() == 4);

  const Alphabet p8 = Alphabet::psk(8);
  CHECK(p8.size() == 8);
  CHECK(p8.bits_per_symbol() == 3);
  CHECK(p8.seed_shift_count() == 8);
  CHECK(p8.min_distance() ==
        doctest::Approx(2.0 * std::sin(3.14159265358979323846 / 8.0)));
  // Point l = exp(j·l·2π/8).
  CHECK(p8.points[2].real() == doctest::Approx(0.0));
  CHECK(p8.points[2].imag() == doctest::Approx(1.0));

  CHECK_THROWS_AS(Alphabet::qam(8), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet::psk(16), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet::real({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet::real({}), std::invalid_argument);
}

TEST_CASE("QAM point order is I-major") {
  const Alphabet q16 = Alphabet::qam(16);
  // index = i_I * 4 + i_Q over levels (-3, -1, 1, 3).
  CHECK(q16.points[0] == std::complex<double>(-3.0, -3.0));
  CHECK(q16.points[1] == std::complex<double>(-3.0, -1.0));
  CHECK(q16.points[4] == std::complex<double>(-1.0, -3.0));
  CHECK(q16.points[15] == std::complex<double>(3.0, 3.0));
}

TEST_CASE("stacking, inverse, and widened channel") {
  ComplexVector u(2);
  u << std::complex<double>(1.0, 2.0), std::complex<double>(3.0, -1.0);
  const RealVector s = complex_to_real_stack(u);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 3.0);
  CHECK(s[2] == 2.0);
  CHECK(s[3] == -1.0);
  const ComplexVector back = real_to_complex(s);
  CHECK((back - u).norm() == 0.0);
  CHECK_THROWS_AS(real_to_complex(RealVector::Zero(3)), DimensionError);

  ComplexMatrix A(1, 1);
  A(0, 0) = std::complex<double>(0.0, 1.0);
  const RealMatrix W = widen_channel(A);
  REQUIRE(W.rows() == 2);
  CHECK(W(0, 0) == 0.0);
  CHECK(W(0, 1) == -1.0);
  CHECK(W(1, 0) == 1.0);
  CHECK(W(1, 1) == 0.0);
}

TEST_CASE("widened channel is compatible with stacking on random data") {
  RngStream rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(5));
    const int n = 2 + static_cast<int>(rng.uniform_int(5));
    ComplexMatrix A(m, n);
    ComplexVector x(n);
    for (int c = 0; c < n; ++c) {
      x[c] = std::complex<double>(rng.gaussian(), rng.gaussian());
      for (int r = 0; r < m; ++r)
        A(r, c) = std::complex<double>(rng.gaussian(), rng.gaussian());
    }
    const RealVector lhs = widen_channel(A) * complex_to_real_stack(x);
    const RealVector rhs = complex_to_real_stack(A * x);
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("hull descriptors per alphabet") {
  const HullDescriptor hq = hull_for(Alphabet::qam(16), 3);
  CHECK(hq.kind == HullDescriptor::Kind::Box);
  CHECK(hq.ambient_dim == 6);
  CHECK(hq.lower == -3.0);
  CHECK(hq.upper == 3.0);

  const HullDescriptor hr = hull_for(Alphabet::real({-1.0, 0.0, 2.0}), 4);
  CHECK(hr.kind == HullDescriptor::Kind::Box);
  CHECK(hr.ambient_dim == 4);
  CHECK(hr.lower == -1.0);
  CHECK(hr.upper == 2.0);

  const HullDescriptor hp = hull_for(Alphabet::psk(8), 5);
  CHECK(hp.kind == HullDescriptor::Kind::OctagonPerPair);
  CHECK(hp.ambient_dim == 10);
  CHECK(hp.circumradius == doctest::Approx(1.0));
}

TEST_CASE("quantization: pinned examples and tie-breaking") {
  const Alphabet bin = Alphabet::real({-1.0, 1.0});
  RealVector x(2);
  x << 0.2, -3.0;
  const QuantizeResult q = quantize_to_alphabet(x, bin);
  CHECK(q.values[0] == 1.0);
  CHECK(q.values[1] == -1.0);
  CHECK(q.indices[0] == 1);
  CHECK(q.indices[1] == 0);

  // Exact midpoint ties go to the lowest alphabet index.
  const QuantizeResult tie =
      quantize_to_alphabet(RealVector::Zero(1), bin);
  CHECK(tie.indices[0] == 0);
  CHECK(tie.values[0] == -1.0);

  // 4-QAM stacked symbol (0.1, -0.9) → point (1, -1), and idempotence.
  const Alphabet q4 = Alphabet::qam(4);
  RealVector xq(2);
  xq << 0.1, -0.9;
  const QuantizeResult qq = quantize_to_alphabet(xq, q4);
  CHECK(qq.values[0] == 1.0);
  CHECK(qq.values[1] == -1.0);
  CHECK(qq.indices[0] == 2);  // I-major: (i_I, i_Q) = (1, 0)
  const QuantizeResult again = quantize_to_alphabet(qq.values, q4);
  CHECK((again.values - qq.values).norm() == 0.0);

  CHECK_THROWS_AS(quantize_to_alphabet(RealVector::Zero(3), q4),
                  DimensionError);
}

TEST_CASE("quantization of points already in the alphabet is exact") {
  const Alphabet p8 = Alphabet::psk(8);
  RngStream rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4;
    ComplexVector x(n);
    std::vector<int> idx(n);
    for (int k = 0; k < n; ++k) {
      idx[k] = static_cast<int>(rng.uniform_int(8));
      x[k] = p8.points[static_cast<std::size_t>(idx[k])];
    }
    const QuantizeResult q = quantize_to_alphabet(complex_to_real_stack(x), p8);
    CHECK(q.indices == idx);
    CHECK((q.values - complex_to_real_stack(x)).norm() == 0.0);
  }
}

TEST_CASE("bit mapping: counts and identity") {
  const Alphabet q4 = Alphabet::qam(4);
  CHECK(symbols_to_bits({0}, q4).size() == 2);

  const Alphabet p8 = Alphabet::psk(8);
  const std::vector<int> idx{0, 3, 7, 5};
  CHECK(symbols_to_bits(idx, p8).size() == 12);
  CHECK(symbols_to_bits(idx, p8) == symbols_to_bits(idx, p8));

  CHECK_THROWS_AS(symbols_to_bits({8}, p8), std::invalid_argument);
  CHECK_THROWS_AS(symbols_to_bits({-1}, p8), std::invalid_argument);
}

TEST_CASE("adjacent PSK symbols differ in exactly one bit") {
  const Alphabet p8 = Alphabet::psk(8);
  for (int l = 0; l < 8; ++l) {
    const auto a = symbols_to_bits({l}, p8);
    const auto b = symbols_to_bits({(l + 1) % 8}, p8);
    int diff = 0;
    for (int k = 0; k < 3; ++k) diff += a[k] != b[k];
    CHECK(diff == 1);
  }
}

TEST_CASE("QAM Gray code: axis-neighbour symbols differ in one bit") {
  const Alphabet q16 = Alphabet::qam(16);
  // Neighbouring levels on one axis (other axis fixed) are one bit apart.
  for (int i = 0; i < 4; ++i)
    for (int q = 0; q < 3; ++q) {
      const auto a = symbols_to_bits({i * 4 + q}, q16);
      const auto b = symbols_to_bits({i * 4 + q + 1}, q16);
      int diff = 0;
      for (int k = 0; k < 4; ++k) diff += a[k] != b[k];
      CHECK(diff == 1);
    }
  for (int q = 0; q < 4; ++q)
    for (int i = 0; i < 3; ++i) {
      const auto a = symbols_to_bits({i * 4 + q}, q16);
      const auto b = symbols_to_bits({(i + 1) * 4 + q}, q16);
      int diff = 0;
      for (int k = 0; k < 4; ++k) diff += a[k] != b[k];
      CHECK(diff == 1);
    }
}

TEST_CASE("min distance matches the exhaustive pairwise minimum") {
  RngStream rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> values;
    const int n = 3 + static_cast<int>(rng.uniform_int(4));
    for (int k = 0; k < n; ++k) values.push_back(5.0 * rng.gaussian());
    Alphabet a;
    try {
      a = Alphabet::real(values);
    } catch (const std::invalid_argument&) {
      continue;  // coincident draws rejected by the factory
    }
    double best = 1e300;
    for (std::size_t i = 0; i < a.points.size(); ++i)
      for (std::size_t j = i + 1; j < a.points.size(); ++j)
        best = std::min(best, std::abs(a.points[i] - a.points[j]));
    CHECK(a.min_distance() == doctest::Approx(best));
  }
}
