#include "ligme/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ligme {

namespace {

// Binary-reflected Gray code of an index, emitted MSB-first over `bits` bits.
void append_gray_bits(int index, int bits, std::vector<std::uint8_t>& out) {
  const unsigned gray = static_cast<unsigned>(index) ^
                        (static_cast<unsigned>(index) >> 1);
  for (int b = bits - 1; b >= 0; --b)
    out.push_back(static_cast<std::uint8_t>((gray >> b) & 1u));
}

int integer_log2(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_points(const std::vector<std::complex<double>>& pts) {
  require(!pts.empty(), "Alphabet: empty point set");
  for (const auto& p : pts)
    require(std::isfinite(p.real()) && std::isfinite(p.imag()),
            "Alphabet: non-finite point");
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      require(std::abs(pts[i] - pts[j]) > 0.0,
              "Alphabet: points must be pairwise distinct");
}

}  // namespace

Alphabet Alphabet::real(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  Alphabet a;
  a.modulation = Modulation::Real;
  for (double v : values) a.points.emplace_back(v, 0.0);
  validate_points(a.points);
  return a;
}

Alphabet Alphabet::qam(int order) {
  require(order == 4 || order == 16, "Alphabet::qam: supported orders are 4 and 16");
  Alphabet a;
  a.modulation = Modulation::Qam;
  if (order == 4)
    a.axis_levels = (RealVector(2) << -1.0, 1.0).finished();
  else
    a.axis_levels = (RealVector(4) << -3.0, -1.0, 1.0, 3.0).finished();
  for (Eigen::Index i = 0; i < a.axis_levels.size(); ++i)
    for (Eigen::Index q = 0; q < a.axis_levels.size(); ++q)
      a.points.emplace_back(a.axis_levels[i], a.axis_levels[q]);
  validate_points(a.points);
  return a;
}

Alphabet Alphabet::psk(int order) {
  require(order == 8, "Alphabet::psk: supported order is 8");
  Alphabet a;
  a.modulation = Modulation::Psk;
  for (int l = 0; l < order; ++l) {
    const double phase = 2.0 * std::numbers::pi * l / order;
    a.points.emplace_back(std::cos(phase), std::sin(phase));
  }
  validate_points(a.points);
  return a;
}

double Alphabet::min_distance() const {
  require(points.size() >= 2,
          "Alphabet::min_distance: needs at least two symbols");
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      d = std::min(d, std::abs(points[i] - points[j]));
  return d;
}

int Alphabet::bits_per_symbol() const {
  require(is_power_of_two(size()),
          "Alphabet::bits_per_symbol: point count is not a power of two");
  return integer_log2(size());
}

int Alphabet::seed_shift_count() const {
  return modulation == Modulation::Qam ? static_cast<int>(axis_levels.size())
                                       : size();
}

HullDescriptor HullDescriptor::box(double lower, double upper,
                                   Eigen::Index dim) {
  require(std::isfinite(lower) && std::isfinite(upper),
          "HullDescriptor::box: bounds must be finite");
  require(lower <= upper, "HullDescriptor::box: lower bound exceeds upper");
  require(dim > 0, "HullDescriptor::box: dimension must be positive");
  HullDescriptor h;
  h.kind = Kind::Box;
  h.ambient_dim = dim;
  h.lower = lower;
  h.upper = upper;
  return h;
}

HullDescriptor HullDescriptor::octagon_per_pair(double circumradius,
                                                Eigen::Index dim) {
  require(std::isfinite(circumradius) && circumradius > 0.0,
          "HullDescriptor::octagon_per_pair: circumradius must be positive");
  require(dim > 0 && dim % 2 == 0,
          "HullDescriptor::octagon_per_pair: dimension must be positive and even");
  HullDescriptor h;
  h.kind = Kind::OctagonPerPair;
  h.ambient_dim = dim;
  h.circumradius = circumradius;
  return h;
}

HullDescriptor hull_for(const Alphabet& alphabet, Eigen::Index num_symbols) {
  require(num_symbols > 0, "hull_for: num_symbols must be positive");
  switch (alphabet.modulation) {
    case Modulation::Real: {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& p : alphabet.points) {
        lo = std::min(lo, p.real());
        hi = std::max(hi, p.real());
      }
      return HullDescriptor::box(lo, hi, num_symbols);
    }
    case Modulation::Qam:
      return HullDescriptor::box(alphabet.axis_levels.minCoeff(),
                                 alphabet.axis_levels.maxCoeff(),
                                 2 * num_symbols);
    case Modulation::Psk: {
      double r = 0.0;
      for (const auto& p : alphabet.points) r = std::max(r, std::abs(p));
      return HullDescriptor::octagon_per_pair(r, 2 * num_symbols);
    }
  }
  throw std::logic_error("hull_for: unknown modulation");
}

RealVector complex_to_real_stack(const ComplexVector& u) {
  RealVector out(2 * u.size());
  out.head(u.size()) = u.real();
  out.tail(u.size()) = u.imag();
  return out;
}

ComplexVector real_to_complex(const RealVector& u_stacked) {
  require_dims(u_stacked.size() % 2 == 0,
               "real_to_complex: stacked vector has odd dimension " +
                   std::to_string(u_stacked.size()));
  const Eigen::Index n = u_stacked.size() / 2;
  ComplexVector out(n);
  out.real() = u_stacked.head(n);
  out.imag() = u_stacked.tail(n);
  return out;
}

RealMatrix widen_channel(const ComplexMatrix& A) {
  const Eigen::Index m = A.rows(), n = A.cols();
  RealMatrix out(2 * m, 2 * n);
  out.topLeftCorner(m, n) = A.real();
  out.topRightCorner(m, n) = -A.imag();
  out.bottomLeftCorner(m, n) = A.imag();
  out.bottomRightCorner(m, n) = A.real();
  return out;
}

QuantizeResult quantize_to_alphabet(const RealVector& x,
                                    const Alphabet& alphabet) {
  require_finite(x, "quantize_to_alphabet: input");
  QuantizeResult res;
  res.values.resize(x.size());
  if (!alphabet.is_complex()) {
    res.indices.reserve(static_cast<std::size_t>(x.size()));
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int l = 0; l < alphabet.size(); ++l) {
        const double d = std::abs(x[n] - alphabet.points[l].real());
        if (d < best_d) {  // strict '<' keeps the lowest index on ties
          best_d = d;
          best = l;
        }
      }
      res.indices.push_back(best);
      res.values[n] = alphabet.points[best].real();
    }
    return res;
  }
  require_dims(x.size() % 2 == 0,
               "quantize_to_alphabet: complex alphabet expects stacked "
               "(Re; Im) layout of even dimension, got " +
                   std::to_string(x.size()));
  const Eigen::Index n_sym = x.size() / 2;
  res.indices.reserve(static_cast<std::size_t>(n_sym));
  for (Eigen::Index n = 0; n < n_sym; ++n) {
    const std::complex<double> p(x[n], x[n_sym + n]);
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int l = 0; l < alphabet.size(); ++l) {
      const double d = std::norm(p - alphabet.points[l]);
      if (d < best_d) {
        best_d = d;
        best = l;
      }
    }
    res.indices.push_back(best);
    res.values[n] = alphabet.points[best].real();
    res.values[n_sym + n] = alphabet.points[best].imag();
  }
  return res;
}

std::vector<std::uint8_t> symbols_to_bits(const std::vector<int>& indices,
                                          const Alphabet& alphabet) {
  const int bits = alphabet.bits_per_symbol();
  std::vector<std::uint8_t> out;
  out.reserve(indices.size() * static_cast<std::size_t>(bits));
  for (int idx : indices) {
    require(idx >= 0 && idx < alphabet.size(),
            "symbols_to_bits: symbol index " + std::to_string(idx) +
                " outside alphabet of size " + std::to_string(alphabet.size()));
    if (alphabet.modulation == Modulation::Qam) {
      // Per-axis Gray labels; the I-axis index is the major digit of the
      // point index by construction.
      const int k = static_cast<int>(alphabet.axis_levels.size());
      const int axis_bits = integer_log2(k);
      append_gray_bits(idx / k, axis_bits, out);
      append_gray_bits(idx % k, axis_bits, out);
    } else {
      append_gray_bits(idx, bits, out);
    }
  }
  return out;
}

}  // namespace ligme
