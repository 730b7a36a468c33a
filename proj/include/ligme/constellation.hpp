#pragma once

#include "ligme/types.hpp"

#include <complex>
#include <cstdint>
#include <vector>

// Finite symbol alphabets (real, square QAM, PSK), their convex hulls, the
// complex-to-real stacking used to pose complex estimation problems over the
// reals, quantization back onto the alphabet, and Gray-coded bit labelling.
namespace ligme {

enum class Modulation { Real, Qam, Psk };

// A finite set of pairwise-distinct symbols.  Complex modes (QAM / PSK) store
// the full 2-D constellation; QAM additionally keeps the per-axis levels that
// generate it, since estimation treats each real axis independently.
struct Alphabet {
  Modulation modulation = Modulation::Real;
  std::vector<std::complex<double>> points;
  RealVector axis_levels;  // QAM only: sorted per-axis amplitude levels

  // Arbitrary finite real alphabet (values become the points, sorted).
  static Alphabet real(std::vector<double> values);
  // Square QAM of the given order; supported orders: 4 ({-1,1} per axis) and
  // 16 ({-3,-1,1,3} per axis).  Point order is I-major: index = i_I*K + i_Q.
  static Alphabet qam(int order);
  // Phase-shift keying on the unit circle; supported order: 8.  Point l is
  // exp(j * l * 2π/L), l = 0..L-1.
  static Alphabet psk(int order);

  int size() const { return static_cast<int>(points.size()); }
  bool is_complex() const { return modulation != Modulation::Real; }

  // Smallest pairwise distance between symbols; needs at least two symbols.
  double min_distance() const;

  // log2(point count); errors when the count is not a power of two.
  int bits_per_symbol() const;

  // Number of shift values the sum-of-shifted-norms regularizer uses: the
  // per-axis level count for QAM, the full point count otherwise.
  int seed_shift_count() const;
};

// Convex hull of the stacked alphabet: an axis-aligned box for real / QAM
// alphabets, or a regular octagon per (Re, Im) pair for 8-PSK.
struct HullDescriptor {
  enum class Kind { Box, OctagonPerPair };
  Kind kind = Kind::Box;
  Eigen::Index ambient_dim = 0;
  double lower = 0.0, upper = 0.0;  // Box
  double circumradius = 0.0;        // OctagonPerPair (vertex distance from 0)

  static HullDescriptor box(double lower, double upper, Eigen::Index dim);
  static HullDescriptor octagon_per_pair(double circumradius,
                                         Eigen::Index dim);
};

// Hull of the alphabet raised to `num_symbols` coordinates, in the stacked
// real representation (dimension N for real alphabets, 2N for complex ones).
HullDescriptor hull_for(const Alphabet& alphabet, Eigen::Index num_symbols);

// (Re(u); Im(u)) stacking of a complex vector and its inverse.
RealVector complex_to_real_stack(const ComplexVector& u);
ComplexVector real_to_complex(const RealVector& u_stacked);

// Real 2M x 2N representation [Re(A), -Im(A); Im(A), Re(A)] of a complex
// M x N matrix, compatible with the stacking above: widen(A)·stack(u) =
// stack(A·u).
RealMatrix widen_channel(const ComplexMatrix& A);

struct QuantizeResult {
  RealVector values;         // nearest symbols, stacked like the input
  std::vector<int> indices;  // alphabet index per symbol
};

// Nearest alphabet symbol per coordinate (real mode) or per (Re, Im) pair
// (complex modes, stacked layout).  Distance ties go to the lowest index.
QuantizeResult quantize_to_alphabet(const RealVector& x,
                                    const Alphabet& alphabet);

// Gray-coded bits of a symbol-index sequence.  QAM uses a per-axis reflected
// Gray code (I-axis bits first), PSK a reflected Gray code on the phase
// index, real alphabets one on the level index; most significant bit first.
std::vector<std::uint8_t> symbols_to_bits(const std::vector<int>& indices,
                                          const Alphabet& alphabet);

}  // namespace ligme
