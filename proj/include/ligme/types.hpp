#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

// Core dense types and error vocabulary shared by every module.
// All arithmetic is IEEE double precision; Eigen is the only math dependency.
namespace ligme {

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Strictly positive per-coordinate weights of a weighted l1 / l2,1 norm.
using WeightVector = Eigen::VectorXd;

// Thrown when operand shapes disagree; the message names both shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an iterative routine exhausts its iteration budget.  Carries the
// best estimate available at the point of failure.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate(last_estimate) {}
  double last_estimate;
};

// Thrown when a solve is attempted on a problem whose overall-convexity
// certificate is missing or negative (and the caller did not override).
class CertificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void require_dims(bool cond, const std::string& what) {
  if (!cond) throw DimensionError(what);
}

inline void require_finite(const RealVector& v, const std::string& name) {
  if (!v.allFinite())
    throw std::invalid_argument(name + " contains NaN or Inf entries");
}

inline void require_finite(const RealMatrix& m, const std::string& name) {
  if (!m.allFinite())
    throw std::invalid_argument(name + " contains NaN or Inf entries");
}

// Element of a finite product of real coordinate spaces, used for the v / w
// variables of the fixed-point solver (one block per alphabet shift).
struct ProductVector {
  std::vector<RealVector> blocks;

  ProductVector() = default;
  explicit ProductVector(std::vector<RealVector> b) : blocks(std::move(b)) {}

  // L zero blocks of the given dimension.
  static ProductVector zero(int count, Eigen::Index dim) {
    ProductVector out;
    out.blocks.assign(static_cast<std::size_t>(count), RealVector::Zero(dim));
    return out;
  }

  int count() const { return static_cast<int>(blocks.size()); }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.squaredNorm();
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  double dot(const ProductVector& other) const {
    require_dims(blocks.size() == other.blocks.size(),
                 "ProductVector dot: block counts differ (" +
                     std::to_string(blocks.size()) + " vs " +
                     std::to_string(other.blocks.size()) + ")");
    double s = 0.0;
    for (std::size_t l = 0; l < blocks.size(); ++l)
      s += blocks[l].dot(other.blocks[l]);
    return s;
  }

  ProductVector& operator+=(const ProductVector& other) {
    require_dims(blocks.size() == other.blocks.size(),
                 "ProductVector +=: block counts differ");
    for (std::size_t l = 0; l < blocks.size(); ++l) blocks[l] += other.blocks[l];
    return *this;
  }
  ProductVector& operator-=(const ProductVector& other) {
    require_dims(blocks.size() == other.blocks.size(),
                 "ProductVector -=: block counts differ");
    for (std::size_t l = 0; l < blocks.size(); ++l) blocks[l] -= other.blocks[l];
    return *this;
  }
  ProductVector& operator*=(double a) {
    for (auto& b : blocks) b *= a;
    return *this;
  }

  friend ProductVector operator+(ProductVector a, const ProductVector& b) {
    a += b;
    return a;
  }
  friend ProductVector operator-(ProductVector a, const ProductVector& b) {
    a -= b;
    return a;
  }
  friend ProductVector operator*(double s, ProductVector a) {
    a *= s;
    return a;
  }
};

}  // namespace ligme
