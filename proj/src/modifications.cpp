#include "ligme/modifications.hpp"

#include "loop_detail.hpp"

#include <cmath>

namespace ligme {

ReweightingPolicy ReweightingPolicy::make(long period, double delta) {
  require(period >= 1, "ReweightingPolicy: period must be at least 1");
  require(delta > 0.0 && std::isfinite(delta),
          "ReweightingPolicy: delta must be positive");
  return ReweightingPolicy{period, delta};
}

SuperiorizationPolicy SuperiorizationPolicy::zero() {
  return SuperiorizationPolicy{};
}

SuperiorizationPolicy SuperiorizationPolicy::geometric(double c, double r) {
  require(c >= 0.0 && std::isfinite(c),
          "SuperiorizationPolicy: magnitude must be nonnegative");
  require(r >= 0.0 && std::isfinite(r),
          "SuperiorizationPolicy: ratio must be nonnegative");
  SuperiorizationPolicy s;
  s.schedule = Schedule::Geometric;
  s.c = c;
  s.r = r;
  return s;
}

SuperiorizationPolicy SuperiorizationPolicy::inverse_power(double c, double p) {
  require(c >= 0.0 && std::isfinite(c),
          "SuperiorizationPolicy: magnitude must be nonnegative");
  require(p >= 0.0 && std::isfinite(p),
          "SuperiorizationPolicy: exponent must be nonnegative");
  SuperiorizationPolicy s;
  s.schedule = Schedule::InversePower;
  s.c = c;
  s.p = p;
  return s;
}

SuperiorizationPolicy SuperiorizationPolicy::constant(double c) {
  require(c >= 0.0 && std::isfinite(c),
          "SuperiorizationPolicy: magnitude must be nonnegative");
  SuperiorizationPolicy s;
  s.schedule = Schedule::Constant;
  s.c = c;
  return s;
}

double SuperiorizationPolicy::beta(long k) const {
  switch (schedule) {
    case Schedule::Zero:
      return 0.0;
    case Schedule::Geometric:
      return c * std::pow(r, static_cast<double>(k));
    case Schedule::InversePower:
      return k == 0 ? c : c * std::pow(static_cast<double>(k), -p);
    case Schedule::Constant:
      return c;
  }
  return 0.0;
}

bool SuperiorizationPolicy::summable() const {
  if (c == 0.0) return true;
  switch (schedule) {
    case Schedule::Zero:
      return true;
    case Schedule::Geometric:
      return r < 1.0;
    case Schedule::InversePower:
      return p > 1.0;
    case Schedule::Constant:
      return false;
  }
  return false;
}

std::vector<WeightVector> reweight(const RealVector& x,
                                   const Alphabet& alphabet, double delta) {
  require(delta > 0.0 && std::isfinite(delta),
          "reweight: delta must be positive");
  require_finite(x, "reweight: input");

  // Distances of each coordinate (or pair) to each shift value, then
  // inverse-distance weights normalized over the shifts.
  const auto normalize = [](std::vector<WeightVector>& inv) {
    const Eigen::Index n = inv[0].size();
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const auto& w : inv) sum += w[i];
      for (auto& w : inv) w[i] /= sum;
    }
  };

  switch (alphabet.modulation) {
    case Modulation::Real: {
      std::vector<WeightVector> inv;
      for (const auto& a : alphabet.points) {
        WeightVector w(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
          w[i] = 1.0 / (std::abs(x[i] - a.real()) + delta);
        inv.push_back(std::move(w));
      }
      normalize(inv);
      return inv;
    }
    case Modulation::Qam: {
      std::vector<WeightVector> inv;
      for (Eigen::Index l = 0; l < alphabet.axis_levels.size(); ++l) {
        WeightVector w(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
          w[i] = 1.0 / (std::abs(x[i] - alphabet.axis_levels[l]) + delta);
        inv.push_back(std::move(w));
      }
      normalize(inv);
      return inv;
    }
    case Modulation::Psk: {
      require_dims(x.size() % 2 == 0,
                   "reweight: PSK expects stacked (Re; Im) layout");
      const Eigen::Index n = x.size() / 2;
      std::vector<WeightVector> inv;
      for (const auto& a : alphabet.points) {
        WeightVector w(n);
        for (Eigen::Index i = 0; i < n; ++i)
          w[i] = 1.0 / (std::hypot(x[i] - a.real(), x[n + i] - a.imag()) + delta);
        inv.push_back(std::move(w));
      }
      normalize(inv);
      return inv;
    }
  }
  throw std::logic_error("reweight: unknown modulation");
}

RealVector superiorize(const RealVector& x, const Alphabet& alphabet,
                       double beta) {
  require(std::isfinite(beta) && beta >= 0.0,
          "superiorize: beta must be nonnegative");
  if (beta == 0.0) return x;
  const QuantizeResult q = quantize_to_alphabet(x, alphabet);
  return x + beta * (q.values - x);
}

SolveReport solve_modified(
    const RealizedProblem& problem, const StepSizes& steps,
    const SolverState& init, const SolveOptions& options,
    const std::optional<ReweightingPolicy>& reweighting,
    const std::optional<SuperiorizationPolicy>& superiorization) {
  if (reweighting) {
    require(reweighting->period >= 1, "solve_modified: reweighting period must be at least 1");
    require(reweighting->delta > 0.0, "solve_modified: reweighting delta must be positive");
  }
  return detail::fixed_point_loop(problem, steps, init, options, reweighting,
                                  superiorization);
}

}  // namespace ligme
