#pragma once

#include "ligme/modifications.hpp"
#include "ligme/solver.hpp"

#include <optional>

// Internal: the single fixed-point loop behind both solve() and
// solve_modified(); sharing one code path keeps the unmodified trajectories
// bitwise identical.
namespace ligme::detail {

SolveReport fixed_point_loop(
    const RealizedProblem& problem, const StepSizes& steps,
    const SolverState& init, const SolveOptions& options,
    const std::optional<ReweightingPolicy>& reweighting,
    const std::optional<SuperiorizationPolicy>& superiorization);

}  // namespace ligme::detail
