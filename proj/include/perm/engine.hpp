#pragma once

#include "perm/model.hpp"
#include "perm/polyhedra.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perm {

struct PermSolution {
  std::vector<PiecewiseAffineFn> fns;  // per location
  // For opponent locations: the per-transition functions (indexed like
  // spec.outgoing(loc)) whose minimum is minimised along the delay.
  std::vector<std::vector<PiecewiseAffineFn>> transition_fns;
  std::size_t iterations = 0;
};

std::vector<PiecewiseAffineFn> perm_init(const TimedAutomatonSpec& spec);

// Player value of firing transition t, given the destination function.
// The successor function must be concave along every delay line (linear automata).
PiecewiseAffineFn perm_step_linear(const TimedAutomatonSpec& spec, std::size_t t, const PiecewiseAffineFn& dst);
// Same quantity without the concavity assumption.
PiecewiseAffineFn perm_step_transition(const TimedAutomatonSpec& spec, std::size_t t, const PiecewiseAffineFn& dst);
// `succ` holds one function per location (only successors of loc are read).
PiecewiseAffineFn perm_step_branching(const TimedAutomatonSpec& spec, std::size_t loc,
                                      const std::vector<PiecewiseAffineFn>& succ);
PiecewiseAffineFn perm_step_opponent(const TimedAutomatonSpec& spec, std::size_t loc,
                                     const std::vector<PiecewiseAffineFn>& succ,
                                     std::vector<PiecewiseAffineFn>* per_transition = nullptr);

struct EngineOptions {
  std::optional<std::size_t> max_iter;  // compute P_k instead of the fixpoint
  bool closed_form_linear = true;       // use perm_step_linear on linear automata
};

// Failure while computing P_step at a location.
struct SolverError : std::runtime_error {
  std::string location;
  std::size_t step;
  SolverError(std::string loc, std::size_t i, const std::string& what)
      : std::runtime_error("at location " + loc + ", step " + std::to_string(i) + ": " + what),
        location(std::move(loc)),
        step(i) {}
};

PermSolution compute_permissiveness(const TimedAutomatonSpec& spec, const EngineOptions& opts = {});

}  // namespace perm
