#pragma once

#include "perm/polyhedra.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perm {

enum class Owner { Player, Opponent };
enum class Rel { LE, LT, GE, GT, EQ };

struct ClockConstraint {
  std::size_t clock = 0;
  Rel rel = Rel::LE;
  long bound = 0;
};

// Conjunction; empty means true.
using Guard = std::vector<ClockConstraint>;

struct Location {
  std::string id;
  Owner owner = Owner::Player;
  Guard invariant;
  bool initial = false;
  bool target = false;
};

struct Transition {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::string action;
  Guard guard;
  std::vector<std::size_t> reset;
};

struct TimedAutomatonSpec {
  std::vector<std::string> clocks;
  std::vector<Location> locations;
  std::vector<Transition> transitions;
  std::size_t initial = 0;
  std::size_t target = 0;

  std::size_t nclocks() const { return clocks.size(); }
  std::optional<std::size_t> find_location(const std::string& id) const;
  std::vector<std::size_t> outgoing(std::size_t loc) const;
};

enum class ModelErrorKind {
  Syntax,
  UnknownClock,
  UnknownLocation,
  DuplicateAction,
  CycleDetected,
  StrictGuard,
  Overflow,
  MissingTarget,
};

std::string kind_name(ModelErrorKind k);

struct ModelDiagnostic {
  std::size_t line = 0;  // 0 when not tied to a line
  ModelErrorKind kind = ModelErrorKind::Syntax;
  std::string message;
  std::string str() const;
};

struct ModelError : std::runtime_error {
  std::vector<ModelDiagnostic> diagnostics;
  explicit ModelError(std::vector<ModelDiagnostic> ds);
  bool has(ModelErrorKind k) const;
};

// Solver mode rejects strict guards and cycles; oracle mode accepts both.
enum class ParseMode { Solver, Oracle };

TimedAutomatonSpec parse_model(const std::string& text, ParseMode mode = ParseMode::Solver);
TimedAutomatonSpec load_model(const std::string& path, ParseMode mode = ParseMode::Solver);
// Structural checks on an already built spec (used for generated models).
void validate_model(const TimedAutomatonSpec& spec, ParseMode mode = ParseMode::Solver);
std::string to_text(const TimedAutomatonSpec& spec);
std::string guard_str(const TimedAutomatonSpec& spec, const Guard& g);

Polyhedron guard_polyhedron(const Guard& g, std::size_t nclocks);
bool satisfies(const Guard& g, const Valuation& v);

struct Config {
  std::size_t loc = 0;
  Valuation v;
};

enum class StepErrorKind { NoSuchTransition, GuardViolated, InvariantViolated };

struct StepError : std::runtime_error {
  StepErrorKind kind;
  StepError(StepErrorKind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

std::optional<std::size_t> find_transition(const TimedAutomatonSpec& spec, std::size_t loc, const std::string& action);
Config step(const TimedAutomatonSpec& spec, const Config& c, const Rational& d, const std::string& action);

// Set of delays d >= 0 allowed by the source invariant, the guard and the
// destination invariant after reset (the target's invariant is not checked).
struct DelayInterval {
  bool empty = true;
  Rational lo;
  ExtRational hi;
  bool lo_strict = false;
  bool hi_strict = false;
  bool contains(const Rational& d) const;
};

DelayInterval moves_at(const TimedAutomatonSpec& spec, const Config& c, const std::string& action);
DelayInterval transition_window(const TimedAutomatonSpec& spec, std::size_t t, const Valuation& v);
// Delays allowed by the invariant of `loc` alone.
DelayInterval invariant_window(const TimedAutomatonSpec& spec, std::size_t loc, const Valuation& v);

// Polyhedron over clocks: delay window of transition t as constraints on v+d.
Polyhedron transition_window_polyhedron(const TimedAutomatonSpec& spec, std::size_t t);

// Reverse topological order (target side first). Throws ModelError on a cycle.
std::vector<std::size_t> topological_order(const TimedAutomatonSpec& spec);
// Longest path to the target in edges; nullopt when the target is unreachable.
std::optional<std::size_t> longest_path_length(const TimedAutomatonSpec& spec, std::size_t loc);

enum class ModelClass { Linear, Branching, Game };
ModelClass classify(const TimedAutomatonSpec& spec);
std::string class_name(ModelClass c);
long max_constant(const TimedAutomatonSpec& spec);

Valuation parse_valuation(const TimedAutomatonSpec& spec, const std::string& text);
Valuation parse_valuation(const std::vector<std::string>& clocks, const std::string& text);

}  // namespace perm
