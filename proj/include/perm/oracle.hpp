#pragma once

#include "perm/engine.hpp"
#include "perm/model.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace perm {

struct GridParams {
  Rational delta{1, 32};          // delay step
  Rational valuation_step{1, 8};  // spacing of sampled start valuations
  std::size_t horizon = 64;       // maximal number of transitions explored
};

struct HorizonExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Brute-force value of the discretised game: intervals and opponent delays
// range over multiples of delta within the legal window, plus its endpoints.
// Results are memoised across queries that share the same grid unit.
class GridOracle {
 public:
  GridOracle(const TimedAutomatonSpec& spec, const GridParams& g);
  ~GridOracle();
  GridOracle(const GridOracle&) = delete;
  GridOracle& operator=(const GridOracle&) = delete;

  ExtRational value(const Config& c);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ExtRational oracle_perm(const TimedAutomatonSpec& spec, const Config& c, const GridParams& g);

enum class Adversary { Earliest, Latest, GridMin };

struct ReplayStep {
  std::size_t loc = 0;
  Valuation v;
  std::string action;
  Rational alpha;
  ExtRational beta;
  Rational delay;       // delay chosen by the adversary inside [alpha, beta]
  Rational wait = 0;    // delay chosen beforehand in an opponent location
};

struct ReplayResult {
  bool reached = false;
  ExtRational min_width = ExtRational::pos_inf();
  std::vector<ReplayStep> steps;
};

struct IllegalMove : std::logic_error {
  using std::logic_error::logic_error;
};

struct IntervalOverride {
  Rational alpha;
  ExtRational beta;
};

// Plays the annotated moves of `sol` from c against the adversary. The
// override, if any, replaces the first proposed interval.
ReplayResult adversary_replay(const TimedAutomatonSpec& spec, const PermSolution& sol, const Config& c,
                              Adversary adversary, const Rational& delta = Rational(1, 64),
                              const std::optional<IntervalOverride>& first = std::nullopt);

// Random acyclic model: integer constants <= 4, per-clock interval guards.
TimedAutomatonSpec random_model(std::uint64_t seed, std::size_t nclocks, std::size_t nlocations, ModelClass kind);

}  // namespace perm
