#pragma once

#include "perm/engine.hpp"
#include "perm/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perm {

// Bad user input: unreadable files, malformed documents, unknown names.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PafLocation {
  std::string id;
  Owner owner = Owner::Player;
  bool target = false;
  PiecewiseAffineFn fn;
};

struct PafDocument {
  std::string model_hash;
  std::vector<std::string> clocks;
  std::size_t iterations = 0;
  std::vector<PafLocation> locations;

  const PafLocation& location(const std::string& id) const;
};

// FNV-1a over the canonical text of the model, as 16 hex digits.
std::string model_hash(const TimedAutomatonSpec& spec);

PafDocument make_document(const TimedAutomatonSpec& spec, const PermSolution& sol);
std::string write_document(const PafDocument& doc);
PafDocument read_document(const std::string& json_text);
PafDocument load_document(const std::string& path);

struct ModelReport {
  ModelClass kind = ModelClass::Linear;
  std::size_t nclocks = 0;
  long max_constant = 0;
  std::optional<std::size_t> longest_path;
  std::string str() const;
};

// Value at a point and, when annotated, the optimal interval evaluated there.
struct EvalResult {
  ExtRational value;
  std::optional<std::string> action;
  Rational alpha;
  ExtRational beta;
  bool attainable = true;
  std::string str() const;
};

struct PlotRange {
  Rational from = 0;
  Rational to = 0;
  Rational step = 1;
};

struct CompareOptions {
  Rational delta{1, 32};
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  // Extra query point, checked in addition to the random samples.
  std::optional<std::string> loc;
  std::optional<std::string> val;
};

struct CompareReport {
  std::size_t samples = 0;
  std::size_t class_agree = 0;
  double max_deviation = 0;
  Rational delta;
  std::vector<std::string> lines;  // one per extra query point
  bool ok() const;
  std::string str() const;
};

PlotRange parse_range(const std::string& text);
// Formats q with 6 decimals; infinities as "+inf" / "-inf".
std::string decimal6(const ExtRational& q);

ModelReport cmd_validate(const std::string& model_path);
PafDocument cmd_solve(const std::string& model_path, std::optional<std::size_t> max_iter);
EvalResult cmd_eval(const PafDocument& doc, const std::string& loc, const std::string& val);
// Grid over two clocks; the other clocks take the values in `rest` (default 0).
std::string cmd_plot(const PafDocument& doc, const std::string& loc, const std::string& clocks,
                     const PlotRange& range, const std::string& rest = "");
CompareReport cmd_compare(const std::string& model_path, const CompareOptions& opts);

// Entry point of the command-line tool; returns the exit code
// (0 success, 1 input error, 2 internal invariant violation).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace perm
