#pragma once

#include "perm/engine.hpp"
#include "perm/model.hpp"

#include <string>

namespace testing {

inline std::string model_path(const std::string& name) { return std::string(PERM_MODELS_DIR) + "/" + name + ".model"; }

inline perm::TimedAutomatonSpec fig(const std::string& name) { return perm::load_model(model_path(name)); }

inline perm::Rational q(long p, long d = 1) {
  perm::Rational r(p, d);
  r.canonicalize();
  return r;
}

inline perm::ExtRational at(const perm::PiecewiseAffineFn& f, const perm::TimedAutomatonSpec& spec,
                            const std::string& v) {
  return perm::paf_eval(f, perm::parse_valuation(spec, v));
}

}  // namespace testing
