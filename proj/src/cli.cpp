#include "perm/cli.hpp"

#include "perm/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace perm {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TimedAutomatonSpec load_spec(const std::string& path) {
  return parse_model(read_file(path), ParseMode::Solver);
}

json expr_json(const AffineExpr& e) {
  if (!e.is_finite()) return e.constant_term().str();
  json coeffs = json::array();
  for (const auto& c : e.coeffs()) coeffs.push_back(rational_str(c));
  return {{"coeffs", coeffs}, {"constant", e.constant_term().str()}};
}

Rational rational_field(const json& j) {
  if (!j.is_string()) throw InputError("expected a rational string, got " + j.dump());
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

AffineExpr expr_from_json(const json& j, std::size_t n) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "+inf") return AffineExpr::constant(n, ExtRational::pos_inf());
    if (s == "-inf") return AffineExpr::constant(n, ExtRational::neg_inf());
    return AffineExpr::constant(n, rational_field(j));
  }
  if (!j.is_object() || !j.contains("coeffs") || !j.contains("constant"))
    throw InputError("malformed affine expression " + j.dump());
  const json& cs = j.at("coeffs");
  if (!cs.is_array() || cs.size() != n) throw InputError("coefficient count does not match the clock count");
  AffineExpr e(n, rational_field(j.at("constant")));
  for (std::size_t i = 0; i < n; ++i) e.set_coeff(i, rational_field(cs[i]));
  return e;
}

json cell_json(const Cell& c) {
  json cons = json::array();
  for (const auto& k : c.poly.constraints()) {
    json e = expr_json(k.expr);
    e["strict"] = k.strict;
    cons.push_back(e);
  }
  json out = {{"constraints", cons}, {"value", expr_json(c.value)}};
  if (c.move)
    out["move"] = {{"action", c.move->action},
                   {"alpha", expr_json(c.move->alpha)},
                   {"beta", expr_json(c.move->beta)},
                   {"attainable", c.move->attainable}};
  return out;
}

Cell cell_from_json(const json& j, std::size_t n) {
  Cell c{Polyhedron(n, n), AffineExpr(n), std::nullopt};
  for (const auto& k : j.at("constraints")) {
    AffineExpr e = expr_from_json(k, n);
    if (!e.is_finite()) throw InputError("infinite constraint");
    c.poly.add({e, k.value("strict", false)});
  }
  c.value = expr_from_json(j.at("value"), n);
  if (j.contains("move")) {
    const json& m = j.at("move");
    c.move = Move{m.at("action").get<std::string>(), expr_from_json(m.at("alpha"), n), expr_from_json(m.at("beta"), n),
                  m.value("attainable", true)};
  }
  return c;
}

std::string owner_str(Owner o) { return o == Owner::Player ? "player" : "opponent"; }

std::vector<Rational> range_points(const PlotRange& r) {
  std::vector<Rational> out;
  for (Rational x = r.from; x <= r.to; x += r.step) out.push_back(x);
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t clock_index(const std::vector<std::string>& clocks, const std::string& name) {
  auto it = std::find(clocks.begin(), clocks.end(), name);
  if (it == clocks.end()) throw InputError("unknown clock '" + name + "'");
  return static_cast<std::size_t>(it - clocks.begin());
}

// Values for the clocks given in `text`; the others are 0.
Valuation partial_valuation(const std::vector<std::string>& clocks, const std::string& text) {
  Valuation v(clocks.size(), Rational(0));
  for (const auto& item : split_list(text)) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("expected clock=value in '" + item + "'");
    std::size_t c = clock_index(clocks, item.substr(0, eq));
    try {
      v[c] = parse_rational(item.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    if (v[c] < 0) throw InputError("clock values must be nonnegative");
  }
  return v;
}

Valuation full_valuation(const std::vector<std::string>& clocks, const std::string& text) {
  try {
    return parse_valuation(clocks, text);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

}  // namespace

const PafLocation& PafDocument::location(const std::string& id) const {
  for (const auto& l : locations)
    if (l.id == id) return l;
  throw InputError("unknown location '" + id + "'");
}

std::string model_hash(const TimedAutomatonSpec& spec) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : to_text(spec)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << h;
  return ss.str();
}

PafDocument make_document(const TimedAutomatonSpec& spec, const PermSolution& sol) {
  PafDocument doc;
  doc.model_hash = model_hash(spec);
  doc.clocks = spec.clocks;
  doc.iterations = sol.iterations;
  for (std::size_t l = 0; l < spec.locations.size(); ++l) {
    const auto& loc = spec.locations[l];
    doc.locations.push_back({loc.id, loc.owner, l == spec.target, sol.fns[l]});
  }
  return doc;
}

std::string write_document(const PafDocument& doc) {
  json locs = json::array();
  for (const auto& l : doc.locations) {
    json cells = json::array();
    for (const auto& c : l.fn.cells) cells.push_back(cell_json(c));
    locs.push_back({{"id", l.id}, {"owner", owner_str(l.owner)}, {"target", l.target}, {"cells", cells}});
  }
  json j = {{"model_hash", doc.model_hash}, {"clocks", doc.clocks}, {"iterations", doc.iterations}, {"locations", locs}};
  return j.dump(1) + "\n";
}

PafDocument read_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  try {
    PafDocument doc;
    doc.model_hash = j.at("model_hash").get<std::string>();
    doc.clocks = j.at("clocks").get<std::vector<std::string>>();
    doc.iterations = j.value("iterations", std::size_t(0));
    std::size_t n = doc.clocks.size();
    for (const auto& l : j.at("locations")) {
      PafLocation loc;
      loc.id = l.at("id").get<std::string>();
      std::string owner = l.value("owner", std::string("player"));
      if (owner != "player" && owner != "opponent") throw InputError("bad owner '" + owner + "'");
      loc.owner = owner == "player" ? Owner::Player : Owner::Opponent;
      loc.target = l.value("target", false);
      loc.fn.nclocks = n;
      for (const auto& c : l.at("cells")) loc.fn.cells.push_back(cell_from_json(c, n));
      doc.locations.push_back(std::move(loc));
    }
    return doc;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed document: ") + e.what());
  }
}

PafDocument load_document(const std::string& path) { return read_document(read_file(path)); }

std::string ModelReport::str() const {
  std::ostringstream ss;
  ss << class_name(kind) << ", " << nclocks << (nclocks == 1 ? " clock" : " clocks") << ", M=" << max_constant
     << ", longest path ";
  if (longest_path) ss << *longest_path;
  else ss << "unreachable";
  return ss.str();
}

std::string EvalResult::str() const {
  std::string s = value.str();
  if (action) {
    s += "\nmove " + *action + " [" + rational_str(alpha) + ", " + beta.str() + (beta.is_finite() ? "]" : ")");
    if (!attainable) s += " (supremum, not attained)";
  }
  return s;
}

bool CompareReport::ok() const {
  return class_agree == samples && max_deviation <= 4 * delta.get_d() + 1e-12;
}

std::string CompareReport::str() const {
  std::ostringstream ss;
  for (const auto& l : lines) ss << l << "\n";
  double pct = samples == 0 ? 100.0 : 100.0 * double(class_agree) / double(samples);
  ss << "samples " << samples << ", delta " << rational_str(delta) << ", classification agreement " << pct
     << "%, max |diff| " << decimal6(ExtRational(Rational(max_deviation)));
  return ss.str();
}

PlotRange parse_range(const std::string& text) {
  auto parts = std::vector<std::string>();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw InputError("range must be from:to:step, got '" + text + "'");
  PlotRange r;
  try {
    r.from = parse_rational(parts[0]);
    r.to = parse_rational(parts[1]);
    r.step = parse_rational(parts[2]);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (r.step <= 0) throw InputError("range step must be positive");
  if (r.from < 0) throw InputError("range must start at a nonnegative value");
  return r;
}

std::string decimal6(const ExtRational& q) {
  if (q.is_pos_inf()) return "+inf";
  if (q.is_neg_inf()) return "-inf";
  Rational x = abs(q.value()) * 1000000 + Rational(1, 2);
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  std::string digits = n.get_str();
  if (digits.size() < 7) digits.insert(0, 7 - digits.size(), '0');
  std::string s = digits.substr(0, digits.size() - 6) + "." + digits.substr(digits.size() - 6);
  if (sgn(q.value()) < 0 && n != 0) s.insert(0, "-");
  return s;
}

ModelReport cmd_validate(const std::string& model_path) {
  TimedAutomatonSpec spec = load_spec(model_path);
  ModelReport r;
  r.kind = classify(spec);
  r.nclocks = spec.nclocks();
  r.max_constant = max_constant(spec);
  r.longest_path = longest_path_length(spec, spec.initial);
  return r;
}

PafDocument cmd_solve(const std::string& model_path, std::optional<std::size_t> max_iter) {
  TimedAutomatonSpec spec = load_spec(model_path);
  EngineOptions opts;
  opts.max_iter = max_iter;
  return make_document(spec, compute_permissiveness(spec, opts));
}

EvalResult cmd_eval(const PafDocument& doc, const std::string& loc, const std::string& val) {
  const PafLocation& l = doc.location(loc);
  Valuation v = full_valuation(doc.clocks, val);
  EvalResult r;
  std::size_t k = paf_lookup(l.fn, v);
  const Cell& c = l.fn.cells[k];
  r.value = c.value.eval(v);
  if (c.move && r.value.is_finite()) {
    r.action = c.move->action;
    r.alpha = c.move->alpha.eval(v).value();
    r.beta = c.move->beta.eval(v);
    r.attainable = c.move->attainable;
  }
  return r;
}

std::string cmd_plot(const PafDocument& doc, const std::string& loc, const std::string& clocks,
                     const PlotRange& range, const std::string& rest) {
  const PafLocation& l = doc.location(loc);
  auto names = split_list(clocks);
  if (names.size() != 2 || names[0] == names[1]) throw InputError("--clocks needs two distinct clock names");
  std::size_t cx = clock_index(doc.clocks, names[0]), cy = clock_index(doc.clocks, names[1]);
  Valuation base = partial_valuation(doc.clocks, rest);
  std::ostringstream out;
  out << names[0] << "," << names[1] << ",value\n";
  auto pts = range_points(range);
  for (const auto& x : pts)
    for (const auto& y : pts) {
      Valuation v = base;
      v[cx] = x;
      v[cy] = y;
      out << decimal6(x) << "," << decimal6(y) << "," << decimal6(paf_eval(l.fn, v)) << "\n";
    }
  return out.str();
}

CompareReport cmd_compare(const std::string& model_path, const CompareOptions& opts) {
  TimedAutomatonSpec spec = load_spec(model_path);
  if (opts.delta <= 0) throw InputError("delta must be positive");
  PermSolution sol = compute_permissiveness(spec);
  GridParams g;
  g.delta = opts.delta;
  GridOracle oracle(spec, g);
  CompareReport rep;
  rep.delta = opts.delta;

  auto check = [&](std::size_t loc, const Valuation& v) {
    ExtRational a = paf_eval(sol.fns[loc], v), b = oracle.value({loc, v});
    ++rep.samples;
    bool agree = a.is_finite() == b.is_finite() && (a.is_finite() || a == b);
    if (agree) ++rep.class_agree;
    if (agree && a.is_finite()) rep.max_deviation = std::max(rep.max_deviation, std::abs((a - b).to_double()));
    return std::make_pair(a, b);
  };

  if (opts.loc || opts.val) {
    std::size_t loc = spec.initial;
    if (opts.loc) {
      auto l = spec.find_location(*opts.loc);
      if (!l) throw InputError("unknown location '" + *opts.loc + "'");
      loc = *l;
    }
    Valuation v = full_valuation(spec.clocks, opts.val.value_or(""));
    auto [a, b] = check(loc, v);
    rep.lines.push_back(spec.locations[loc].id + " at (" + opts.val.value_or("") + "): symbolic " + a.str() +
                        ", oracle " + b.str());
  }

  std::mt19937_64 rng(opts.seed);
  long top = (max_constant(spec) + 1) * 8;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    std::size_t loc = static_cast<std::size_t>(rng() % spec.locations.size());
    Valuation v;
    for (std::size_t c = 0; c < spec.nclocks(); ++c) v.push_back(Rational(long(rng() % std::uint64_t(top + 1)), 8));
    check(loc, v);
  }
  return rep;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Permissiveness of acyclic timed automata and timed games"};
  app.require_subcommand(1);

  std::string model, doc_path, out_path, loc, val, clocks, range, rest, delta = "1/32";
  long max_iter = -1;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  std::string cmp_loc, cmp_val;

  auto* validate = app.add_subcommand("validate", "Parse a model and report its shape");
  validate->add_option("model", model, "Model file")->required();

  auto* solve = app.add_subcommand("solve", "Compute the permissiveness functions");
  solve->add_option("model", model, "Model file")->required();
  solve->add_option("--out,-o", out_path, "Output JSON file (stdout when omitted)");
  solve->add_option("--max-iter", max_iter, "Compute P_k for this k")->check(CLI::NonNegativeNumber);

  auto* eval = app.add_subcommand("eval", "Evaluate a solved function at a valuation");
  eval->add_option("doc", doc_path, "Solved JSON document")->required();
  eval->add_option("--loc", loc, "Location")->required();
  eval->add_option("--val", val, "Valuation, e.g. x=1/2,y=0")->required();

  auto* plot = app.add_subcommand("plot", "Write a CSV grid of a solved function");
  plot->add_option("doc", doc_path, "Solved JSON document")->required();
  plot->add_option("--loc", loc, "Location")->required();
  plot->add_option("--clocks", clocks, "Two clocks, e.g. x,y")->required();
  plot->add_option("--range", range, "from:to:step")->required();
  plot->add_option("--fix", rest, "Values of the remaining clocks, e.g. z=1");

  auto* compare = app.add_subcommand("compare", "Compare the symbolic solution with the grid oracle");
  compare->add_option("model", model, "Model file")->required();
  compare->add_option("--delta", delta, "Grid step of the oracle");
  compare->add_option("--samples", samples, "Number of random sample points");
  compare->add_option("--seed", seed, "Random seed");
  compare->add_option("--loc", cmp_loc, "Extra query location");
  compare->add_option("--val", cmp_val, "Extra query valuation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate) {
      out << cmd_validate(model).str() << "\n";
    } else if (*solve) {
      std::optional<std::size_t> k;
      if (max_iter >= 0) k = static_cast<std::size_t>(max_iter);
      std::string text = write_document(cmd_solve(model, k));
      if (out_path.empty()) {
        out << text;
      } else {
        std::ofstream f(out_path);
        if (!f) throw InputError("cannot write " + out_path);
        f << text;
      }
    } else if (*eval) {
      out << cmd_eval(load_document(doc_path), loc, val).str() << "\n";
    } else if (*plot) {
      out << cmd_plot(load_document(doc_path), loc, clocks, parse_range(range), rest);
    } else if (*compare) {
      CompareOptions o;
      try {
        o.delta = parse_rational(delta);
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
      o.samples = samples;
      o.seed = seed;
      if (!cmp_loc.empty()) o.loc = cmp_loc;
      if (!cmp_val.empty()) o.val = cmp_val;
      CompareReport rep = cmd_compare(model, o);
      out << rep.str() << "\n";
      if (!rep.ok()) {
        err << "error: symbolic and oracle values disagree beyond 4*delta\n";
        return 2;
      }
    }
  } catch (const ModelError& e) {
    for (const auto& d : e.diagnostics) err << "error: " << d.str() << "\n";
    return 1;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const HorizonExceeded& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace perm
