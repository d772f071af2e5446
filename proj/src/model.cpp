#include "perm/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace perm {

std::string kind_name(ModelErrorKind k) {
  switch (k) {
    case ModelErrorKind::Syntax: return "SyntaxError";
    case ModelErrorKind::UnknownClock: return "UnknownClock";
    case ModelErrorKind::UnknownLocation: return "UnknownLocation";
    case ModelErrorKind::DuplicateAction: return "DuplicateAction";
    case ModelErrorKind::CycleDetected: return "CycleDetected";
    case ModelErrorKind::StrictGuard: return "StrictGuard";
    case ModelErrorKind::Overflow: return "Overflow";
    case ModelErrorKind::MissingTarget: return "MissingTarget";
  }
  return "Error";
}

std::string ModelDiagnostic::str() const {
  std::string s = line ? "line " + std::to_string(line) + ": " : std::string();
  return s + kind_name(kind) + ": " + message;
}

static std::string join_diagnostics(const std::vector<ModelDiagnostic>& ds) {
  std::string s;
  for (const auto& d : ds) s += (s.empty() ? "" : "\n") + d.str();
  return s;
}

ModelError::ModelError(std::vector<ModelDiagnostic> ds)
    : std::runtime_error(join_diagnostics(ds)), diagnostics(std::move(ds)) {}

bool ModelError::has(ModelErrorKind k) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(), [&](const auto& d) { return d.kind == k; });
}

std::optional<std::size_t> TimedAutomatonSpec::find_location(const std::string& id) const {
  for (std::size_t i = 0; i < locations.size(); ++i)
    if (locations[i].id == id) return i;
  return std::nullopt;
}

std::vector<std::size_t> TimedAutomatonSpec::outgoing(std::size_t loc) const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < transitions.size(); ++t)
    if (transitions[t].src == loc) out.push_back(t);
  return out;
}

namespace {

struct ParseFailure {
  ModelErrorKind kind;
  std::string message;
};

std::vector<std::string> tokenize(const std::string& line, std::size_t lineno, std::vector<ModelDiagnostic>& diags) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    char ch = line[i];
    if (ch == '#') break;
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (ch == '"') {
      std::size_t j = line.find('"', i + 1);
      if (j == std::string::npos) {
        diags.push_back({lineno, ModelErrorKind::Syntax, "unterminated quote"});
        return {};
      }
      toks.push_back(line.substr(i, j - i + 1));
      i = j + 1;
      continue;
    }
    if (line.compare(i, 2, "->") == 0) {
      toks.push_back("->");
      i += 2;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '"' && line[j] != '#' &&
           line.compare(j, 2, "->") != 0)
      ++j;
    toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

Rel flip(Rel r) {
  switch (r) {
    case Rel::LE: return Rel::GE;
    case Rel::LT: return Rel::GT;
    case Rel::GE: return Rel::LE;
    case Rel::GT: return Rel::LT;
    case Rel::EQ: return Rel::EQ;
  }
  return r;
}

// Splits "0<=x<=1" style text into operands and operators.
Guard parse_guard(const std::string& text, const std::vector<std::string>& clocks) {
  Guard g;
  std::string body = text;
  auto trimmed = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  if (trimmed(body).empty() || trimmed(body) == "true") return g;
  std::stringstream ss(body);
  std::string conj;
  while (std::getline(ss, conj, '&')) {
    conj = trimmed(conj);
    if (conj.empty()) throw ParseFailure{ModelErrorKind::Syntax, "empty conjunct in guard \"" + text + "\""};
    std::vector<std::string> operands;
    std::vector<Rel> ops;
    std::size_t i = 0;
    std::string cur;
    auto flush = [&] {
      cur = trimmed(cur);
      if (cur.empty()) throw ParseFailure{ModelErrorKind::Syntax, "missing operand in \"" + conj + "\""};
      operands.push_back(cur);
      cur.clear();
    };
    while (i < conj.size()) {
      char ch = conj[i];
      if (ch == '<' || ch == '>' || ch == '=') {
        flush();
        bool eq = i + 1 < conj.size() && conj[i + 1] == '=';
        if (ch == '<') ops.push_back(eq ? Rel::LE : Rel::LT);
        else if (ch == '>') ops.push_back(eq ? Rel::GE : Rel::GT);
        else ops.push_back(Rel::EQ);
        i += eq ? 2 : 1;
      } else {
        cur += ch;
        ++i;
      }
    }
    flush();
    if (ops.empty()) throw ParseFailure{ModelErrorKind::Syntax, "expected a comparison in \"" + conj + "\""};
    for (std::size_t k = 0; k < ops.size(); ++k) {
      std::string lhs = operands[k], rhs = operands[k + 1];
      Rel rel = ops[k];
      auto clock_index = [&](const std::string& s) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < clocks.size(); ++c)
          if (clocks[c] == s) return c;
        return std::nullopt;
      };
      bool lhs_num = !lhs.empty() && (std::isdigit(static_cast<unsigned char>(lhs[0])) || lhs[0] == '-');
      bool rhs_num = !rhs.empty() && (std::isdigit(static_cast<unsigned char>(rhs[0])) || rhs[0] == '-');
      if (lhs_num == rhs_num)
        throw ParseFailure{ModelErrorKind::Syntax, "comparison must relate a clock and an integer in \"" + conj + "\""};
      if (lhs_num) {
        std::swap(lhs, rhs);
        rel = flip(rel);
      }
      auto c = clock_index(lhs);
      if (!c) {
        if (is_identifier(lhs)) throw ParseFailure{ModelErrorKind::UnknownClock, "unknown clock '" + lhs + "'"};
        throw ParseFailure{ModelErrorKind::Syntax, "bad clock name '" + lhs + "'"};
      }
      if (rhs[0] == '-' || !std::all_of(rhs.begin(), rhs.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        throw ParseFailure{ModelErrorKind::Syntax, "constant '" + rhs + "' is not a natural number"};
      long n = 0;
      auto [ptr, ec] = std::from_chars(rhs.data(), rhs.data() + rhs.size(), n);
      if (ec == std::errc::result_out_of_range || n > (1L << 40))
        throw ParseFailure{ModelErrorKind::Overflow, "constant '" + rhs + "' is too large"};
      if (ec != std::errc() || ptr != rhs.data() + rhs.size())
        throw ParseFailure{ModelErrorKind::Syntax, "bad constant '" + rhs + "'"};
      g.push_back({*c, rel, n});
    }
  }
  return g;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

bool has_strict(const Guard& g) {
  return std::any_of(g.begin(), g.end(), [](const auto& c) { return c.rel == Rel::LT || c.rel == Rel::GT; });
}

void structural_checks(const TimedAutomatonSpec& spec, ParseMode mode, const std::vector<std::size_t>& loc_lines,
                       const std::vector<std::size_t>& edge_lines, std::vector<ModelDiagnostic>& diags) {
  std::size_t ntarget = 0;
  for (const auto& l : spec.locations) ntarget += l.target ? 1 : 0;
  if (spec.locations.empty()) diags.push_back({0, ModelErrorKind::MissingTarget, "no locations"});
  else if (ntarget != 1)
    diags.push_back({0, ModelErrorKind::MissingTarget, "exactly one target location is required (found " + std::to_string(ntarget) + ")"});
  std::set<std::pair<std::size_t, std::string>> seen;
  for (std::size_t t = 0; t < spec.transitions.size(); ++t) {
    const auto& tr = spec.transitions[t];
    std::size_t line = t < edge_lines.size() ? edge_lines[t] : 0;
    if (!seen.insert({tr.src, tr.action}).second)
      diags.push_back({line, ModelErrorKind::DuplicateAction,
                       "location '" + spec.locations[tr.src].id + "' has two transitions labelled '" + tr.action + "'"});
    if (mode == ParseMode::Solver && has_strict(tr.guard))
      diags.push_back({line, ModelErrorKind::StrictGuard, "strict guard on edge labelled '" + tr.action + "'"});
  }
  for (std::size_t l = 0; l < spec.locations.size(); ++l) {
    if (mode == ParseMode::Solver && has_strict(spec.locations[l].invariant))
      diags.push_back({l < loc_lines.size() ? loc_lines[l] : 0, ModelErrorKind::StrictGuard,
                       "strict invariant on location '" + spec.locations[l].id + "'"});
  }
  // Cycle detection by DFS colouring.
  std::vector<int> colour(spec.locations.size(), 0);
  bool cyclic = false;
  std::function<void(std::size_t)> visit = [&](std::size_t u) {
    colour[u] = 1;
    for (std::size_t t : spec.outgoing(u)) {
      std::size_t w = spec.transitions[t].dst;
      if (colour[w] == 1) cyclic = true;
      else if (colour[w] == 0) visit(w);
    }
    colour[u] = 2;
  };
  for (std::size_t u = 0; u < spec.locations.size(); ++u)
    if (colour[u] == 0) visit(u);
  if (cyclic) diags.push_back({0, ModelErrorKind::CycleDetected, "the location graph has a cycle"});
}

}  // namespace

TimedAutomatonSpec parse_model(const std::string& text, ParseMode mode) {
  TimedAutomatonSpec spec;
  std::vector<ModelDiagnostic> diags;
  std::vector<std::size_t> loc_lines, edge_lines;
  bool have_clocks = false;
  bool have_initial = false;

  struct PendingEdge {
    std::size_t line;
    std::string src, dst, action, guard;
    std::vector<std::string> reset;
  };
  std::vector<PendingEdge> edges;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line, lineno, diags);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "clocks") {
      if (have_clocks) diags.push_back({lineno, ModelErrorKind::Syntax, "clocks declared twice"});
      have_clocks = true;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        std::stringstream cs(toks[i]);
        std::string name;
        while (std::getline(cs, name, ',')) {
          if (name.empty()) continue;
          if (!is_identifier(name)) diags.push_back({lineno, ModelErrorKind::Syntax, "bad clock name '" + name + "'"});
          else if (std::find(spec.clocks.begin(), spec.clocks.end(), name) != spec.clocks.end())
            diags.push_back({lineno, ModelErrorKind::Syntax, "clock '" + name + "' declared twice"});
          else spec.clocks.push_back(name);
        }
      }
    } else if (kw == "location") {
      if (toks.size() < 2 || !is_identifier(toks[1])) {
        diags.push_back({lineno, ModelErrorKind::Syntax, "expected a location name"});
        continue;
      }
      if (spec.find_location(toks[1])) {
        diags.push_back({lineno, ModelErrorKind::Syntax, "location '" + toks[1] + "' declared twice"});
        continue;
      }
      Location loc;
      loc.id = toks[1];
      bool ok = true;
      for (std::size_t i = 2; i < toks.size() && ok; ++i) {
        if (toks[i] == "initial") {
          if (have_initial) diags.push_back({lineno, ModelErrorKind::Syntax, "second initial location"});
          loc.initial = have_initial = true;
        } else if (toks[i] == "target") {
          loc.target = true;
        } else if (toks[i] == "owner" && i + 1 < toks.size()) {
          ++i;
          if (toks[i] == "player") loc.owner = Owner::Player;
          else if (toks[i] == "opponent") loc.owner = Owner::Opponent;
          else {
            diags.push_back({lineno, ModelErrorKind::Syntax, "owner must be player or opponent"});
            ok = false;
          }
        } else if (toks[i] == "invariant" && i + 1 < toks.size() && toks[i + 1].front() == '"') {
          ++i;
          try {
            loc.invariant = parse_guard(unquote(toks[i]), spec.clocks);
          } catch (const ParseFailure& f) {
            diags.push_back({lineno, f.kind, f.message});
            ok = false;
          }
        } else {
          diags.push_back({lineno, ModelErrorKind::Syntax, "unexpected token '" + toks[i] + "'"});
          ok = false;
        }
      }
      if (!have_clocks) diags.push_back({lineno, ModelErrorKind::Syntax, "clocks must be declared first"});
      spec.locations.push_back(loc);
      loc_lines.push_back(lineno);
    } else if (kw == "edge") {
      PendingEdge e;
      e.line = lineno;
      if (toks.size() < 6 || toks[2] != "->" || toks[4] != "action") {
        diags.push_back({lineno, ModelErrorKind::Syntax, "expected: edge <src> -> <dst> action <a> [guard \"...\"] [reset c1,c2]"});
        continue;
      }
      e.src = toks[1];
      e.dst = toks[3];
      e.action = toks[5];
      bool ok = is_identifier(e.action);
      if (!ok) diags.push_back({lineno, ModelErrorKind::Syntax, "bad action name '" + e.action + "'"});
      for (std::size_t i = 6; i < toks.size() && ok; ++i) {
        if (toks[i] == "guard" && i + 1 < toks.size() && toks[i + 1].front() == '"') {
          e.guard = unquote(toks[++i]);
        } else if (toks[i] == "reset" && i + 1 < toks.size()) {
          std::stringstream cs(toks[++i]);
          std::string name;
          while (std::getline(cs, name, ','))
            if (!name.empty()) e.reset.push_back(name);
        } else {
          diags.push_back({lineno, ModelErrorKind::Syntax, "unexpected token '" + toks[i] + "'"});
          ok = false;
        }
      }
      if (ok) edges.push_back(e);
    } else {
      diags.push_back({lineno, ModelErrorKind::Syntax, "unknown statement '" + kw + "'"});
    }
  }

  for (const auto& e : edges) {
    auto s = spec.find_location(e.src);
    auto d = spec.find_location(e.dst);
    if (!s) diags.push_back({e.line, ModelErrorKind::UnknownLocation, "unknown location '" + e.src + "'"});
    if (!d) diags.push_back({e.line, ModelErrorKind::UnknownLocation, "unknown location '" + e.dst + "'"});
    Transition tr;
    bool ok = s && d;
    try {
      tr.guard = parse_guard(e.guard, spec.clocks);
    } catch (const ParseFailure& f) {
      diags.push_back({e.line, f.kind, f.message});
      ok = false;
    }
    for (const auto& r : e.reset) {
      auto it = std::find(spec.clocks.begin(), spec.clocks.end(), r);
      if (it == spec.clocks.end()) {
        diags.push_back({e.line, ModelErrorKind::UnknownClock, "unknown clock '" + r + "' in reset"});
        ok = false;
      } else {
        std::size_t c = static_cast<std::size_t>(it - spec.clocks.begin());
        if (std::find(tr.reset.begin(), tr.reset.end(), c) == tr.reset.end()) tr.reset.push_back(c);
      }
    }
    if (!ok) continue;
    tr.src = *s;
    tr.dst = *d;
    tr.action = e.action;
    std::sort(tr.reset.begin(), tr.reset.end());
    spec.transitions.push_back(tr);
    edge_lines.push_back(e.line);
  }

  if (diags.empty()) structural_checks(spec, mode, loc_lines, edge_lines, diags);
  if (!diags.empty()) throw ModelError(diags);

  for (std::size_t l = 0; l < spec.locations.size(); ++l) {
    if (spec.locations[l].target) spec.target = l;
    if (spec.locations[l].initial) spec.initial = l;
  }
  if (!have_initial) spec.locations[spec.initial].initial = true;
  return spec;
}

TimedAutomatonSpec load_model(const std::string& path, ParseMode mode) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_model(ss.str(), mode);
}

void validate_model(const TimedAutomatonSpec& spec, ParseMode mode) {
  std::vector<ModelDiagnostic> diags;
  structural_checks(spec, mode, {}, {}, diags);
  if (!diags.empty()) throw ModelError(diags);
}

static const char* rel_str(Rel r) {
  switch (r) {
    case Rel::LE: return "<=";
    case Rel::LT: return "<";
    case Rel::GE: return ">=";
    case Rel::GT: return ">";
    case Rel::EQ: return "==";
  }
  return "?";
}

std::string guard_str(const TimedAutomatonSpec& spec, const Guard& g) {
  if (g.empty()) return "true";
  std::string s;
  for (const auto& c : g) {
    if (!s.empty()) s += " & ";
    s += spec.clocks[c.clock] + rel_str(c.rel) + std::to_string(c.bound);
  }
  return s;
}

std::string to_text(const TimedAutomatonSpec& spec) {
  std::ostringstream out;
  out << "clocks";
  for (const auto& c : spec.clocks) out << ' ' << c;
  out << '\n';
  for (std::size_t l = 0; l < spec.locations.size(); ++l) {
    const auto& loc = spec.locations[l];
    out << "location " << loc.id;
    if (l == spec.initial) out << " initial";
    if (loc.target) out << " target";
    if (loc.owner == Owner::Opponent) out << " owner opponent";
    if (!loc.invariant.empty()) out << " invariant \"" << guard_str(spec, loc.invariant) << '"';
    out << '\n';
  }
  for (const auto& t : spec.transitions) {
    out << "edge " << spec.locations[t.src].id << " -> " << spec.locations[t.dst].id << " action " << t.action;
    if (!t.guard.empty()) out << " guard \"" << guard_str(spec, t.guard) << '"';
    if (!t.reset.empty()) {
      out << " reset ";
      for (std::size_t i = 0; i < t.reset.size(); ++i) out << (i ? "," : "") << spec.clocks[t.reset[i]];
    }
    out << '\n';
  }
  return out.str();
}

Polyhedron guard_polyhedron(const Guard& g, std::size_t n) {
  Polyhedron p(n, n);
  for (const auto& c : g) {
    AffineExpr x = AffineExpr::variable(n, c.clock);
    AffineExpr k = AffineExpr::constant(n, Rational(c.bound));
    switch (c.rel) {
      case Rel::LE: p.add_le(x - k); break;
      case Rel::LT: p.add_lt(x - k); break;
      case Rel::GE: p.add_le(k - x); break;
      case Rel::GT: p.add_lt(k - x); break;
      case Rel::EQ: p.add_eq(x, k); break;
    }
  }
  return p;
}

static bool holds(Rel r, const Rational& x, long b) {
  Rational k(b);
  switch (r) {
    case Rel::LE: return x <= k;
    case Rel::LT: return x < k;
    case Rel::GE: return x >= k;
    case Rel::GT: return x > k;
    case Rel::EQ: return x == k;
  }
  return false;
}

bool satisfies(const Guard& g, const Valuation& v) {
  return std::all_of(g.begin(), g.end(), [&](const auto& c) { return holds(c.rel, v[c.clock], c.bound); });
}

std::optional<std::size_t> find_transition(const TimedAutomatonSpec& spec, std::size_t loc, const std::string& action) {
  for (std::size_t t = 0; t < spec.transitions.size(); ++t)
    if (spec.transitions[t].src == loc && spec.transitions[t].action == action) return t;
  return std::nullopt;
}

static Valuation apply_reset(Valuation v, const std::vector<std::size_t>& reset) {
  for (std::size_t c : reset) v[c] = 0;
  return v;
}

Config step(const TimedAutomatonSpec& spec, const Config& c, const Rational& d, const std::string& action) {
  if (d < 0) throw StepError(StepErrorKind::GuardViolated, "negative delay");
  auto t = find_transition(spec, c.loc, action);
  if (!t) throw StepError(StepErrorKind::NoSuchTransition, "no transition labelled '" + action + "' from " + spec.locations[c.loc].id);
  const Transition& tr = spec.transitions[*t];
  Valuation w = c.v;
  for (auto& x : w) x += d;
  if (!satisfies(spec.locations[c.loc].invariant, w))
    throw StepError(StepErrorKind::InvariantViolated, "invariant of " + spec.locations[c.loc].id + " violated");
  if (!satisfies(tr.guard, w)) throw StepError(StepErrorKind::GuardViolated, "guard of '" + action + "' violated");
  Valuation r = apply_reset(w, tr.reset);
  if (tr.dst != spec.target && !satisfies(spec.locations[tr.dst].invariant, r))
    throw StepError(StepErrorKind::InvariantViolated, "invariant of " + spec.locations[tr.dst].id + " violated");
  return {tr.dst, r};
}

bool DelayInterval::contains(const Rational& d) const {
  if (empty) return false;
  if (d < lo || (lo_strict && d == lo)) return false;
  if (hi.is_pos_inf()) return true;
  return d < hi.value() || (!hi_strict && d == hi.value());
}

namespace {

// Intersects `iv` with {d : x + k*d rel b} where k in {0,1}.
void restrict(DelayInterval& iv, const Rational& x, bool moves, Rel rel, long b) {
  if (iv.empty) return;
  if (!moves) {
    if (!holds(rel, x, b)) iv.empty = true;
    return;
  }
  Rational bound = Rational(b) - x;
  auto lower = [&](bool strict) {
    if (bound > iv.lo || (bound == iv.lo && strict && !iv.lo_strict)) {
      iv.lo = bound;
      iv.lo_strict = strict;
    }
  };
  auto upper = [&](bool strict) {
    if (iv.hi.is_pos_inf() || bound < iv.hi.value() || (bound == iv.hi.value() && strict && !iv.hi_strict)) {
      iv.hi = bound;
      iv.hi_strict = strict;
    }
  };
  switch (rel) {
    case Rel::LE: upper(false); break;
    case Rel::LT: upper(true); break;
    case Rel::GE: lower(false); break;
    case Rel::GT: lower(true); break;
    case Rel::EQ:
      upper(false);
      lower(false);
      break;
  }
}

void normalize(DelayInterval& iv) {
  if (iv.empty || iv.hi.is_pos_inf()) return;
  const Rational& h = iv.hi.value();
  if (h < iv.lo || (h == iv.lo && (iv.lo_strict || iv.hi_strict))) iv.empty = true;
}

DelayInterval full_interval() {
  DelayInterval iv;
  iv.empty = false;
  iv.lo = 0;
  iv.hi = ExtRational::pos_inf();
  return iv;
}

}  // namespace

DelayInterval invariant_window(const TimedAutomatonSpec& spec, std::size_t loc, const Valuation& v) {
  DelayInterval iv = full_interval();
  for (const auto& c : spec.locations[loc].invariant) restrict(iv, v[c.clock], true, c.rel, c.bound);
  normalize(iv);
  return iv;
}

DelayInterval transition_window(const TimedAutomatonSpec& spec, std::size_t t, const Valuation& v) {
  const Transition& tr = spec.transitions[t];
  DelayInterval iv = full_interval();
  for (const auto& c : spec.locations[tr.src].invariant) restrict(iv, v[c.clock], true, c.rel, c.bound);
  for (const auto& c : tr.guard) restrict(iv, v[c.clock], true, c.rel, c.bound);
  if (tr.dst != spec.target) {
    for (const auto& c : spec.locations[tr.dst].invariant) {
      bool reset = std::find(tr.reset.begin(), tr.reset.end(), c.clock) != tr.reset.end();
      restrict(iv, reset ? Rational(0) : v[c.clock], !reset, c.rel, c.bound);
    }
  }
  normalize(iv);
  return iv;
}

DelayInterval moves_at(const TimedAutomatonSpec& spec, const Config& c, const std::string& action) {
  auto t = find_transition(spec, c.loc, action);
  if (!t) return DelayInterval{};
  return transition_window(spec, *t, c.v);
}

Polyhedron transition_window_polyhedron(const TimedAutomatonSpec& spec, std::size_t t) {
  const Transition& tr = spec.transitions[t];
  std::size_t n = spec.nclocks();
  Polyhedron p = guard_polyhedron(spec.locations[tr.src].invariant, n);
  p.add_all(guard_polyhedron(tr.guard, n));
  if (tr.dst != spec.target) {
    for (const auto& c : spec.locations[tr.dst].invariant) {
      bool reset = std::find(tr.reset.begin(), tr.reset.end(), c.clock) != tr.reset.end();
      if (!reset) {
        p.add_all(guard_polyhedron({c}, n));
      } else if (!holds(c.rel, 0, c.bound)) {
        p.add_le(AffineExpr::constant(n, Rational(1)));
      }
    }
  }
  return p;
}

std::vector<std::size_t> topological_order(const TimedAutomatonSpec& spec) {
  std::size_t m = spec.locations.size();
  std::vector<std::size_t> outdeg(m, 0);
  std::vector<std::vector<std::size_t>> preds(m);
  for (const auto& t : spec.transitions) {
    ++outdeg[t.src];
    preds[t.dst].push_back(t.src);
  }
  std::vector<std::size_t> order, stack;
  for (std::size_t l = 0; l < m; ++l)
    if (outdeg[l] == 0) stack.push_back(l);
  std::sort(stack.rbegin(), stack.rend());
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    order.push_back(u);
    for (std::size_t p : preds[u])
      if (--outdeg[p] == 0) stack.push_back(p);
  }
  if (order.size() != m) throw ModelError({{0, ModelErrorKind::CycleDetected, "the location graph has a cycle"}});
  return order;
}

std::optional<std::size_t> longest_path_length(const TimedAutomatonSpec& spec, std::size_t loc) {
  std::vector<std::optional<std::size_t>> len(spec.locations.size());
  for (std::size_t u : topological_order(spec)) {
    if (u == spec.target) {
      len[u] = 0;
      continue;
    }
    for (std::size_t t : spec.outgoing(u)) {
      const auto& d = len[spec.transitions[t].dst];
      if (d && (!len[u] || *d + 1 > *len[u])) len[u] = *d + 1;
    }
  }
  return len[loc];
}

ModelClass classify(const TimedAutomatonSpec& spec) {
  for (const auto& l : spec.locations)
    if (l.owner == Owner::Opponent) return ModelClass::Game;
  for (std::size_t l = 0; l < spec.locations.size(); ++l)
    if (spec.outgoing(l).size() > 1) return ModelClass::Branching;
  return ModelClass::Linear;
}

std::string class_name(ModelClass c) {
  switch (c) {
    case ModelClass::Linear: return "linear";
    case ModelClass::Branching: return "acyclic branching";
    case ModelClass::Game: return "game";
  }
  return "?";
}

long max_constant(const TimedAutomatonSpec& spec) {
  long m = 0;
  for (const auto& l : spec.locations)
    for (const auto& c : l.invariant) m = std::max(m, c.bound);
  for (const auto& t : spec.transitions)
    for (const auto& c : t.guard) m = std::max(m, c.bound);
  return m;
}

Valuation parse_valuation(const std::vector<std::string>& clocks, const std::string& text) {
  Valuation v(clocks.size(), Rational(0));
  std::vector<bool> given(clocks.size(), false);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected clock=value in '" + item + "'");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string name = trim(item.substr(0, eq));
    auto it = std::find(clocks.begin(), clocks.end(), name);
    if (it == clocks.end()) throw std::invalid_argument("unknown clock '" + name + "'");
    std::size_t c = static_cast<std::size_t>(it - clocks.begin());
    v[c] = parse_rational(trim(item.substr(eq + 1)));
    if (v[c] < 0) throw std::invalid_argument("clock values must be nonnegative");
    given[c] = true;
  }
  for (std::size_t c = 0; c < clocks.size(); ++c)
    if (!given[c]) throw std::invalid_argument("missing value for clock '" + clocks[c] + "'");
  return v;
}

Valuation parse_valuation(const TimedAutomatonSpec& spec, const std::string& text) {
  return parse_valuation(spec.clocks, text);
}

}  // namespace perm
