#include "dima/model.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace dima {

std::string TimeVal::str() const {
  if (den == 1) return std::to_string(num);
  // Prefer a finite decimal rendering when the denominator is 2^a*5^b.
  std::int64_t d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d == 1) {
    int digits = std::max(twos, fives);
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    std::int64_t scaled = num * (scale / den);
    bool neg = scaled < 0;
    std::int64_t abs = neg ? -scaled : scaled;
    std::string frac = std::to_string(abs % scale);
    frac.insert(0, digits - frac.size(), '0');
    return (neg ? "-" : "") + std::to_string(abs / scale) + "." + frac;
  }
  return std::to_string(num) + "/" + std::to_string(den);
}

std::optional<TimeVal> parse_timeval(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::int64_t n = 0, d = 0;
    auto r1 = std::from_chars(text.data(), text.data() + slash, n);
    auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), d);
    if (r1.ec != std::errc{} || r1.ptr != text.data() + slash) return std::nullopt;
    if (r2.ec != std::errc{} || r2.ptr != text.data() + text.size() || d <= 0) return std::nullopt;
    return TimeVal(n, d);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) {
    std::int64_t n = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), n);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) return std::nullopt;
    return TimeVal(n);
  }
  std::string whole = text.substr(0, dot), frac = text.substr(dot + 1);
  if (frac.empty() || frac.size() > 9) return std::nullopt;
  bool neg = !whole.empty() && whole[0] == '-';
  if (whole.empty() || whole == "-") whole += "0";
  std::int64_t w = 0, f = 0;
  auto rw = std::from_chars(whole.data(), whole.data() + whole.size(), w);
  if (rw.ec != std::errc{} || rw.ptr != whole.data() + whole.size()) return std::nullopt;
  auto rf = std::from_chars(frac.data(), frac.data() + frac.size(), f);
  if (rf.ec != std::errc{} || rf.ptr != frac.data() + frac.size() || f < 0) return std::nullopt;
  std::int64_t scale = 1;
  for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
  std::int64_t n = (w < 0 ? -1 : 1) * ((w < 0 ? -w : w) * scale + f);
  if (neg && w == 0) n = -f;
  return TimeVal(n, scale);
}

const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

const Location* Automaton::find_location(const std::string& n) const {
  for (const auto& l : locations)
    if (l.name == n) return &l;
  return nullptr;
}

const ActionDecl* Automaton::find_action(const std::string& n) const {
  for (const auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

const VarDecl* Automaton::find_var(const std::string& n) const {
  for (const auto& v : vars)
    if (v.name == n) return &v;
  return nullptr;
}

bool Automaton::has_clock(const std::string& n) const {
  return std::find(clocks.begin(), clocks.end(), n) != clocks.end();
}

namespace {

void check_constraint(const Automaton& a, const Constraint& c, const std::string& where,
                      std::vector<Diagnostic>& out) {
  for (const auto& atom : c.atoms) {
    switch (atom.kind) {
      case ConstraintAtom::Kind::ClockCmp:
        if (!a.has_clock(atom.lhs))
          out.push_back({"undeclared-clock", where, "clock '" + atom.lhs + "' is not declared"});
        break;
      case ConstraintAtom::Kind::ClockDiffCmp:
        if (!a.has_clock(atom.lhs))
          out.push_back({"undeclared-clock", where, "clock '" + atom.lhs + "' is not declared"});
        if (!a.has_clock(atom.rhs_clock))
          out.push_back({"undeclared-clock", where, "clock '" + atom.rhs_clock + "' is not declared"});
        break;
      case ConstraintAtom::Kind::VarCmp:
        if (!a.find_var(atom.lhs))
          out.push_back({"undeclared-var", where, "variable '" + atom.lhs + "' is not declared"});
        break;
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate(const Automaton& a) {
  std::vector<Diagnostic> out;
  std::set<std::string> loc_names, clock_names, var_names, action_names;

  for (const auto& c : a.clocks)
    if (!clock_names.insert(c).second)
      out.push_back({"duplicate-clock", c, "clock '" + c + "' declared twice"});
  for (const auto& v : a.vars) {
    if (!var_names.insert(v.name).second)
      out.push_back({"duplicate-var", v.name, "variable '" + v.name + "' declared twice"});
    if (clock_names.count(v.name))
      out.push_back({"name-clash", v.name, "'" + v.name + "' is both a clock and a variable"});
    if (v.lo > v.hi)
      out.push_back({"bad-range", v.name, "empty range for '" + v.name + "'"});
    if (v.init < v.lo || v.init > v.hi)
      out.push_back({"init-out-of-range", v.name, "initial value of '" + v.name + "' outside its range"});
  }
  for (const auto& act : a.actions) {
    if (!action_names.insert(act.name).second)
      out.push_back({"duplicate-action", act.name, "action '" + act.name + "' declared twice"});
  }
  for (const auto& l : a.locations) {
    if (!loc_names.insert(l.name).second)
      out.push_back({"duplicate-location", l.name, "location '" + l.name + "' declared twice"});
    check_constraint(a, l.invariant, "location " + l.name, out);
    for (const auto& [clk, rate] : l.rates) {
      if (!a.has_clock(clk))
        out.push_back({"undeclared-clock", "location " + l.name,
                       "rate for undeclared clock '" + clk + "'"});
      if (rate != 0 && rate != 1)
        out.push_back({"bad-rate", "location " + l.name,
                       "rate of '" + clk + "' must be 0 or 1"});
    }
  }
  if (a.locations.empty()) {
    out.push_back({"no-locations", a.name, "automaton has no locations"});
  }
  if (!a.find_location(a.initial)) {
    out.push_back({"bad-initial", a.name, "initial location '" + a.initial + "' not declared"});
  } else if (a.find_location(a.initial)->error) {
    out.push_back({"initial-is-error", a.name, "initial location is an error location"});
  }

  for (size_t i = 0; i < a.edges.size(); ++i) {
    const Edge& e = a.edges[i];
    std::string where = a.name + " edge #" + std::to_string(i) + " (" + e.source + " -> " + e.target + ")";
    if (!a.find_location(e.source))
      out.push_back({"bad-edge-source", where, "source location not declared"});
    if (!a.find_location(e.target))
      out.push_back({"bad-edge-target", where, "target location not declared"});
    check_constraint(a, e.guard, where, out);
    if (!e.sync.empty() && !a.find_action(e.sync))
      out.push_back({"undeclared-action", where, "action '" + e.sync + "' is not declared"});
    for (const auto& u : e.update.entries) {
      switch (u.kind) {
        case UpdateEntry::Kind::ClockReset:
          if (!a.has_clock(u.target))
            out.push_back({"undeclared-clock", where, "reset of undeclared clock '" + u.target + "'"});
          if (u.value != 0)
            out.push_back({"bad-reset", where, "clocks may only be reset to 0"});
          break;
        case UpdateEntry::Kind::VarSet: {
          const VarDecl* v = a.find_var(u.target);
          if (!v) {
            out.push_back({"undeclared-var", where, "assignment to undeclared variable '" + u.target + "'"});
          } else if (u.value < v->lo || u.value > v->hi) {
            out.push_back({"assignment-out-of-range", where,
                           "assigned value " + std::to_string(u.value) + " outside range of '" + u.target + "'"});
          }
          break;
        }
        case UpdateEntry::Kind::VarAdd:
          if (!a.find_var(u.target))
            out.push_back({"undeclared-var", where, "increment of undeclared variable '" + u.target + "'"});
          break;
      }
    }
  }
  return out;
}

namespace {

// Actions of `a` with the given direction, keyed by name.
std::map<std::string, ActionKind> side(const Automaton& a, Dir d) {
  std::map<std::string, ActionKind> m;
  for (const auto& act : a.actions)
    if (act.dir == d) m[act.name] = act.kind;
  return m;
}

}  // namespace

std::optional<std::string> incompatibility(const Automaton& a, const Automaton& b) {
  auto oa = side(a, Dir::Out), ob = side(b, Dir::Out);
  for (const auto& [name, kind] : oa)
    if (ob.count(name))
      return "output action '" + name + "' declared by both '" + a.name + "' and '" + b.name + "'";
  auto ia = side(a, Dir::In), ib = side(b, Dir::In);
  for (const auto& [name, kind] : ia) {
    auto it = ib.find(name);
    if (it != ib.end() && (kind == ActionKind::Unicast || it->second == ActionKind::Unicast))
      return "unicast input action '" + name + "' shared by '" + a.name + "' and '" + b.name + "'";
  }
  // Kind agreement: a name means one channel.
  for (const auto& x : a.actions)
    for (const auto& y : b.actions)
      if (x.name == y.name && x.kind != y.kind)
        return "action '" + x.name + "' declared unicast by one automaton and broadcast by the other";
  return std::nullopt;
}

bool compatible(const Automaton& a, const Automaton& b) {
  return !incompatibility(a, b).has_value();
}

}  // namespace dima
