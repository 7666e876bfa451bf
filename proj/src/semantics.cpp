#include "dima/semantics.hpp"

#include <algorithm>
#include <unordered_map>

namespace dima {

namespace {

bool cmp_holds(std::int64_t lhs, CmpOp op, std::int64_t rhs) {
  switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
  }
  return false;
}

std::int64_t to_quanta(const TimeVal& t, std::int64_t den, const std::string& where) {
  auto q = t.quanta(den);
  if (!q) {
    throw SemanticsError("quantum-mismatch: constant " + t.str() + " ms in " + where +
                         " is not a multiple of 1/" + std::to_string(den) + " ms");
  }
  return *q;
}

}  // namespace

System::System(std::vector<std::shared_ptr<const Automaton>> comps, std::int64_t quantum_den)
    : autos_(std::move(comps)), quantum_den_(quantum_den) {
  if (autos_.empty()) throw SemanticsError("composition of zero components");
  if (quantum_den_ < 1) throw SemanticsError("quantum denominator must be a positive integer");
  for (const auto& a : autos_) {
    auto diags = validate(*a);
    if (!diags.empty()) {
      throw SemanticsError(a->name + ": " + diags.front().code + " (" + diags.front().subject +
                           "): " + diags.front().message);
    }
  }
  for (size_t i = 0; i < autos_.size(); ++i) {
    for (size_t j = i + 1; j < autos_.size(); ++j) {
      if (auto why = incompatibility(*autos_[i], *autos_[j])) {
        throw SemanticsError("incompatible components: " + *why);
      }
    }
  }

  // Intern clocks, vars, actions. State layout: locations occupy [0, ncomps),
  // then clocks, then vars.
  std::unordered_map<std::string, int> act_id;
  int next_clock = 0, next_var = 0;
  for (const auto& ap : autos_) next_clock += static_cast<int>(ap->clocks.size());
  for (const auto& ap : autos_) next_var += static_cast<int>(ap->vars.size());
  nclocks_ = next_clock;
  nvars_ = next_var;
  width_ = autos_.size() + static_cast<size_t>(nclocks_) + static_cast<size_t>(nvars_);

  int cb = static_cast<int>(autos_.size());
  int vb = cb + nclocks_;
  comps_.reserve(autos_.size());
  for (size_t ci = 0; ci < autos_.size(); ++ci) {
    const Automaton& a = *autos_[ci];
    Comp c;
    c.name = a.name;
    c.clock_base = cb;
    c.nclocks = static_cast<int>(a.clocks.size());
    c.var_base = vb;
    c.nvars = static_cast<int>(a.vars.size());
    cb += c.nclocks;
    vb += c.nvars;
    comps_.push_back(std::move(c));

    for (const auto& act : a.actions) {
      auto it = act_id.find(act.name);
      if (it == act_id.end()) {
        act_id.emplace(act.name, static_cast<int>(actions_.size()));
        actions_.push_back({act.name, act.kind, -1, {}, false, false});
        it = act_id.find(act.name);
      }
      SysAction& sa = actions_[it->second];
      if (act.dir == Dir::Out) {
        sa.owner = static_cast<int>(ci);
        sa.comp_out = true;
      } else {
        sa.receivers.push_back(static_cast<int>(ci));
      }
    }
  }
  // Composite input set: broadcast inputs vanish when some component emits
  // them; unicast names stay on both sides.
  for (auto& sa : actions_) {
    if (sa.receivers.empty()) continue;
    sa.comp_in = (sa.kind == ActionKind::Unicast) || sa.owner < 0;
  }
  for (size_t ai = 0; ai < actions_.size(); ++ai) {
    const SysAction& sa = actions_[ai];
    if (sa.kind == ActionKind::Broadcast && sa.owner < 0 && !sa.receivers.empty()) {
      ext_broadcast_in_.push_back(static_cast<int>(ai));
    }
  }

  // Compile locations and edges.
  caps_.assign(static_cast<size_t>(nclocks_), -1);
  std::vector<std::int64_t> max_bound(static_cast<size_t>(nclocks_), 0);
  std::vector<bool> diagonal(static_cast<size_t>(nclocks_), false);

  for (size_t ci = 0; ci < autos_.size(); ++ci) {
    const Automaton& a = *autos_[ci];
    Comp& c = comps_[ci];
    std::unordered_map<std::string, int> clk, var;
    for (size_t k = 0; k < a.clocks.size(); ++k) clk[a.clocks[k]] = c.clock_base + static_cast<int>(k);
    for (size_t k = 0; k < a.vars.size(); ++k) var[a.vars[k].name] = c.var_base + static_cast<int>(k);

    auto compile_atoms = [&](const Constraint& g, const std::string& where) {
      std::vector<CAtom> out;
      out.reserve(g.atoms.size());
      for (const auto& at : g.atoms) {
        CAtom ca;
        ca.op = at.op;
        switch (at.kind) {
          case ConstraintAtom::Kind::ClockCmp:
            ca.kind = CAtom::Kind::Clock;
            ca.a = clk.at(at.lhs);
            ca.bound = to_quanta(at.time_bound, quantum_den_, where);
            max_bound[ca.a - static_cast<int>(autos_.size())] =
                std::max(max_bound[ca.a - static_cast<int>(autos_.size())], ca.bound);
            break;
          case ConstraintAtom::Kind::ClockDiffCmp:
            ca.kind = CAtom::Kind::ClockDiff;
            ca.a = clk.at(at.lhs);
            ca.b = clk.at(at.rhs_clock);
            ca.bound = to_quanta(at.time_bound, quantum_den_, where);
            diagonal[ca.a - static_cast<int>(autos_.size())] = true;
            diagonal[ca.b - static_cast<int>(autos_.size())] = true;
            break;
          case ConstraintAtom::Kind::VarCmp:
            ca.kind = CAtom::Kind::Var;
            ca.a = var.at(at.lhs);
            ca.bound = at.int_bound;
            break;
        }
        out.push_back(ca);
      }
      return out;
    };

    std::unordered_map<std::string, int> loc_id;
    for (size_t li = 0; li < a.locations.size(); ++li) loc_id[a.locations[li].name] = static_cast<int>(li);
    c.initial = loc_id.at(a.initial);

    c.locs.reserve(a.locations.size());
    for (const auto& loc : a.locations) {
      CLoc cl;
      cl.name = loc.name;
      cl.error = loc.error;
      cl.invariant = compile_atoms(loc.invariant, a.name + "." + loc.name + " invariant");
      cl.rates.assign(static_cast<size_t>(c.nclocks), 1);
      for (const auto& [cn, r] : loc.rates) cl.rates[static_cast<size_t>(clk.at(cn) - c.clock_base)] = static_cast<std::uint8_t>(r);
      c.locs.push_back(std::move(cl));
    }
    for (const auto& e : a.edges) {
      CEdge ce;
      ce.target = loc_id.at(e.target);
      const std::string where = a.name + " edge " + e.source + " -> " + e.target;
      ce.guard = compile_atoms(e.guard, where + " guard");
      if (!e.sync.empty()) ce.action = act_id.at(e.sync);
      for (const auto& u : e.update.entries) {
        CUpdate cu;
        switch (u.kind) {
          case UpdateEntry::Kind::ClockReset:
            cu.kind = CUpdate::Kind::ClockReset;
            cu.idx = clk.at(u.target);
            break;
          case UpdateEntry::Kind::VarSet:
          case UpdateEntry::Kind::VarAdd: {
            cu.kind = u.kind == UpdateEntry::Kind::VarSet ? CUpdate::Kind::VarSet : CUpdate::Kind::VarAdd;
            cu.idx = var.at(u.target);
            cu.value = u.value;
            const VarDecl& vd = a.vars[static_cast<size_t>(cu.idx - c.var_base)];
            cu.lo = vd.lo;
            cu.hi = vd.hi;
            break;
          }
        }
        ce.updates.push_back(cu);
      }
      c.locs[static_cast<size_t>(loc_id.at(e.source))].edges.push_back(std::move(ce));
    }
  }

  // A clock never compared against another one can be capped one past its
  // largest constant; beyond that every atom's truth value is fixed.
  for (size_t k = 0; k < caps_.size(); ++k) {
    if (!diagonal[k]) caps_[k] = max_bound[k] + 1;
  }

  initial_.assign(width_, 0);
  for (size_t ci = 0; ci < comps_.size(); ++ci) initial_[ci] = comps_[ci].initial;
  for (size_t ci = 0; ci < comps_.size(); ++ci) {
    const Automaton& a = *autos_[ci];
    for (size_t k = 0; k < a.vars.size(); ++k) {
      initial_[static_cast<size_t>(comps_[ci].var_base) + k] = static_cast<std::int32_t>(a.vars[k].init);
    }
  }
  for (size_t ci = 0; ci < comps_.size(); ++ci) {
    if (!invariant_ok(static_cast<int>(ci), initial_)) {
      throw SemanticsError(comps_[ci].name + ": initial state violates the invariant of " +
                           comps_[ci].locs[static_cast<size_t>(initial_[ci])].name);
    }
  }
}

bool System::eval(const std::vector<CAtom>& atoms, const State& s) const {
  for (const auto& at : atoms) {
    std::int64_t lhs;
    switch (at.kind) {
      case CAtom::Kind::Clock: lhs = s[static_cast<size_t>(at.a)]; break;
      case CAtom::Kind::ClockDiff:
        lhs = static_cast<std::int64_t>(s[static_cast<size_t>(at.a)]) - s[static_cast<size_t>(at.b)];
        break;
      case CAtom::Kind::Var: lhs = s[static_cast<size_t>(at.a)]; break;
      default: lhs = 0;
    }
    if (!cmp_holds(lhs, at.op, at.bound)) return false;
  }
  return true;
}

bool System::invariant_ok(int comp, const State& s) const {
  const Comp& c = comps_[static_cast<size_t>(comp)];
  return eval(c.locs[static_cast<size_t>(s[static_cast<size_t>(comp)])].invariant, s);
}

bool System::apply_edge(int comp, const CEdge& e, State& s) const {
  s[static_cast<size_t>(comp)] = e.target;
  for (const auto& u : e.updates) {
    auto& cell = s[static_cast<size_t>(u.idx)];
    switch (u.kind) {
      case CUpdate::Kind::ClockReset: cell = 0; break;
      case CUpdate::Kind::VarSet: cell = static_cast<std::int32_t>(u.value); break;
      case CUpdate::Kind::VarAdd: {
        std::int64_t v = cell + u.value;
        v = std::clamp(v, u.lo, u.hi);
        cell = static_cast<std::int32_t>(v);
        break;
      }
    }
  }
  return true;
}

void System::emit_product(const State& base, int action, Label::Kind kind,
                          const std::vector<std::pair<int, const CEdge*>>& fixed,
                          const std::vector<int>& listeners, size_t li, State work,
                          std::vector<Step>& out) const {
  // fixed: movers already chosen; listeners[li..]: components that move on
  // every enabled edge or stay put when none is enabled.
  if (li == listeners.size()) {
    State ns = base;
    for (const auto& [ci, e] : fixed) apply_edge(ci, *e, ns);
    for (const auto& [ci, e] : fixed) {
      if (!invariant_ok(ci, ns)) return;
    }
    out.push_back({Label{kind, action, 0}, std::move(ns)});
    return;
  }
  int ci = listeners[li];
  const Comp& c = comps_[static_cast<size_t>(ci)];
  const CLoc& loc = c.locs[static_cast<size_t>(base[static_cast<size_t>(ci)])];
  bool any = false;
  std::vector<std::pair<int, const CEdge*>> next = fixed;
  for (const auto& e : loc.edges) {
    if (e.action != action) continue;
    if (!eval(e.guard, base)) continue;
    any = true;
    next.push_back({ci, &e});
    emit_product(base, action, kind, next, listeners, li + 1, work, out);
    next.pop_back();
  }
  if (!any) emit_product(base, action, kind, fixed, listeners, li + 1, work, out);
}

void System::successors(const State& s, std::vector<Step>& out) const {
  out.clear();
  const int ncomp = component_count();

  // Bucket enabled synchronizing edges by action.
  std::vector<std::vector<std::pair<int, const CEdge*>>> bucket(actions_.size());
  std::vector<int> touched;
  for (int ci = 0; ci < ncomp; ++ci) {
    const Comp& c = comps_[static_cast<size_t>(ci)];
    const CLoc& loc = c.locs[static_cast<size_t>(s[static_cast<size_t>(ci)])];
    for (const auto& e : loc.edges) {
      if (!eval(e.guard, s)) continue;
      if (e.action < 0) {
        State ns = s;
        apply_edge(ci, e, ns);
        if (invariant_ok(ci, ns)) out.push_back({Label{Label::Kind::Internal, -1, 0}, std::move(ns)});
      } else {
        if (bucket[static_cast<size_t>(e.action)].empty()) touched.push_back(e.action);
        bucket[static_cast<size_t>(e.action)].push_back({ci, &e});
      }
    }
  }

  State work;
  for (int ai : touched) {
    const SysAction& sa = actions_[static_cast<size_t>(ai)];
    auto& entries = bucket[static_cast<size_t>(ai)];
    if (sa.kind == ActionKind::Unicast) {
      if (sa.owner >= 0) {
        if (sa.receivers.empty()) {
          // No listening component: the output is offered to the environment.
          for (const auto& [ci, e] : entries) {
            if (ci != sa.owner) continue;
            State ns = s;
            apply_edge(ci, *e, ns);
            if (invariant_ok(ci, ns)) out.push_back({Label{Label::Kind::Output, ai, 0}, std::move(ns)});
          }
        } else {
          // Rendezvous: sender and receiver fuse into an internal step.
          for (const auto& [ci, e] : entries) {
            if (ci != sa.owner) continue;
            for (const auto& [cj, f] : entries) {
              if (cj == sa.owner) continue;
              State ns = s;
              apply_edge(ci, *e, ns);
              apply_edge(cj, *f, ns);
              if (invariant_ok(ci, ns) && invariant_ok(cj, ns)) {
                out.push_back({Label{Label::Kind::Internal, -1, 0}, std::move(ns)});
              }
            }
          }
        }
      } else {
        // Unicast input from the environment.
        for (const auto& [ci, e] : entries) {
          State ns = s;
          apply_edge(ci, *e, ns);
          if (invariant_ok(ci, ns)) out.push_back({Label{Label::Kind::Input, ai, 0}, std::move(ns)});
        }
      }
    } else {
      if (sa.owner >= 0) {
        // Broadcast output: the sender moves, every listener with an enabled
        // edge moves with it, the rest stay put. The label stays visible.
        for (const auto& [ci, e] : entries) {
          if (ci != sa.owner) continue;
          std::vector<std::pair<int, const CEdge*>> fixed{{ci, e}};
          emit_product(s, ai, Label::Kind::Output, fixed, sa.receivers, 0, work, out);
        }
      }
      // Ownerless broadcast inputs are handled below (they exist even with no
      // enabled edge).
    }
  }
  for (int ai : ext_broadcast_in_) {
    const SysAction& sa = actions_[static_cast<size_t>(ai)];
    emit_product(s, ai, Label::Kind::Input, {}, sa.receivers, 0, work, out);
  }

  // Unit delay: rate-1 clocks advance one quantum (clamped), frozen clocks
  // hold; blocked when any invariant would break.
  State ns = s;
  for (int ci = 0; ci < ncomp; ++ci) {
    const Comp& c = comps_[static_cast<size_t>(ci)];
    const CLoc& loc = c.locs[static_cast<size_t>(s[static_cast<size_t>(ci)])];
    for (int k = 0; k < c.nclocks; ++k) {
      if (!loc.rates[static_cast<size_t>(k)]) continue;
      auto idx = static_cast<size_t>(c.clock_base + k);
      std::int64_t cap = caps_[static_cast<size_t>(c.clock_base + k - ncomp)];
      std::int64_t v = static_cast<std::int64_t>(ns[idx]) + 1;
      if (cap >= 0 && v > cap) v = cap;
      ns[idx] = static_cast<std::int32_t>(v);
    }
  }
  bool ok = true;
  for (int ci = 0; ci < ncomp && ok; ++ci) ok = invariant_ok(ci, ns);
  if (ok) out.push_back({Label{Label::Kind::Delay, -1, 1}, std::move(ns)});
}

std::vector<Step> System::successors(const State& s) const {
  std::vector<Step> out;
  successors(s, out);
  return out;
}

bool System::is_error(const State& s) const {
  for (size_t ci = 0; ci < comps_.size(); ++ci) {
    if (comps_[ci].locs[static_cast<size_t>(s[ci])].error) return true;
  }
  return false;
}

std::vector<std::string> System::error_components(const State& s) const {
  std::vector<std::string> out;
  for (size_t ci = 0; ci < comps_.size(); ++ci) {
    if (comps_[ci].locs[static_cast<size_t>(s[ci])].error) out.push_back(comps_[ci].name);
  }
  return out;
}

const std::string& System::component_name(int i) const { return comps_[static_cast<size_t>(i)].name; }

const std::string& System::location_name(int comp, std::int32_t loc) const {
  return comps_[static_cast<size_t>(comp)].locs[static_cast<size_t>(loc)].name;
}

int System::component_index(const std::string& name) const {
  for (size_t i = 0; i < comps_.size(); ++i)
    if (comps_[i].name == name) return static_cast<int>(i);
  return -1;
}

int System::location_index(int comp, const std::string& name) const {
  const auto& locs = comps_[static_cast<size_t>(comp)].locs;
  for (size_t i = 0; i < locs.size(); ++i)
    if (locs[i].name == name) return static_cast<int>(i);
  return -1;
}

int System::clock_state_index(int comp, const std::string& clock) const {
  const auto& clocks = autos_[static_cast<size_t>(comp)]->clocks;
  for (size_t i = 0; i < clocks.size(); ++i) {
    if (clocks[i] == clock)
      return comps_[static_cast<size_t>(comp)].clock_base + static_cast<int>(i);
  }
  return -1;
}

int System::var_state_index(int comp, const std::string& var) const {
  const auto& vars = autos_[static_cast<size_t>(comp)]->vars;
  for (size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == var)
      return comps_[static_cast<size_t>(comp)].var_base + static_cast<int>(i);
  }
  return -1;
}

int System::action_id(const std::string& name) const {
  for (size_t i = 0; i < actions_.size(); ++i) {
    if (actions_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> System::input_names() const {
  std::vector<std::string> out;
  for (const auto& a : actions_) {
    if (a.comp_in) out.push_back(a.name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> System::output_names() const {
  std::vector<std::string> out;
  for (const auto& a : actions_) {
    if (a.comp_out) out.push_back(a.name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string System::state_str(const State& s) const {
  std::string out;
  for (size_t ci = 0; ci < comps_.size(); ++ci) {
    const Comp& c = comps_[ci];
    if (ci) out += " ";
    out += c.name + "." + c.locs[static_cast<size_t>(s[ci])].name;
    const Automaton& a = *autos_[ci];
    for (size_t k = 0; k < a.clocks.size(); ++k) {
      out += " " + a.clocks[k] + "=" + std::to_string(s[static_cast<size_t>(c.clock_base) + k]);
    }
    for (size_t k = 0; k < a.vars.size(); ++k) {
      out += " " + a.vars[k].name + "=" + std::to_string(s[static_cast<size_t>(c.var_base) + k]);
    }
  }
  return out;
}

std::string System::label_str(const Label& l) const {
  switch (l.kind) {
    case Label::Kind::Internal: return "tau";
    case Label::Kind::Input: return actions_[static_cast<size_t>(l.action)].name + "?";
    case Label::Kind::Output: return actions_[static_cast<size_t>(l.action)].name + "!";
    case Label::Kind::Delay: return "delay " + std::to_string(l.delay);
  }
  return "?";
}

System semantics_of(const Automaton& a, std::int64_t quantum_den) {
  return System({std::make_shared<Automaton>(a)}, quantum_den);
}

System compose(const std::vector<const System*>& parts) {
  if (parts.empty()) throw SemanticsError("composition of zero components");
  std::vector<std::shared_ptr<const Automaton>> all;
  std::int64_t den = parts.front()->quantum_den();
  for (const System* p : parts) {
    if (p->quantum_den() != den) throw SemanticsError("composition across different quanta");
    for (const auto& ap : p->automata()) all.push_back(ap);
  }
  return System(std::move(all), den);
}

System compose(std::vector<Automaton> as, std::int64_t quantum_den) {
  std::vector<std::shared_ptr<const Automaton>> all;
  all.reserve(as.size());
  for (auto& a : as) all.push_back(std::make_shared<Automaton>(std::move(a)));
  return System(std::move(all), quantum_den);
}

namespace {

void closure_into(const System& ts, const State& s, std::vector<State>& out,
                  std::unordered_set<State, StateHash>& seen) {
  std::vector<State> stack{s};
  if (seen.insert(s).second) out.push_back(s);
  std::vector<Step> steps;
  while (!stack.empty()) {
    State cur = std::move(stack.back());
    stack.pop_back();
    ts.successors(cur, steps);
    for (auto& st : steps) {
      if (st.label.kind != Label::Kind::Internal) continue;
      if (seen.insert(st.state).second) {
        out.push_back(st.state);
        stack.push_back(std::move(st.state));
      }
    }
  }
}

std::vector<State> closure_of(const System& ts, const std::vector<State>& from) {
  std::vector<State> out;
  std::unordered_set<State, StateHash> seen;
  for (const auto& s : from) closure_into(ts, s, out, seen);
  return out;
}

}  // namespace

std::vector<State> weak_successors(const System& ts, const State& s, const Weak& w) {
  std::vector<State> cur = closure_of(ts, {s});
  if (w.kind == Weak::Kind::Act) {
    std::vector<State> mid;
    std::unordered_set<State, StateHash> seen;
    std::vector<Step> steps;
    for (const auto& c : cur) {
      ts.successors(c, steps);
      for (auto& st : steps) {
        if (st.label.kind != w.dir || st.label.action != w.action) continue;
        if (seen.insert(st.state).second) mid.push_back(std::move(st.state));
      }
    }
    cur = closure_of(ts, mid);
  } else if (w.kind == Weak::Kind::Delay) {
    for (std::int64_t k = 0; k < w.delay; ++k) {
      std::vector<State> mid;
      std::unordered_set<State, StateHash> seen;
      std::vector<Step> steps;
      for (const auto& c : cur) {
        ts.successors(c, steps);
        for (auto& st : steps) {
          if (st.label.kind != Label::Kind::Delay) continue;
          if (seen.insert(st.state).second) mid.push_back(std::move(st.state));
        }
      }
      cur = closure_of(ts, mid);
      if (cur.empty()) break;
    }
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

}  // namespace dima
