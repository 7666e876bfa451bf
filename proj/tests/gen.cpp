#include "gen.hpp"

#include <algorithm>
#include <set>

namespace dima::gen {

namespace {

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

std::int64_t pick64(Rng& rng, std::int64_t n) {
  return std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
}

bool chance(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

template <class T>
const T& choice(Rng& rng, const std::vector<T>& xs) {
  return xs[static_cast<size_t>(pick(rng, static_cast<int>(xs.size())))];
}

const CmpOp kOps[] = {CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt};

}  // namespace

std::vector<ActionDecl> micro_action_pool() {
  return {{"req", ActionKind::Unicast, Dir::In},
          {"ack", ActionKind::Unicast, Dir::Out},
          {"tick", ActionKind::Broadcast, Dir::In},
          {"pulse", ActionKind::Broadcast, Dir::Out}};
}

std::vector<ActionDecl> env_action_pool() {
  return {{"req", ActionKind::Unicast, Dir::Out},
          {"ack", ActionKind::Unicast, Dir::In},
          {"tick", ActionKind::Broadcast, Dir::Out},
          {"pulse", ActionKind::Broadcast, Dir::In},
          {"spark", ActionKind::Broadcast, Dir::Out}};
}

Automaton micro_automaton(Rng& rng, const MicroOpts& opt, const std::string& name) {
  Automaton a;
  a.name = name;
  const int nlocs = 2 + pick(rng, opt.max_locs - 1);
  for (int i = 0; i < nlocs; ++i) {
    Location l;
    l.name = "l" + std::to_string(i);
    a.locations.push_back(std::move(l));
  }
  a.initial = "l0";
  static const char* kClockNames[] = {"x", "y"};
  for (int c = 0; c < opt.n_clocks; ++c) a.clocks.emplace_back(kClockNames[c]);
  static const char* kVarNames[] = {"v", "w"};
  for (int c = 0; c < opt.n_vars; ++c)
    a.vars.push_back({kVarNames[c], 0, opt.var_range, pick64(rng, opt.var_range + 1)});
  a.actions = opt.actions;

  if (chance(rng, opt.error_prob)) a.locations[static_cast<size_t>(1 + pick(rng, nlocs - 1))].error = true;

  for (auto& l : a.locations) {
    if (l.error) continue;  // error locations stay plain
    if (!a.clocks.empty() && chance(rng, 0.3)) {
      ConstraintAtom at;
      at.kind = ConstraintAtom::Kind::ClockCmp;
      at.lhs = choice(rng, a.clocks);
      at.op = CmpOp::Le;
      at.time_bound = TimeVal(pick64(rng, opt.max_const_ms + 1));
      l.invariant.atoms.push_back(std::move(at));
    }
    if (opt.allow_rate0 && !a.clocks.empty() && chance(rng, 0.25)) l.rates[choice(rng, a.clocks)] = 0;
  }

  const int nedges = 2 + pick(rng, opt.max_edges - 1);
  for (int i = 0; i < nedges; ++i) {
    Edge e;
    e.source = a.locations[static_cast<size_t>(pick(rng, nlocs))].name;
    e.target = a.locations[static_cast<size_t>(pick(rng, nlocs))].name;
    if (!a.clocks.empty() && chance(rng, 0.55)) {
      ConstraintAtom at;
      at.kind = ConstraintAtom::Kind::ClockCmp;
      at.lhs = choice(rng, a.clocks);
      at.op = kOps[pick(rng, 5)];
      at.time_bound = TimeVal(pick64(rng, opt.max_const_ms + 1));
      e.guard.atoms.push_back(std::move(at));
    }
    if (!a.vars.empty() && chance(rng, 0.3)) {
      ConstraintAtom at;
      at.kind = ConstraintAtom::Kind::VarCmp;
      at.lhs = choice(rng, a.vars).name;
      at.op = kOps[pick(rng, 5)];
      at.int_bound = pick64(rng, opt.var_range + 1);
      e.guard.atoms.push_back(std::move(at));
    }
    if (!opt.actions.empty() && chance(rng, 0.5)) e.sync = choice(rng, opt.actions).name;
    if (!a.clocks.empty() && chance(rng, 0.4)) {
      UpdateEntry u;
      u.kind = UpdateEntry::Kind::ClockReset;
      u.target = choice(rng, a.clocks);
      e.update.entries.push_back(std::move(u));
    }
    if (!a.vars.empty() && chance(rng, 0.4)) {
      UpdateEntry u;
      u.target = choice(rng, a.vars).name;
      if (chance(rng, 0.5)) {
        u.kind = UpdateEntry::Kind::VarSet;
        u.value = pick64(rng, opt.var_range + 1);
      } else {
        u.kind = UpdateEntry::Kind::VarAdd;
        u.value = chance(rng, 0.5) ? 1 : -1;
      }
      e.update.entries.push_back(std::move(u));
    }
    a.edges.push_back(std::move(e));
  }
  return a;
}

Automaton theorem_automaton(Rng& rng, const std::string& name,
                            const std::vector<ActionDecl>& actions) {
  MicroOpts opt;
  opt.max_locs = 6;
  opt.n_clocks = 2;
  opt.n_vars = 1;
  opt.var_range = 3;
  opt.max_edges = 10;
  opt.actions = actions;
  return micro_automaton(rng, opt, name);
}

Automaton relax_abstraction(Rng& rng, const Automaton& a, const std::vector<std::string>& keep) {
  Automaton b = a;
  b.name = a.name + "_abs";
  std::set<std::string> kept(keep.begin(), keep.end());

  auto widen = [&](ConstraintAtom& at) {
    if (at.kind == ConstraintAtom::Kind::VarCmp) {
      switch (at.op) {
        case CmpOp::Lt:
        case CmpOp::Le: at.int_bound += pick64(rng, 2); break;
        case CmpOp::Ge:
        case CmpOp::Gt: at.int_bound -= pick64(rng, 2); break;
        case CmpOp::Eq:
          if (chance(rng, 0.5)) at.op = chance(rng, 0.5) ? CmpOp::Ge : CmpOp::Le;
          break;
      }
      return;
    }
    switch (at.op) {
      case CmpOp::Lt:
      case CmpOp::Le: at.time_bound = at.time_bound + TimeVal(pick64(rng, 3)); break;
      case CmpOp::Ge:
      case CmpOp::Gt: {
        TimeVal nb = at.time_bound - TimeVal(pick64(rng, 3));
        at.time_bound = nb < TimeVal(0) ? TimeVal(0) : nb;
        break;
      }
      case CmpOp::Eq:
        if (chance(rng, 0.5)) at.op = chance(rng, 0.5) ? CmpOp::Ge : CmpOp::Le;
        break;
    }
  };

  // A visible broadcast input must keep its enabledness bit-exact: whether a
  // listener reacts or stays put is observable through the shared step.
  auto frozen = [&](const Edge& e) {
    if (e.sync.empty()) return false;
    const ActionDecl* d = a.find_action(e.sync);
    return d && d->kind == ActionKind::Broadcast && d->dir == Dir::In && kept.count(e.sync) > 0;
  };

  for (auto& e : b.edges) {
    if (!frozen(e)) {
      for (auto& at : e.guard.atoms) widen(at);
      if (!e.guard.atoms.empty() && chance(rng, 0.2))
        e.guard.atoms.erase(e.guard.atoms.begin() +
                            pick(rng, static_cast<int>(e.guard.atoms.size())));
    }
    if (!e.sync.empty() && kept.count(e.sync) == 0) e.sync.clear();
  }
  for (auto& l : b.locations)
    for (auto& at : l.invariant.atoms) widen(at);
  std::erase_if(b.actions, [&](const ActionDecl& d) { return kept.count(d.name) == 0; });
  return b;
}

SystemConfig micro_system(Rng& rng, std::uint64_t tag) {
  SystemConfig cfg;
  cfg.name = "micro" + std::to_string(tag);
  cfg.quantum_ms = TimeVal(1);
  const int nparts = 2 + pick(rng, 2);
  const std::int64_t slot = 2 + pick64(rng, 2);
  const std::int64_t frame = slot * nparts;
  cfg.major_frame = TimeVal(frame);

  ModuleSpec m;
  m.id = "m0";
  for (int p = 0; p < nparts; ++p) {
    std::string pn = "P" + std::to_string(p + 1);
    cfg.partitions.push_back(pn);
    m.partitions.push_back(pn);
    cfg.schedule.push_back({pn, TimeVal(slot * p), TimeVal(slot)});
  }
  cfg.modules.push_back(std::move(m));

  for (int p = 0; p < nparts; ++p) {
    const int ntasks = 1 + pick(rng, 2);
    for (int t = 0; t < ntasks; ++t) {
      TaskSpec ts;
      ts.id = "t" + std::to_string(p + 1) + std::to_string(t + 1);
      ts.partition = cfg.partitions[static_cast<size_t>(p)];
      ts.sporadic = chance(rng, 0.15);
      const std::int64_t period = frame * (1 + pick64(rng, 2));
      ts.period = TimeVal(period);
      ts.deadline = chance(rng, 0.3) ? TimeVal(period - pick64(rng, period / 2)) : TimeVal(period);
      ts.priority = ntasks - t;
      ts.offset = TimeVal(chance(rng, 0.3) ? 1 : 0);
      CommandSpec c;
      c.kind = CommandSpec::Kind::Compute;
      const std::int64_t cap = chance(rng, 0.25) ? slot : std::max<std::int64_t>(1, slot - 1);
      const std::int64_t w = 1 + pick64(rng, cap);
      c.bcet = TimeVal(chance(rng, 0.5) ? w : std::max<std::int64_t>(1, w - 1));
      c.wcet = TimeVal(w);
      ts.commands.push_back(std::move(c));
      cfg.tasks.push_back(std::move(ts));
    }
  }

  if (chance(rng, 0.6)) {
    const std::string sp = cfg.partitions.front();
    const std::string dp = cfg.partitions.back();
    const bool queuing = chance(rng, 0.3);

    TaskSpec* sender = nullptr;
    TaskSpec* receiver = nullptr;
    for (auto& t : cfg.tasks) {
      if (!sender && t.partition == sp) sender = &t;
      if (!receiver && t.partition == dp) receiver = &t;
    }
    sender->sporadic = false;  // certifiable producer

    PortSpec src;
    src.id = "po";
    src.partition = sp;
    src.queuing = queuing;
    src.destination = false;
    src.message = "msg";
    PortSpec dst;
    dst.id = "pi";
    dst.partition = dp;
    dst.queuing = queuing;
    dst.destination = true;
    dst.message = "msg";
    if (queuing) {
      dst.capacity = 1 + pick64(rng, 2);
      CommandSpec rc;
      rc.kind = CommandSpec::Kind::Receive;
      rc.ref = "pi";
      receiver->commands.push_back(std::move(rc));
    } else {
      const std::int64_t margin = chance(rng, 0.5) ? 1 : frame;
      dst.refresh = sender->period + TimeVal(margin);
    }
    CommandSpec sc;
    sc.kind = CommandSpec::Kind::Send;
    sc.ref = "po";
    sender->commands.push_back(std::move(sc));
    cfg.ports.push_back(std::move(src));
    cfg.ports.push_back(std::move(dst));

    VirtualLinkSpec vl;
    vl.id = "vl0";
    vl.message = "msg";
    vl.source = sp;
    vl.destinations.push_back(dp);
    vl.tx_lo = TimeVal(0);
    vl.tx_hi = TimeVal(1);
    vl.vl_lo = TimeVal(0);
    vl.vl_hi = TimeVal(1 + pick64(rng, 2));
    vl.rx_lo = TimeVal(0);
    vl.rx_hi = TimeVal(1);
    cfg.vlinks.push_back(std::move(vl));
  }
  return cfg;
}

}  // namespace dima::gen
