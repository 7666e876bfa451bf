#include "dima/builders.hpp"

#include <algorithm>
#include <stdexcept>

namespace dima {

std::string act_name(const std::string& p) { return "act_" + p; }
std::string deact_name(const std::string& p) { return "deact_" + p; }
std::string rdy_name(const std::string& t) { return "rdy_" + t; }
std::string go_name(const std::string& t) { return "go_" + t; }
std::string halt_name(const std::string& t) { return "halt_" + t; }
std::string fin_name(const std::string& t) { return "fin_" + t; }
std::string hop_ip_name(const std::string& m) { return "ip_" + m; }
std::string hop_vl_name(const std::string& m) { return "vl_" + m; }
std::string hop_rx_name(const std::string& m) { return "rx_" + m; }
std::string recv_name(const std::string& port, const std::string& task) { return "recv_" + port + "_" + task; }
std::string lock_name(const std::string& r, const std::string& t) { return "lck_" + r + "_" + t; }
std::string unlock_name(const std::string& r, const std::string& t) { return "unl_" + r + "_" + t; }

std::string arrival_action(const SystemConfig& cfg, const PortSpec& port) {
  if (cfg.route_of(port.message)) return hop_rx_name(port.message);
  return port.message;
}

namespace {

ConstraintAtom clk(const std::string& c, CmpOp op, TimeVal bound) {
  ConstraintAtom a;
  a.kind = ConstraintAtom::Kind::ClockCmp;
  a.lhs = c;
  a.op = op;
  a.time_bound = bound;
  return a;
}

ConstraintAtom varcmp(const std::string& v, CmpOp op, std::int64_t bound) {
  ConstraintAtom a;
  a.kind = ConstraintAtom::Kind::VarCmp;
  a.lhs = v;
  a.op = op;
  a.int_bound = bound;
  return a;
}

UpdateEntry reset(const std::string& c) {
  UpdateEntry u;
  u.kind = UpdateEntry::Kind::ClockReset;
  u.target = c;
  return u;
}

UpdateEntry setvar(const std::string& v, std::int64_t val) {
  UpdateEntry u;
  u.kind = UpdateEntry::Kind::VarSet;
  u.target = v;
  u.value = val;
  return u;
}

Location loc(std::string name, Constraint inv = {}, bool error = false) {
  Location l;
  l.name = std::move(name);
  l.invariant = std::move(inv);
  l.error = error;
  return l;
}

Edge edge(std::string src, std::string dst, Constraint guard = {}, std::string sync = {},
          Update upd = {}) {
  Edge e;
  e.source = std::move(src);
  e.target = std::move(dst);
  e.guard = std::move(guard);
  e.sync = std::move(sync);
  e.update = std::move(upd);
  return e;
}

Constraint c1(ConstraintAtom a) { return Constraint{{std::move(a)}}; }

void declare(Automaton& a, const std::string& name, ActionKind kind, Dir dir) {
  for (const auto& d : a.actions) {
    if (d.name == name) return;
  }
  a.actions.push_back({name, kind, dir});
}

// Tasks of a partition in dispatch order: descending priority, declaration
// order breaking ties. Index+1 is the scheduler's run encoding.
std::vector<TaskSpec> ordered_tasks(const SystemConfig& cfg, const std::string& partition) {
  auto ts = cfg.tasks_of(partition);
  std::stable_sort(ts.begin(), ts.end(),
                   [](const TaskSpec& a, const TaskSpec& b) { return a.priority > b.priority; });
  return ts;
}

}  // namespace

Automaton build_partition_supply(const SystemConfig& cfg, const std::string& partition) {
  auto wins = cfg.windows_of(partition);
  if (wins.empty()) throw std::runtime_error("partition " + partition + " has no schedule windows");
  Automaton a;
  a.name = "supply_" + partition;
  a.clocks = {"f"};
  declare(a, act_name(partition), ActionKind::Broadcast, Dir::Out);
  declare(a, deact_name(partition), ActionKind::Broadcast, Dir::Out);

  for (size_t k = 0; k < wins.size(); ++k) {
    const auto& w = wins[k];
    TimeVal start = w.offset;
    TimeVal end{w.offset.num * w.duration.den + w.duration.num * w.offset.den,
                w.offset.den * w.duration.den};
    std::string pre = "pre" + std::to_string(k + 1);
    std::string win = "win" + std::to_string(k + 1);
    std::string next = k + 1 < wins.size() ? "pre" + std::to_string(k + 2) : "wrap";
    a.locations.push_back(loc(pre, c1(clk("f", CmpOp::Le, start))));
    a.locations.push_back(loc(win, c1(clk("f", CmpOp::Le, end))));
    a.edges.push_back(edge(pre, win, c1(clk("f", CmpOp::Eq, start)), act_name(partition)));
    a.edges.push_back(edge(win, next, c1(clk("f", CmpOp::Eq, end)), deact_name(partition)));
  }
  a.locations.push_back(loc("wrap", c1(clk("f", CmpOp::Le, cfg.major_frame))));
  a.edges.push_back(edge("wrap", "pre1", c1(clk("f", CmpOp::Eq, cfg.major_frame)), {}, Update{{reset("f")}}));
  a.initial = "pre1";
  return a;
}

Automaton build_task_scheduler(const SystemConfig& cfg, const std::string& partition) {
  auto ts = ordered_tasks(cfg, partition);
  if (ts.empty()) throw std::runtime_error("partition " + partition + " has no tasks");
  const int n = static_cast<int>(ts.size());

  Automaton a;
  a.name = "sched_" + partition;
  a.clocks = {"z"};
  a.vars.push_back({"run", 0, n, 0});
  a.vars.push_back({"act", 0, 1, 0});
  for (const auto& t : ts) a.vars.push_back({"rdy_" + t.id, 0, 1, 0});
  declare(a, act_name(partition), ActionKind::Broadcast, Dir::In);
  declare(a, deact_name(partition), ActionKind::Broadcast, Dir::In);
  for (const auto& t : ts) {
    declare(a, rdy_name(t.id), ActionKind::Unicast, Dir::In);
    declare(a, fin_name(t.id), ActionKind::Unicast, Dir::In);
    declare(a, go_name(t.id), ActionKind::Unicast, Dir::Out);
    declare(a, halt_name(t.id), ActionKind::Unicast, Dir::Out);
  }

  a.locations.push_back(loc("idle"));
  a.locations.push_back(loc("resched", c1(clk("z", CmpOp::Le, TimeVal(0)))));
  a.initial = "idle";

  auto z0 = [&](std::vector<UpdateEntry> more) {
    more.insert(more.begin(), reset("z"));
    return Update{std::move(more)};
  };

  // Every event re-enters the zero-time dispatch point.
  a.edges.push_back(edge("idle", "resched", {}, act_name(partition), z0({setvar("act", 1)})));
  a.edges.push_back(edge("idle", "resched", {}, deact_name(partition), z0({setvar("act", 0)})));
  a.edges.push_back(edge("resched", "resched", {}, act_name(partition), Update{{setvar("act", 1)}}));
  a.edges.push_back(edge("resched", "resched", {}, deact_name(partition), Update{{setvar("act", 0)}}));
  for (int i = 0; i < n; ++i) {
    const std::string& id = ts[static_cast<size_t>(i)].id;
    a.edges.push_back(edge("idle", "resched", {}, rdy_name(id), z0({setvar("rdy_" + id, 1)})));
    a.edges.push_back(
        edge("idle", "resched", {}, fin_name(id), z0({setvar("rdy_" + id, 0), setvar("run", 0)})));
  }

  for (int i = 0; i < n; ++i) {
    const std::string& id = ts[static_cast<size_t>(i)].id;
    // Dispatch the highest-priority ready task while a window is open.
    Constraint disp;
    disp.atoms.push_back(varcmp("act", CmpOp::Eq, 1));
    disp.atoms.push_back(varcmp("run", CmpOp::Eq, 0));
    disp.atoms.push_back(varcmp("rdy_" + id, CmpOp::Eq, 1));
    for (int h = 0; h < i; ++h) disp.atoms.push_back(varcmp("rdy_" + ts[static_cast<size_t>(h)].id, CmpOp::Eq, 0));
    a.edges.push_back(edge("resched", "idle", disp, go_name(id), Update{{setvar("run", i + 1)}}));

    // Preempt when anything more urgent becomes ready.
    for (int h = 0; h < i; ++h) {
      Constraint pre;
      pre.atoms.push_back(varcmp("act", CmpOp::Eq, 1));
      pre.atoms.push_back(varcmp("run", CmpOp::Eq, i + 1));
      pre.atoms.push_back(varcmp("rdy_" + ts[static_cast<size_t>(h)].id, CmpOp::Eq, 1));
      a.edges.push_back(edge("resched", "resched", pre, halt_name(id), Update{{setvar("run", 0)}}));
    }

    // Suspend the running task when the window closes.
    Constraint sus;
    sus.atoms.push_back(varcmp("act", CmpOp::Eq, 0));
    sus.atoms.push_back(varcmp("run", CmpOp::Eq, i + 1));
    a.edges.push_back(edge("resched", "idle", sus, halt_name(id), Update{{setvar("run", 0)}}));

    // Nothing to change: the running task stays the most urgent ready one.
    Constraint quiet;
    quiet.atoms.push_back(varcmp("act", CmpOp::Eq, 1));
    quiet.atoms.push_back(varcmp("run", CmpOp::Eq, i + 1));
    for (int h = 0; h < i; ++h) quiet.atoms.push_back(varcmp("rdy_" + ts[static_cast<size_t>(h)].id, CmpOp::Eq, 0));
    a.edges.push_back(edge("resched", "idle", quiet));
  }

  Constraint off;
  off.atoms.push_back(varcmp("act", CmpOp::Eq, 0));
  off.atoms.push_back(varcmp("run", CmpOp::Eq, 0));
  a.edges.push_back(edge("resched", "idle", off));

  Constraint none;
  none.atoms.push_back(varcmp("act", CmpOp::Eq, 1));
  none.atoms.push_back(varcmp("run", CmpOp::Eq, 0));
  for (int i = 0; i < n; ++i) none.atoms.push_back(varcmp("rdy_" + ts[static_cast<size_t>(i)].id, CmpOp::Eq, 0));
  a.edges.push_back(edge("resched", "idle", none));

  return a;
}

Automaton build_task(const SystemConfig& cfg, const TaskSpec& task) {
  Automaton a;
  a.name = task.id;
  a.clocks = {"p", "e"};
  declare(a, rdy_name(task.id), ActionKind::Unicast, Dir::Out);
  declare(a, fin_name(task.id), ActionKind::Unicast, Dir::Out);
  declare(a, go_name(task.id), ActionKind::Unicast, Dir::In);
  declare(a, halt_name(task.id), ActionKind::Unicast, Dir::In);

  const size_t m = task.commands.size();
  auto wait_of = [&](size_t k) { return "w" + std::to_string(k + 1); };
  auto active_of = [&](size_t k) { return k == m ? std::string("wrapup") : "x" + std::to_string(k + 1); };

  // Release point.
  if (task.sporadic) {
    a.locations.push_back(loc("start"));
    a.edges.push_back(edge("start", wait_of(0), c1(clk("p", CmpOp::Ge, task.offset)), rdy_name(task.id),
                           Update{{reset("p"), reset("e")}}));
  } else {
    a.locations.push_back(loc("start", c1(clk("p", CmpOp::Le, task.offset))));
    a.edges.push_back(edge("start", wait_of(0), c1(clk("p", CmpOp::Eq, task.offset)), rdy_name(task.id),
                           Update{{reset("p"), reset("e")}}));
  }
  a.initial = "start";

  // Command chain: a preempted twin (exec clock frozen) for every stage.
  std::vector<std::string> in_job;
  for (size_t k = 0; k <= m; ++k) {
    const std::string w = wait_of(k);
    const std::string x = active_of(k);
    Location wl = loc(w);
    wl.rates["e"] = 0;
    a.locations.push_back(std::move(wl));
    a.edges.push_back(edge(w, x, {}, go_name(task.id)));
    a.edges.push_back(edge(x, w, {}, halt_name(task.id)));
    in_job.push_back(w);
    in_job.push_back(x);

    if (k == m) {
      // Completion announcement, in zero time.
      a.locations.push_back(loc(x, c1(clk("e", CmpOp::Le, TimeVal(0)))));
      a.edges.push_back(edge(x, "done", {}, fin_name(task.id), Update{{reset("e")}}));
      break;
    }

    const CommandSpec& cmd = task.commands[k];
    const std::string next = active_of(k + 1);
    switch (cmd.kind) {
      case CommandSpec::Kind::Compute:
        a.locations.push_back(loc(x, c1(clk("e", CmpOp::Le, cmd.wcet))));
        a.edges.push_back(edge(x, next, c1(clk("e", CmpOp::Ge, cmd.bcet)), {}, Update{{reset("e")}}));
        break;
      case CommandSpec::Kind::Send: {
        const PortSpec* port = cfg.find_port(cmd.ref);
        if (!port) throw std::runtime_error("task " + task.id + " sends to unknown port " + cmd.ref);
        a.locations.push_back(loc(x, c1(clk("e", CmpOp::Le, TimeVal(0)))));
        declare(a, port->message, ActionKind::Broadcast, Dir::Out);
        a.edges.push_back(edge(x, next, {}, port->message, Update{{reset("e")}}));
        break;
      }
      case CommandSpec::Kind::Receive: {
        a.locations.push_back(loc(x, c1(clk("e", CmpOp::Le, TimeVal(0)))));
        declare(a, recv_name(cmd.ref, task.id), ActionKind::Unicast, Dir::Out);
        a.edges.push_back(edge(x, next, {}, recv_name(cmd.ref, task.id), Update{{reset("e")}}));
        break;
      }
      case CommandSpec::Kind::Lock: {
        // Busy-wait for the cell; the budget clock stays frozen meanwhile.
        Location xl = loc(x);
        xl.rates["e"] = 0;
        a.locations.push_back(std::move(xl));
        declare(a, lock_name(cmd.ref, task.id), ActionKind::Unicast, Dir::Out);
        a.edges.push_back(edge(x, next, {}, lock_name(cmd.ref, task.id), Update{{reset("e")}}));
        break;
      }
      case CommandSpec::Kind::Unlock: {
        a.locations.push_back(loc(x, c1(clk("e", CmpOp::Le, TimeVal(0)))));
        declare(a, unlock_name(cmd.ref, task.id), ActionKind::Unicast, Dir::Out);
        a.edges.push_back(edge(x, next, {}, unlock_name(cmd.ref, task.id), Update{{reset("e")}}));
        break;
      }
    }
  }

  if (task.sporadic) {
    a.locations.push_back(loc("done"));
    a.edges.push_back(edge("done", wait_of(0), c1(clk("p", CmpOp::Ge, task.period)), rdy_name(task.id),
                           Update{{reset("p"), reset("e")}}));
  } else {
    a.locations.push_back(loc("done", c1(clk("p", CmpOp::Le, task.period))));
    a.edges.push_back(edge("done", wait_of(0), c1(clk("p", CmpOp::Eq, task.period)), rdy_name(task.id),
                           Update{{reset("p"), reset("e")}}));
  }

  // A job still pending strictly past its deadline is a schedulability error.
  a.locations.push_back(loc("missed", {}, true));
  for (const auto& l : in_job) {
    a.edges.push_back(edge(l, "missed", c1(clk("p", CmpOp::Gt, task.deadline))));
  }
  return a;
}

Automaton build_resource(const SystemConfig& cfg, const ResourceSpec& res) {
  Automaton a;
  a.name = "res_" + res.id;
  a.locations.push_back(loc("free"));
  a.initial = "free";
  for (const auto& t : cfg.tasks_of(res.partition)) {
    bool uses = false;
    for (const auto& c : t.commands) {
      if ((c.kind == CommandSpec::Kind::Lock || c.kind == CommandSpec::Kind::Unlock) && c.ref == res.id) uses = true;
    }
    if (!uses) continue;
    declare(a, lock_name(res.id, t.id), ActionKind::Unicast, Dir::In);
    declare(a, unlock_name(res.id, t.id), ActionKind::Unicast, Dir::In);
    a.locations.push_back(loc("held_" + t.id));
    a.edges.push_back(edge("free", "held_" + t.id, {}, lock_name(res.id, t.id)));
    a.edges.push_back(edge("held_" + t.id, "free", {}, unlock_name(res.id, t.id)));
  }
  return a;
}

namespace {

// Two-slot FIFO relay: each message is held for a nondeterministic time in
// [lo, hi] and forwarded in arrival order; a third simultaneous message is an
// overrun. Slot clocks freeze at zero while their slot is empty so idle slots
// do not multiply states.
Automaton build_relay(std::string name, const std::string& in_act, const std::string& out_act,
                      TimeVal lo, TimeVal hi) {
  Automaton a;
  a.name = std::move(name);
  a.clocks = {"x1", "x2"};
  declare(a, in_act, ActionKind::Broadcast, Dir::In);
  declare(a, out_act, ActionKind::Broadcast, Dir::Out);

  auto empty1 = [](Location l) {
    l.rates["x1"] = 0;
    return l;
  };
  auto empty2 = [](Location l) {
    l.rates["x2"] = 0;
    return l;
  };

  a.locations.push_back(empty1(empty2(loc("e"))));
  a.locations.push_back(empty2(loc("s1", c1(clk("x1", CmpOp::Le, hi)))));
  a.locations.push_back(empty1(loc("s2", c1(clk("x2", CmpOp::Le, hi)))));
  a.locations.push_back(loc("s12", c1(clk("x1", CmpOp::Le, hi))));
  a.locations.push_back(loc("s21", c1(clk("x2", CmpOp::Le, hi))));
  a.locations.push_back(loc("overrun", {}, true));
  a.initial = "e";

  a.edges.push_back(edge("e", "s1", {}, in_act, Update{{reset("x1")}}));
  a.edges.push_back(edge("s1", "s12", {}, in_act, Update{{reset("x2")}}));
  a.edges.push_back(edge("s2", "s21", {}, in_act, Update{{reset("x1")}}));
  a.edges.push_back(edge("s12", "overrun", {}, in_act));
  a.edges.push_back(edge("s21", "overrun", {}, in_act));
  a.edges.push_back(edge("s1", "e", c1(clk("x1", CmpOp::Ge, lo)), out_act, Update{{reset("x1")}}));
  a.edges.push_back(edge("s2", "e", c1(clk("x2", CmpOp::Ge, lo)), out_act, Update{{reset("x2")}}));
  a.edges.push_back(edge("s12", "s2", c1(clk("x1", CmpOp::Ge, lo)), out_act, Update{{reset("x1")}}));
  a.edges.push_back(edge("s21", "s1", c1(clk("x2", CmpOp::Ge, lo)), out_act, Update{{reset("x2")}}));
  return a;
}

}  // namespace

std::vector<Automaton> build_comm_chain(const SystemConfig& cfg, const VirtualLinkSpec& vl) {
  (void)cfg;
  std::vector<Automaton> out;
  out.push_back(build_relay("tx_" + vl.id, vl.message, hop_ip_name(vl.message), vl.tx_lo, vl.tx_hi));
  out.push_back(build_relay("net_" + vl.id, hop_ip_name(vl.message), hop_vl_name(vl.message), vl.vl_lo, vl.vl_hi));
  out.push_back(build_relay("rx_" + vl.id, hop_vl_name(vl.message), hop_rx_name(vl.message), vl.rx_lo, vl.rx_hi));
  return out;
}

Automaton build_port_monitor(const SystemConfig& cfg, const PortSpec& port) {
  Automaton a;
  a.name = "port_" + port.id;
  const std::string arrive = arrival_action(cfg, port);
  declare(a, arrive, ActionKind::Broadcast, Dir::In);

  std::vector<std::string> readers;
  for (const auto& t : cfg.tasks_of(port.partition)) {
    for (const auto& c : t.commands) {
      if (c.kind == CommandSpec::Kind::Receive && c.ref == port.id) readers.push_back(t.id);
    }
  }

  if (!port.queuing) {
    // Sampling: the newest message must never be older than the refresh budget.
    a.clocks = {"c"};
    a.locations.push_back(loc("fresh"));
    a.locations.push_back(loc("stale", {}, true));
    a.initial = "fresh";
    a.edges.push_back(edge("fresh", "fresh", {}, arrive, Update{{reset("c")}}));
    a.edges.push_back(edge("fresh", "stale", c1(clk("c", CmpOp::Gt, port.refresh))));
    for (const auto& r : readers) {
      declare(a, recv_name(port.id, r), ActionKind::Unicast, Dir::In);
      a.edges.push_back(edge("fresh", "fresh", {}, recv_name(port.id, r)));
      a.edges.push_back(edge("stale", "stale", {}, recv_name(port.id, r)));
    }
  } else {
    // Queuing: arrivals beyond the capacity are lost, which is an error.
    a.vars.push_back({"n", 0, port.capacity, 0});
    a.locations.push_back(loc("buf"));
    a.locations.push_back(loc("lost", {}, true));
    a.initial = "buf";
    Constraint room = c1(varcmp("n", CmpOp::Lt, port.capacity));
    Constraint full = c1(varcmp("n", CmpOp::Eq, port.capacity));
    Update push{{UpdateEntry{UpdateEntry::Kind::VarAdd, "n", 1}}};
    Update pop{{UpdateEntry{UpdateEntry::Kind::VarAdd, "n", -1}}};
    a.edges.push_back(edge("buf", "buf", room, arrive, push));
    a.edges.push_back(edge("buf", "lost", full, arrive));
    for (const auto& r : readers) {
      declare(a, recv_name(port.id, r), ActionKind::Unicast, Dir::In);
      a.edges.push_back(edge("buf", "buf", c1(varcmp("n", CmpOp::Gt, 0)), recv_name(port.id, r), pop));
      a.edges.push_back(edge("buf", "buf", c1(varcmp("n", CmpOp::Eq, 0)), recv_name(port.id, r)));
      a.edges.push_back(edge("lost", "lost", {}, recv_name(port.id, r)));
    }
  }
  return a;
}

std::vector<Automaton> build_partition_core(const SystemConfig& cfg, const std::string& partition) {
  std::vector<Automaton> out;
  if (cfg.tasks_of(partition).empty()) return out;
  out.push_back(build_partition_supply(cfg, partition));
  out.push_back(build_task_scheduler(cfg, partition));
  for (const auto& t : cfg.tasks_of(partition)) out.push_back(build_task(cfg, t));
  for (const auto& r : cfg.resources) {
    if (r.partition == partition) out.push_back(build_resource(cfg, r));
  }
  return out;
}

std::vector<Automaton> build_global(const SystemConfig& cfg) {
  std::vector<Automaton> out;
  for (const auto& p : cfg.partitions) {
    auto core = build_partition_core(cfg, p);
    for (auto& a : core) out.push_back(std::move(a));
  }
  for (const auto& vl : cfg.vlinks) {
    for (auto& a : build_comm_chain(cfg, vl)) out.push_back(std::move(a));
  }
  for (const auto& port : cfg.ports) {
    if (!port.destination) continue;
    out.push_back(build_port_monitor(cfg, port));
  }
  return out;
}

}  // namespace dima
