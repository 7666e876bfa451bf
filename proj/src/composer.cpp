#include "dima/composer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>
#include <unordered_set>

namespace dima {

namespace {

ConstraintAtom clk(const std::string& c, CmpOp op, TimeVal bound) {
  ConstraintAtom a;
  a.kind = ConstraintAtom::Kind::ClockCmp;
  a.lhs = c;
  a.op = op;
  a.time_bound = bound;
  return a;
}

Constraint c1(ConstraintAtom a) { return Constraint{{std::move(a)}}; }

int effective_jobs(int jobs, size_t n) {
  if (jobs <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    jobs = hw ? static_cast<int>(hw) : 2;
  }
  return std::max(1, std::min(jobs, static_cast<int>(n == 0 ? 1 : n)));
}

template <typename F>
void run_indexed(size_t n, int jobs, F f) {
  jobs = effective_jobs(jobs, n);
  if (jobs == 1) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (;;) {
        size_t k = next.fetch_add(1);
        if (k >= n) return;
        f(k);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

Automaton build_message_interface(const MessageInterfaceParams& p) {
  Automaton a;
  a.name = "iface_" + p.message;
  a.clocks = {"x"};
  a.actions.push_back({p.message, ActionKind::Broadcast, Dir::Out});

  Location pre;
  pre.name = "pre";
  TimeVal close{p.offset.num * p.jitter.den + p.jitter.num * p.offset.den,
                p.offset.den * p.jitter.den};
  pre.invariant = c1(clk("x", CmpOp::Le, close));
  Location post;
  post.name = "post";
  post.invariant = c1(clk("x", CmpOp::Le, p.period));

  Edge emit;
  emit.source = "pre";
  emit.target = "post";
  emit.guard = c1(clk("x", CmpOp::Ge, p.offset));
  emit.sync = p.message;
  Edge wrap;
  wrap.source = "post";
  wrap.target = "pre";
  wrap.guard = c1(clk("x", CmpOp::Eq, p.period));
  wrap.update.entries.push_back({UpdateEntry::Kind::ClockReset, "x", 0});

  if (p.boot == TimeVal(0)) {
    a.initial = "pre";
    a.locations = {pre, post};
    a.edges = {emit, wrap};
  } else {
    Location boot;
    boot.name = "boot";
    boot.invariant = c1(clk("x", CmpOp::Le, p.boot));
    Edge go;
    go.source = "boot";
    go.target = "pre";
    go.guard = c1(clk("x", CmpOp::Eq, p.boot));
    go.update.entries.push_back({UpdateEntry::Kind::ClockReset, "x", 0});
    a.initial = "boot";
    a.locations = {boot, pre, post};
    a.edges = {go, emit, wrap};
  }
  return a;
}

std::vector<MessageRoute> message_topology(const SystemConfig& cfg) {
  std::vector<MessageRoute> out;
  for (const auto& port : cfg.ports) {
    if (port.destination) continue;
    MessageRoute r;
    r.message = port.message;
    r.source_port = port.id;
    r.sender_partition = port.partition;
    for (const auto& t : cfg.tasks) {
      for (const auto& c : t.commands) {
        if (c.kind == CommandSpec::Kind::Send && c.ref == port.id) {
          r.sender_task = t.id;
          r.sender_sporadic = t.sporadic;
          r.sender_period = t.period;
        }
      }
    }
    for (const auto& q : cfg.ports) {
      if (!q.destination || q.message != port.message) continue;
      if (std::find(r.consumer_partitions.begin(), r.consumer_partitions.end(), q.partition) ==
          r.consumer_partitions.end()) {
        r.consumer_partitions.push_back(q.partition);
      }
      if (q.partition != port.partition) r.crosses_partition = true;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> render_trace(const System& sys, const SafetyResult& r) {
  std::vector<std::string> lines;
  if (r.verdict != SafetyVerdict::Unsafe) return lines;
  std::int64_t t = 0;
  State prev = sys.initial();
  lines.push_back("t=" + TimeVal(0).str() + "ms  start: " + sys.state_str(prev));
  for (const auto& step : r.trace) {
    if (step.label.kind == Label::Kind::Delay) t += step.label.delay;
    std::string moved;
    for (int ci = 0; ci < sys.component_count(); ++ci) {
      if (prev[static_cast<size_t>(ci)] != step.state[static_cast<size_t>(ci)]) {
        if (!moved.empty()) moved += ", ";
        moved += sys.component_name(ci) + "->" +
                 sys.location_name(ci, step.state[static_cast<size_t>(ci)]);
      }
    }
    std::string line = "t=" + TimeVal(t, sys.quantum_den()).str() + "ms  " + sys.label_str(step.label);
    if (!moved.empty()) line += "  [" + moved + "]";
    lines.push_back(std::move(line));
    prev = step.state;
  }
  auto errs = sys.error_components(prev);
  std::string last = "error in:";
  for (const auto& e : errs) last += " " + e;
  lines.push_back(last);
  return lines;
}

namespace {

// Phase probe: flags message emissions whose phase within the period violates
// a one-sided bound. Composing it with the sender's core never restricts the
// core (it only listens on a broadcast), so reachability of its error location
// measures the real emission envelope.
Automaton build_phase_probe(const std::string& message, TimeVal period, TimeVal bound, bool early) {
  Automaton a;
  a.name = "probe";
  a.clocks = {"x"};
  a.actions.push_back({message, ActionKind::Broadcast, Dir::In});
  Location pre;
  pre.name = "pre";
  pre.invariant = c1(clk("x", CmpOp::Le, period));
  Location err;
  err.name = "off_phase";
  err.error = true;
  a.locations = {pre, err};
  a.initial = "pre";
  Edge wrap;
  wrap.source = "pre";
  wrap.target = "pre";
  wrap.guard = c1(clk("x", CmpOp::Eq, period));
  wrap.update.entries.push_back({UpdateEntry::Kind::ClockReset, "x", 0});
  Edge flag;
  flag.source = "pre";
  flag.target = "off_phase";
  flag.guard = c1(clk("x", early ? CmpOp::Lt : CmpOp::Gt, bound));
  flag.sync = message;
  a.edges = {wrap, flag};
  return a;
}

System compose_automata(std::vector<Automaton> as, std::int64_t den) { return compose(std::move(as), den); }

}  // namespace

InterfaceCert synthesize_interface(const SystemConfig& cfg, const MessageRoute& route,
                                   const AnalysisOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InterfaceCert cert;
  cert.message = route.message;
  cert.partition = route.sender_partition;
  auto done = [&]() -> InterfaceCert& {
    cert.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cert;
  };

  if (route.sender_task.empty()) {
    cert.reason = "no task sends to port " + route.source_port;
    return done();
  }
  if (route.sender_sporadic) {
    cert.reason = "sender " + route.sender_task + " is sporadic; no periodic contract exists";
    return done();
  }
  auto period_q = route.sender_period.quanta(opt.quantum_den);
  if (!period_q || *period_q <= 0) {
    cert.reason = "sender period " + route.sender_period.str() +
                  " ms is not a positive multiple of the quantum";
    return done();
  }
  const std::int64_t tq = *period_q;

  auto core = build_partition_core(cfg, route.sender_partition);
  {
    System base = compose_automata(core, opt.quantum_den);
    SafetyResult own = check_safety(base, opt.limits);
    if (own.verdict == SafetyVerdict::Unsafe) {
      cert.reason = "partition " + route.sender_partition + " violates its own deadlines";
      return done();
    }
    if (own.verdict == SafetyVerdict::LimitExceeded) {
      cert.reason = "partition core exploration hit a limit: " + own.limit_reason;
      return done();
    }
  }

  auto probe_safe = [&](std::int64_t bound_q, bool early) {
    auto as = core;
    as.push_back(build_phase_probe(route.message, route.sender_period,
                                   TimeVal(bound_q, opt.quantum_den), early));
    System sys = compose_automata(std::move(as), opt.quantum_den);
    SafetyResult r = check_safety(sys, opt.limits);
    cert.probe_states = std::max(cert.probe_states, r.explored);
    return r.verdict == SafetyVerdict::Safe;
  };

  // Largest early bound that never fires: the minimum emission phase.
  if (probe_safe(tq + 1, true)) {
    cert.reason = "sender " + route.sender_task + " never emits " + route.message;
    return done();
  }
  std::int64_t lo = 0, hi = tq + 1;
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    (probe_safe(mid, true) ? lo : hi) = mid;
  }
  const std::int64_t phase_min = lo;

  // Smallest late bound that never fires: the maximum emission phase.
  lo = -1, hi = tq;
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    (probe_safe(mid, false) ? hi : lo) = mid;
  }
  const std::int64_t phase_max = hi;

  cert.params.message = route.message;
  cert.params.period = route.sender_period;
  cert.params.boot = TimeVal(0);
  cert.params.offset = TimeVal(phase_min, opt.quantum_den);
  cert.params.jitter = TimeVal(std::max<std::int64_t>(0, phase_max - phase_min), opt.quantum_den);

  System concrete = compose_automata(core, opt.quantum_den);
  System abs = semantics_of(build_message_interface(cert.params), opt.quantum_den);
  SimResult sim = check_simulation(concrete, abs, opt.sim_limits);
  cert.sim_pairs = sim.pairs;
  if (sim.verdict == SimResult::Verdict::Simulated) {
    cert.certified = true;
  } else if (sim.verdict == SimResult::Verdict::LimitExceeded) {
    cert.reason = "contract check hit a limit: " + sim.limit_reason;
  } else if (sim.verdict == SimResult::Verdict::PreconditionViolated) {
    cert.reason = "contract check precondition: " + sim.precondition_error;
  } else {
    cert.reason = "emission behavior is not covered by the contract";
    if (sim.cex) cert.reason += " (" + sim.cex->clause + ")";
  }
  return done();
}

namespace {

void finish_obligation(ObligationResult& res, const System& sys, const SafetyResult& safety) {
  res.safety = safety;
  res.trace_lines = render_trace(sys, safety);
  if (safety.verdict == SafetyVerdict::Unsafe && !safety.trace.empty()) {
    res.error_components = sys.error_components(safety.trace.back().state);
  }
}

}  // namespace

ObligationResult check_partition_obligation(const SystemConfig& cfg, const std::string& partition,
                                            const std::vector<InterfaceCert>& certs,
                                            const AnalysisOptions& opt) {
  ObligationResult res;
  res.partition = partition;
  auto autos = build_partition_core(cfg, partition);

  std::unordered_set<std::string> chains, ifaces;
  for (const auto& port : cfg.ports) {
    if (!port.destination || port.partition != partition) continue;
    autos.push_back(build_port_monitor(cfg, port));

    const VirtualLinkSpec* vl = cfg.route_of(port.message);
    std::string sender_partition;
    for (const auto& p : cfg.ports) {
      if (!p.destination && p.message == port.message) sender_partition = p.partition;
    }
    if (sender_partition == partition && !vl) continue;  // local sender already in the core
    if (vl && chains.insert(vl->id).second) {
      for (auto& a : build_comm_chain(cfg, *vl)) autos.push_back(std::move(a));
      res.chain_vls.push_back(vl->id);
    }
    if (sender_partition != partition && ifaces.insert(port.message).second) {
      const InterfaceCert* found = nullptr;
      for (const auto& c : certs) {
        if (c.message == port.message) found = &c;
      }
      if (!found || !found->certified) {
        res.skipped_reason = "no certified emission contract for " + port.message;
        for (const auto& a : autos) res.components.push_back(a.name);
        return res;
      }
      autos.push_back(build_message_interface(found->params));
      res.interface_messages.push_back(port.message);
    }
  }

  if (autos.empty()) {
    res.skipped_reason = "partition has no tasks and no destination ports";
    return res;
  }
  for (const auto& a : autos) res.components.push_back(a.name);
  System sys = compose_automata(std::move(autos), opt.quantum_den);
  finish_obligation(res, sys, check_safety(sys, opt.limits));
  return res;
}

ObligationResult check_partition_core_only(const SystemConfig& cfg, const std::string& partition,
                                           const AnalysisOptions& opt) {
  ObligationResult res;
  res.partition = partition;
  auto autos = build_partition_core(cfg, partition);
  if (autos.empty()) {
    res.skipped_reason = "partition has no tasks";
    return res;
  }
  for (const auto& a : autos) res.components.push_back(a.name);
  System sys = compose_automata(std::move(autos), opt.quantum_den);
  finish_obligation(res, sys, check_safety(sys, opt.limits));
  return res;
}

GlobalResult check_global_safety(const SystemConfig& cfg, const AnalysisOptions& opt) {
  GlobalResult res;
  auto autos = build_global(cfg);
  res.components = static_cast<std::int64_t>(autos.size());
  System sys = compose_automata(std::move(autos), opt.quantum_den);
  // The whole system is closed: every producer is a component, so no input
  // can arrive from outside.
  SafetyLimits lim = opt.limits;
  lim.closed = true;
  res.safety = check_safety(sys, lim);
  res.trace_lines = render_trace(sys, res.safety);
  if (res.safety.verdict == SafetyVerdict::Unsafe && !res.safety.trace.empty()) {
    res.error_components = sys.error_components(res.safety.trace.back().state);
  }
  return res;
}

AnalysisReport analyze_system(const SystemConfig& cfg, const AnalysisOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  AnalysisReport report;
  report.system = cfg.name;
  report.quantum_den = opt.quantum_den;

  std::vector<MessageRoute> routes;
  for (auto& r : message_topology(cfg)) {
    if (r.crosses_partition) routes.push_back(std::move(r));
  }
  report.certs.resize(routes.size());
  run_indexed(routes.size(), opt.jobs, [&](size_t i) {
    try {
      report.certs[i] = synthesize_interface(cfg, routes[i], opt);
    } catch (const std::exception& e) {
      report.certs[i].message = routes[i].message;
      report.certs[i].partition = routes[i].sender_partition;
      report.certs[i].reason = e.what();
    }
  });

  std::vector<std::string> parts;
  for (const auto& p : cfg.partitions) {
    bool relevant = !cfg.tasks_of(p).empty();
    for (const auto& port : cfg.ports) {
      if (port.destination && port.partition == p) relevant = true;
    }
    if (relevant) parts.push_back(p);
  }
  report.obligations.resize(parts.size());
  run_indexed(parts.size(), opt.jobs, [&](size_t i) {
    try {
      report.obligations[i] = check_partition_obligation(cfg, parts[i], report.certs, opt);
    } catch (const std::exception& e) {
      report.obligations[i].partition = parts[i];
      report.obligations[i].skipped_reason = e.what();
    }
  });

  Deduction& d = report.deduction;
  d.schedulable = true;
  for (const auto& c : report.certs) {
    if (!c.certified) {
      d.schedulable = false;
      d.summary = "contract for " + c.message + " not certified: " + c.reason;
      break;
    }
  }
  if (d.schedulable) {
    for (const auto& o : report.obligations) {
      if (!o.skipped_reason.empty()) {
        d.schedulable = false;
        d.summary = "obligation for " + o.partition + " skipped: " + o.skipped_reason;
        break;
      }
      if (o.safety.verdict == SafetyVerdict::Unsafe) {
        d.schedulable = false;
        d.summary = "obligation for " + o.partition + " is unsafe";
        if (!o.error_components.empty()) {
          d.summary += " (error in " + o.error_components.front();
          for (size_t k = 1; k < o.error_components.size(); ++k) d.summary += ", " + o.error_components[k];
          d.summary += ")";
        }
        break;
      }
      if (o.safety.verdict == SafetyVerdict::LimitExceeded) {
        d.schedulable = false;
        d.summary = "obligation for " + o.partition + " hit a limit: " + o.safety.limit_reason;
        break;
      }
    }
  }
  if (d.schedulable) {
    d.summary = "every emission contract certified and every partition obligation safe";
  } else if (opt.escalate_global) {
    report.global = check_global_safety(cfg, opt);
    if (report.global->safety.verdict == SafetyVerdict::Safe) {
      d.schedulable = true;
      d.summary += "; global exploration is safe";
    } else if (report.global->safety.verdict == SafetyVerdict::Unsafe) {
      d.summary += "; global exploration confirms an error";
    } else {
      d.summary += "; global exploration hit a limit: " + report.global->safety.limit_reason;
    }
  }

  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace dima
