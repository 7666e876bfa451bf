#include "dima/sysconfig.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dima {

const PortSpec* SystemConfig::find_port(const std::string& id) const {
  for (const auto& p : ports)
    if (p.id == id) return &p;
  return nullptr;
}

const VirtualLinkSpec* SystemConfig::route_of(const std::string& message) const {
  for (const auto& v : vlinks)
    if (v.message == message) return &v;
  return nullptr;
}

std::vector<TaskSpec> SystemConfig::tasks_of(const std::string& partition) const {
  std::vector<TaskSpec> out;
  for (const auto& t : tasks)
    if (t.partition == partition) out.push_back(t);
  return out;
}

std::vector<PortSpec> SystemConfig::ports_of(const std::string& partition) const {
  std::vector<PortSpec> out;
  for (const auto& p : ports)
    if (p.partition == partition) out.push_back(p);
  return out;
}

std::vector<ScheduleWindow> SystemConfig::windows_of(const std::string& partition) const {
  std::vector<ScheduleWindow> out;
  for (const auto& w : schedule)
    if (w.partition == partition) out.push_back(w);
  std::sort(out.begin(), out.end(),
            [](const ScheduleWindow& a, const ScheduleWindow& b) { return a.offset < b.offset; });
  return out;
}

std::optional<std::int64_t> SystemConfig::quantum_den() const {
  // The quantum must be 1/D ms for a positive integer D.
  if (quantum_ms.num <= 0) return std::nullopt;
  if (quantum_ms.num != 1) return std::nullopt;
  return quantum_ms.den;
}

namespace {

bool is_partition(const SystemConfig& cfg, const std::string& p) {
  return std::find(cfg.partitions.begin(), cfg.partitions.end(), p) != cfg.partitions.end();
}

bool leq(const TimeVal& a, const TimeVal& b) { return a == b || a < b; }

}  // namespace

std::vector<Diagnostic> validate_config(const SystemConfig& cfg) {
  std::vector<Diagnostic> out;
  const TimeVal zero{0};

  if (!cfg.quantum_den())
    out.push_back({"bad-quantum", cfg.name,
                   "time-quantum-ms must be 1/D for a positive integer D (e.g. 1, 0.5, 0.1)"});
  if (!(zero < cfg.major_frame))
    out.push_back({"bad-major-frame", cfg.name, "major-frame must be positive"});

  std::set<std::string> in_module;
  for (const auto& m : cfg.modules)
    for (const auto& p : m.partitions) {
      if (!is_partition(cfg, p))
        out.push_back({"unknown-partition", "module " + m.id, "partition '" + p + "' not declared"});
      if (!in_module.insert(p).second)
        out.push_back({"partition-in-two-modules", p, "partition '" + p + "' assigned to two modules"});
    }

  // Windows: inside the frame and pairwise non-overlapping across the module
  // schedule (one processor per module; be strict and require global
  // non-overlap per partition list provided, module by module).
  for (const auto& w : cfg.schedule) {
    if (!is_partition(cfg, w.partition))
      out.push_back({"unknown-partition", "schedule", "window for undeclared partition '" + w.partition + "'"});
    if (!(zero < w.duration))
      out.push_back({"bad-window", w.partition, "window duration must be positive"});
    if (w.offset < zero || !leq(w.offset + w.duration, cfg.major_frame))
      out.push_back({"window-outside-frame", w.partition, "window exceeds the major frame"});
  }
  auto module_of = [&](const std::string& p) -> std::string {
    for (const auto& m : cfg.modules)
      for (const auto& q : m.partitions)
        if (q == p) return m.id;
    return "";
  };
  for (size_t i = 0; i < cfg.schedule.size(); ++i)
    for (size_t j = i + 1; j < cfg.schedule.size(); ++j) {
      const auto& a = cfg.schedule[i];
      const auto& b = cfg.schedule[j];
      if (module_of(a.partition) != module_of(b.partition)) continue;
      bool disjoint = leq(a.offset + a.duration, b.offset) || leq(b.offset + b.duration, a.offset);
      if (!disjoint)
        out.push_back({"window-overlap", a.partition + "/" + b.partition,
                       "schedule windows overlap within one module"});
    }

  for (const auto& t : cfg.tasks) {
    if (!is_partition(cfg, t.partition))
      out.push_back({"unknown-partition", "task " + t.id, "partition '" + t.partition + "' not declared"});
    if (!(zero < t.period))
      out.push_back({"bad-period", t.id, t.sporadic ? "separation must be positive" : "period must be positive"});
    if (!(zero < t.deadline) || !leq(t.deadline, t.period))
      out.push_back({"bad-deadline", t.id,
                     "deadline must be positive and at most the period/separation"});
    if (t.offset < zero)
      out.push_back({"bad-offset", t.id, "offset must be non-negative"});
    if (t.commands.empty())
      out.push_back({"no-commands", t.id, "task has no commands"});
    int locked = 0;
    for (const auto& c : t.commands) {
      switch (c.kind) {
        case CommandSpec::Kind::Compute:
          if (c.bcet < zero || c.wcet < c.bcet)
            out.push_back({"bad-compute", t.id, "compute interval must satisfy 0 <= bcet <= wcet"});
          break;
        case CommandSpec::Kind::Send:
        case CommandSpec::Kind::Receive: {
          const PortSpec* p = cfg.find_port(c.ref);
          if (!p) {
            out.push_back({"unknown-port", t.id, "command references undeclared port '" + c.ref + "'"});
          } else {
            if (p->partition != t.partition)
              out.push_back({"foreign-port", t.id, "port '" + c.ref + "' belongs to another partition"});
            if (c.kind == CommandSpec::Kind::Send && p->destination)
              out.push_back({"send-to-destination", t.id, "send must target a source port"});
            if (c.kind == CommandSpec::Kind::Receive && !p->destination)
              out.push_back({"receive-from-source", t.id, "receive must target a destination port"});
          }
          break;
        }
        case CommandSpec::Kind::Lock: {
          bool found = false;
          for (const auto& r : cfg.resources)
            if (r.id == c.ref) {
              found = true;
              if (r.partition != t.partition)
                out.push_back({"foreign-resource", t.id, "resource '" + c.ref + "' belongs to another partition"});
            }
          if (!found)
            out.push_back({"unknown-resource", t.id, "lock of undeclared resource '" + c.ref + "'"});
          ++locked;
          break;
        }
        case CommandSpec::Kind::Unlock:
          --locked;
          if (locked < 0)
            out.push_back({"unbalanced-unlock", t.id, "unlock without a matching lock"});
          break;
      }
    }
    if (locked > 0)
      out.push_back({"unreleased-lock", t.id, "job ends while holding a resource"});
    if (cfg.windows_of(t.partition).empty())
      out.push_back({"no-windows", t.id, "partition '" + t.partition + "' has no schedule windows"});
  }

  std::map<std::string, int> routes;  // message -> #VLs
  for (const auto& v : cfg.vlinks) {
    routes[v.message]++;
    if (!is_partition(cfg, v.source))
      out.push_back({"unknown-partition", "virtual-link " + v.id, "source partition not declared"});
    for (const auto& d : v.destinations)
      if (!is_partition(cfg, d))
        out.push_back({"unknown-partition", "virtual-link " + v.id, "destination partition '" + d + "' not declared"});
    for (auto [lo, hi] : {std::pair{v.tx_lo, v.tx_hi}, {v.vl_lo, v.vl_hi}, {v.rx_lo, v.rx_hi}})
      if (lo < zero || hi < lo)
        out.push_back({"bad-latency", v.id, "latency interval must satisfy 0 <= min <= max"});
    bool src_port = false;
    for (const auto& p : cfg.ports)
      if (!p.destination && p.message == v.message && p.partition == v.source) src_port = true;
    if (!src_port)
      out.push_back({"dangling-route", v.id,
                     "no source port for message '" + v.message + "' in partition '" + v.source + "'"});
    for (const auto& d : v.destinations) {
      bool dst_port = false;
      for (const auto& p : cfg.ports)
        if (p.destination && p.message == v.message && p.partition == d) dst_port = true;
      if (!dst_port)
        out.push_back({"dangling-route", v.id,
                       "no destination port for message '" + v.message + "' in partition '" + d + "'"});
    }
  }
  for (const auto& [msg, n] : routes)
    if (n > 1)
      out.push_back({"multiple-routes", msg, "message '" + msg + "' routed by more than one virtual link"});

  for (const auto& p : cfg.ports) {
    if (!is_partition(cfg, p.partition))
      out.push_back({"unknown-partition", "port " + p.id, "partition '" + p.partition + "' not declared"});
    if (p.message.empty())
      out.push_back({"no-message", p.id, "port has no message type"});
    if (!p.queuing && p.destination && !(zero < p.refresh))
      out.push_back({"bad-refresh", p.id, "sampling destination port needs refresh > 0"});
    if (p.queuing && p.destination && p.capacity < 1)
      out.push_back({"bad-capacity", p.id, "queuing destination port needs capacity >= 1"});
    if (p.destination) {
      // Inbound message must be produced somewhere: same-partition source
      // port (local) or a VL listing this partition as destination.
      bool local = false;
      for (const auto& q : cfg.ports)
        if (!q.destination && q.message == p.message && q.partition == p.partition) local = true;
      const VirtualLinkSpec* vl = cfg.route_of(p.message);
      bool routed = vl && std::find(vl->destinations.begin(), vl->destinations.end(),
                                    p.partition) != vl->destinations.end();
      if (!local && !routed)
        out.push_back({"unrouted-destination", p.id,
                       "no producer reaches message '" + p.message + "' in partition '" + p.partition + "'"});
    } else {
      // An inter-partition consumer requires a VL carrying this message.
      for (const auto& q : cfg.ports)
        if (q.destination && q.message == p.message && q.partition != p.partition) {
          const VirtualLinkSpec* vl = cfg.route_of(p.message);
          if (!vl)
            out.push_back({"missing-vl", p.id,
                           "message '" + p.message + "' crosses partitions without a virtual link"});
        }
    }
  }
  return out;
}

}  // namespace dima
