#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dima/model.hpp"

namespace dima {

// All times below are milliseconds (exact rationals).

struct ScheduleWindow {
  std::string partition;
  TimeVal offset;
  TimeVal duration;
  friend bool operator==(const ScheduleWindow&, const ScheduleWindow&) = default;
};

struct CommandSpec {
  enum class Kind { Compute, Lock, Unlock, Send, Receive };
  Kind kind = Kind::Compute;
  TimeVal bcet, wcet;  // Compute
  std::string ref;     // resource or port id
  friend bool operator==(const CommandSpec&, const CommandSpec&) = default;
};

struct TaskSpec {
  std::string id;
  std::string partition;
  bool sporadic = false;
  TimeVal period;    // period, or minimum separation for sporadic tasks
  TimeVal deadline;  // relative, <= period/separation
  std::int64_t priority = 0;  // larger = more urgent; ties broken by task order
  TimeVal offset;    // first release (periodic) / earliest release (sporadic)
  std::vector<CommandSpec> commands;
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct PortSpec {
  std::string id;
  std::string partition;
  bool queuing = false;         // false = sampling
  bool destination = false;     // false = source
  std::string message;          // message type carried by this port
  TimeVal refresh;              // sampling: required refresh period
  std::int64_t capacity = 0;    // queuing: buffer capacity
  friend bool operator==(const PortSpec&, const PortSpec&) = default;
};

struct VirtualLinkSpec {
  std::string id;
  std::string message;
  std::string source;                    // source partition
  std::vector<std::string> destinations; // destination partitions
  TimeVal tx_lo, tx_hi;  // tx-side UDP/IP stack latency
  TimeVal vl_lo, vl_hi;  // virtual-link transit latency
  TimeVal rx_lo, rx_hi;  // rx-side UDP/IP stack latency
  friend bool operator==(const VirtualLinkSpec&, const VirtualLinkSpec&) = default;
};

struct ResourceSpec {
  std::string id;
  std::string partition;
  friend bool operator==(const ResourceSpec&, const ResourceSpec&) = default;
};

struct ModuleSpec {
  std::string id;
  std::vector<std::string> partitions;
  friend bool operator==(const ModuleSpec&, const ModuleSpec&) = default;
};

struct SystemConfig {
  std::string name;
  TimeVal quantum_ms{1, 10};  // default 0.1 ms per quantum
  TimeVal major_frame;
  std::vector<ModuleSpec> modules;
  std::vector<std::string> partitions;
  std::vector<ScheduleWindow> schedule;
  std::vector<TaskSpec> tasks;
  std::vector<PortSpec> ports;
  std::vector<VirtualLinkSpec> vlinks;
  std::vector<ResourceSpec> resources;

  const PortSpec* find_port(const std::string& id) const;
  const VirtualLinkSpec* route_of(const std::string& message) const;
  std::vector<TaskSpec> tasks_of(const std::string& partition) const;
  std::vector<PortSpec> ports_of(const std::string& partition) const;
  std::vector<ScheduleWindow> windows_of(const std::string& partition) const;

  // Quanta per millisecond, if the quantum is of the form 1/D ms.
  std::optional<std::int64_t> quantum_den() const;

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

// Referential integrity, window overlap, timing sanity (bcet <= wcet,
// deadline <= period), port/VL routing consistency.
std::vector<Diagnostic> validate_config(const SystemConfig& cfg);

}  // namespace dima
