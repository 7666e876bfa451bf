#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dima/builders.hpp"
#include "dima/safety.hpp"
#include "dima/simulation.hpp"

namespace dima {

// Periodic emission contract: one emission per period, inside the window
// [offset, offset + jitter] anchored at boot + k * period.
struct MessageInterfaceParams {
  std::string message;
  TimeVal period{};
  TimeVal boot{};
  TimeVal offset{};
  TimeVal jitter{};
  friend bool operator==(const MessageInterfaceParams&, const MessageInterfaceParams&) = default;
};

Automaton build_message_interface(const MessageInterfaceParams& p);

struct AnalysisOptions {
  std::int64_t quantum_den = 10;  // quanta per millisecond
  SafetyLimits limits{};
  SimLimits sim_limits{};
  int jobs = 0;  // 0 = one per available core
  bool escalate_global = false;
};

// Who produces a message and which partitions consume it.
struct MessageRoute {
  std::string message;
  std::string source_port;
  std::string sender_partition;
  std::string sender_task;  // empty when no task sends to the source port
  bool sender_sporadic = false;
  TimeVal sender_period{};
  std::vector<std::string> consumer_partitions;  // partitions with destination ports
  bool crosses_partition = false;
};

std::vector<MessageRoute> message_topology(const SystemConfig& cfg);

struct InterfaceCert {
  std::string message;
  std::string partition;  // sender
  MessageInterfaceParams params;
  bool certified = false;
  std::string reason;  // why certification failed
  std::int64_t sim_pairs = 0;
  std::int64_t probe_states = 0;  // largest envelope-probe exploration
  double seconds = 0.0;
};

struct ObligationResult {
  std::string partition;
  std::vector<std::string> components;          // automata composed for the check
  std::vector<std::string> interface_messages;  // assumed emission contracts
  std::vector<std::string> chain_vls;           // relay chains included
  std::string skipped_reason;                   // nonempty: check did not run
  SafetyResult safety;
  std::vector<std::string> error_components;  // error locations in the final trace state
  std::vector<std::string> trace_lines;       // rendered counterexample
};

struct GlobalResult {
  SafetyResult safety;
  std::vector<std::string> error_components;
  std::vector<std::string> trace_lines;
  std::int64_t components = 0;
};

struct Deduction {
  bool schedulable = false;
  std::string summary;
};

struct AnalysisReport {
  std::string system;
  std::int64_t quantum_den = 10;
  std::vector<InterfaceCert> certs;
  std::vector<ObligationResult> obligations;
  std::optional<GlobalResult> global;
  Deduction deduction;
  double seconds = 0.0;
};

// Measures the sender's emission envelope with phase probes, then certifies
// the tightest periodic contract against the partition core by simulation.
InterfaceCert synthesize_interface(const SystemConfig& cfg, const MessageRoute& route,
                                   const AnalysisOptions& opt);

// Safety of one partition core composed with its port monitors, the relay
// chains feeding them, and certified emission contracts standing in for
// remote senders.
ObligationResult check_partition_obligation(const SystemConfig& cfg, const std::string& partition,
                                            const std::vector<InterfaceCert>& certs,
                                            const AnalysisOptions& opt);

// Safety of the bare partition core (deadlines only, no ports).
ObligationResult check_partition_core_only(const SystemConfig& cfg, const std::string& partition,
                                           const AnalysisOptions& opt);

// Exact whole-system check: every core, chain, and monitor, real senders.
GlobalResult check_global_safety(const SystemConfig& cfg, const AnalysisOptions& opt);

// Full compositional flow: synthesize every needed contract, discharge every
// partition obligation (in parallel), and deduce. Optionally falls back to
// the global check when the compositional argument does not conclude.
AnalysisReport analyze_system(const SystemConfig& cfg, const AnalysisOptions& opt);

// Rendered counterexample: one line per step with accumulated time.
std::vector<std::string> render_trace(const System& sys, const SafetyResult& r);

}  // namespace dima
