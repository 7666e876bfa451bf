#pragma once

#include <string>
#include <vector>

#include "dima/model.hpp"
#include "dima/sysconfig.hpp"

namespace dima {

// Action naming scheme shared by every generated automaton. Message actions
// and window signals are broadcast; everything else is a unicast rendezvous.
std::string act_name(const std::string& partition);    // window opens
std::string deact_name(const std::string& partition);  // window closes
std::string rdy_name(const std::string& task);         // job release
std::string go_name(const std::string& task);          // dispatch
std::string halt_name(const std::string& task);        // preempt / suspend
std::string fin_name(const std::string& task);         // job completion
std::string hop_ip_name(const std::string& message);   // left the source end system
std::string hop_vl_name(const std::string& message);   // crossed the switch fabric
std::string hop_rx_name(const std::string& message);   // delivered at the sink end system
std::string recv_name(const std::string& port, const std::string& task);
std::string lock_name(const std::string& resource, const std::string& task);
std::string unlock_name(const std::string& resource, const std::string& task);

// The action a destination port sees as message arrival: the final relay hop
// for routed messages, the raw emission for partition-local ones.
std::string arrival_action(const SystemConfig& cfg, const PortSpec& port);

// Windowed processor supply of one partition: walks the minor windows of the
// major frame and announces opening/closing instants.
Automaton build_partition_supply(const SystemConfig& cfg, const std::string& partition);

// Fixed-priority preemptive dispatcher of one partition. Reacts to releases,
// completions, and window edges in zero time; at most one task runs and only
// while a window is open.
Automaton build_task_scheduler(const SystemConfig& cfg, const std::string& partition);

// One application task: periodic or sporadic release, a chain of commands
// (compute budgets, sends, receives, critical sections), completion, and a
// deadline-miss error location. The exec clock freezes whenever the task is
// not dispatched.
Automaton build_task(const SystemConfig& cfg, const TaskSpec& task);

// Mutual-exclusion cell for one intra-partition resource.
Automaton build_resource(const SystemConfig& cfg, const ResourceSpec& res);

// Three relay stages of one virtual link (source end system, switch fabric,
// sink end system), each a two-slot FIFO with a nondeterministic per-message
// latency; a third arrival while both slots are busy is an overrun error.
std::vector<Automaton> build_comm_chain(const SystemConfig& cfg, const VirtualLinkSpec& vl);

// Destination port observer: sampling ports track message age against the
// refresh budget, queuing ports track backlog against the capacity.
Automaton build_port_monitor(const SystemConfig& cfg, const PortSpec& port);

// Supply + scheduler + tasks + resources of one partition.
std::vector<Automaton> build_partition_core(const SystemConfig& cfg, const std::string& partition);

// Every partition core, every destination port monitor, every relay chain.
std::vector<Automaton> build_global(const SystemConfig& cfg);

}  // namespace dima
