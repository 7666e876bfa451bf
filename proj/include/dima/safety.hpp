#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dima/semantics.hpp"

namespace dima {

struct SafetyLimits {
  std::int64_t max_states = 50'000'000;
  double max_seconds = 1800.0;
  // Closed-world search: steps labeled as environment inputs are not taken.
  // For a whole-system composition every sender is a component, so an input
  // step could only come from a nonexistent environment.
  bool closed = false;
};

enum class SafetyVerdict { Safe, Unsafe, LimitExceeded };

struct SafetyResult {
  SafetyVerdict verdict = SafetyVerdict::Safe;
  std::int64_t explored = 0;  // distinct states discovered
  double seconds = 0.0;
  std::string limit_reason;   // LimitExceeded only
  // Unsafe only: shortest-step run from the initial state into an error
  // state; trace[i].state is the state after trace[i].label.
  std::vector<Step> trace;
};

// Breadth-first reachability of error locations. Deterministic: exploration
// order is a pure function of the system, so explored counts are stable.
SafetyResult check_safety(const System& ts, const SafetyLimits& lim = {});

// Replays a counterexample step by step against the semantics; true iff every
// step is a real transition and the final state is an error state.
bool replay_trace(const System& ts, const SafetyResult& r);

// Deduplicating flat-array store for fixed-width states.
class StateStore {
 public:
  explicit StateStore(size_t width);
  // Returns (id, true) on first insertion, (existing id, false) otherwise.
  std::pair<std::int64_t, bool> intern(const State& s);
  void fetch(std::int64_t id, State& out) const;
  std::int64_t size() const { return count_; }

 private:
  std::uint64_t hash_at(const std::int32_t* p) const;
  bool grow();

  size_t width_;
  std::vector<std::int32_t> arena_;
  std::vector<std::int64_t> table_;  // open addressing; -1 = empty
  std::int64_t count_ = 0;
};

}  // namespace dima
