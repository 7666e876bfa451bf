#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dima/semantics.hpp"

namespace dima {

struct SimLimits {
  std::int64_t max_pairs = 20'000'000;
  double max_seconds = 1800.0;
  bool want_witness = false;  // collect the surviving relation on success
};

struct SimStatePair {
  State concrete;
  State abs;
  friend bool operator==(const SimStatePair&, const SimStatePair&) = default;
};

// Cause chain from the root pair to a pair where a clause fails outright.
struct SimCounterexample {
  struct Hop {
    Label label;  // concrete step taken (label of the concrete system)
    SimStatePair pair;
  };
  SimStatePair root;
  std::vector<Hop> path;
  std::string clause;  // "error-exposure" or "no-weak-response"
  Label offending;     // concrete label with no weak response
};

struct SimResult {
  enum class Verdict { Simulated, NotSimulated, PreconditionViolated, LimitExceeded };
  Verdict verdict = Verdict::Simulated;
  std::int64_t pairs = 0;
  double seconds = 0.0;
  std::string precondition_error;
  std::string limit_reason;
  std::optional<SimCounterexample> cex;
  std::vector<SimStatePair> witness;  // populated when want_witness and Simulated
};

// Checks that `abs` simulates `concrete` over the abstract alphabet: visible
// abstract-alphabet steps of the concrete system must be weakly matched, steps
// outside it and internal steps are matched silently, unit delays by weak unit
// delays, and error states of the concrete system only pair with error states
// of the abstract one. Precondition: the abstract input/output name sets are
// subsets of the concrete ones with agreeing kinds.
SimResult check_simulation(const System& concrete, const System& abs, const SimLimits& lim = {});

// Re-checks every clause of every pair of a claimed simulation relation,
// without trusting the fixpoint that produced it.
bool verify_witness(const System& concrete, const System& abs, const std::vector<SimStatePair>& witness);

}  // namespace dima
