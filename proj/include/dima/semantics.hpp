#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "dima/model.hpp"

namespace dima {

// A concrete state of a (composed) system at a fixed quantum:
//   [ location index per component | clock values in quanta | var values ].
// States violating location invariants are never constructed.
using State = std::vector<std::int32_t>;

struct StateHash {
  size_t operator()(const State& s) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int32_t v : s) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

struct Label {
  enum class Kind { Internal, Input, Output, Delay };
  Kind kind = Kind::Internal;
  std::int32_t action = -1;   // system action id (Input/Output)
  std::int64_t delay = 0;     // quanta (Delay); generated steps use 1
  friend bool operator==(const Label&, const Label&) = default;
};

struct Step {
  Label label;
  State state;
};

struct SemanticsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One interned action of a composed system.
struct SysAction {
  std::string name;
  ActionKind kind = ActionKind::Broadcast;
  int owner = -1;               // component emitting it, -1 if none
  std::vector<int> receivers;   // components inputting it
  bool comp_in = false;         // member of the composite input set
  bool comp_out = false;        // member of the composite output set
};

// Exact discrete-time semantics of a parallel composition of stopwatch
// automata. Unit delays only; longer delays arise by chaining. Broadcast
// outputs synchronize the unique sender with every listener that has an
// enabled edge (others stay put); unicast in/out pairs fuse into internal
// steps; broadcast inputs are input-enabled.
class System {
 public:
  System(std::vector<std::shared_ptr<const Automaton>> comps, std::int64_t quantum_den);

  const State& initial() const { return initial_; }
  void successors(const State& s, std::vector<Step>& out) const;
  std::vector<Step> successors(const State& s) const;

  bool is_error(const State& s) const;
  // Names of components currently in an error location.
  std::vector<std::string> error_components(const State& s) const;

  std::int64_t quantum_den() const { return quantum_den_; }
  int component_count() const { return static_cast<int>(comps_.size()); }
  const std::string& component_name(int i) const;
  const std::string& location_name(int comp, std::int32_t loc) const;

  int component_index(const std::string& name) const;            // -1 if unknown
  int location_index(int comp, const std::string& name) const;   // -1 if unknown
  // Position of a component's clock / var inside a State vector; -1 if unknown.
  int clock_state_index(int comp, const std::string& clock) const;
  int var_state_index(int comp, const std::string& var) const;

  const std::vector<SysAction>& actions() const { return actions_; }
  int action_id(const std::string& name) const;  // -1 if unknown
  const std::string& action_name(int id) const { return actions_[id].name; }
  std::vector<std::string> input_names() const;
  std::vector<std::string> output_names() const;

  const std::vector<std::shared_ptr<const Automaton>>& automata() const { return autos_; }

  std::string state_str(const State& s) const;
  std::string label_str(const Label& l) const;

  size_t width() const { return width_; }

 private:
  struct CAtom {
    enum class Kind { Clock, ClockDiff, Var } kind = Kind::Clock;
    int a = 0, b = 0;  // composite indices
    CmpOp op = CmpOp::Le;
    std::int64_t bound = 0;
  };
  struct CUpdate {
    enum class Kind { ClockReset, VarSet, VarAdd } kind = Kind::ClockReset;
    int idx = 0;
    std::int64_t value = 0, lo = 0, hi = 0;
  };
  struct CEdge {
    int target = 0;
    int action = -1;  // -1 = internal
    std::vector<CAtom> guard;
    std::vector<CUpdate> updates;
  };
  struct CLoc {
    std::string name;
    bool error = false;
    std::vector<CAtom> invariant;
    std::vector<std::uint8_t> rates;  // per component clock
    std::vector<CEdge> edges;
  };
  struct Comp {
    std::string name;
    std::vector<CLoc> locs;
    int clock_base = 0, nclocks = 0;
    int var_base = 0, nvars = 0;
    int initial = 0;
  };

  bool eval(const std::vector<CAtom>& atoms, const State& s) const;
  bool apply_edge(int comp, const CEdge& e, State& s) const;
  bool invariant_ok(int comp, const State& s) const;
  void emit_product(const State& base, int action, Label::Kind kind,
                    const std::vector<std::pair<int, const CEdge*>>& fixed,
                    const std::vector<int>& listeners, size_t li,
                    State work, std::vector<Step>& out) const;

  std::vector<std::shared_ptr<const Automaton>> autos_;
  std::vector<Comp> comps_;
  std::vector<SysAction> actions_;
  std::vector<std::int64_t> caps_;  // per composite clock; -1 = uncapped
  std::vector<int> ext_broadcast_in_;  // broadcast inputs with no internal owner
  State initial_;
  size_t width_ = 0;
  int nclocks_ = 0, nvars_ = 0;
  std::int64_t quantum_den_ = 1;
};

// Semantic object of a single automaton at the given quantum (quanta per ms).
System semantics_of(const Automaton& a, std::int64_t quantum_den);

// N-ary parallel composition; flattens nested compositions. All inputs must
// share the quantum and be pairwise compatible.
System compose(const std::vector<const System*>& parts);
System compose(std::vector<Automaton> as, std::int64_t quantum_den);

// Weak transition obligations.
struct Weak {
  enum class Kind { Closure, Act, Delay };
  Kind kind = Kind::Closure;
  Label::Kind dir = Label::Kind::Output;  // Act only
  int action = -1;                        // Act only (system action id)
  std::int64_t delay = 0;                 // Delay only
};

// States reachable via the weak obligation: Closure = tau*, Act = tau* a tau*,
// Delay(d) = any interleaving of tau steps and unit delays summing to d.
// Result is duplicate-free and sorted (deterministic).
std::vector<State> weak_successors(const System& ts, const State& s, const Weak& w);

}  // namespace dima
