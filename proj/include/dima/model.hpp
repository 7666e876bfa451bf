#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dima/rational.hpp"

namespace dima {

enum class ActionKind { Unicast, Broadcast };
enum class Dir { In, Out };

// One shared action declaration; the direction is this automaton's side.
struct ActionDecl {
  std::string name;
  ActionKind kind = ActionKind::Broadcast;
  Dir dir = Dir::Out;
  friend bool operator==(const ActionDecl&, const ActionDecl&) = default;
};

enum class CmpOp { Lt, Le, Eq, Ge, Gt };

const char* cmp_str(CmpOp op);

// Conjunctive atom: clock ~ t, clock - clock' ~ t, or var ~ n.
struct ConstraintAtom {
  enum class Kind { ClockCmp, ClockDiffCmp, VarCmp };
  Kind kind = Kind::ClockCmp;
  std::string lhs;        // clock or var
  std::string rhs_clock;  // ClockDiffCmp only
  CmpOp op = CmpOp::Le;
  TimeVal time_bound;       // clock kinds (milliseconds)
  std::int64_t int_bound = 0;  // VarCmp
  friend bool operator==(const ConstraintAtom&, const ConstraintAtom&) = default;
};

// Conjunction of atoms; empty means true.
struct Constraint {
  std::vector<ConstraintAtom> atoms;
  bool trivially_true() const { return atoms.empty(); }
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

// clock := 0, var := n, or var := var +/- n clamped to the declared range.
struct UpdateEntry {
  enum class Kind { ClockReset, VarSet, VarAdd };
  Kind kind = Kind::ClockReset;
  std::string target;
  std::int64_t value = 0;  // VarSet: new value; VarAdd: signed delta
  friend bool operator==(const UpdateEntry&, const UpdateEntry&) = default;
};

struct Update {
  std::vector<UpdateEntry> entries;
  friend bool operator==(const Update&, const Update&) = default;
};

struct VarDecl {
  std::string name;
  std::int64_t lo = 0, hi = 0, init = 0;
  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct Location {
  std::string name;
  bool error = false;
  Constraint invariant;
  // Stopwatch rates; clocks absent from the map run at rate 1.
  std::map<std::string, int> rates;
  friend bool operator==(const Location&, const Location&) = default;
};

struct Edge {
  std::string source, target;
  Constraint guard;
  std::string sync;  // action name; empty = internal
  Update update;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Automaton {
  std::string name;
  std::vector<std::string> clocks;
  std::vector<VarDecl> vars;
  std::vector<ActionDecl> actions;
  std::vector<Location> locations;
  std::string initial;
  std::vector<Edge> edges;

  const Location* find_location(const std::string& n) const;
  const ActionDecl* find_action(const std::string& n) const;
  const VarDecl* find_var(const std::string& n) const;
  bool has_clock(const std::string& n) const;

  friend bool operator==(const Automaton&, const Automaton&) = default;
};

struct Diagnostic {
  std::string code;     // stable identifier, e.g. "undeclared-clock"
  std::string subject;  // offending element
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Structural well-formedness: declared references, initial location exists
// and is not an error location, guard/update name resolution, action
// direction consistency on edges, var assignment ranges, rate values.
std::vector<Diagnostic> validate(const Automaton& a);

// Composability: disjoint outputs and no shared unicast inputs.
bool compatible(const Automaton& a, const Automaton& b);

// Explanation of the first violated compatibility condition, if any.
std::optional<std::string> incompatibility(const Automaton& a, const Automaton& b);

}  // namespace dima
