#include "dima/simulation.hpp"
#include "doctest.h"
#include "gen.hpp"
#include "oracles.hpp"

using namespace dima;
using namespace dima::gen;
using namespace dima::oracle;

namespace {

Location loc(const std::string& name, bool error = false) {
  Location l;
  l.name = name;
  l.error = error;
  return l;
}

ConstraintAtom clk(const std::string& c, CmpOp op, std::int64_t ms) {
  ConstraintAtom at;
  at.kind = ConstraintAtom::Kind::ClockCmp;
  at.lhs = c;
  at.op = op;
  at.time_bound = TimeVal(ms);
  return at;
}

// Emits "beat" once, somewhere in [lo, hi] ms.
Automaton emitter(const std::string& name, std::int64_t lo, std::int64_t hi) {
  Automaton a;
  a.name = name;
  a.clocks = {"x"};
  a.actions = {{"beat", ActionKind::Broadcast, Dir::Out}};
  a.locations = {loc("w"), loc("s")};
  a.locations[0].invariant.atoms = {clk("x", CmpOp::Le, hi)};
  a.initial = "w";
  Edge e;
  e.source = "w";
  e.target = "s";
  e.sync = "beat";
  e.guard.atoms = {clk("x", CmpOp::Ge, lo)};
  a.edges = {e};
  return a;
}

}  // namespace

TEST_CASE("every system simulates itself, with a checkable witness") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CAPTURE(seed);
    Rng rng(4100 + seed);
    MicroOpts opt;
    opt.actions = micro_action_pool();
    Automaton a = micro_automaton(rng, opt, "r" + std::to_string(seed));
    System sys = semantics_of(a, 1);

    SimLimits lim;
    lim.want_witness = true;
    SimResult r = check_simulation(sys, sys, lim);
    REQUIRE(r.verdict == SimResult::Verdict::Simulated);
    CHECK(!r.witness.empty());
    CHECK(verify_witness(sys, sys, r.witness));
  }
}

TEST_CASE("a fixed-time emitter refines its jitter window, never the reverse") {
  System exact = semantics_of(emitter("exact", 2, 2), 1);
  System window = semantics_of(emitter("window", 1, 3), 1);

  SimLimits lim;
  lim.want_witness = true;
  SimResult fwd = check_simulation(exact, window, lim);
  REQUIRE(fwd.verdict == SimResult::Verdict::Simulated);
  CHECK(verify_witness(exact, window, fwd.witness));

  SimResult bwd = check_simulation(window, exact);
  REQUIRE(bwd.verdict == SimResult::Verdict::NotSimulated);
  REQUIRE(bwd.cex.has_value());
  CHECK(bwd.cex->clause == "no-weak-response");
  CHECK(bwd.cex->offending.kind == Label::Kind::Output);
  CHECK(window.action_name(bwd.cex->offending.action) == "beat");
  // the failing pair sits one delay past the root: concrete may fire at 1 ms,
  // the exact emitter cannot move before 2 ms
  CHECK(bwd.cex->root.concrete == window.initial());
  CHECK(bwd.cex->root.abs == exact.initial());
  REQUIRE(!bwd.cex->path.empty());
  CHECK(bwd.cex->path.back().pair.concrete[1] == 1);
}

TEST_CASE("entering an error the abstraction cannot expose breaks the simulation") {
  Automaton c;
  c.name = "c";
  c.locations = {loc("l0"), loc("boom", true)};
  c.initial = "l0";
  Edge e;
  e.source = "l0";
  e.target = "boom";
  c.edges = {e};

  Automaton a;
  a.name = "a";
  a.locations = {loc("a0")};
  a.initial = "a0";

  SimResult r = check_simulation(semantics_of(c, 1), semantics_of(a, 1));
  REQUIRE(r.verdict == SimResult::Verdict::NotSimulated);
  REQUIRE(r.cex.has_value());
  CHECK(r.cex->clause == "error-exposure");
  REQUIRE(r.cex->path.size() == 1);
  CHECK(r.cex->path[0].label.kind == Label::Kind::Internal);
}

TEST_CASE("abstract actions missing from the concrete side violate the precondition") {
  Automaton c;
  c.name = "c";
  c.locations = {loc("l0")};
  c.initial = "l0";

  Automaton a = c;
  a.name = "a";
  a.actions = {{"z", ActionKind::Unicast, Dir::Out}};

  SimResult r = check_simulation(semantics_of(c, 1), semantics_of(a, 1));
  CHECK(r.verdict == SimResult::Verdict::PreconditionViolated);
  CHECK(r.precondition_error.find("z") != std::string::npos);
}

TEST_CASE("internal steps may be absorbed before a required weak delay") {
  // the abstraction must leave l0 instantly, but tau-closure runs first
  Automaton c;
  c.name = "c";
  c.locations = {loc("l0")};
  c.initial = "l0";

  Automaton a;
  a.name = "a";
  a.clocks = {"x"};
  a.locations = {loc("l0"), loc("l1")};
  a.locations[0].invariant.atoms = {clk("x", CmpOp::Le, 0)};
  a.initial = "l0";
  Edge e;
  e.source = "l0";
  e.target = "l1";
  a.edges = {e};

  SimResult r = check_simulation(semantics_of(c, 1), semantics_of(a, 1));
  CHECK(r.verdict == SimResult::Verdict::Simulated);
}

TEST_CASE("witness verification rejects fabricated relations") {
  System window = semantics_of(emitter("window", 1, 3), 1);
  System exact = semantics_of(emitter("exact", 2, 2), 1);
  // at 1 ms the window emitter can fire but the exact one cannot
  SimStatePair pair;
  pair.concrete = {0, 1};
  pair.abs = {0, 1};
  CHECK(!verify_witness(window, exact, {pair}));
}

TEST_CASE("pair construction agrees with the exhaustive product fixpoint") {
  int simulated = 0, refuted = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CAPTURE(seed);
    Rng rng(7700 + seed);
    MicroOpts opt;
    opt.actions = micro_action_pool();
    Automaton con = micro_automaton(rng, opt, "c" + std::to_string(seed));

    Automaton abs;
    if (seed % 2 == 0) {
      abs = relax_abstraction(rng, con, {"req", "pulse"});
    } else {
      abs = micro_automaton(rng, opt, "a" + std::to_string(seed));
    }

    System cs = semantics_of(con, 1);
    System as = semantics_of(abs, 1);
    SimLimits lim;
    lim.want_witness = true;
    SimResult got = check_simulation(cs, as, lim);
    REQUIRE((got.verdict == SimResult::Verdict::Simulated ||
             got.verdict == SimResult::Verdict::NotSimulated));

    bool want = full_product_simulated(con, abs, 1);
    CHECK((got.verdict == SimResult::Verdict::Simulated) == want);
    if (got.verdict == SimResult::Verdict::Simulated) {
      ++simulated;
      CHECK(verify_witness(cs, as, got.witness));
    } else {
      ++refuted;
      CHECK(got.cex.has_value());
    }
  }
  CHECK(simulated > 0);
  CHECK(refuted > 0);
}
