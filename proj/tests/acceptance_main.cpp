// Release gate: runs every advertised guarantee at its stated size and
// tolerance, one verdict line per criterion, nonzero exit on any failure.
//
//   acceptance_tests --workloads <dir>
//
// The workloads directory must hold the bundled case studies
// (dima-case1, dima-case2) and the reduced-scale variants (dima-mini1,
// dima-mini2) used to validate the verdict patterns globally.

#include <chrono>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "dima/composer.hpp"
#include "dima/parse.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace dima;
namespace gn = dima::gen;
namespace orc = dima::oracle;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool g_any_fail = false;

void report(int num, const std::string& name, const Outcome& o, double secs) {
  std::printf("[%s] %d. %s: %s  [%.1fs]\n", o.pass ? "PASS" : "FAIL", num, name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) g_any_fail = true;
}

bool simulated(const System& c, const System& a, const SimLimits& lim) {
  return check_simulation(c, a, lim).verdict == SimResult::Verdict::Simulated;
}

std::vector<std::string> keep_subset(int i) {
  switch (i % 4) {
    case 0: return {"req", "ack", "tick", "pulse"};
    case 1: return {"ack", "tick"};
    case 2: return {"req", "pulse"};
    default: return {};
  }
}

// ---- criterion 1: preorder/preservation/compositionality properties ----

Outcome criterion1() {
  SimLimits lim;
  lim.want_witness = false;
  // Backstop for the 6 GB class of box this gate is sized for: a runaway
  // instance surfaces as a visible LimitExceeded failure, not an OOM kill.
  lim.max_pairs = 2'000'000;
  int refl_fail = 0, trans_checked = 0, trans_fail = 0;
  int pres_pairs = 0, pres_abs_safe = 0, pres_fail = 0;
  int t3_checked = 0, t3_fail = 0, t4_checked = 0, t4_fail = 0;
  int premise_fail = 0;

  for (int i = 0; i < 100; ++i) {
    gn::Rng rng(101000u + static_cast<unsigned>(i));
    Automaton a = gn::theorem_automaton(rng, "r" + std::to_string(i), gn::micro_action_pool());
    System ts = semantics_of(a, 1);
    if (!simulated(ts, ts, lim)) ++refl_fail;
  }

  for (int i = 0; trans_checked < 50 && i < 200; ++i) {
    gn::Rng rng(102000u + static_cast<unsigned>(i));
    Automaton a = gn::theorem_automaton(rng, "ta", gn::micro_action_pool());
    Automaton b = gn::relax_abstraction(rng, a, keep_subset(0));
    Automaton c = gn::relax_abstraction(rng, b, keep_subset(i));
    System sa = semantics_of(a, 1), sb = semantics_of(b, 1), sc = semantics_of(c, 1);
    if (!simulated(sa, sb, lim) || !simulated(sb, sc, lim)) {
      ++premise_fail;
      continue;
    }
    ++trans_checked;
    if (!simulated(sa, sc, lim)) ++trans_fail;
  }

  for (int i = 0; pres_pairs < 200 && i < 400; ++i) {
    gn::Rng rng(103000u + static_cast<unsigned>(i));
    Automaton a = gn::theorem_automaton(rng, "pa", gn::micro_action_pool());
    Automaton b = gn::relax_abstraction(rng, a, keep_subset(i));
    System sa = semantics_of(a, 1), sb = semantics_of(b, 1);
    if (!simulated(sa, sb, lim)) {
      ++premise_fail;
      continue;
    }
    ++pres_pairs;
    if (check_safety(sb).verdict == SafetyVerdict::Safe) {
      ++pres_abs_safe;
      if (check_safety(sa).verdict != SafetyVerdict::Safe) ++pres_fail;
    }
  }

  // one concrete system, two compatible abstractions of it, composed;
  // sized like the pairwise loop below, the composite pair space of the
  // 6-location 2-clock instances runs past the memory of a small box
  gn::MicroOpts o3;
  o3.max_locs = 4;
  o3.n_clocks = 1;
  o3.max_edges = 7;
  o3.actions = gn::micro_action_pool();
  for (int i = 0; t3_checked < 100 && i < 300; ++i) {
    gn::Rng rng(104000u + static_cast<unsigned>(i));
    Automaton t1 = gn::micro_automaton(rng, o3, "c0");
    Automaton t2 = gn::relax_abstraction(rng, t1, {"req", "ack", "tick"});
    Automaton t3 = gn::relax_abstraction(rng, t1, {"pulse", "tick"});
    t2.name = "a2";
    t3.name = "a3";
    System s1 = semantics_of(t1, 1);
    if (!simulated(s1, semantics_of(t2, 1), lim) || !simulated(s1, semantics_of(t3, 1), lim)) {
      ++premise_fail;
      continue;
    }
    ++t3_checked;
    System prod = compose({t2, t3}, 1);
    if (!simulated(s1, prod, lim)) ++t3_fail;
  }

  // broadcast-only alphabets on the abstract side, pairwise composition;
  // t2 always keeps pulse so every abstract input of t4 stays covered
  std::vector<ActionDecl> pool1 = {{"pulse", ActionKind::Broadcast, Dir::Out},
                                   {"tick", ActionKind::Broadcast, Dir::In}};
  std::vector<ActionDecl> pool3 = {{"pulse", ActionKind::Broadcast, Dir::In},
                                   {"beep", ActionKind::Broadcast, Dir::Out},
                                   {"tick", ActionKind::Broadcast, Dir::In}};
  for (int i = 0; t4_checked < 100 && i < 300; ++i) {
    gn::Rng rng(105000u + static_cast<unsigned>(i));
    gn::MicroOpts o4;
    o4.max_locs = 4;
    o4.n_clocks = 1;
    o4.max_edges = 6;
    o4.actions = pool1;
    Automaton t1 = gn::micro_automaton(rng, o4, "c1");
    o4.actions = pool3;
    Automaton t3 = gn::micro_automaton(rng, o4, "c3");
    Automaton t2 = gn::relax_abstraction(
        rng, t1, i % 2 == 0 ? std::vector<std::string>{"pulse", "tick"} : std::vector<std::string>{"pulse"});
    std::vector<std::string> keep4;
    switch (i % 4) {
      case 0: keep4 = {"pulse", "beep", "tick"}; break;
      case 1: keep4 = {"beep"}; break;
      case 2: keep4 = {"pulse", "tick"}; break;
      default: keep4 = {}; break;
    }
    Automaton t4 = gn::relax_abstraction(rng, t3, keep4);
    t2.name = "a1";
    t4.name = "a3";
    if (!simulated(semantics_of(t1, 1), semantics_of(t2, 1), lim) ||
        !simulated(semantics_of(t3, 1), semantics_of(t4, 1), lim)) {
      ++premise_fail;
      continue;
    }
    ++t4_checked;
    System con = compose({t1, t3}, 1);
    System abs = compose({t2, t4}, 1);
    if (!simulated(con, abs, lim)) ++t4_fail;
  }

  Outcome o;
  o.pass = refl_fail == 0 && trans_checked >= 50 && trans_fail == 0 && pres_pairs >= 200 &&
           pres_fail == 0 && t3_checked >= 100 && t3_fail == 0 && t4_checked >= 100 && t4_fail == 0;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "reflexivity 100 systems (%d fail), transitivity %d chains (%d fail), "
                "preservation %d pairs / %d abstract-safe (%d fail), "
                "composite-abstraction %d (%d fail), pairwise-composition %d (%d fail), "
                "%d premise rejections",
                refl_fail, trans_checked, trans_fail, pres_pairs, pres_abs_safe, pres_fail,
                t3_checked, t3_fail, t4_checked, t4_fail, premise_fail);
  o.detail = buf;
  return o;
}

// ---- criterion 2: agreement with the enumerative oracles ----

Outcome criterion2() {
  int safety_disagree = 0, safety_unsafe = 0;
  for (int i = 0; i < 500; ++i) {
    gn::Rng rng(106000u + static_cast<unsigned>(i));
    gn::MicroOpts opt;
    if (i % 2 == 1) opt.actions = gn::micro_action_pool();
    Automaton a = gn::micro_automaton(rng, opt, "m" + std::to_string(i));
    SafetyResult lib = check_safety(semantics_of(a, 1));
    orc::ReachResult ref = orc::enumerate_reachability(a, 1);
    const bool lib_unsafe = lib.verdict == SafetyVerdict::Unsafe;
    if (lib.verdict == SafetyVerdict::LimitExceeded || lib_unsafe != ref.error_reachable)
      ++safety_disagree;
    if (lib_unsafe) ++safety_unsafe;
  }

  SimLimits lim;
  lim.want_witness = false;
  int sim_disagree = 0, sim_holds = 0;
  for (int i = 0; i < 200; ++i) {
    gn::Rng rng(107000u + static_cast<unsigned>(i));
    gn::MicroOpts opt;
    opt.actions = gn::micro_action_pool();
    Automaton con = gn::micro_automaton(rng, opt, "c");
    Automaton abs = i % 2 == 0 ? gn::relax_abstraction(rng, con, {"req", "pulse"})
                               : gn::micro_automaton(rng, opt, "b");
    SimResult lib = check_simulation(semantics_of(con, 1), semantics_of(abs, 1), lim);
    bool ref = orc::full_product_simulated(con, abs, 1);
    if (lib.verdict != SimResult::Verdict::Simulated &&
        lib.verdict != SimResult::Verdict::NotSimulated) {
      ++sim_disagree;
      continue;
    }
    const bool holds = lib.verdict == SimResult::Verdict::Simulated;
    if (holds != ref) ++sim_disagree;
    if (holds) ++sim_holds;
  }

  Outcome o;
  o.pass = safety_disagree == 0 && sim_disagree == 0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "safety: 500 automata, %d unsafe, %d disagreements; "
                "simulation: 200 pairs, %d simulated, %d disagreements",
                safety_unsafe, safety_disagree, sim_holds, sim_disagree);
  o.detail = buf;
  return o;
}

// ---- criterion 3: compositional verdicts are sound against the global check ----

Outcome criterion3() {
  int schedulable = 0, violations = 0, limits = 0;
  const int total = 100;
  for (int i = 0; i < total; ++i) {
    gn::Rng rng(108000u + static_cast<unsigned>(i));
    SystemConfig cfg = gn::micro_system(rng, static_cast<std::uint64_t>(i));
    AnalysisOptions opt;
    opt.quantum_den = 1;
    opt.jobs = 2;
    AnalysisReport rep = analyze_system(cfg, opt);
    if (!rep.deduction.schedulable) continue;
    ++schedulable;
    GlobalResult g = check_global_safety(cfg, opt);
    if (g.safety.verdict == SafetyVerdict::Unsafe) ++violations;
    if (g.safety.verdict == SafetyVerdict::LimitExceeded) ++limits;
  }
  Outcome o;
  o.pass = violations == 0 && limits == 0 && schedulable > 0;
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "%d micro-systems, %d deduced schedulable, %d contradicted globally, %d hit limits",
                total, schedulable, violations, limits);
  o.detail = buf;
  return o;
}

// ---- criteria 4-6: bundled case studies ----

struct CaseData {
  AnalysisReport rep1, rep2;
  GlobalResult mini1, mini2;
  bool loaded = false;
  std::string load_error;
};

SystemConfig load_config(const std::string& path) {
  ParsedDocument doc = parse_file(path);
  if (!doc.system) throw std::runtime_error(path + ": no system section");
  return *doc.system;
}

CaseData run_cases(const std::string& dir) {
  CaseData d;
  try {
    SystemConfig case1 = load_config(dir + "/dima-case1/system.dima");
    SystemConfig case2 = load_config(dir + "/dima-case2/system.dima");
    SystemConfig mini1 = load_config(dir + "/dima-mini1/system.dima");
    SystemConfig mini2 = load_config(dir + "/dima-mini2/system.dima");
    AnalysisOptions opt;
    opt.jobs = 4;  // stated budget: a 4-core laptop
    d.rep1 = analyze_system(case1, opt);
    d.rep2 = analyze_system(case2, opt);
    d.mini1 = check_global_safety(mini1, opt);
    d.mini2 = check_global_safety(mini2, opt);
    d.loaded = true;
  } catch (const std::exception& e) {
    d.load_error = e.what();
  }
  return d;
}

Outcome criterion4(const CaseData& d) {
  Outcome o;
  if (!d.loaded) {
    o.detail = "workloads not loadable: " + d.load_error;
    return o;
  }
  std::string why;
  auto verdict_row = [](const AnalysisReport& r) {
    std::string row;
    for (const auto& ob : r.obligations) {
      if (!ob.skipped_reason.empty())
        row += '?';
      else
        row += ob.safety.verdict == SafetyVerdict::Safe     ? 'Y'
               : ob.safety.verdict == SafetyVerdict::Unsafe ? 'N'
                                                            : 'L';
    }
    return row;
  };
  const std::string row1 = verdict_row(d.rep1), row2 = verdict_row(d.rep2);
  if (row1 != "YYNYY") why += " case1 row " + row1 + " want YYNYY;";
  if (d.rep1.deduction.schedulable) why += " case1 wrongly schedulable;";
  for (const auto& c : d.rep1.certs)
    if (!c.certified) why += " case1 contract " + c.message + " uncertified;";

  // the counterexample must blame the stale sampling port that carries msg2
  bool named = false;
  for (const auto& ob : d.rep1.obligations) {
    if (ob.partition != "P3") continue;
    for (const auto& e : ob.error_components) named |= e.find("msg2") != std::string::npos;
    if (ob.trace_lines.empty() || ob.trace_lines.back().find("error in:") != 0)
      why += " case1 P3 trace not rendered;";
  }
  if (!named) why += " case1 P3 failure does not name the msg2 port;";

  if (row2 != "YYYYY") why += " case2 row " + row2 + " want YYYYY;";
  if (!d.rep2.deduction.schedulable) why += " case2 not schedulable;";

  if (d.mini1.safety.verdict != SafetyVerdict::Unsafe) why += " mini1 global not unsafe;";
  bool mini_named = false;
  for (const auto& e : d.mini1.error_components) mini_named |= e.find("port_") == 0;
  if (!mini_named) why += " mini1 error not a port monitor;";
  if (d.mini2.safety.verdict != SafetyVerdict::Safe) why += " mini2 global not safe;";

  o.pass = why.empty();
  o.detail = o.pass ? "case1 row YYNYY with msg2 refresh trace, case2 row YYYYY schedulable, "
                      "mini globals match (unsafe/safe)"
                    : why;
  return o;
}

Outcome criterion5(const CaseData& d) {
  Outcome o;
  if (!d.loaded) {
    o.detail = "workloads not loadable";
    return o;
  }
  std::int64_t max_obl = 0;
  std::string argmax;
  for (const AnalysisReport* rep : {&d.rep1, &d.rep2}) {
    for (const auto& ob : rep->obligations) {
      if (ob.safety.explored > max_obl) {
        max_obl = ob.safety.explored;
        argmax = ob.partition;
      }
    }
  }
  const std::int64_t global_states = d.mini2.safety.explored;
  o.pass = max_obl > 0 && global_states >= 5 * max_obl &&
           d.mini2.safety.verdict == SafetyVerdict::Safe;
  char buf[224];
  std::snprintf(buf, sizeof buf,
                "largest obligation %lld states (%s); reduced-scale global %lld states; ratio %.1fx "
                "(need >= 5x)",
                static_cast<long long>(max_obl), argmax.c_str(),
                static_cast<long long>(global_states),
                max_obl > 0 ? static_cast<double>(global_states) / static_cast<double>(max_obl) : 0.0);
  o.detail = buf;
  return o;
}

Outcome criterion6(const CaseData& d) {
  Outcome o;
  if (!d.loaded) {
    o.detail = "workloads not loadable";
    return o;
  }
  o.pass = d.rep1.seconds < 900.0 && d.rep2.seconds < 900.0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "case1 %.1fs, case2 %.1fs (budget 900s each, 4 jobs)",
                d.rep1.seconds, d.rep2.seconds);
  o.detail = buf;
  return o;
}

template <class F>
void run(int num, const std::string& name, F&& f) {
  const double t0 = now_seconds();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  report(num, name, o, now_seconds() - t0);
}

}  // namespace

int main(int argc, char** argv) {
  std::string workloads = "workloads";
  std::string only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--workloads") workloads = argv[i + 1];
    if (std::string(argv[i]) == "--only") only = argv[i + 1];
  }
  // --only 1,3 narrows the run while iterating; the default runs everything.
  auto wanted = [&only](int num) {
    if (only.empty()) return true;
    std::string tag = std::to_string(num);
    size_t pos = 0;
    while ((pos = only.find(tag, pos)) != std::string::npos) return true;
    return false;
  };

  if (wanted(1)) run(1, "simulation preorder properties", criterion1);
  if (wanted(2)) run(2, "oracle agreement", criterion2);
  if (wanted(3)) run(3, "compositional soundness", criterion3);

  if (wanted(4) || wanted(5) || wanted(6)) {
    const double t0 = now_seconds();
    CaseData cases = run_cases(workloads);
    const double case_secs = now_seconds() - t0;
    if (wanted(4)) report(4, "case-study regression", criterion4(cases), case_secs);
    if (wanted(5)) run(5, "state-space reduction", [&] { return criterion5(cases); });
    if (wanted(6)) run(6, "end-to-end runtime", [&] { return criterion6(cases); });
  }

  if (g_any_fail) {
    std::printf("ACCEPTANCE: FAIL\n");
    return 1;
  }
  std::printf("ACCEPTANCE: PASS\n");
  return 0;
}
