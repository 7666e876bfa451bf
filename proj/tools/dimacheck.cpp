#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dima/composer.hpp"
#include "dima/parse.hpp"
#include "dima/report.hpp"

namespace {

using namespace dima;

// 0: schedulable / safe / simulated / valid. 2: analysis ran but did not
// conclude (unsafe, not simulated, limit). 1: usage or configuration errors.
constexpr int kOk = 0, kUsage = 1, kNotConcluded = 2;

struct CommonArgs {
  std::string quantum = "0.1";
  std::int64_t max_states = 50'000'000;
  double max_time = 1800.0;
  int jobs = 0;
  std::string format = "table";
  std::string out;
  bool escalate_global = false;
};

void add_common(CLI::App* cmd, CommonArgs& c) {
  cmd->add_option("--quantum", c.quantum, "time quantum in ms, a unit fraction (default 0.1)");
  cmd->add_option("--max-states", c.max_states, "state limit per exploration");
  cmd->add_option("--max-time", c.max_time, "time limit per exploration, seconds");
  cmd->add_option("--jobs", c.jobs, "parallel checks (0 = one per core)");
  cmd->add_option("--format", c.format, "output format: table or structured")
      ->check(CLI::IsMember({"table", "structured"}));
  cmd->add_option("--out", c.out, "write the report to this file as well");
}

int resolve_options(const CommonArgs& c, AnalysisOptions& opt, std::string& err) {
  auto q = parse_timeval(c.quantum);
  if (!q || q->num != 1 || q->den < 1) {
    err = "quantum must be a unit fraction of a millisecond, like 0.1 or 1/8; got " + c.quantum;
    return kUsage;
  }
  opt.quantum_den = q->den;
  opt.limits.max_states = c.max_states;
  opt.limits.max_seconds = c.max_time;
  opt.sim_limits.max_seconds = c.max_time;
  opt.jobs = c.jobs;
  opt.escalate_global = c.escalate_global;
  return kOk;
}

int load_system(const std::string& path, SystemConfig& cfg, std::string& err) {
  try {
    ParsedDocument doc = parse_file(path);
    if (!doc.system) {
      err = path + ": no system section";
      return kUsage;
    }
    cfg = *doc.system;
  } catch (const std::exception& e) {
    err = e.what();
    return kUsage;
  }
  auto diags = validate_config(cfg);
  if (!diags.empty()) {
    err.clear();
    for (const auto& d : diags) err += d.code + " (" + d.subject + "): " + d.message + "\n";
    return kUsage;
  }
  return kOk;
}

void emit(const CommonArgs& c, const AnalysisReport& report) {
  std::string body = c.format == "structured" ? report_to_jsonl(report) : render_table(report);
  std::cout << body;
  if (!c.out.empty()) {
    std::ofstream f(c.out);
    f << body;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compositional schedulability analysis for distributed partitioned systems"};
  app.require_subcommand(1);

  std::string path, partition, concrete_name, abstract_name;
  bool want_witness = false;
  CommonArgs common;

  auto* validate_cmd = app.add_subcommand("validate", "parse a model file and report diagnostics");
  validate_cmd->add_option("file", path)->required();

  auto* system_cmd =
      app.add_subcommand("check-system", "compositional schedulability analysis of a system");
  system_cmd->add_option("file", path)->required();
  add_common(system_cmd, common);
  system_cmd->add_flag("--escalate-global", common.escalate_global,
                       "fall back to the exact global check when not concluded");

  auto* part_cmd = app.add_subcommand("check-partition", "deadline safety of one partition core");
  part_cmd->add_option("file", path)->required();
  part_cmd->add_option("--partition", partition, "partition id")->required();
  add_common(part_cmd, common);

  auto* global_cmd = app.add_subcommand("check-global", "exact whole-system safety check");
  global_cmd->add_option("file", path)->required();
  add_common(global_cmd, common);

  auto* sim_cmd = app.add_subcommand(
      "check-simulation", "check that one automaton's behavior is covered by another's");
  sim_cmd->add_option("file", path, "model file holding both automata")->required();
  sim_cmd->add_option("--concrete", concrete_name, "name of the concrete automaton")->required();
  sim_cmd->add_option("--abstract", abstract_name, "name of the abstract automaton")->required();
  sim_cmd->add_flag("--witness", want_witness, "re-verify the surviving relation");
  add_common(sim_cmd, common);

  auto* synth_cmd =
      app.add_subcommand("synthesize-interfaces", "derive and certify emission contracts");
  synth_cmd->add_option("file", path)->required();
  add_common(synth_cmd, common);

  CLI11_PARSE(app, argc, argv);

  std::string err;
  AnalysisOptions opt;
  if (int rc = resolve_options(common, opt, err); rc != kOk) {
    std::cerr << "error: " << err << "\n";
    return rc;
  }

  try {
    if (validate_cmd->parsed()) {
      ParsedDocument doc;
      try {
        doc = parse_file(path);
      } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
      }
      std::vector<Diagnostic> diags;
      for (const auto& a : doc.automata) {
        auto d = validate(a);
        diags.insert(diags.end(), d.begin(), d.end());
      }
      if (doc.system) {
        auto d = validate_config(*doc.system);
        diags.insert(diags.end(), d.begin(), d.end());
      }
      for (const auto& d : diags) {
        std::cout << d.code << " (" << d.subject << "): " << d.message << "\n";
      }
      if (diags.empty()) {
        std::cout << "ok: " << doc.automata.size() << " automata"
                  << (doc.system ? ", system " + doc.system->name : "") << "\n";
        return kOk;
      }
      return kUsage;
    }

    if (system_cmd->parsed()) {
      SystemConfig cfg;
      if (int rc = load_system(path, cfg, err); rc != kOk) {
        std::cerr << "error: " << err;
        return rc;
      }
      AnalysisReport report = analyze_system(cfg, opt);
      emit(common, report);
      return report.deduction.schedulable ? kOk : kNotConcluded;
    }

    if (part_cmd->parsed()) {
      SystemConfig cfg;
      if (int rc = load_system(path, cfg, err); rc != kOk) {
        std::cerr << "error: " << err;
        return rc;
      }
      ObligationResult o = check_partition_core_only(cfg, partition, opt);
      if (!o.skipped_reason.empty()) {
        std::cerr << "error: " << o.skipped_reason << "\n";
        return kUsage;
      }
      AnalysisReport report;
      report.system = cfg.name;
      report.quantum_den = opt.quantum_den;
      report.obligations.push_back(o);
      report.deduction.schedulable = o.safety.verdict == SafetyVerdict::Safe;
      report.deduction.summary =
          "partition " + partition + " core is " +
          (o.safety.verdict == SafetyVerdict::Safe
               ? "deadline-safe"
               : (o.safety.verdict == SafetyVerdict::Unsafe ? "in violation" : "not concluded"));
      emit(common, report);
      return o.safety.verdict == SafetyVerdict::Safe ? kOk : kNotConcluded;
    }

    if (global_cmd->parsed()) {
      SystemConfig cfg;
      if (int rc = load_system(path, cfg, err); rc != kOk) {
        std::cerr << "error: " << err;
        return rc;
      }
      AnalysisReport report;
      report.system = cfg.name;
      report.quantum_den = opt.quantum_den;
      report.global = check_global_safety(cfg, opt);
      report.deduction.schedulable = report.global->safety.verdict == SafetyVerdict::Safe;
      report.deduction.summary =
          report.global->safety.verdict == SafetyVerdict::Safe
              ? "no error location is reachable"
              : (report.global->safety.verdict == SafetyVerdict::Unsafe
                     ? "an error location is reachable"
                     : "exploration hit a limit: " + report.global->safety.limit_reason);
      emit(common, report);
      return report.deduction.schedulable ? kOk : kNotConcluded;
    }

    if (sim_cmd->parsed()) {
      ParsedDocument doc = parse_file(path);
      const Automaton *ca = nullptr, *aa = nullptr;
      for (const auto& a : doc.automata) {
        if (a.name == concrete_name) ca = &a;
        if (a.name == abstract_name) aa = &a;
      }
      if (!ca || !aa) {
        std::cerr << "error: automaton " << (ca ? abstract_name : concrete_name) << " not found in "
                  << path << "\n";
        return kUsage;
      }
      opt.sim_limits.want_witness = want_witness;
      System cs = semantics_of(*ca, opt.quantum_den);
      System as = semantics_of(*aa, opt.quantum_den);
      SimResult r = check_simulation(cs, as, opt.sim_limits);
      switch (r.verdict) {
        case SimResult::Verdict::Simulated:
          std::cout << "simulated: " << abstract_name << " covers " << concrete_name << " ("
                    << r.pairs << " pairs)\n";
          if (want_witness) {
            bool ok = verify_witness(cs, as, r.witness);
            std::cout << "witness relation of " << r.witness.size() << " pairs "
                      << (ok ? "re-verified" : "FAILED re-verification") << "\n";
            if (!ok) return kNotConcluded;
          }
          return kOk;
        case SimResult::Verdict::NotSimulated:
          std::cout << "not simulated (" << r.pairs << " pairs)\n";
          if (r.cex) {
            std::cout << "  failing clause: " << r.cex->clause << "\n";
            std::cout << "  after " << r.cex->path.size() << " concrete steps; offending label: "
                      << cs.label_str(r.cex->offending) << "\n";
            for (const auto& hop : r.cex->path) {
              std::cout << "    " << cs.label_str(hop.label) << " -> "
                        << cs.state_str(hop.pair.concrete) << "  |  "
                        << as.state_str(hop.pair.abs) << "\n";
            }
          }
          return kNotConcluded;
        case SimResult::Verdict::PreconditionViolated:
          std::cerr << "error: " << r.precondition_error << "\n";
          return kUsage;
        case SimResult::Verdict::LimitExceeded:
          std::cout << "not concluded: " << r.limit_reason << "\n";
          return kNotConcluded;
      }
      return kNotConcluded;
    }

    if (synth_cmd->parsed()) {
      SystemConfig cfg;
      if (int rc = load_system(path, cfg, err); rc != kOk) {
        std::cerr << "error: " << err;
        return rc;
      }
      AnalysisReport report;
      report.system = cfg.name;
      report.quantum_den = opt.quantum_den;
      bool all = true;
      for (const auto& route : message_topology(cfg)) {
        if (!route.crosses_partition) continue;
        report.certs.push_back(synthesize_interface(cfg, route, opt));
        all = all && report.certs.back().certified;
      }
      report.deduction.schedulable = all;
      report.deduction.summary = all ? "every emission contract certified"
                                     : "at least one emission contract failed";
      emit(common, report);
      return all ? kOk : kNotConcluded;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
