#include "dima/report.hpp"

#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace dima {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string verdict_str(SafetyVerdict v) {
  switch (v) {
    case SafetyVerdict::Safe: return "safe";
    case SafetyVerdict::Unsafe: return "unsafe";
    case SafetyVerdict::LimitExceeded: return "limit-exceeded";
  }
  return "?";
}

SafetyVerdict verdict_from(const std::string& s) {
  if (s == "safe") return SafetyVerdict::Safe;
  if (s == "unsafe") return SafetyVerdict::Unsafe;
  if (s == "limit-exceeded") return SafetyVerdict::LimitExceeded;
  throw std::runtime_error("unknown verdict: " + s);
}

TimeVal tv_from(const json& j) {
  auto t = parse_timeval(j.get<std::string>());
  if (!t) throw std::runtime_error("bad time value: " + j.get<std::string>());
  return *t;
}

std::string pad(const std::string& s, size_t w) {
  return s.size() >= w ? s + " " : s + std::string(w - s.size() + 1, ' ');
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", s);
  return buf;
}

}  // namespace

std::string render_table(const AnalysisReport& r) {
  std::ostringstream out;
  out << "system " << r.system << "  (quantum 1/" << r.quantum_den << " ms)\n";

  if (!r.certs.empty()) {
    out << "\nemission contracts\n";
    out << "  " << pad("message", 10) << pad("sender", 10) << pad("window (ms)", 22)
        << pad("status", 12) << pad("pairs", 10) << "time (s)\n";
    for (const auto& c : r.certs) {
      std::string win = "[" + c.params.offset.str() + ", " + (c.params.offset + c.params.jitter).str() +
                        "] each " + c.params.period.str();
      out << "  " << pad(c.message, 10) << pad(c.partition, 10)
          << pad(c.certified ? win : std::string("-"), 22)
          << pad(c.certified ? "certified" : "failed", 12)
          << pad(std::to_string(c.sim_pairs), 10) << fmt_seconds(c.seconds) << "\n";
      if (!c.certified) out << "    reason: " << c.reason << "\n";
    }
  }

  out << "\npartition obligations\n";
  out << "  " << pad("partition", 10) << pad("verdict", 16) << pad("states", 12) << "time (s)\n";
  for (const auto& o : r.obligations) {
    std::string v = o.skipped_reason.empty() ? verdict_str(o.safety.verdict) : "skipped";
    out << "  " << pad(o.partition, 10) << pad(v, 16)
        << pad(std::to_string(o.safety.explored), 12) << fmt_seconds(o.safety.seconds) << "\n";
    if (!o.skipped_reason.empty()) out << "    reason: " << o.skipped_reason << "\n";
    if (!o.error_components.empty()) {
      out << "    error in:";
      for (const auto& e : o.error_components) out << " " << e;
      out << "\n";
    }
    for (const auto& line : o.trace_lines) out << "    " << line << "\n";
  }

  if (r.global) {
    out << "\nglobal check\n";
    out << "  " << pad("components", 12) << pad("verdict", 16) << pad("states", 12) << "time (s)\n";
    out << "  " << pad(std::to_string(r.global->components), 12)
        << pad(verdict_str(r.global->safety.verdict), 16)
        << pad(std::to_string(r.global->safety.explored), 12)
        << fmt_seconds(r.global->safety.seconds) << "\n";
    if (!r.global->error_components.empty()) {
      out << "    error in:";
      for (const auto& e : r.global->error_components) out << " " << e;
      out << "\n";
    }
    for (const auto& line : r.global->trace_lines) out << "    " << line << "\n";
  }

  out << "\nverdict: " << (r.deduction.schedulable ? "schedulable" : "not concluded") << "\n";
  out << "  " << r.deduction.summary << "\n";
  return out.str();
}

std::string report_to_jsonl(const AnalysisReport& r) {
  std::ostringstream out;
  std::vector<std::string> premises;

  json header{{"record", "header"},
              {"format", "dima-report"},
              {"version", kFormatVersion},
              {"system", r.system},
              {"quantum-den", r.quantum_den},
              {"seconds", r.seconds}};
  out << header.dump() << "\n";

  for (const auto& c : r.certs) {
    json j{{"record", "certificate"},
           {"id", "cert:" + c.message},
           {"message", c.message},
           {"partition", c.partition},
           {"certified", c.certified},
           {"period-ms", c.params.period.str()},
           {"boot-ms", c.params.boot.str()},
           {"offset-ms", c.params.offset.str()},
           {"jitter-ms", c.params.jitter.str()},
           {"sim-pairs", c.sim_pairs},
           {"probe-states", c.probe_states},
           {"seconds", c.seconds},
           {"reason", c.reason}};
    out << j.dump() << "\n";
    premises.push_back("cert:" + c.message);
  }

  for (const auto& o : r.obligations) {
    json abs{{"record", "composed-abstraction"},
             {"id", "abs:" + o.partition},
             {"partition", o.partition},
             {"components", o.components},
             {"interfaces", o.interface_messages},
             {"chains", o.chain_vls}};
    out << abs.dump() << "\n";
    if (!o.interface_messages.empty()) {
      std::vector<std::string> used;
      for (const auto& m : o.interface_messages) used.push_back("cert:" + m);
      json sim{{"record", "composed-simulation"},
               {"id", "sim:" + o.partition},
               {"partition", o.partition},
               {"justifies", "abs:" + o.partition},
               {"premises", used}};
      out << sim.dump() << "\n";
    }
    json j{{"record", "obligation-check"},
           {"id", "obl:" + o.partition},
           {"partition", o.partition},
           {"abstraction", "abs:" + o.partition},
           {"verdict", o.skipped_reason.empty() ? verdict_str(o.safety.verdict) : "skipped"},
           {"skipped-reason", o.skipped_reason},
           {"limit-reason", o.safety.limit_reason},
           {"explored", o.safety.explored},
           {"seconds", o.safety.seconds},
           {"error-components", o.error_components},
           {"trace", o.trace_lines}};
    out << j.dump() << "\n";
    premises.push_back("obl:" + o.partition);
  }

  if (r.global) {
    json j{{"record", "global-check"},
           {"components", r.global->components},
           {"verdict", verdict_str(r.global->safety.verdict)},
           {"limit-reason", r.global->safety.limit_reason},
           {"explored", r.global->safety.explored},
           {"seconds", r.global->safety.seconds},
           {"error-components", r.global->error_components},
           {"trace", r.global->trace_lines}};
    out << j.dump() << "\n";
    premises.push_back("global");
  }

  json rule{{"record", "rule-application"},
            {"id", "rule:deduce"},
            {"rule", "assume-guarantee-discharge"},
            {"premises", premises},
            {"conclusion", r.deduction.schedulable ? "schedulable" : "not-concluded"},
            {"summary", r.deduction.summary}};
  out << rule.dump() << "\n";
  return out.str();
}

AnalysisReport report_from_jsonl(const std::string& text) {
  AnalysisReport r;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  std::unordered_map<std::string, size_t> obl_index;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    const std::string kind = j.at("record").get<std::string>();
    if (kind == "header") {
      if (j.at("format").get<std::string>() != "dima-report") {
        throw std::runtime_error("not a dima-report stream");
      }
      if (j.at("version").get<int>() != kFormatVersion) {
        throw std::runtime_error("unsupported report version");
      }
      r.system = j.at("system").get<std::string>();
      r.quantum_den = j.at("quantum-den").get<std::int64_t>();
      r.seconds = j.at("seconds").get<double>();
      saw_header = true;
    } else if (kind == "certificate") {
      InterfaceCert c;
      c.message = j.at("message").get<std::string>();
      c.partition = j.at("partition").get<std::string>();
      c.certified = j.at("certified").get<bool>();
      c.params.message = c.message;
      c.params.period = tv_from(j.at("period-ms"));
      c.params.boot = tv_from(j.at("boot-ms"));
      c.params.offset = tv_from(j.at("offset-ms"));
      c.params.jitter = tv_from(j.at("jitter-ms"));
      c.sim_pairs = j.at("sim-pairs").get<std::int64_t>();
      c.probe_states = j.at("probe-states").get<std::int64_t>();
      c.seconds = j.at("seconds").get<double>();
      c.reason = j.at("reason").get<std::string>();
      r.certs.push_back(std::move(c));
    } else if (kind == "composed-abstraction") {
      ObligationResult o;
      o.partition = j.at("partition").get<std::string>();
      o.components = j.at("components").get<std::vector<std::string>>();
      o.interface_messages = j.at("interfaces").get<std::vector<std::string>>();
      o.chain_vls = j.at("chains").get<std::vector<std::string>>();
      obl_index[o.partition] = r.obligations.size();
      r.obligations.push_back(std::move(o));
    } else if (kind == "obligation-check") {
      auto it = obl_index.find(j.at("partition").get<std::string>());
      if (it == obl_index.end()) throw std::runtime_error("obligation-check without its abstraction");
      ObligationResult& o = r.obligations[it->second];
      const std::string v = j.at("verdict").get<std::string>();
      o.skipped_reason = j.at("skipped-reason").get<std::string>();
      if (v != "skipped") o.safety.verdict = verdict_from(v);
      o.safety.limit_reason = j.at("limit-reason").get<std::string>();
      o.safety.explored = j.at("explored").get<std::int64_t>();
      o.safety.seconds = j.at("seconds").get<double>();
      o.error_components = j.at("error-components").get<std::vector<std::string>>();
      o.trace_lines = j.at("trace").get<std::vector<std::string>>();
    } else if (kind == "global-check") {
      GlobalResult g;
      g.components = j.at("components").get<std::int64_t>();
      g.safety.verdict = verdict_from(j.at("verdict").get<std::string>());
      g.safety.limit_reason = j.at("limit-reason").get<std::string>();
      g.safety.explored = j.at("explored").get<std::int64_t>();
      g.safety.seconds = j.at("seconds").get<double>();
      g.error_components = j.at("error-components").get<std::vector<std::string>>();
      g.trace_lines = j.at("trace").get<std::vector<std::string>>();
      r.global = std::move(g);
    } else if (kind == "rule-application") {
      r.deduction.schedulable = j.at("conclusion").get<std::string>() == "schedulable";
      r.deduction.summary = j.at("summary").get<std::string>();
    } else if (kind == "composed-simulation") {
      // informational cross-reference; nothing to rebuild
    } else {
      throw std::runtime_error("unknown record kind: " + kind);
    }
  }
  if (!saw_header) throw std::runtime_error("missing report header");
  return r;
}

}  // namespace dima
