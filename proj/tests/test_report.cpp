#include <sstream>

#include "dima/report.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace dima;

namespace {

// One of everything: a certified and a failed contract, a safe, an unsafe,
// and a skipped obligation, plus a global fallback run.
AnalysisReport sample_report() {
  AnalysisReport r;
  r.system = "demo";
  r.quantum_den = 10;
  r.seconds = 1.5;

  InterfaceCert good;
  good.message = "msg";
  good.partition = "P1";
  good.certified = true;
  good.params = {"msg", TimeVal(25), TimeVal(5), TimeVal(5, 2), TimeVal(1, 2)};
  good.sim_pairs = 420;
  good.probe_states = 9000;
  good.seconds = 0.25;
  InterfaceCert bad;
  bad.message = "aux";
  bad.partition = "P2";
  bad.params.message = "aux";
  bad.reason = "sender t9 is sporadic; no periodic contract exists";
  r.certs = {good, bad};

  ObligationResult safe;
  safe.partition = "P1";
  safe.components = {"supply_P1", "sched_P1", "t1"};
  safe.safety.verdict = SafetyVerdict::Safe;
  safe.safety.explored = 1234;
  safe.safety.seconds = 0.5;
  ObligationResult unsafe_;
  unsafe_.partition = "P2";
  unsafe_.components = {"supply_P2", "sched_P2", "t2", "port_in", "iface_msg"};
  unsafe_.interface_messages = {"msg"};
  unsafe_.chain_vls = {"vl1"};
  unsafe_.safety.verdict = SafetyVerdict::Unsafe;
  unsafe_.safety.explored = 77;
  unsafe_.error_components = {"port_in"};
  unsafe_.trace_lines = {"t=0ms  start: <...>", "t=50.1ms  stale", "error in: port_in"};
  ObligationResult skipped;
  skipped.partition = "P3";
  skipped.components = {"supply_P3"};
  skipped.skipped_reason = "no certified emission contract for aux";
  r.obligations = {safe, unsafe_, skipped};

  GlobalResult g;
  g.components = 14;
  g.safety.verdict = SafetyVerdict::LimitExceeded;
  g.safety.explored = 50000000;
  g.safety.limit_reason = "state budget exhausted";
  r.global = g;

  r.deduction.schedulable = false;
  r.deduction.summary = "obligation for P2 is unsafe (error in port_in)";
  return r;
}

}  // namespace

TEST_CASE("reports round-trip through the proof log without loss") {
  AnalysisReport r = sample_report();
  AnalysisReport b = report_from_jsonl(report_to_jsonl(r));

  CHECK(b.system == r.system);
  CHECK(b.quantum_den == r.quantum_den);
  CHECK(b.seconds == doctest::Approx(r.seconds));

  REQUIRE(b.certs.size() == 2);
  CHECK(b.certs[0].certified);
  CHECK(b.certs[0].message == "msg");
  CHECK(b.certs[0].partition == "P1");
  CHECK(b.certs[0].params.period == TimeVal(25));
  CHECK(b.certs[0].params.boot == TimeVal(5));
  CHECK(b.certs[0].params.offset == TimeVal(5, 2));
  CHECK(b.certs[0].params.jitter == TimeVal(1, 2));
  CHECK(b.certs[0].sim_pairs == 420);
  CHECK(b.certs[0].probe_states == 9000);
  CHECK(!b.certs[1].certified);
  CHECK(b.certs[1].reason == r.certs[1].reason);

  REQUIRE(b.obligations.size() == 3);
  CHECK(b.obligations[0].safety.verdict == SafetyVerdict::Safe);
  CHECK(b.obligations[0].safety.explored == 1234);
  CHECK(b.obligations[0].components == r.obligations[0].components);
  CHECK(b.obligations[1].safety.verdict == SafetyVerdict::Unsafe);
  CHECK(b.obligations[1].interface_messages == std::vector<std::string>{"msg"});
  CHECK(b.obligations[1].chain_vls == std::vector<std::string>{"vl1"});
  CHECK(b.obligations[1].error_components == std::vector<std::string>{"port_in"});
  CHECK(b.obligations[1].trace_lines == r.obligations[1].trace_lines);
  CHECK(b.obligations[2].skipped_reason == r.obligations[2].skipped_reason);

  REQUIRE(b.global.has_value());
  CHECK(b.global->components == 14);
  CHECK(b.global->safety.verdict == SafetyVerdict::LimitExceeded);
  CHECK(b.global->safety.limit_reason == "state budget exhausted");

  CHECK(!b.deduction.schedulable);
  CHECK(b.deduction.summary == r.deduction.summary);
}

TEST_CASE("the proof log cross-references premises by id") {
  std::istringstream in(report_to_jsonl(sample_report()));
  std::string line;
  std::vector<nlohmann::json> recs;
  while (std::getline(in, line)) {
    if (!line.empty()) recs.push_back(nlohmann::json::parse(line));
  }
  REQUIRE(!recs.empty());
  CHECK(recs.front().at("record") == "header");
  CHECK(recs.back().at("record") == "rule-application");

  // the composed simulation for P2 must cite the certificate it relies on
  bool cited = false;
  for (const auto& j : recs) {
    if (j.at("record") == "composed-simulation" && j.at("partition") == "P2") {
      auto prem = j.at("premises").get<std::vector<std::string>>();
      cited = std::find(prem.begin(), prem.end(), "cert:msg") != prem.end();
      CHECK(j.at("justifies") == "abs:P2");
    }
  }
  CHECK(cited);

  // the final rule lists every certificate and obligation as a premise
  auto prem = recs.back().at("premises").get<std::vector<std::string>>();
  CHECK(std::find(prem.begin(), prem.end(), "cert:msg") != prem.end());
  CHECK(std::find(prem.begin(), prem.end(), "obl:P2") != prem.end());
  CHECK(std::find(prem.begin(), prem.end(), "global") != prem.end());
}

TEST_CASE("the table names verdicts, windows, and failure reasons") {
  std::string t = render_table(sample_report());
  CHECK(t.find("system demo") != std::string::npos);
  CHECK(t.find("quantum 1/10 ms") != std::string::npos);
  CHECK(t.find("certified") != std::string::npos);
  CHECK(t.find("sporadic; no periodic contract") != std::string::npos);
  CHECK(t.find("unsafe") != std::string::npos);
  CHECK(t.find("skipped") != std::string::npos);
  CHECK(t.find("error in: port_in") != std::string::npos);
  CHECK(t.find("limit-exceeded") != std::string::npos);
  CHECK(t.find("not concluded") != std::string::npos);
  CHECK(t.find(sample_report().deduction.summary) != std::string::npos);
}

TEST_CASE("malformed proof logs are rejected") {
  CHECK_THROWS_AS(report_from_jsonl(""), std::runtime_error);
  CHECK_THROWS_AS(report_from_jsonl(R"({"record":"rule-application","conclusion":"schedulable","summary":"x"})"),
                  std::runtime_error);  // header missing
  CHECK_THROWS_AS(
      report_from_jsonl(
          R"({"record":"header","format":"other","version":1,"system":"s","quantum-den":10,"seconds":0})"),
      std::runtime_error);
  CHECK_THROWS_AS(
      report_from_jsonl(
          R"({"record":"header","format":"dima-report","version":99,"system":"s","quantum-den":10,"seconds":0})"),
      std::runtime_error);
  std::string orphan =
      R"({"record":"header","format":"dima-report","version":1,"system":"s","quantum-den":10,"seconds":0})"
      "\n"
      R"({"record":"obligation-check","partition":"P9","verdict":"safe","skipped-reason":"","limit-reason":"","explored":0,"seconds":0,"error-components":[],"trace":[]})";
  CHECK_THROWS_AS(report_from_jsonl(orphan), std::runtime_error);
}
