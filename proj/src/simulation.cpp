#include "dima/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>
#include <unordered_set>

#include "dima/safety.hpp"

namespace dima {

namespace {

// Obligation the abstract side must weakly discharge for one concrete step.
// Encoded small so responses can be memoized per (abstract state, obligation).
struct Obl {
  Weak weak;
  std::int64_t key = 0;
};

Obl classify(const System& concrete, const System& abs, const Label& l,
             const std::vector<int>& act_map) {
  Obl o;
  switch (l.kind) {
    case Label::Kind::Delay:
      o.weak = {Weak::Kind::Delay, Label::Kind::Output, -1, 1};
      o.key = 1;
      return o;
    case Label::Kind::Internal:
      o.weak = {Weak::Kind::Closure, Label::Kind::Output, -1, 0};
      o.key = 0;
      return o;
    case Label::Kind::Input:
    case Label::Kind::Output: {
      int aid = act_map[static_cast<size_t>(l.action)];
      bool visible = false;
      if (aid >= 0) {
        const SysAction& sa = abs.actions()[static_cast<size_t>(aid)];
        visible = (l.kind == Label::Kind::Input) ? sa.comp_in : sa.comp_out;
      }
      if (!visible) {
        o.weak = {Weak::Kind::Closure, Label::Kind::Output, -1, 0};
        o.key = 0;
      } else {
        o.weak = {Weak::Kind::Act, l.kind, aid, 0};
        o.key = 2 + 2 * static_cast<std::int64_t>(aid) + (l.kind == Label::Kind::Input ? 1 : 0);
      }
      return o;
    }
  }
  return o;
}

std::optional<std::string> precondition_error(const System& concrete, const System& abs) {
  auto find_c = [&](const std::string& n) -> const SysAction* {
    int id = concrete.action_id(n);
    return id < 0 ? nullptr : &concrete.actions()[static_cast<size_t>(id)];
  };
  for (const auto& sa : abs.actions()) {
    if (!sa.comp_in && !sa.comp_out) continue;
    const SysAction* ca = find_c(sa.name);
    if (!ca) return "abstract action " + sa.name + " is not in the concrete alphabet";
    if (ca->kind != sa.kind) return "action " + sa.name + " disagrees on unicast/broadcast";
    if (sa.comp_in && !ca->comp_in) return "abstract input " + sa.name + " is not a concrete input";
    if (sa.comp_out && !ca->comp_out) return "abstract output " + sa.name + " is not a concrete output";
  }
  return std::nullopt;
}

struct Group {
  Label label;                     // concrete step this group discharges
  std::vector<std::int64_t> alts;  // alternative successor pairs
  std::int64_t alive = 0;
};

struct PairRec {
  std::int64_t id1 = 0, id2 = 0;
  // 0 = presumed alive, 1 = failed a clause outright, 2 = died by propagation
  int status = 0;
  std::int64_t kill_order = -1;
  std::string fail_clause;
  Label fail_label;
  std::vector<Group> groups;
  std::vector<std::pair<std::int64_t, std::int32_t>> rdeps;  // (parent pair, group index)
};

}  // namespace

SimResult check_simulation(const System& concrete, const System& abs, const SimLimits& lim) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  SimResult res;
  if (auto err = precondition_error(concrete, abs)) {
    res.verdict = SimResult::Verdict::PreconditionViolated;
    res.precondition_error = *err;
    res.seconds = elapsed();
    return res;
  }

  // Concrete action id -> abstract action id (or -1), by name.
  std::vector<int> act_map(concrete.actions().size(), -1);
  for (size_t i = 0; i < concrete.actions().size(); ++i) {
    act_map[i] = abs.action_id(concrete.actions()[i].name);
  }

  StateStore store1(concrete.width()), store2(abs.width());
  std::vector<PairRec> pairs;
  std::unordered_map<std::uint64_t, std::int64_t> pair_id;
  auto pkey = [](std::int64_t a, std::int64_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  };

  // Memoized concrete successor lists and error flags per concrete state.
  struct CSucc {
    bool error = false;
    std::vector<std::pair<Label, std::int64_t>> steps;
  };
  std::unordered_map<std::int64_t, CSucc> csucc;
  State tmp1, tmp2;
  std::vector<Step> scratch;
  auto concrete_info = [&](std::int64_t id1) -> const CSucc& {
    auto it = csucc.find(id1);
    if (it != csucc.end()) return it->second;
    CSucc info;
    store1.fetch(id1, tmp1);
    info.error = concrete.is_error(tmp1);
    concrete.successors(tmp1, scratch);
    info.steps.reserve(scratch.size());
    for (auto& st : scratch) info.steps.push_back({st.label, store1.intern(st.state).first});
    return csucc.emplace(id1, std::move(info)).first->second;
  };

  // Memoized abstract error flags and weak responses per (state, obligation).
  std::unordered_map<std::int64_t, bool> aerr;
  auto abs_error = [&](std::int64_t id2) {
    auto it = aerr.find(id2);
    if (it != aerr.end()) return it->second;
    store2.fetch(id2, tmp2);
    bool e = abs.is_error(tmp2);
    aerr.emplace(id2, e);
    return e;
  };
  const std::int64_t okinds = 2 + 2 * static_cast<std::int64_t>(abs.actions().size());
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> weak_memo;
  auto weak_resp = [&](std::int64_t id2, const Obl& o) -> const std::vector<std::int64_t>& {
    std::int64_t k = id2 * okinds + o.key;
    auto it = weak_memo.find(k);
    if (it != weak_memo.end()) return it->second;
    store2.fetch(id2, tmp2);
    std::vector<std::int64_t> ids;
    for (const auto& s : weak_successors(abs, tmp2, o.weak)) ids.push_back(store2.intern(s).first);
    return weak_memo.emplace(k, std::move(ids)).first->second;
  };

  std::int64_t kill_counter = 0;
  std::vector<std::int64_t> kill_list;
  auto mark_dead = [&](std::int64_t p, int status, std::string clause, Label lbl) {
    PairRec& r = pairs[static_cast<size_t>(p)];
    if (r.status) return;
    r.status = status;
    r.kill_order = kill_counter++;
    r.fail_clause = std::move(clause);
    r.fail_label = lbl;
    kill_list.push_back(p);
  };

  auto intern_pair = [&](std::int64_t id1, std::int64_t id2) -> std::int64_t {
    auto [it, fresh] = pair_id.try_emplace(pkey(id1, id2), static_cast<std::int64_t>(pairs.size()));
    if (fresh) pairs.push_back({id1, id2});
    return it->second;
  };

  std::int64_t root1 = store1.intern(concrete.initial()).first;
  std::int64_t root2 = store2.intern(abs.initial()).first;
  std::int64_t root = intern_pair(root1, root2);

  // Construct the reachable pair graph breadth-first.
  std::int64_t head = 0;
  bool limited = false;
  int tick = 0;
  while (head < static_cast<std::int64_t>(pairs.size())) {
    if (++tick == 1024) {
      tick = 0;
      if (elapsed() > lim.max_seconds) {
        res.limit_reason = "time limit exceeded";
        limited = true;
        break;
      }
    }
    if (static_cast<std::int64_t>(pairs.size()) > lim.max_pairs) {
      res.limit_reason = "pair limit exceeded";
      limited = true;
      break;
    }
    const std::int64_t p = head++;
    const std::int64_t id1 = pairs[static_cast<size_t>(p)].id1;
    const std::int64_t id2 = pairs[static_cast<size_t>(p)].id2;
    const CSucc& info = concrete_info(id1);
    if (info.error && !abs_error(id2)) {
      mark_dead(p, 1, "error-exposure", {});
      continue;
    }
    bool direct_fail = false;
    std::vector<Group> groups;
    groups.reserve(info.steps.size());
    for (const auto& [lbl, nid1] : info.steps) {
      Obl o = classify(concrete, abs, lbl, act_map);
      const auto& resp = weak_resp(id2, o);
      if (resp.empty()) {
        mark_dead(p, 1, "no-weak-response", lbl);
        direct_fail = true;
        break;
      }
      Group g;
      g.label = lbl;
      g.alts.reserve(resp.size());
      for (std::int64_t nid2 : resp) {
        std::int64_t q = intern_pair(nid1, nid2);
        g.alts.push_back(q);
        if (pairs[static_cast<size_t>(q)].status == 0) {
          ++g.alive;
          pairs[static_cast<size_t>(q)].rdeps.push_back({p, static_cast<std::int32_t>(groups.size())});
        }
      }
      if (g.alive == 0) {
        // every alternative is already dead
        Label l = g.label;
        groups.push_back(std::move(g));
        pairs[static_cast<size_t>(p)].groups = std::move(groups);
        mark_dead(p, 2, "no-weak-response", l);
        direct_fail = true;
        break;
      }
      groups.push_back(std::move(g));
    }
    if (!direct_fail) pairs[static_cast<size_t>(p)].groups = std::move(groups);
  }

  res.pairs = static_cast<std::int64_t>(pairs.size());
  if (limited) {
    res.verdict = SimResult::Verdict::LimitExceeded;
    res.seconds = elapsed();
    return res;
  }

  // Propagate deaths: a pair dies when some group runs out of alternatives.
  for (size_t w = 0; w < kill_list.size(); ++w) {
    std::int64_t dead = kill_list[w];
    for (auto [parent, gi] : pairs[static_cast<size_t>(dead)].rdeps) {
      PairRec& pr = pairs[static_cast<size_t>(parent)];
      if (pr.status) continue;
      Group& g = pr.groups[static_cast<size_t>(gi)];
      if (--g.alive == 0) mark_dead(parent, 2, "no-weak-response", g.label);
    }
  }

  if (pairs[static_cast<size_t>(root)].status == 0) {
    res.verdict = SimResult::Verdict::Simulated;
    if (lim.want_witness) {
      for (const auto& r : pairs) {
        if (r.status) continue;
        SimStatePair sp;
        store1.fetch(r.id1, sp.concrete);
        store2.fetch(r.id2, sp.abs);
        res.witness.push_back(std::move(sp));
      }
    }
    res.seconds = elapsed();
    return res;
  }

  // Root is dead: walk the cause chain. From a propagated death follow the
  // emptied group's earliest-dying alternative; kill orders strictly decrease,
  // so the walk ends at an outright clause failure.
  res.verdict = SimResult::Verdict::NotSimulated;
  SimCounterexample cex;
  auto fill_pair = [&](std::int64_t p, SimStatePair& sp) {
    store1.fetch(pairs[static_cast<size_t>(p)].id1, sp.concrete);
    store2.fetch(pairs[static_cast<size_t>(p)].id2, sp.abs);
  };
  fill_pair(root, cex.root);
  std::int64_t cur = root;
  while (pairs[static_cast<size_t>(cur)].status == 2) {
    PairRec& r = pairs[static_cast<size_t>(cur)];
    const Group* cause = nullptr;
    for (const auto& g : r.groups) {
      if (g.alive == 0 && g.label == r.fail_label) {
        cause = &g;
        break;
      }
    }
    if (!cause) {
      for (const auto& g : r.groups) {
        if (g.alive == 0) {
          cause = &g;
          break;
        }
      }
    }
    if (!cause) break;  // defensive; cannot happen
    std::int64_t next = -1, best = -1;
    for (std::int64_t q : cause->alts) {
      const PairRec& qr = pairs[static_cast<size_t>(q)];
      if (qr.status && (next < 0 || qr.kill_order < best)) {
        next = q;
        best = qr.kill_order;
      }
    }
    if (next < 0) break;  // defensive; cannot happen
    SimCounterexample::Hop hop;
    hop.label = cause->label;
    fill_pair(next, hop.pair);
    cex.path.push_back(std::move(hop));
    cur = next;
  }
  cex.clause = pairs[static_cast<size_t>(cur)].fail_clause;
  cex.offending = pairs[static_cast<size_t>(cur)].fail_label;
  res.cex = std::move(cex);
  res.seconds = elapsed();
  return res;
}

bool verify_witness(const System& concrete, const System& abs, const std::vector<SimStatePair>& witness) {
  if (witness.empty()) return false;
  struct PairHash {
    size_t operator()(const SimStatePair& p) const {
      StateHash h;
      return h(p.concrete) * 1000003u ^ h(p.abs);
    }
  };
  std::unordered_set<SimStatePair, PairHash> rel(witness.begin(), witness.end());
  if (!rel.count({concrete.initial(), abs.initial()})) return false;

  std::vector<int> act_map(concrete.actions().size(), -1);
  for (size_t i = 0; i < concrete.actions().size(); ++i) {
    act_map[i] = abs.action_id(concrete.actions()[i].name);
  }

  std::vector<Step> steps;
  for (const auto& pr : witness) {
    if (concrete.is_error(pr.concrete) && !abs.is_error(pr.abs)) return false;
    concrete.successors(pr.concrete, steps);
    for (const auto& st : steps) {
      Obl o = classify(concrete, abs, st.label, act_map);
      bool matched = false;
      for (const auto& s2 : weak_successors(abs, pr.abs, o.weak)) {
        if (rel.count({st.state, s2})) {
          matched = true;
          break;
        }
      }
      if (!matched) return false;
    }
  }
  return true;
}

}  // namespace dima
