#include "dima/safety.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>

namespace dima {

StateStore::StateStore(size_t width) : width_(width) {
  table_.assign(1 << 16, -1);
}

std::uint64_t StateStore::hash_at(const std::int32_t* p) const {
  std::uint64_t h = 1469598103934665603ull;
  for (size_t i = 0; i < width_; ++i) {
    h ^= static_cast<std::uint32_t>(p[i]);
    h *= 1099511628211ull;
  }
  return h;
}

bool StateStore::grow() {
  std::vector<std::int64_t> bigger(table_.size() * 2, -1);
  const std::uint64_t mask = bigger.size() - 1;
  for (std::int64_t id : table_) {
    if (id < 0) continue;
    std::uint64_t slot = hash_at(arena_.data() + static_cast<size_t>(id) * width_) & mask;
    while (bigger[slot] >= 0) slot = (slot + 1) & mask;
    bigger[slot] = id;
  }
  table_ = std::move(bigger);
  return true;
}

std::pair<std::int64_t, bool> StateStore::intern(const State& s) {
  if (count_ * 10 >= static_cast<std::int64_t>(table_.size()) * 7) grow();
  const std::uint64_t mask = table_.size() - 1;
  std::uint64_t slot = hash_at(s.data()) & mask;
  while (table_[slot] >= 0) {
    const std::int32_t* p = arena_.data() + static_cast<size_t>(table_[slot]) * width_;
    if (std::memcmp(p, s.data(), width_ * sizeof(std::int32_t)) == 0) return {table_[slot], false};
    slot = (slot + 1) & mask;
  }
  arena_.insert(arena_.end(), s.begin(), s.end());
  table_[slot] = count_;
  return {count_++, true};
}

void StateStore::fetch(std::int64_t id, State& out) const {
  const std::int32_t* p = arena_.data() + static_cast<size_t>(id) * width_;
  out.assign(p, p + width_);
}

SafetyResult check_safety(const System& ts, const SafetyLimits& lim) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  SafetyResult res;
  StateStore store(ts.width());
  std::vector<std::int64_t> parent;
  std::vector<Label> via;

  auto finish_unsafe = [&](std::int64_t err_id) {
    res.verdict = SafetyVerdict::Unsafe;
    std::vector<std::int64_t> chain;
    for (std::int64_t id = err_id; id > 0; id = parent[static_cast<size_t>(id)]) chain.push_back(id);
    std::reverse(chain.begin(), chain.end());
    res.trace.reserve(chain.size());
    for (std::int64_t id : chain) {
      Step st;
      st.label = via[static_cast<size_t>(id)];
      store.fetch(id, st.state);
      res.trace.push_back(std::move(st));
    }
  };

  store.intern(ts.initial());
  parent.push_back(-1);
  via.push_back({});
  if (ts.is_error(ts.initial())) {
    res.verdict = SafetyVerdict::Unsafe;
    res.explored = 1;
    res.seconds = elapsed();
    return res;
  }

  std::vector<std::int64_t> queue{0};
  size_t head = 0;
  std::vector<Step> succ;
  State cur;
  int tick = 0;

  while (head < queue.size()) {
    if (++tick == 4096) {
      tick = 0;
      if (elapsed() > lim.max_seconds) {
        res.verdict = SafetyVerdict::LimitExceeded;
        res.limit_reason = "time limit exceeded";
        break;
      }
    }
    std::int64_t id = queue[head++];
    store.fetch(id, cur);
    ts.successors(cur, succ);
    bool done = false;
    for (auto& st : succ) {
      if (lim.closed && st.label.kind == Label::Kind::Input) continue;
      auto [nid, fresh] = store.intern(st.state);
      if (!fresh) continue;
      parent.push_back(id);
      via.push_back(st.label);
      if (ts.is_error(st.state)) {
        finish_unsafe(nid);
        done = true;
        break;
      }
      queue.push_back(nid);
      if (store.size() >= lim.max_states) {
        res.verdict = SafetyVerdict::LimitExceeded;
        res.limit_reason = "state limit exceeded";
        done = true;
        break;
      }
    }
    if (done) break;
  }

  res.explored = store.size();
  res.seconds = elapsed();
  return res;
}

bool replay_trace(const System& ts, const SafetyResult& r) {
  if (r.verdict != SafetyVerdict::Unsafe) return false;
  State cur = ts.initial();
  if (r.trace.empty()) return ts.is_error(cur);
  std::vector<Step> succ;
  for (const auto& step : r.trace) {
    ts.successors(cur, succ);
    bool matched = false;
    for (const auto& st : succ) {
      if (st.label == step.label && st.state == step.state) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
    cur = step.state;
  }
  return ts.is_error(cur);
}

}  // namespace dima
