#include "lrcast/policies.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace lrcast::policies {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::LR: return "lr";
    case PolicyKind::RRNC: return "rrnc";
    case PolicyKind::RS: return "rs";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  if (name == "lr") return PolicyKind::LR;
  if (name == "rrnc") return PolicyKind::RRNC;
  if (name == "rs") return PolicyKind::RS;
  return std::nullopt;
}

bool is_conflict_slot(const SchedulerInput& input) {
  const auto& e = input.eligible;
  if (e.empty()) return false;
  return std::any_of(e.begin(), e.end(), [&](const Eligible& r) { return r.batch != e.front().batch; });
}

std::optional<int> lr_select(const SchedulerInput& input) {
  if (input.eligible.empty()) return std::nullopt;
  return std::min_element(input.eligible.begin(), input.eligible.end(),
                          [](const Eligible& a, const Eligible& b) { return a.batch < b.batch; })
      ->batch;
}

Scheduler::Scheduler(PolicyKind kind, std::uint64_t seed) : kind_(kind), engine_(seed) {}

std::optional<int> Scheduler::select(const SchedulerInput& input) {
  switch (kind_) {
    case PolicyKind::LR: return lr_select(input);
    case PolicyKind::RRNC: return rrnc_select(input);
    case PolicyKind::RS: return rs_select(input);
  }
  throw std::logic_error("unknown policy kind");
}

std::optional<int> Scheduler::rrnc_select(const SchedulerInput& input) {
  const auto& e = input.eligible;
  if (e.empty()) return std::nullopt;
  if (!is_conflict_slot(input)) return e.front().batch;

  const Eligible* smallest = nullptr;
  const Eligible* next = nullptr;
  for (const auto& r : e) {
    if (!smallest || r.receiver < smallest->receiver) smallest = &r;
    if (rr_last_ && r.receiver > *rr_last_ && (!next || r.receiver < next->receiver)) next = &r;
  }
  const Eligible* pick = next ? next : smallest;
  rr_last_ = pick->receiver;
  return pick->batch;
}

std::optional<int> Scheduler::rs_select(const SchedulerInput& input) {
  const auto& e = input.eligible;
  if (e.empty()) return std::nullopt;
  if (!is_conflict_slot(input)) return e.front().batch;

  // Inverse CDF over batch ids in increasing order, weight = receivers at that batch.
  std::map<int, int> counts;
  for (const auto& r : e) ++counts[r.batch];
  const double u = uniform01(engine_) * static_cast<double>(e.size());
  double cumulative = 0.0;
  for (const auto& [batch, n] : counts) {
    cumulative += n;
    if (u < cumulative) return batch;
  }
  return counts.rbegin()->first;
}

}  // namespace lrcast::policies
