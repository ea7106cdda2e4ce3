#pragma once

#include "lrcast/rng.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

// Batch selection for N receivers. A scheduler sees only receivers that are
// ON this slot and still missing packets; policies differ only at conflict
// slots, where those receivers expect different batches.
namespace lrcast::policies {

enum class PolicyKind { LR, RRNC, RS };

std::string_view to_string(PolicyKind kind);
/// Accepts the CLI spellings `lr`, `rrnc`, `rs`.
std::optional<PolicyKind> parse_policy(std::string_view name);

struct Eligible {
  int receiver = 0;
  int batch = 0;
};

struct SchedulerInput {
  std::vector<Eligible> eligible;
  std::uint64_t slot = 0;
};

bool is_conflict_slot(const SchedulerInput& input);

/// Smallest eligible batch id.
std::optional<int> lr_select(const SchedulerInput& input);

/// Per-trial scheduler state. The round-robin pointer is only touched at
/// conflict slots; the random stream is only consumed at conflict slots.
class Scheduler {
public:
  Scheduler(PolicyKind kind, std::uint64_t seed);

  PolicyKind kind() const { return kind_; }
  std::optional<int> rr_last() const { return rr_last_; }

  /// Dispatches to the policy's selection rule.
  std::optional<int> select(const SchedulerInput& input);

  std::optional<int> rrnc_select(const SchedulerInput& input);
  std::optional<int> rs_select(const SchedulerInput& input);

private:
  PolicyKind kind_;
  std::optional<int> rr_last_;
  Engine engine_;
};

}  // namespace lrcast::policies
