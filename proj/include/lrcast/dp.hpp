#pragma once

#include "lrcast/mdp.hpp"
#include "lrcast/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

// Exact solution of the two-receiver MDP. Every transition other than a
// self-loop strictly increases x0 + x1, so one sweep over anti-diagonals in
// decreasing order solves the undiscounted Bellman equations directly.
namespace lrcast::dp {

using mdp::Action;
using mdp::State;

/// Dense (F+1) x (F+1) table indexed by state.
template <typename T>
class StateTable {
public:
  explicit StateTable(int file_size, T init = T{})
      : file_size_(file_size),
        cells_(static_cast<std::size_t>(file_size + 1) * static_cast<std::size_t>(file_size + 1), init) {}

  int file_size() const { return file_size_; }

  T& operator[](State s) { return cells_[index(s)]; }
  const T& operator[](State s) const { return cells_[index(s)]; }
  const T& at(int x0, int x1) const { return cells_[index({x0, x1})]; }

private:
  std::size_t index(State s) const {
    if (s.x0 < 0 || s.x1 < 0 || s.x0 > file_size_ || s.x1 > file_size_)
      throw std::out_of_range("state outside table");
    return static_cast<std::size_t>(s.x0) * static_cast<std::size_t>(file_size_ + 1) +
           static_cast<std::size_t>(s.x1);
  }

  int file_size_;
  std::vector<T> cells_;
};

/// Expected slots until both receivers hold the file. Undiscounted.
class ValueTable : public StateTable<double> {
public:
  using StateTable<double>::StateTable;
  static constexpr double gamma() { return 1.0; }
};

using PolicyTable = StateTable<Action>;

struct Solution {
  ValueTable values;
  PolicyTable policy;
};

/// Optimal values and actions. At decision states ties within `tie_tolerance`
/// go to ServeLeast. Throws ConfigError unless the config has two receivers.
Solution solve_optimal(const SystemConfig& config, double tie_tolerance = 1e-9);

/// Values of a fixed stationary policy. Throws std::invalid_argument when the
/// policy names an illegal action anywhere.
ValueTable evaluate_policy(const SystemConfig& config, const PolicyTable& policy);

/// Least Received: serve the lagging receiver at every decision state.
PolicyTable lr_policy_table(const SystemConfig& config);

/// Same action at every decision state, NoDecision elsewhere.
PolicyTable constant_policy_table(const SystemConfig& config, Action at_decisions);

/// One-step lookahead value of taking `a` at `s`, with the self-loop folded in:
/// (R(s) + sum of non-self successor values) / (1 - P(stay)).
double action_value(const SystemConfig& config, const ValueTable& values, State s, Action a);

/// Largest |V(s) - backup(s, policy(s))| over all states.
double max_balance_residual(const SystemConfig& config, const ValueTable& values,
                            const PolicyTable& policy);

struct LrCheck {
  bool optimal = true;
  std::size_t decision_states = 0;
  std::vector<State> violations;
};

/// LR is optimal iff V(ServeLeast) < V(ServeMost) + tolerance at every
/// decision state of the optimal table.
LrCheck check_lr_optimality(const SystemConfig& config, double tolerance = 1e-9);

struct AuditCheck {
  std::string name;
  std::size_t examined = 0;
  std::size_t violations = 0;
  // Smallest slack seen; positive means the inequality held with room.
  // Equality checks report tolerance minus the largest error.
  double worst_margin = 0.0;

  bool passed() const { return violations == 0; }
};

struct AuditReport {
  std::vector<AuditCheck> checks;

  bool passed() const;
  const AuditCheck& find(const std::string& name) const;
};

/// Numerically verifies the structural facts behind LR optimality over the
/// optimal value table: closed-form edge values, the corner sandwich, the
/// row/column/anti-diagonal monotonicity families, the action-gap identity
/// and the induction step linking neighbouring decision states.
AuditReport audit_inequalities(const SystemConfig& config, double tolerance = 1e-9);

class OracleTooLarge : public std::runtime_error {
public:
  OracleTooLarge(std::size_t decision_states, std::uint64_t cap);
  std::size_t decision_states() const { return decision_states_; }
  std::uint64_t cap() const { return cap_; }

private:
  std::size_t decision_states_;
  std::uint64_t cap_;
};

struct RankedPolicy {
  std::uint64_t mask = 0;  // bit i set: ServeMost at decision_states()[i]
  double value = 0.0;      // V(0,0)
};

struct OracleResult {
  std::size_t decision_states = 0;
  std::uint64_t policy_count = 0;
  double best_value = 0.0;
  PolicyTable best_policy;
  double lr_value = 0.0;
  bool lr_optimal = false;
  std::vector<RankedPolicy> ranked;  // ascending value, then mask
};

inline constexpr std::uint64_t kDefaultPolicyCap = std::uint64_t{1} << 20;

/// Brute force over every deterministic stationary policy. Independent of
/// solve_optimal: each candidate is scored with evaluate_policy only.
OracleResult enumerate_policies_oracle(const SystemConfig& config,
                                       std::uint64_t cap = kDefaultPolicyCap,
                                       double tolerance = 1e-9);

PolicyTable policy_from_mask(const SystemConfig& config, std::uint64_t mask);

/// `x0,x1,value,action` rows in lexicographic state order.
void write_csv(std::ostream& out, const ValueTable& values, const PolicyTable& policy);

}  // namespace lrcast::dp
