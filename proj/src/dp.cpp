#include "lrcast/dp.hpp"

#include "lrcast/format.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

namespace lrcast::dp {

namespace {

void require_two_receivers(const SystemConfig& config) {
  if (config.receivers() != 2)
    throw ConfigError("the MDP covers exactly 2 receivers, got " +
                      std::to_string(config.receivers()));
}

// Visits every state in decreasing x0 + x1, so all non-self successors of a
// state are visited before it.
template <typename Fn>
void backward_sweep(int file_size, Fn&& visit) {
  for (int sum = 2 * file_size; sum >= 0; --sum) {
    const int lo = std::max(0, sum - file_size);
    const int hi = std::min(file_size, sum);
    for (int x0 = lo; x0 <= hi; ++x0) visit(State{x0, sum - x0});
  }
}

// Coordinates of a decision state relative to its lagging receiver.
struct Oriented {
  State s;
  bool lagging_is_0;

  // State after the lagging (resp. leading) receiver gains `dl` (resp. `dm`).
  State shifted(int dl, int dm) const {
    return lagging_is_0 ? State{s.x0 + dl, s.x1 + dm} : State{s.x0 + dm, s.x1 + dl};
  }
};

Oriented orient(State s) { return {s, s.x0 < s.x1}; }

class CheckAccumulator {
public:
  CheckAccumulator(std::string name, double tolerance) : tolerance_(tolerance) {
    check_.name = std::move(name);
    check_.worst_margin = std::numeric_limits<double>::infinity();
  }

  // lhs < rhs
  void strictly_less(double lhs, double rhs) { record(rhs - lhs, rhs - lhs > 0.0); }

  void equal(double actual, double expected) {
    const double scale = std::max(1.0, std::abs(expected));
    const double slack = tolerance_ * scale - std::abs(actual - expected);
    record(slack, slack >= 0.0);
  }

  void holds(bool ok, double margin) { record(margin, ok); }

  AuditCheck finish() {
    if (check_.examined == 0) check_.worst_margin = 0.0;
    return check_;
  }

private:
  void record(double margin, bool ok) {
    ++check_.examined;
    if (!ok) ++check_.violations;
    check_.worst_margin = std::min(check_.worst_margin, margin);
  }

  double tolerance_;
  AuditCheck check_;
};

}  // namespace

double action_value(const SystemConfig& config, const ValueTable& values, State s, Action a) {
  if (mdp::classify(s, config) == mdp::DecisionClass::Terminal) return 0.0;
  const auto dist = mdp::transitions(s, a, config);
  double acc = mdp::reward(s, config);
  double stay = 0.0;
  for (const auto& t : dist.entries()) {
    if (t.next == s)
      stay = t.probability;
    else
      acc += t.probability * values[t.next];
  }
  return acc / (1.0 - stay);
}

Solution solve_optimal(const SystemConfig& config, double tie_tolerance) {
  require_two_receivers(config);
  const int f = config.file_size();
  Solution sol{ValueTable(f), PolicyTable(f, Action::NoDecision)};

  backward_sweep(f, [&](State s) {
    if (mdp::classify(s, config) == mdp::DecisionClass::Terminal) {
      sol.values[s] = 0.0;
      return;
    }
    if (!mdp::is_decision_state(s, config)) {
      sol.values[s] = action_value(config, sol.values, s, Action::NoDecision);
      return;
    }
    const double least = action_value(config, sol.values, s, Action::ServeLeast);
    const double most = action_value(config, sol.values, s, Action::ServeMost);
    if (least <= most + tie_tolerance) {
      sol.values[s] = std::min(least, most);
      sol.policy[s] = Action::ServeLeast;
    } else {
      sol.values[s] = most;
      sol.policy[s] = Action::ServeMost;
    }
  });
  return sol;
}

ValueTable evaluate_policy(const SystemConfig& config, const PolicyTable& policy) {
  require_two_receivers(config);
  const int f = config.file_size();
  if (policy.file_size() != f) throw std::invalid_argument("policy table size mismatch");
  ValueTable values(f);
  backward_sweep(f, [&](State s) {
    const Action a = policy[s];
    if (!mdp::is_legal(s, a, config))
      throw std::invalid_argument("policy action " + std::string(mdp::to_string(a)) +
                                  " illegal at (" + std::to_string(s.x0) + "," +
                                  std::to_string(s.x1) + ")");
    values[s] = action_value(config, values, s, a);
  });
  return values;
}

PolicyTable constant_policy_table(const SystemConfig& config, Action at_decisions) {
  if (at_decisions == Action::NoDecision)
    throw std::invalid_argument("decision states need ServeLeast or ServeMost");
  PolicyTable table(config.file_size(), Action::NoDecision);
  for (State s : mdp::decision_states(config)) table[s] = at_decisions;
  return table;
}

PolicyTable lr_policy_table(const SystemConfig& config) {
  return constant_policy_table(config, Action::ServeLeast);
}

double max_balance_residual(const SystemConfig& config, const ValueTable& values,
                            const PolicyTable& policy) {
  double worst = 0.0;
  backward_sweep(config.file_size(), [&](State s) {
    worst = std::max(worst, std::abs(values[s] - action_value(config, values, s, policy[s])));
  });
  return worst;
}

LrCheck check_lr_optimality(const SystemConfig& config, double tolerance) {
  const auto sol = solve_optimal(config, tolerance);
  LrCheck out;
  for (State s : mdp::decision_states(config)) {
    ++out.decision_states;
    const double least = action_value(config, sol.values, s, Action::ServeLeast);
    const double most = action_value(config, sol.values, s, Action::ServeMost);
    if (!(least < most + tolerance)) out.violations.push_back(s);
  }
  out.optimal = out.violations.empty();
  return out;
}

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed(); });
}

const AuditCheck& AuditReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no audit check named " + name);
}

AuditReport audit_inequalities(const SystemConfig& config, double tolerance) {
  const auto sol = solve_optimal(config, tolerance);
  const auto& v = sol.values;
  const int f = config.file_size();
  const int k = config.window();
  const int bk = config.last_batch() * k;
  const double p = config.p();
  const double q = config.q();

  AuditReport report;
  auto run = [&](const std::string& name, auto&& body) {
    CheckAccumulator acc(name, tolerance);
    body(acc);
    report.checks.push_back(acc.finish());
  };
  auto V = [&](int x0, int x1) { return v.at(x0, x1); };
  auto gap_most_minus_least = [&](State s) {
    return action_value(config, v, s, Action::ServeMost) -
           action_value(config, v, s, Action::ServeLeast);
  };

  run("balance-residual", [&](CheckAccumulator& acc) {
    backward_sweep(f, [&](State s) {
      acc.equal(action_value(config, v, s, sol.policy[s]), v[s]);
    });
  });

  run("symmetry", [&](CheckAccumulator& acc) {
    for (int x0 = 0; x0 <= f; ++x0)
      for (int x1 = x0 + 1; x1 <= f; ++x1) acc.equal(V(x0, x1), V(x1, x0));
  });

  run("edge-closed-form", [&](CheckAccumulator& acc) {
    for (int x0 = 0; x0 <= f; ++x0) acc.equal(V(x0, f), (f - x0) / p);
  });

  run("corner-closed-form", [&](CheckAccumulator& acc) {
    acc.equal(V(f - 1, f - 1), (1.0 + 2.0 * q) / (1.0 - q * q));
  });

  run("corner-sandwich", [&](CheckAccumulator& acc) {
    if (f < 2) return;
    acc.strictly_less(V(f - 1, f), V(f - 1, f - 1));
    acc.strictly_less(V(f - 1, f - 1), V(f - 2, f));
  });

  // Row/column/anti-diagonal families over the last batch ...
  run("last-batch-row-decrease", [&](CheckAccumulator& acc) {
    for (int x0 = bk; x0 <= f - 1; ++x0)
      for (int x1 = std::max(bk + 1, x0 + 1); x1 <= f; ++x1) acc.strictly_less(V(x0 + 1, x1), V(x0, x1));
  });
  run("last-batch-column-decrease", [&](CheckAccumulator& acc) {
    for (int x0 = bk; x0 <= f - 1; ++x0)
      for (int x1 = std::max(bk + 1, x0 + 1); x1 <= f; ++x1) acc.strictly_less(V(x0, x1), V(x0, x1 - 1));
  });
  run("last-batch-imbalance", [&](CheckAccumulator& acc) {
    for (int x0 = bk + 1; x0 <= f - 1; ++x0)
      for (int x1 = std::max(bk + 1, x0 + 1); x1 <= f - 1; ++x1)
        acc.strictly_less(V(x0, x1), V(x0 - 1, x1 + 1));
    if (bk >= 1 && bk <= f - 2) acc.strictly_less(V(bk, f - 1), V(bk - 1, f));
  });

  // ... and their extension to every row below the diagonal.
  run("row-decrease", [&](CheckAccumulator& acc) {
    for (int x0 = 0; x0 <= f - 1; ++x0)
      for (int x1 = std::max(bk + 1, x0 + 1); x1 <= f; ++x1) acc.strictly_less(V(x0 + 1, x1), V(x0, x1));
  });
  run("column-decrease", [&](CheckAccumulator& acc) {
    for (int x0 = 0; x0 <= f - 1; ++x0)
      for (int x1 = std::max(bk + 1, x0 + 1); x1 <= f; ++x1) acc.strictly_less(V(x0, x1), V(x0, x1 - 1));
  });
  run("imbalance", [&](CheckAccumulator& acc) {
    for (int x0 = 1; x0 <= f - 1; ++x0)
      for (int x1 = std::max(bk, x0 + 1); x1 <= f - 1; ++x1) acc.strictly_less(V(x0, x1), V(x0 - 1, x1 + 1));
  });

  // Leading receiver one short of the file, lagging one in an earlier batch.
  run("last-row-decisions", [&](CheckAccumulator& acc) {
    if (config.last_batch() < 1) return;
    for (int x0 = 0; x0 <= bk - 1; ++x0) {
      const double gap = gap_most_minus_least({x0, f - 1});
      acc.holds(gap > 0.0, gap);
    }
  });

  // Lagging receiver one short of the final batch, leading one inside it.
  run("boundary-column-decisions", [&](CheckAccumulator& acc) {
    if (config.last_batch() < 1) return;
    const int x0 = bk - 1;
    for (int x1 = std::max(0, bk - k); x1 <= f - 2; ++x1) {
      if (!mdp::is_decision_state({x0, x1}, config)) continue;
      const double gap = gap_most_minus_least({x0, x1});
      acc.holds(gap > 0.0, gap);
    }
  });

  run("decision-gap-positive", [&](CheckAccumulator& acc) {
    for (State s : mdp::decision_states(config)) {
      const double gap = gap_most_minus_least(s);
      acc.holds(gap > 0.0, gap);
    }
  });

  // V(-1) - V(1) = p(1-q)/(1-q^2) * (V(lagging, leading+1) - V(lagging+1, leading)),
  // so the action gap and the state gap must share a sign.
  run("action-gap-sign", [&](CheckAccumulator& acc) {
    const double factor = p * (1.0 - q) / (1.0 - q * q);
    auto sign = [&](double x) { return std::abs(x) <= tolerance ? 0 : (x > 0 ? 1 : -1); };
    for (State s : mdp::decision_states(config)) {
      const auto o = orient(s);
      const double action_gap = gap_most_minus_least(s);
      const double state_gap = v[o.shifted(0, 1)] - v[o.shifted(1, 0)];
      const double identity_err = std::abs(action_gap - factor * state_gap);
      const bool ok = sign(action_gap) == sign(state_gap) &&
                      identity_err <= tolerance * std::max(1.0, std::abs(action_gap));
      acc.holds(ok, ok ? tolerance - identity_err : -identity_err - std::abs(action_gap));
    }
  });

  // If LR wins at both lower-right neighbours it wins here.
  run("neighbour-induction", [&](CheckAccumulator& acc) {
    for (State s : mdp::decision_states(config)) {
      const auto o = orient(s);
      const State a = o.shifted(1, 0);
      const State b = o.shifted(0, 1);
      if (!mdp::is_valid(a, config) || !mdp::is_valid(b, config)) continue;
      if (!mdp::is_decision_state(a, config) || !mdp::is_decision_state(b, config)) continue;
      if (!(gap_most_minus_least(a) > 0.0 && gap_most_minus_least(b) > 0.0)) continue;
      const double gap = gap_most_minus_least(s);
      acc.holds(gap > 0.0, gap);
    }
  });

  return report;
}

OracleTooLarge::OracleTooLarge(std::size_t decision_states, std::uint64_t cap)
    : std::runtime_error("exhaustive enumeration needs 2^" + std::to_string(decision_states) +
                         " policies, above the cap of " + std::to_string(cap)),
      decision_states_(decision_states),
      cap_(cap) {}

PolicyTable policy_from_mask(const SystemConfig& config, std::uint64_t mask) {
  PolicyTable table(config.file_size(), Action::NoDecision);
  const auto states = mdp::decision_states(config);
  for (std::size_t i = 0; i < states.size(); ++i)
    table[states[i]] = ((mask >> i) & 1U) ? Action::ServeMost : Action::ServeLeast;
  return table;
}

OracleResult enumerate_policies_oracle(const SystemConfig& config, std::uint64_t cap,
                                       double tolerance) {
  require_two_receivers(config);
  const auto states = mdp::decision_states(config);
  const std::size_t d = states.size();
  if (d >= 63 || (std::uint64_t{1} << d) > cap) throw OracleTooLarge(d, cap);

  const std::uint64_t count = std::uint64_t{1} << d;
  OracleResult out{d, count, 0.0, PolicyTable(config.file_size()), 0.0, false, {}};
  out.ranked.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const auto values = evaluate_policy(config, policy_from_mask(config, mask));
    out.ranked.push_back({mask, values.at(0, 0)});
  }
  std::sort(out.ranked.begin(), out.ranked.end(), [](const RankedPolicy& a, const RankedPolicy& b) {
    return a.value != b.value ? a.value < b.value : a.mask < b.mask;
  });

  out.best_value = out.ranked.front().value;
  out.best_policy = policy_from_mask(config, out.ranked.front().mask);
  // mask 0 is ServeLeast everywhere.
  out.lr_value = evaluate_policy(config, policy_from_mask(config, 0)).at(0, 0);
  out.lr_optimal = std::abs(out.lr_value - out.best_value) <= tolerance;
  return out;
}

void write_csv(std::ostream& out, const ValueTable& values, const PolicyTable& policy) {
  const int f = values.file_size();
  out << "x0,x1,value,action\n";
  for (int x0 = 0; x0 <= f; ++x0)
    for (int x1 = 0; x1 <= f; ++x1)
      out << x0 << ',' << x1 << ',' << format_real(values.at(x0, x1)) << ','
          << static_cast<int>(policy.at(x0, x1)) << '\n';
}

}  // namespace lrcast::dp
