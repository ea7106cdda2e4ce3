#include "lrcast/dp.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace lrcast;
using namespace lrcast::dp;

TEST_CASE("single packet file") {
  const auto c = validate_config(1, 1, 2, 0.5);
  const auto sol = solve_optimal(c);
  CHECK(sol.values.at(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.values.at(1, 1) == 0.0);
  CHECK(sol.values.at(0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(ValueTable::gamma() == 1.0);
}

TEST_CASE("edge of the table is the single-receiver geometric sum") {
  const auto c = validate_config(12, 4, 2, 0.5);
  const auto sol = solve_optimal(c);
  for (int x0 = 0; x0 <= 12; ++x0) CHECK(std::abs(sol.values.at(x0, 12) - 2.0 * (12 - x0)) < 1e-9);
  CHECK(sol.values.at(10, 12) == 4.0);
}

TEST_CASE("F=2 K=1 matches the dense linear solve, frozen exact values") {
  const auto c = validate_config(2, 1, 2, 0.5);
  const auto sol = solve_optimal(c);

  // Exact rationals from an offline symbolic solve of the same chain.
  const double frozen[3][3] = {{140.0 / 27, 40.0 / 9, 4.0}, {40.0 / 9, 8.0 / 3, 2.0}, {4.0, 2.0, 0.0}};
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) CHECK(std::abs(sol.values.at(a, b) - frozen[a][b]) < 1e-12);

  // Optimal table = entrywise minimum over the 4 deterministic policies.
  std::vector<double> best(9, 1e300);
  for (int mask = 0; mask < 4; ++mask) {
    const auto v = oracle::chain_values(2, 1, 0.5, [mask](int a, int b) {
      const int bit = (a == 0 && b == 1) ? 0 : 1;
      return ((mask >> bit) & 1) == 0;
    });
    for (std::size_t i = 0; i < 9; ++i) best[i] = std::min(best[i], v[i]);
  }
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) CHECK(std::abs(sol.values.at(a, b) - best[a * 3 + b]) < 1e-12);
}

TEST_CASE("evaluate_policy agrees with the dense chain solve for arbitrary policies") {
  for (auto [f, k, p] : {std::tuple{4, 2, 0.5}, {6, 2, 0.3}, {6, 3, 0.8}, {5, 1, 0.6}}) {
    const auto c = validate_config(f, k, 2, p);
    const auto states = mdp::decision_states(c);
    for (std::uint64_t mask : {0ULL, 1ULL, 0x5ULL, 0xFFULL, 0x1234ULL}) {
      mask &= (std::uint64_t{1} << std::min<std::size_t>(states.size(), 63)) - 1;
      const auto table = policy_from_mask(c, mask);
      const auto ours = evaluate_policy(c, table);
      const auto ref = oracle::chain_values(f, k, p, [&](int a, int b) {
        return table.at(a, b) == Action::ServeLeast;
      });
      for (int a = 0; a <= f; ++a)
        for (int b = 0; b <= f; ++b) CHECK(std::abs(ours.at(a, b) - ref[a * (f + 1) + b]) < 1e-9);
    }
  }
}

TEST_CASE("policy evaluation examples") {
  SUBCASE("single batch has no decisions") {
    const auto c = validate_config(6, 6, 2, 0.4);
    const auto opt = solve_optimal(c);
    const auto v = evaluate_policy(c, PolicyTable(6, Action::NoDecision));
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; b <= 6; ++b) CHECK(v.at(a, b) == opt.values.at(a, b));
  }
  SUBCASE("LR reaches the optimum, serve-most does not") {
    const auto c = validate_config(4, 2, 2, 0.5);
    const double opt = solve_optimal(c).values.at(0, 0);
    const double lr = evaluate_policy(c, lr_policy_table(c)).at(0, 0);
    const double most = evaluate_policy(c, constant_policy_table(c, Action::ServeMost)).at(0, 0);
    CHECK(std::abs(lr - opt) < 1e-9);
    CHECK(std::abs(lr - 21400.0 / 2187.0) < 1e-12);
    CHECK(std::abs(most - 23000.0 / 2187.0) < 1e-12);
    CHECK(most > lr);
  }
  SUBCASE("illegal entries are rejected") {
    const auto c = validate_config(4, 2, 2, 0.5);
    auto bad = lr_policy_table(c);
    bad[State{0, 0}] = Action::ServeLeast;
    CHECK_THROWS_AS(evaluate_policy(c, bad), std::invalid_argument);
    auto bad2 = lr_policy_table(c);
    bad2[State{0, 2}] = Action::NoDecision;
    CHECK_THROWS_AS(evaluate_policy(c, bad2), std::invalid_argument);
  }
}

TEST_CASE("lr_policy_table") {
  const auto c6 = validate_config(6, 3, 2, 0.5);
  CHECK(lr_policy_table(c6)[State{1, 4}] == Action::ServeLeast);
  const auto c12 = validate_config(12, 4, 2, 0.5);
  const auto t = lr_policy_table(c12);
  CHECK(t[State{0, 0}] == Action::NoDecision);
  CHECK(t[State{12, 3}] == Action::NoDecision);  // receiver 0 done
  CHECK(t[State{11, 3}] == Action::ServeLeast);
}

TEST_CASE("solver needs exactly two receivers") {
  CHECK_THROWS_AS(solve_optimal(validate_config(4, 2, 3, 0.5)), ConfigError);
  CHECK_THROWS_AS(evaluate_policy(validate_config(4, 2, 1, 0.5), PolicyTable(4)), ConfigError);
}

TEST_CASE("solution invariants over a parameter grid") {
  for (int f : {1, 2, 6, 12, 20})
    for (int k : {1, 2, 4, 5, 20}) {
      if (f % k) continue;
      for (double p : {0.05, 0.3, 0.5, 0.77, 1.0}) {
        const auto c = validate_config(f, k, 2, p);
        const auto sol = solve_optimal(c);
        CHECK(sol.values.at(f, f) == 0.0);
        CHECK(max_balance_residual(c, sol.values, sol.policy) < 1e-9);
        for (int a = 0; a <= f; ++a)
          for (int b = 0; b <= f; ++b) {
            CHECK(std::isfinite(sol.values.at(a, b)));
            CHECK(sol.values.at(a, b) >= 0.0);
            CHECK(std::abs(sol.values.at(a, b) - sol.values.at(b, a)) < 1e-9);
            CHECK(mdp::is_legal({a, b}, sol.policy.at(a, b), c));
          }
        // Dominance over a couple of fixed policies.
        for (auto table : {lr_policy_table(c), constant_policy_table(c, Action::ServeMost)}) {
          const auto v = evaluate_policy(c, table);
          for (int a = 0; a <= f; ++a)
            for (int b = 0; b <= f; ++b) CHECK(sol.values.at(a, b) <= v.at(a, b) + 1e-9);
        }
      }
    }
}

TEST_CASE("perfect channel is deterministic") {
  const auto c = validate_config(8, 2, 2, 1.0);
  const auto sol = solve_optimal(c);
  CHECK(sol.values.at(0, 0) == 8.0);
  CHECK(sol.values.at(3, 8) == 5.0);
  // Each slot serves one batch, so the gap between receivers costs extra slots.
  CHECK(sol.values.at(0, 4) == 8.0);
}

TEST_CASE("check_lr_optimality") {
  for (double p : {0.1, 0.3, 0.5, 0.6, 0.9}) {
    const auto r = check_lr_optimality(validate_config(12, 4, 2, p));
    CHECK(r.optimal);
    CHECK(r.violations.empty());
    CHECK(r.decision_states == 96);
  }
  const auto vacuous = check_lr_optimality(validate_config(12, 12, 2, 0.5));
  CHECK(vacuous.optimal);
  CHECK(vacuous.decision_states == 0);
}

TEST_CASE("audit_inequalities") {
  SUBCASE("default configuration") {
    const auto r = audit_inequalities(validate_config(12, 4, 2, 0.5));
    CHECK(r.passed());
    for (const auto& c : r.checks) {
      INFO(c.name);
      CHECK(c.violations == 0);
    }
    CHECK(r.find("edge-closed-form").examined == 13);
    CHECK(r.find("corner-sandwich").examined == 2);
    CHECK(r.find("action-gap-sign").examined == 96);
    CHECK(r.find("neighbour-induction").examined > 0);
    CHECK(r.find("last-row-decisions").examined == 8);
    CHECK_THROWS_AS(r.find("nope"), std::out_of_range);
  }
  SUBCASE("other grid points") {
    CHECK(audit_inequalities(validate_config(8, 2, 2, 0.8)).passed());
    CHECK(audit_inequalities(validate_config(30, 5, 2, 0.2)).passed());
  }
  SUBCASE("perfect channel turns some strict families into ties") {
    const auto c = validate_config(9, 3, 2, 1.0);
    const auto r = audit_inequalities(c);
    for (const auto& check : r.checks) {
      INFO(check.name);
      CHECK(check.worst_margin >= 0.0);
    }
    CHECK(r.find("column-decrease").violations > 0);
    CHECK(r.find("corner-sandwich").violations == 1);
    CHECK(r.find("action-gap-sign").passed());
    CHECK(check_lr_optimality(c).optimal);
  }
  SUBCASE("degenerate sizes examine nothing for out-of-range families") {
    const auto r = audit_inequalities(validate_config(1, 1, 2, 0.5));
    CHECK(r.passed());
    CHECK(r.find("corner-sandwich").examined == 0);
    const auto single = audit_inequalities(validate_config(6, 6, 2, 0.5));
    CHECK(single.passed());
    CHECK(single.find("decision-gap-positive").examined == 0);
  }
}

TEST_CASE("serving the leading receiver is strictly worse somewhere") {
  const auto c = validate_config(8, 2, 2, 0.5);
  const auto most = evaluate_policy(c, constant_policy_table(c, Action::ServeMost));
  const auto lr = evaluate_policy(c, lr_policy_table(c));
  bool some_state_worse = false;
  for (State s : mdp::decision_states(c)) some_state_worse |= most[s] > lr[s] + 1e-9;
  CHECK(some_state_worse);
}

TEST_CASE("enumeration oracle") {
  SUBCASE("F=4 K=2") {
    const auto r = enumerate_policies_oracle(validate_config(4, 2, 2, 0.5));
    CHECK(r.decision_states == 8);
    CHECK(r.policy_count == 256);
    CHECK(r.ranked.size() == 256);
    CHECK(r.lr_optimal);
    CHECK(std::abs(r.best_value - solve_optimal(validate_config(4, 2, 2, 0.5)).values.at(0, 0)) < 1e-9);
    CHECK(r.ranked.front().mask == 0);
    for (std::size_t i = 1; i < r.ranked.size(); ++i) CHECK(r.ranked[i - 1].value <= r.ranked[i].value);
    CHECK(std::abs(r.ranked.back().value - 23000.0 / 2187.0) < 1e-9);
  }
  SUBCASE("F=2 K=1") {
    const auto r = enumerate_policies_oracle(validate_config(2, 1, 2, 0.5));
    CHECK(r.policy_count == 4);
    CHECK(r.lr_optimal);
    CHECK(std::abs(r.best_value - 140.0 / 27.0) < 1e-12);
  }
  SUBCASE("single batch") {
    const auto r = enumerate_policies_oracle(validate_config(5, 5, 2, 0.5));
    CHECK(r.decision_states == 0);
    CHECK(r.policy_count == 1);
    CHECK(r.lr_optimal);
  }
  SUBCASE("cap") {
    CHECK_THROWS_AS(enumerate_policies_oracle(validate_config(100, 2, 2, 0.5)), OracleTooLarge);
    CHECK_THROWS_AS(enumerate_policies_oracle(validate_config(4, 2, 2, 0.5), 255), OracleTooLarge);
    try {
      enumerate_policies_oracle(validate_config(6, 3, 2, 0.5), 16);
    } catch (const OracleTooLarge& e) {
      CHECK(e.decision_states() == 18);
      CHECK(e.cap() == 16);
    }
  }
  SUBCASE("oracle agrees with the solver wherever enumeration is feasible") {
    for (auto [f, k] : {std::pair{2, 1}, {3, 1}, {4, 2}, {6, 3}})
      for (double p : {0.2, 0.5, 0.9}) {
        const auto c = validate_config(f, k, 2, p);
        const auto r = enumerate_policies_oracle(c);
        CHECK(r.lr_optimal);
        CHECK(std::abs(r.best_value - solve_optimal(c).values.at(0, 0)) < 1e-9);
      }
  }
}

TEST_CASE("CSV export") {
  const auto c = validate_config(1, 1, 2, 0.5);
  const auto sol = solve_optimal(c);
  std::ostringstream out;
  write_csv(out, sol.values, sol.policy);
  CHECK(out.str() ==
        "x0,x1,value,action\n"
        "0,0,2.6666666666666665,0\n"
        "0,1,2,0\n"
        "1,0,2,0\n"
        "1,1,0,0\n");

  const auto c2 = validate_config(2, 1, 2, 0.5);
  const auto s2 = solve_optimal(c2);
  std::ostringstream out2;
  write_csv(out2, s2.values, s2.policy);
  CHECK(out2.str().find("\n0,1,4.444444444444444,1\n") != std::string::npos);
}
