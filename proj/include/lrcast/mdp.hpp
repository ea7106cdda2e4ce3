#pragma once

#include "lrcast/model.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Two-receiver scheduling MDP. A state is the pair of received-packet counts;
// at states where the receivers expect different batches the base station
// decides whether to favour the lagging or the leading receiver.
namespace lrcast::mdp {

struct State {
  int x0 = 0;
  int x1 = 0;

  auto operator<=>(const State&) const = default;
  State swapped() const { return {x1, x0}; }
};

enum class Action : int {
  ServeMost = -1,
  NoDecision = 0,
  ServeLeast = 1,
};

enum class DecisionClass {
  CaseA,     // same batch, both incomplete
  CaseB,     // receiver 0 behind by at least one batch
  CaseC,     // receiver 1 behind by at least one batch
  CaseD,     // receiver 1 done
  CaseE,     // receiver 0 done
  Terminal,  // both done
};

std::string_view to_string(Action a);
std::string_view to_string(DecisionClass c);

struct Transition {
  State next;
  double probability = 0.0;
};

/// Sparse successor distribution with at most four entries. Zero-probability
/// successors are never stored.
class TransitionDistribution {
public:
  void add(State next, double probability);

  std::span<const Transition> entries() const { return {entries_.data(), size_}; }
  std::size_t size() const { return size_; }

  /// Probability of staying in `from` (0 when no self-loop entry exists).
  double self_loop(State from) const;
  double total() const;

private:
  std::array<Transition, 4> entries_{};
  std::size_t size_ = 0;
};

bool is_valid(State s, const SystemConfig& config);
DecisionClass classify(State s, const SystemConfig& config);
bool is_decision_state(State s, const SystemConfig& config);
std::vector<Action> legal_actions(State s, const SystemConfig& config);
bool is_legal(State s, Action a, const SystemConfig& config);

/// One slot of delay everywhere except the absorbing state.
double reward(State s, const SystemConfig& config);

/// Successor distribution for action `a` at `s`. Throws std::invalid_argument
/// for the terminal state or an action that is illegal at `s`.
TransitionDistribution transitions(State s, Action a, const SystemConfig& config);

/// All states with a real choice, in lexicographic (x0, x1) order.
std::vector<State> decision_states(const SystemConfig& config);

}  // namespace lrcast::mdp
