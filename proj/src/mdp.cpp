#include "lrcast/mdp.hpp"

#include <stdexcept>
#include <string>

namespace lrcast::mdp {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::ServeMost: return "serve-most";
    case Action::NoDecision: return "no-decision";
    case Action::ServeLeast: return "serve-least";
  }
  return "?";
}

std::string_view to_string(DecisionClass c) {
  switch (c) {
    case DecisionClass::CaseA: return "A";
    case DecisionClass::CaseB: return "B";
    case DecisionClass::CaseC: return "C";
    case DecisionClass::CaseD: return "D";
    case DecisionClass::CaseE: return "E";
    case DecisionClass::Terminal: return "terminal";
  }
  return "?";
}

void TransitionDistribution::add(State next, double probability) {
  if (probability <= 0.0) return;
  if (size_ == entries_.size()) throw std::logic_error("transition distribution overflow");
  entries_[size_++] = {next, probability};
}

double TransitionDistribution::self_loop(State from) const {
  for (const auto& t : entries())
    if (t.next == from) return t.probability;
  return 0.0;
}

double TransitionDistribution::total() const {
  double sum = 0.0;
  for (const auto& t : entries()) sum += t.probability;
  return sum;
}

bool is_valid(State s, const SystemConfig& config) {
  const int f = config.file_size();
  return s.x0 >= 0 && s.x0 <= f && s.x1 >= 0 && s.x1 <= f;
}

DecisionClass classify(State s, const SystemConfig& config) {
  if (!is_valid(s, config))
    throw std::out_of_range("state (" + std::to_string(s.x0) + "," + std::to_string(s.x1) +
                            ") outside the state space");
  const int f = config.file_size();
  if (s.x0 == f && s.x1 == f) return DecisionClass::Terminal;
  if (s.x1 == f) return DecisionClass::CaseD;
  if (s.x0 == f) return DecisionClass::CaseE;
  const int h0 = batch_id(s.x0, config);
  const int h1 = batch_id(s.x1, config);
  if (h0 == h1) return DecisionClass::CaseA;
  return h0 < h1 ? DecisionClass::CaseB : DecisionClass::CaseC;
}

bool is_decision_state(State s, const SystemConfig& config) {
  const auto c = classify(s, config);
  return c == DecisionClass::CaseB || c == DecisionClass::CaseC;
}

std::vector<Action> legal_actions(State s, const SystemConfig& config) {
  if (is_decision_state(s, config)) return {Action::ServeLeast, Action::ServeMost};
  return {Action::NoDecision};
}

bool is_legal(State s, Action a, const SystemConfig& config) {
  return is_decision_state(s, config) ? a != Action::NoDecision : a == Action::NoDecision;
}

double reward(State s, const SystemConfig& config) {
  return classify(s, config) == DecisionClass::Terminal ? 0.0 : 1.0;
}

TransitionDistribution transitions(State s, Action a, const SystemConfig& config) {
  const auto cls = classify(s, config);
  if (cls == DecisionClass::Terminal)
    throw std::invalid_argument("terminal state has no transitions");
  if (!is_legal(s, a, config))
    throw std::invalid_argument(std::string("action ") + std::string(to_string(a)) +
                                " is illegal in case " + std::string(to_string(cls)));

  const double p = config.p();
  const double q = config.q();
  const State adv0{s.x0 + 1, s.x1};
  const State adv1{s.x0, s.x1 + 1};

  TransitionDistribution d;
  switch (cls) {
    case DecisionClass::CaseA:
      d.add({s.x0 + 1, s.x1 + 1}, p * p);
      d.add(adv0, p * q);
      d.add(adv1, q * p);
      d.add(s, q * q);
      break;
    case DecisionClass::CaseB:
    case DecisionClass::CaseC: {
      // The preferred receiver advances whenever it is ON; the other one only
      // when it alone is ON.
      const bool lagging_is_0 = cls == DecisionClass::CaseB;
      const bool prefer_0 = (a == Action::ServeLeast) == lagging_is_0;
      if (prefer_0) {
        d.add(adv0, p);
        d.add(adv1, q * p);
      } else {
        d.add(adv1, p);
        d.add(adv0, q * p);
      }
      d.add(s, q * q);
      break;
    }
    case DecisionClass::CaseD:
      d.add(adv0, p);
      d.add(s, q);
      break;
    case DecisionClass::CaseE:
      d.add(adv1, p);
      d.add(s, q);
      break;
    case DecisionClass::Terminal:
      break;
  }
  return d;
}

std::vector<State> decision_states(const SystemConfig& config) {
  std::vector<State> out;
  const int f = config.file_size();
  for (int x0 = 0; x0 < f; ++x0)
    for (int x1 = 0; x1 < f; ++x1)
      if (batch_id(x0, config) != batch_id(x1, config)) out.push_back({x0, x1});
  return out;
}

}  // namespace lrcast::mdp
