#include "bellsim/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace bellsim {

double EventProbabilityMap::at(DetectorPair k) const {
  auto it = probs.find(k);
  return it == probs.end() ? 0.0 : it->second;
}

double EventProbabilityMap::total() const {
  double sum = 0.0;
  for (const auto& [key, p] : probs) sum += p;
  return sum;
}

EventProbabilityMap event_probabilities(const TwoPhotonAmplitudeMap& m) {
  EventProbabilityMap out;
  out.scheme = m.scheme;
  out.state = m.state;
  for (const auto& [key, amp] : m.entries) {
    const double p = (key.diagonal() ? 2.0 : 1.0) * std::norm(amp);
    if (p > 0.0) out.probs[key] = p;
  }
  return out;
}

std::optional<BellState> RuleSet::unique_owner(DetectorPair e) const {
  for (BellState s : kAllBellStates) {
    if (unique_for(s).contains(e)) return s;
  }
  return std::nullopt;
}

RuleSet derive_rules(const std::array<EventProbabilityMap, 4>& maps) {
  RuleSet rules;
  rules.scheme = maps[0].scheme;

  std::set<DetectorPair> all_events;
  for (const auto& m : maps) {
    for (const auto& [key, p] : m.probs) {
      if (p > kEventFloor) all_events.insert(key);
    }
  }

  for (const DetectorPair& e : all_events) {
    std::optional<std::size_t> owner;
    bool shared = false;
    for (std::size_t s = 0; s < 4; ++s) {
      if (maps[s].at(e) > kEventFloor) {
        if (owner) {
          shared = true;
          break;
        }
        owner = s;
      }
    }
    if (owner && !shared) rules.unique_events[*owner].insert(e);
  }

  std::vector<BellState> zero_unique;
  for (BellState s : kAllBellStates) {
    if (rules.unique_for(s).empty()) zero_unique.push_back(s);
  }

  if (zero_unique.size() == 1) {
    rules.elimination_target = zero_unique.front();
    const auto& target_map = maps[static_cast<std::size_t>(zero_unique.front())];
    for (const auto& [key, p] : target_map.probs) {
      if (p > kEventFloor) rules.evidence_events.insert(key);
    }
  } else if (zero_unique.size() >= 2) {
    rules.ambiguous_states = zero_unique;
    // Events that only the ambiguous class can produce identify the class
    // as a whole even though its members stay degenerate.
    auto in_class = [&](BellState s) {
      for (BellState z : zero_unique) {
        if (z == s) return true;
      }
      return false;
    };
    for (const DetectorPair& e : all_events) {
      bool outside = false;
      bool inside = false;
      for (BellState s : kAllBellStates) {
        if (maps[static_cast<std::size_t>(s)].at(e) > kEventFloor) {
          (in_class(s) ? inside : outside) = true;
        }
      }
      if (inside && !outside) rules.ambiguous_class_events.insert(e);
    }
  }
  return rules;
}

PerState single_pair_success(const RuleSet& rules,
                             const std::array<EventProbabilityMap, 4>& maps) {
  PerState s1{};
  for (std::size_t s = 0; s < 4; ++s) {
    double sum = 0.0;
    for (const DetectorPair& e : rules.unique_events[s]) {
      sum += maps[s].at(e);
    }
    s1[s] = sum;
  }
  return s1;
}

PerState multi_pair_success(const PerState& s1, const RuleSet& rules, int n) {
  if (n < 1) throw std::invalid_argument("pair count must be >= 1");

  PerState sn{};
  for (std::size_t s = 0; s < 4; ++s) {
    const BellState state = static_cast<BellState>(s);
    if (!rules.unique_for(state).empty()) {
      sn[s] = 1.0 - std::pow(1.0 - s1[s], n);
    } else {
      sn[s] = s1[s];  // no unique events: extra pairs do not help
    }
  }
  if (rules.elimination_target) {
    const std::size_t t = static_cast<std::size_t>(*rules.elimination_target);
    double missed = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      if (s != t) missed += 1.0 - sn[s];
    }
    sn[t] = 1.0 - missed;
  }
  return sn;
}

int distinguishable_classes(const RuleSet& rules, CapacityRegime regime) {
  int unique_states = 0;
  for (BellState s : kAllBellStates) {
    if (!rules.unique_for(s).empty()) ++unique_states;
  }
  switch (regime) {
    case CapacityRegime::SinglePairDistinguishableClasses: {
      // The ambiguous class counts when a single pair can point at it; an
      // elimination target cannot be confirmed by one pair, so it does not.
      const bool class_identifiable = !rules.ambiguous_states.empty() &&
                                      !rules.ambiguous_class_events.empty();
      return unique_states + (class_identifiable ? 1 : 0);
    }
    case CapacityRegime::AsymptoticAllFour: {
      int classes = unique_states;
      if (rules.elimination_target) ++classes;
      if (!rules.ambiguous_states.empty()) ++classes;
      return classes;
    }
  }
  throw std::logic_error("unreachable capacity regime");
}

double capacity(const RuleSet& rules, CapacityRegime regime) {
  const int classes = distinguishable_classes(rules, regime);
  return classes <= 1 ? 0.0 : std::log2(static_cast<double>(classes));
}

SchemeAnalysis analyze_scheme(const Circuit& c) {
  SchemeAnalysis a;
  const CoefficientTable table = coefficient_table(c);
  for (std::size_t s = 0; s < 4; ++s) {
    a.amplitudes[s] = combine_two_photon(table, static_cast<BellState>(s));
    a.probabilities[s] = event_probabilities(a.amplitudes[s]);
  }
  a.rules = derive_rules(a.probabilities);
  a.s1 = single_pair_success(a.rules, a.probabilities);
  return a;
}

std::vector<SuccessCurveRow> success_curve(const Circuit& c, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const SchemeAnalysis a = analyze_scheme(c);
  std::vector<SuccessCurveRow> rows;
  rows.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    rows.push_back({n, multi_pair_success(a.s1, a.rules, n)});
  }
  return rows;
}

SuccessReport success_report(const Circuit& c, int n_max) {
  const SchemeAnalysis a = analyze_scheme(c);
  SuccessReport report;
  report.scheme = c.name;
  report.s1 = a.s1;
  for (int n = 1; n <= n_max; ++n) {
    report.curve.push_back({n, multi_pair_success(a.s1, a.rules, n)});
  }
  report.capacity_single_pair_bits =
      capacity(a.rules, CapacityRegime::SinglePairDistinguishableClasses);
  report.capacity_asymptotic_bits =
      capacity(a.rules, CapacityRegime::AsymptoticAllFour);
  return report;
}

}  // namespace bellsim
