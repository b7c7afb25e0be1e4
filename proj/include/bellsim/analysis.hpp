#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bellsim/evolution.hpp"

namespace bellsim {

/// Coincidence event probabilities for one input state:
/// P(i,j) = |c_ij|^2 for i < j and P(i,i) = 2 |c_ii|^2.
struct EventProbabilityMap {
  std::string scheme;
  BellState state = BellState::PsiMinus;
  std::map<DetectorPair, double> probs;

  [[nodiscard]] double at(DetectorPair k) const;
  [[nodiscard]] double total() const;
};

EventProbabilityMap event_probabilities(const TwoPhotonAmplitudeMap& m);

/// Discrimination rules extracted from the four per-state event maps.
///
/// An event is unique for state X when only X gives it positive probability;
/// observing it identifies X conclusively. When exactly one state ends up
/// with no unique events it becomes the elimination target: it is declared
/// once evidence accumulates while every other state stays silent. When two
/// or more states have no unique events, no elimination is possible and they
/// are reported as a single indistinguishable class.
struct RuleSet {
  std::string scheme;
  std::array<std::set<DetectorPair>, 4> unique_events;  // indexed by BellState
  std::optional<BellState> elimination_target;
  std::set<DetectorPair> evidence_events;  // positive-probability events of the target
  std::vector<BellState> ambiguous_states; // zero-unique states when no target exists
  std::set<DetectorPair> ambiguous_class_events;  // events seen only inside that class

  [[nodiscard]] const std::set<DetectorPair>& unique_for(BellState s) const {
    return unique_events[static_cast<std::size_t>(s)];
  }
  /// The state whose unique set contains the event, if any.
  [[nodiscard]] std::optional<BellState> unique_owner(DetectorPair e) const;
};

/// Probability threshold below which an event is treated as impossible.
inline constexpr double kEventFloor = 1e-12;

using PerState = std::array<double, 4>;  // indexed by BellState

RuleSet derive_rules(const std::array<EventProbabilityMap, 4>& maps);

/// S1(X): probability that a single pair produces an event unique to X.
PerState single_pair_success(const RuleSet& rules,
                             const std::array<EventProbabilityMap, 4>& maps);

/// S_N per state: 1 - (1 - S1)^N for states with unique events; the
/// complementarity formula 1 - sum_{Y != target} (1 - S_N(Y)) for the
/// elimination target; S1 (independent of N) for ambiguous states.
PerState multi_pair_success(const PerState& s1, const RuleSet& rules, int n);

enum class CapacityRegime : std::uint8_t {
  SinglePairDistinguishableClasses,
  AsymptoticAllFour,
};

/// log2 of the number of mutually distinguishable state classes. The
/// asymptotic regime counts every class that is eventually identifiable,
/// including an elimination target; the single-pair regime counts only
/// classes that one pair can identify conclusively.
double capacity(const RuleSet& rules, CapacityRegime regime);
int distinguishable_classes(const RuleSet& rules, CapacityRegime regime);

struct SuccessCurveRow {
  int n = 0;
  PerState s{};
};

/// Everything the success analysis produces for one scheme.
struct SuccessReport {
  std::string scheme;
  PerState s1{};
  std::vector<SuccessCurveRow> curve;  // N = 1..n_max
  double capacity_single_pair_bits = 0.0;
  double capacity_asymptotic_bits = 0.0;
};

/// Full pipeline: four amplitude maps -> probabilities -> rules.
struct SchemeAnalysis {
  std::array<TwoPhotonAmplitudeMap, 4> amplitudes;
  std::array<EventProbabilityMap, 4> probabilities;
  RuleSet rules;
  PerState s1{};
};

SchemeAnalysis analyze_scheme(const Circuit& c);

std::vector<SuccessCurveRow> success_curve(const Circuit& c, int n_max);
SuccessReport success_report(const Circuit& c, int n_max);

}  // namespace bellsim
