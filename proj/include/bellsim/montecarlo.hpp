#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "bellsim/analysis.hpp"

namespace bellsim {

struct Seed {
  std::uint64_t value = 0;
};

/// splitmix64 (Steele, Lea & Flood): a counter-based 64-bit generator. The
/// state advances by a fixed odd constant and the output is a bijective
/// finalizer of the state, so streams seeded by distinct keys are
/// independent of evaluation order. Pinned in output metadata as
/// "splitmix64".
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline constexpr std::string_view kRngName = "splitmix64";

/// Deterministic substream for one (state, trial) cell, independent of how
/// trials are scheduled across workers.
SplitMix64 trial_stream(Seed seed, std::size_t state_index,
                        std::uint64_t trial_index);

using OutcomeEvent = DetectorPair;

/// Declared Bell state, or inconclusive when no rule fires.
struct Classification {
  std::optional<BellState> declared;

  bool operator==(const Classification&) const = default;
  [[nodiscard]] bool inconclusive() const { return !declared.has_value(); }
};

/// Which of the elimination target's events count as evidence. PairsOnly
/// accepts only two-detector coincidences (i < j); IncludeDiagonals also
/// accepts double clicks (i, i).
enum class EvidencePolicy : std::uint8_t { PairsOnly, IncludeDiagonals };

std::string_view to_string(EvidencePolicy p);

/// Inverse-CDF draw over the map's lexicographically sorted events.
OutcomeEvent sample_event(const EventProbabilityMap& p, SplitMix64& rng);

/// Unique events dominate; otherwise the elimination target is declared iff
/// at least one evidence event occurred. Events unique to two different
/// states in one list violate the rule-set invariant and throw.
Classification classify(std::span<const OutcomeEvent> events,
                        const RuleSet& rules,
                        EvidencePolicy policy = EvidencePolicy::PairsOnly);

/// Row-normalized empirical estimate of P(declared | true state).
struct ConfusionMatrix {
  std::string scheme;
  int pairs = 0;             // events per trial
  std::uint64_t trials = 0;  // trials per true state
  Seed seed;
  std::string rng{kRngName};
  EvidencePolicy policy = EvidencePolicy::PairsOnly;
  // counts[true][k]: k = 0..3 declared BellState, k = 4 inconclusive
  std::array<std::array<std::uint64_t, 5>, 4> counts{};

  [[nodiscard]] double declared_frequency(BellState truth, BellState declared) const;
  [[nodiscard]] double inconclusive_frequency(BellState truth) const;
};

/// Runs `trials` independent trials of `pairs` sampled events per true state
/// and classifies each. Bit-identical for a fixed (seed, scheme, pairs,
/// trials) no matter how many workers share the trials.
ConfusionMatrix estimate_confusion(const Circuit& c, int pairs,
                                   std::uint64_t trials, Seed seed,
                                   EvidencePolicy policy = EvidencePolicy::PairsOnly,
                                   unsigned workers = 1);

/// Single row of the confusion matrix (one true state), same substreams as
/// the full estimate.
ConfusionMatrix estimate_confusion_row(const Circuit& c, BellState truth,
                                       int pairs, std::uint64_t trials,
                                       Seed seed,
                                       EvidencePolicy policy = EvidencePolicy::PairsOnly,
                                       unsigned workers = 1);

}  // namespace bellsim
