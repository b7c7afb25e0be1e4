#include "bellsim/montecarlo.hpp"

#include <stdexcept>
#include <thread>
#include <vector>

namespace bellsim {

std::string_view to_string(EvidencePolicy p) {
  return p == EvidencePolicy::PairsOnly ? "pairs_only" : "include_diagonals";
}

SplitMix64 trial_stream(Seed seed, std::size_t state_index,
                        std::uint64_t trial_index) {
  std::uint64_t key = seed.value;
  key = SplitMix64::mix(key ^ (0x9e3779b97f4a7c15ULL * (state_index + 1)));
  key = SplitMix64::mix(key ^ (0xd1b54a32d192ed03ULL * (trial_index + 1)));
  return SplitMix64(key);
}

OutcomeEvent sample_event(const EventProbabilityMap& p, SplitMix64& rng) {
  if (p.probs.empty()) {
    throw std::invalid_argument("cannot sample from an empty event map");
  }
  const double u = rng.next_double();
  double cumulative = 0.0;
  for (const auto& [event, prob] : p.probs) {
    cumulative += prob;
    if (u < cumulative) return event;
  }
  return p.probs.rbegin()->first;  // u landed in the rounding slack
}

Classification classify(std::span<const OutcomeEvent> events,
                        const RuleSet& rules, EvidencePolicy policy) {
  std::optional<BellState> declared;
  bool evidence_seen = false;
  for (const OutcomeEvent& e : events) {
    if (auto owner = rules.unique_owner(e)) {
      if (declared && *declared != *owner) {
        throw std::logic_error(
            "events unique to two different states in one trial: rule set "
            "invariant violated");
      }
      declared = owner;
      continue;
    }
    if (rules.elimination_target && rules.evidence_events.contains(e) &&
        (policy == EvidencePolicy::IncludeDiagonals || !e.diagonal())) {
      evidence_seen = true;
    }
  }
  if (declared) return {declared};
  if (rules.elimination_target && evidence_seen) {
    return {rules.elimination_target};
  }
  return {};
}

namespace {

void run_trials(const EventProbabilityMap& map, const RuleSet& rules,
                EvidencePolicy policy, std::size_t state_index, int pairs,
                std::uint64_t first_trial, std::uint64_t last_trial, Seed seed,
                std::array<std::uint64_t, 5>& counts) {
  std::vector<OutcomeEvent> events(static_cast<std::size_t>(pairs));
  for (std::uint64_t t = first_trial; t < last_trial; ++t) {
    SplitMix64 rng = trial_stream(seed, state_index, t);
    for (auto& e : events) e = sample_event(map, rng);
    const Classification c = classify(events, rules, policy);
    const std::size_t slot =
        c.declared ? static_cast<std::size_t>(*c.declared) : 4;
    ++counts[slot];
  }
}

void fill_rows(ConfusionMatrix& out, const SchemeAnalysis& analysis,
               const std::vector<BellState>& truths, int pairs,
               std::uint64_t trials, Seed seed, EvidencePolicy policy,
               unsigned workers) {
  if (workers == 0) workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;

  for (BellState truth : truths) {
    const std::size_t s = static_cast<std::size_t>(truth);
    const EventProbabilityMap& map = analysis.probabilities[s];

    if (workers == 1 || trials < 2 * workers) {
      run_trials(map, analysis.rules, policy, s, pairs, 0, trials, seed,
                 out.counts[s]);
      continue;
    }
    std::vector<std::array<std::uint64_t, 5>> partial(workers,
                                                      std::array<std::uint64_t, 5>{});
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t first = w * chunk;
      const std::uint64_t last = std::min(trials, first + chunk);
      if (first >= last) break;
      pool.emplace_back([&, w, first, last] {
        run_trials(map, analysis.rules, policy, s, pairs, first, last, seed,
                   partial[w]);
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : partial) {
      for (std::size_t k = 0; k < 5; ++k) out.counts[s][k] += p[k];
    }
  }
}

}  // namespace

double ConfusionMatrix::declared_frequency(BellState truth,
                                           BellState declared) const {
  if (trials == 0) return 0.0;
  return static_cast<double>(
             counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(declared)]) /
         static_cast<double>(trials);
}

double ConfusionMatrix::inconclusive_frequency(BellState truth) const {
  if (trials == 0) return 0.0;
  return static_cast<double>(counts[static_cast<std::size_t>(truth)][4]) /
         static_cast<double>(trials);
}

ConfusionMatrix estimate_confusion(const Circuit& c, int pairs,
                                   std::uint64_t trials, Seed seed,
                                   EvidencePolicy policy, unsigned workers) {
  if (pairs < 1) throw std::invalid_argument("pairs must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  const SchemeAnalysis analysis = analyze_scheme(c);
  ConfusionMatrix out;
  out.scheme = c.name;
  out.pairs = pairs;
  out.trials = trials;
  out.seed = seed;
  out.policy = policy;
  fill_rows(out, analysis,
            {BellState::PsiMinus, BellState::PsiPlus, BellState::PhiMinus,
             BellState::PhiPlus},
            pairs, trials, seed, policy, workers);
  return out;
}

ConfusionMatrix estimate_confusion_row(const Circuit& c, BellState truth,
                                       int pairs, std::uint64_t trials,
                                       Seed seed, EvidencePolicy policy,
                                       unsigned workers) {
  if (pairs < 1) throw std::invalid_argument("pairs must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  const SchemeAnalysis analysis = analyze_scheme(c);
  ConfusionMatrix out;
  out.scheme = c.name;
  out.pairs = pairs;
  out.trials = trials;
  out.seed = seed;
  out.policy = policy;
  fill_rows(out, analysis, {truth}, pairs, trials, seed, policy, workers);
  return out;
}

}  // namespace bellsim
