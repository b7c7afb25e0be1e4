#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bellsim/analysis.hpp"
#include "bellsim/json_io.hpp"

using namespace bellsim;

namespace {

std::set<DetectorPair> pairs(std::initializer_list<DetectorPair> list) {
  return {list};
}

// Detector relabeling applied consistently to all four maps.
std::array<EventProbabilityMap, 4> permuted(
    const std::array<EventProbabilityMap, 4>& maps,
    const std::map<int, int>& perm) {
  std::array<EventProbabilityMap, 4> out;
  for (std::size_t s = 0; s < 4; ++s) {
    out[s].scheme = maps[s].scheme;
    out[s].state = maps[s].state;
    for (const auto& [key, p] : maps[s].probs) {
      out[s].probs[DetectorPair::of(perm.at(key.i), perm.at(key.j))] = p;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("event probabilities: psi+ through the symmetry-broken analyzer") {
  const SchemeAnalysis a = analyze_scheme(build_symmetry_broken());
  const EventProbabilityMap& p =
      a.probabilities[static_cast<std::size_t>(BellState::PsiPlus)];
  CHECK(p.at({5, 6}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.at({1, 1}) == doctest::Approx(1.0 / 16).epsilon(1e-12));
  CHECK(p.at({1, 2}) == doctest::Approx(1.0 / 8).epsilon(1e-12));
}

TEST_CASE("event probabilities: psi- spreads over eight equal events") {
  const SchemeAnalysis a = analyze_scheme(build_symmetry_broken());
  const EventProbabilityMap& p =
      a.probabilities[static_cast<std::size_t>(BellState::PsiMinus)];
  CHECK(p.probs.size() == 8);
  for (const auto& [key, prob] : p.probs) {
    CHECK(prob == doctest::Approx(0.125).epsilon(1e-12));
  }
}

TEST_CASE("every event map sums to one") {
  for (const Circuit& c : {build_symmetry_broken(), build_symmetric()}) {
    const SchemeAnalysis a = analyze_scheme(c);
    for (const auto& p : a.probabilities) {
      CHECK(std::abs(p.total() - 1.0) <= kTol);
    }
  }
}

TEST_CASE("rules for the symmetry-broken analyzer") {
  const SchemeAnalysis a = analyze_scheme(build_symmetry_broken());
  const RuleSet& r = a.rules;

  CHECK(r.unique_for(BellState::PsiMinus) ==
        pairs({{1, 5}, {2, 5}, {3, 5}, {4, 5}, {1, 6}, {2, 6}, {3, 6}, {4, 6}}));
  CHECK(r.unique_for(BellState::PsiPlus) == pairs({{5, 6}}));
  CHECK(r.unique_for(BellState::PhiMinus) ==
        pairs({{1, 3}, {1, 4}, {2, 3}, {2, 4}}));
  CHECK(r.unique_for(BellState::PhiPlus).empty());

  REQUIRE(r.elimination_target.has_value());
  CHECK(*r.elimination_target == BellState::PhiPlus);
  CHECK(r.evidence_events == pairs({{1, 1}, {2, 2}, {3, 3}, {4, 4},
                                    {1, 2}, {3, 4}, {5, 5}, {6, 6}}));
  CHECK(r.ambiguous_states.empty());
}

TEST_CASE("rules for the symmetric analyzer") {
  const SchemeAnalysis a = analyze_scheme(build_symmetric());
  const RuleSet& r = a.rules;

  CHECK(r.unique_for(BellState::PsiMinus) ==
        pairs({{1, 5}, {1, 6}, {2, 5}, {2, 6}, {3, 7}, {3, 8}, {4, 7}, {4, 8}}));
  CHECK(r.unique_for(BellState::PhiMinus) ==
        pairs({{1, 3}, {1, 4}, {2, 3}, {2, 4}, {5, 7}, {5, 8}, {6, 7}, {6, 8}}));
  CHECK(r.unique_for(BellState::PsiPlus).empty());
  CHECK(r.unique_for(BellState::PhiPlus).empty());

  // Two degenerate states: no elimination, the pair is flagged as a class.
  CHECK(!r.elimination_target.has_value());
  REQUIRE(r.ambiguous_states.size() == 2);
  CHECK(r.ambiguous_states[0] == BellState::PsiPlus);
  CHECK(r.ambiguous_states[1] == BellState::PhiPlus);
  CHECK(!r.ambiguous_class_events.empty());
  // every class event involves the double clicks or the four bunched pairs
  CHECK(r.ambiguous_class_events ==
        pairs({{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}, {6, 6}, {7, 7}, {8, 8},
               {1, 2}, {3, 4}, {5, 6}, {7, 8}}));
}

TEST_CASE("identical maps produce no unique events at all") {
  const SchemeAnalysis a = analyze_scheme(build_symmetry_broken());
  std::array<EventProbabilityMap, 4> degenerate;
  for (std::size_t s = 0; s < 4; ++s) {
    degenerate[s] = a.probabilities[0];
    degenerate[s].state = static_cast<BellState>(s);
  }
  const RuleSet r = derive_rules(degenerate);
  for (BellState state : kAllBellStates) {
    CHECK(r.unique_for(state).empty());
  }
  CHECK(!r.elimination_target.has_value());
  CHECK(r.ambiguous_states.size() == 4);

  const PerState s1 = single_pair_success(r, degenerate);
  for (double v : s1) CHECK(v == 0.0);
}

TEST_CASE("single-pair success probabilities") {
  const SchemeAnalysis broken = analyze_scheme(build_symmetry_broken());
  CHECK(broken.s1[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(broken.s1[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(broken.s1[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(broken.s1[3] == doctest::Approx(0.0).epsilon(1e-12));

  const SchemeAnalysis symmetric = analyze_scheme(build_symmetric());
  CHECK(symmetric.s1[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(symmetric.s1[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(symmetric.s1[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(symmetric.s1[3] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("multi-pair success at N = 4 and N = 8") {
  const SchemeAnalysis a = analyze_scheme(build_symmetry_broken());

  const PerState n4 = multi_pair_success(a.s1, a.rules, 4);
  CHECK(n4[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(n4[1] == doctest::Approx(0.9375).epsilon(1e-12));
  CHECK(n4[2] == doctest::Approx(0.9375).epsilon(1e-12));
  CHECK(n4[3] == doctest::Approx(0.875).epsilon(1e-12));

  const PerState n8 = multi_pair_success(a.s1, a.rules, 8);
  CHECK(n8[1] == doctest::Approx(0.99609375).epsilon(1e-12));
  CHECK(n8[2] == doctest::Approx(0.99609375).epsilon(1e-12));
  CHECK(n8[3] == doctest::Approx(0.9921875).epsilon(1e-12));

  CHECK_THROWS_AS(multi_pair_success(a.s1, a.rules, 0), std::invalid_argument);
}

TEST_CASE("the eliminated state obeys 1 - 2^(1-N) exactly") {
  const SchemeAnalysis a = analyze_scheme(build_symmetry_broken());
  for (int n = 1; n <= 20; ++n) {
    const PerState sn = multi_pair_success(a.s1, a.rules, n);
    const double expected = 1.0 - std::pow(2.0, -(n - 1));
    INFO("N = ", n);
    CHECK(std::abs(sn[3] - expected) <= kTol);
  }
}

TEST_CASE("success increments telescope for unique-event states") {
  const SchemeAnalysis a = analyze_scheme(build_symmetry_broken());
  PerState prev = multi_pair_success(a.s1, a.rules, 1);
  for (int n = 1; n <= 20; ++n) {
    const PerState next = multi_pair_success(a.s1, a.rules, n + 1);
    for (std::size_t s = 0; s < 3; ++s) {  // psi-, psi+, phi-
      const double expected = a.s1[s] * std::pow(1.0 - a.s1[s], n);
      CHECK(next[s] - prev[s] == doctest::Approx(expected).epsilon(1e-9));
      CHECK(next[s] >= prev[s]);
    }
    prev = next;
  }
}

TEST_CASE("symmetric analyzer success is independent of N") {
  const SchemeAnalysis a = analyze_scheme(build_symmetric());
  for (int n : {1, 2, 5, 10}) {
    const PerState sn = multi_pair_success(a.s1, a.rules, n);
    CHECK(sn[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sn[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sn[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sn[3] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("channel capacity per regime") {
  const RuleSet broken = analyze_scheme(build_symmetry_broken()).rules;
  const RuleSet symmetric = analyze_scheme(build_symmetric()).rules;

  CHECK(capacity(symmetric, CapacityRegime::SinglePairDistinguishableClasses) ==
        doctest::Approx(1.584962500721156).epsilon(1e-12));
  CHECK(capacity(symmetric, CapacityRegime::AsymptoticAllFour) ==
        doctest::Approx(1.584962500721156).epsilon(1e-12));

  // one pair cannot confirm the eliminated state, many pairs can
  CHECK(capacity(broken, CapacityRegime::SinglePairDistinguishableClasses) ==
        doctest::Approx(1.584962500721156).epsilon(1e-12));
  CHECK(capacity(broken, CapacityRegime::AsymptoticAllFour) == 2.0);

  CHECK(distinguishable_classes(broken, CapacityRegime::AsymptoticAllFour) == 4);
  CHECK(distinguishable_classes(symmetric, CapacityRegime::AsymptoticAllFour) == 3);
}

TEST_CASE("a rule set with four unique states carries two bits") {
  RuleSet r;
  r.scheme = "synthetic";
  r.unique_events[0] = pairs({{1, 2}});
  r.unique_events[1] = pairs({{3, 4}});
  r.unique_events[2] = pairs({{1, 3}});
  r.unique_events[3] = pairs({{2, 4}});
  CHECK(capacity(r, CapacityRegime::SinglePairDistinguishableClasses) == 2.0);
  CHECK(capacity(r, CapacityRegime::AsymptoticAllFour) == 2.0);
}

TEST_CASE("capacity is invariant under detector relabeling") {
  const SchemeAnalysis a = analyze_scheme(build_symmetry_broken());
  const std::map<int, int> relabelings[] = {
      {{1, 2}, {2, 1}, {3, 3}, {4, 4}, {5, 6}, {6, 5}},
      {{1, 6}, {2, 5}, {3, 4}, {4, 3}, {5, 2}, {6, 1}},
      {{1, 3}, {2, 1}, {3, 5}, {4, 2}, {5, 6}, {6, 4}},
  };
  for (const auto& perm : relabelings) {
    const RuleSet r = derive_rules(permuted(a.probabilities, perm));
    for (CapacityRegime regime :
         {CapacityRegime::SinglePairDistinguishableClasses,
          CapacityRegime::AsymptoticAllFour}) {
      CHECK(capacity(r, regime) == capacity(a.rules, regime));
    }
  }
}

TEST_CASE("unique event masses stay within one and sets stay disjoint") {
  for (const Circuit& c : {build_symmetry_broken(), build_symmetric()}) {
    const SchemeAnalysis a = analyze_scheme(c);
    std::set<DetectorPair> all;
    for (BellState s : kAllBellStates) {
      double mass = 0.0;
      for (const DetectorPair& e : a.rules.unique_for(s)) {
        CHECK(all.insert(e).second);  // disjoint across states
        mass += a.probabilities[static_cast<std::size_t>(s)].at(e);
      }
      CHECK(mass <= 1.0 + kTol);
    }
  }
}

TEST_CASE("success curve rows and csv") {
  const std::vector<SuccessCurveRow> rows =
      success_curve(build_symmetry_broken(), 4);
  REQUIRE(rows.size() == 4);
  CHECK(rows.back().n == 4);
  CHECK(rows.back().s[1] == doctest::Approx(0.9375).epsilon(1e-12));

  const std::string csv = success_curve_csv(rows);
  CHECK(csv.starts_with("N,psi_minus,psi_plus,phi_minus,phi_plus\n"));
  CHECK(csv.find("4,1,0.9375,0.9375,0.875\n") != std::string::npos);

  // large N: everything converges to 1 within 2^(1-N)
  const std::vector<SuccessCurveRow> long_rows =
      success_curve(build_symmetry_broken(), 30);
  for (double v : long_rows.back().s) {
    CHECK(1.0 - v <= std::pow(2.0, -29));
  }

  // symmetric: ten constant rows, identical once rendered
  const std::vector<SuccessCurveRow> sym = success_curve(build_symmetric(), 10);
  for (const SuccessCurveRow& row : sym) {
    for (std::size_t s = 0; s < 4; ++s) {
      CHECK(std::abs(row.s[s] - sym.front().s[s]) <= kTol);
    }
  }
  const std::string sym_csv = success_curve_csv(sym);
  std::size_t line_start = sym_csv.find('\n') + 1;
  std::string first_payload;
  while (line_start < sym_csv.size()) {
    const std::size_t line_end = sym_csv.find('\n', line_start);
    std::string line = sym_csv.substr(line_start, line_end - line_start);
    const std::string payload = line.substr(line.find(','));
    if (first_payload.empty()) {
      first_payload = payload;
    } else {
      CHECK(payload == first_payload);
    }
    line_start = line_end + 1;
  }
}

TEST_CASE("success report json layout") {
  const SuccessReport r = success_report(build_symmetric(), 3);
  const Json j = to_json(r);
  CHECK(j["scheme"] == "symmetric");
  CHECK(j["s1"]["psi_minus"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["capacity_bits"]["single_pair"] ==
        doctest::Approx(1.584962500721156).epsilon(1e-12));
  CHECK(j["curve"].size() == 3);
}
