// Python bindings for the bellsim core. Amplitude maps come back as plain
// dicts keyed by (i, j) detector tuples or ("H@c", "H@d") mode-label tuples,
// so results drop straight into numpy/pandas workflows.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "bellsim/dsl.hpp"
#include "bellsim/json_io.hpp"
#include "bellsim/montecarlo.hpp"

namespace py = pybind11;
using namespace bellsim;

namespace {

py::object json_to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict detector_map_dict(const TwoPhotonAmplitudeMap& m) {
  py::dict out;
  for (const auto& [key, amp] : m.entries) {
    out[py::make_tuple(key.i, key.j)] = amp;
  }
  return out;
}

py::dict probability_dict(const EventProbabilityMap& p) {
  py::dict out;
  for (const auto& [key, prob] : p.probs) {
    out[py::make_tuple(key.i, key.j)] = prob;
  }
  return out;
}

py::dict per_state_dict(const PerState& values) {
  py::dict out;
  for (BellState s : kAllBellStates) {
    out[py::cast(s)] = values[static_cast<std::size_t>(s)];
  }
  return out;
}

Circuit parse_or_raise(const std::string& text) {
  const ParseResult r = parse_circuit_text(text);
  if (!r.ok()) {
    std::string message;
    for (const auto& d : r.diagnostics) {
      if (!message.empty()) message += "\n";
      message += d.render();
    }
    throw py::value_error(message);
  }
  return *r.circuit;
}

std::vector<OutcomeEvent> to_events(const std::vector<std::pair<int, int>>& v) {
  std::vector<OutcomeEvent> events;
  events.reserve(v.size());
  for (const auto& [i, j] : v) events.push_back(DetectorPair::of(i, j));
  return events;
}

}  // namespace

PYBIND11_MODULE(_bellsim, m) {
  m.doc() = "Linear-optics polarization Bell-state analysis toolkit";

  py::enum_<BellState>(m, "BellState")
      .value("PSI_MINUS", BellState::PsiMinus)
      .value("PSI_PLUS", BellState::PsiPlus)
      .value("PHI_MINUS", BellState::PhiMinus)
      .value("PHI_PLUS", BellState::PhiPlus);
  m.def("bell_state", &bell_state_from_string,
        "Parse 'psi-', 'psi+', 'phi-', 'phi+' or the underscore spellings");
  m.def("state_name",
        [](BellState s) { return std::string(to_string(s)); });

  py::enum_<LocalOp>(m, "LocalOp")
      .value("POLARIZATION_EXCHANGE", LocalOp::PolarizationExchange)
      .value("POLARIZATION_PHASE_FLIP", LocalOp::PolarizationPhaseFlip)
      .value("BOTH", LocalOp::Both);

  py::enum_<CapacityRegime>(m, "CapacityRegime")
      .value("SINGLE_PAIR", CapacityRegime::SinglePairDistinguishableClasses)
      .value("ASYMPTOTIC", CapacityRegime::AsymptoticAllFour);

  py::enum_<EvidencePolicy>(m, "EvidencePolicy")
      .value("PAIRS_ONLY", EvidencePolicy::PairsOnly)
      .value("INCLUDE_DIAGONALS", EvidencePolicy::IncludeDiagonals);

  m.def("decompose_bell", [](BellState s) {
    py::list out;
    for (const BellTerm& t : decompose_bell(s).terms) {
      out.append(py::make_tuple(t.first.label(), t.second.label(), t.coeff));
    }
    return out;
  });

  m.def(
      "local_transform",
      [](BellState s, const std::string& arm, LocalOp op) {
        const LocalTransformResult r = local_transform(s, SpatialMode{arm}, op);
        return py::make_tuple(r.state, r.phase);
      },
      py::arg("state"), py::arg("arm"), py::arg("op"));

  py::class_<Circuit>(m, "Circuit")
      .def_readonly("name", &Circuit::name)
      .def_property_readonly("detector_count", &Circuit::detector_count)
      .def_property_readonly(
          "element_count",
          [](const Circuit& c) { return c.elements.size(); })
      .def_property_readonly("input_modes",
                             [](const Circuit& c) {
                               std::vector<std::string> modes;
                               for (const auto& mode : c.input_modes) {
                                 modes.push_back(mode.name);
                               }
                               return modes;
                             })
      .def_property_readonly("taps",
                             [](const Circuit& c) {
                               std::vector<std::string> names;
                               for (const auto& t : c.taps) {
                                 names.push_back(t.name);
                               }
                               return names;
                             })
      .def_property_readonly("detector_map",
                             [](const Circuit& c) {
                               py::dict out;
                               for (const auto& [mode, det] : c.detector_map) {
                                 out[py::cast(mode.label())] = det.index;
                               }
                               return out;
                             })
      .def("validate", [](const Circuit& c) { return validate(c); })
      .def("serialize", [](const Circuit& c) { return serialize(c); })
      .def("to_dict", [](const Circuit& c) { return json_to_py(to_json(c)); })
      .def("__eq__",
           [](const Circuit& a, const Circuit& b) { return a == b; })
      .def("__repr__", [](const Circuit& c) {
        return "<Circuit '" + c.name + "', " +
               std::to_string(c.elements.size()) + " elements, " +
               std::to_string(c.detector_count()) + " detectors>";
      });

  m.def("build_symmetry_broken", &build_symmetry_broken);
  m.def("build_symmetric", &build_symmetric);
  m.def("parse_circuit", &parse_or_raise, py::arg("text"),
        "Parse .loc source text; raises ValueError with diagnostics");
  m.def(
      "load_circuit",
      [](const std::string& path) {
        std::ifstream in(path);
        if (!in.good()) throw py::value_error("cannot open " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_or_raise(buf.str());
      },
      py::arg("path"));

  py::class_<CoefficientTable>(m, "CoefficientTable")
      .def_readonly("scheme", &CoefficientTable::scheme)
      .def_readonly("detector_count", &CoefficientTable::detector_count)
      .def_property_readonly("rows",
                             [](const CoefficientTable& t) {
                               py::list rows;
                               for (const auto& row : t.rows) {
                                 py::list r;
                                 for (const Amplitude& a : row) r.append(a);
                                 rows.append(r);
                               }
                               return rows;
                             })
      .def("to_dict",
           [](const CoefficientTable& t) { return json_to_py(to_json(t)); });

  m.def("coefficient_table", &coefficient_table, py::arg("circuit"));

  m.def(
      "evolve_single",
      [](const Circuit& c, const std::string& mode_label) {
        py::dict out;
        const SinglePhotonState s =
            evolve_single(c, PhotonMode::from_label(mode_label));
        for (const auto& [mode, amp] : s.entries()) {
          out[py::cast(mode.label())] = amp;
        }
        return out;
      },
      py::arg("circuit"), py::arg("mode"),
      "Terminal-mode amplitudes for one basis input, e.g. \"H@a'\"");

  m.def(
      "detector_row",
      [](const Circuit& c, const std::string& mode_label) {
        return to_detector_row(
            c, evolve_single(c, PhotonMode::from_label(mode_label)));
      },
      py::arg("circuit"), py::arg("mode"));

  m.def(
      "combine_two_photon",
      [](const CoefficientTable& t, BellState s) {
        return detector_map_dict(combine_two_photon(t, s));
      },
      py::arg("table"), py::arg("state"));

  m.def(
      "brute_force_two_photon",
      [](const Circuit& c, BellState s) {
        return detector_map_dict(brute_force_two_photon(c, s));
      },
      py::arg("circuit"), py::arg("state"));

  m.def(
      "evolve_to_tap",
      [](const Circuit& c, BellState s, const std::string& tap) {
        py::dict out;
        for (const auto& [key, amp] : evolve_to_tap(c, s, tap).entries) {
          out[py::make_tuple(key.a.label(), key.b.label())] = amp;
        }
        return out;
      },
      py::arg("circuit"), py::arg("state"), py::arg("tap"));

  py::class_<RuleSet>(m, "RuleSet")
      .def_readonly("scheme", &RuleSet::scheme)
      .def_property_readonly("elimination_target",
                             [](const RuleSet& r) -> py::object {
                               if (!r.elimination_target) return py::none();
                               return py::cast(*r.elimination_target);
                             })
      .def_property_readonly("ambiguous_states",
                             [](const RuleSet& r) { return r.ambiguous_states; })
      .def_property_readonly("evidence_events",
                             [](const RuleSet& r) {
                               py::list out;
                               for (const auto& e : r.evidence_events) {
                                 out.append(py::make_tuple(e.i, e.j));
                               }
                               return out;
                             })
      .def(
          "unique_events",
          [](const RuleSet& r, BellState s) {
            py::list out;
            for (const auto& e : r.unique_for(s)) {
              out.append(py::make_tuple(e.i, e.j));
            }
            return out;
          },
          py::arg("state"))
      .def("to_dict", [](const RuleSet& r) { return json_to_py(to_json(r)); });

  py::class_<SchemeAnalysis>(m, "Analysis")
      .def_readonly("rules", &SchemeAnalysis::rules)
      .def_property_readonly(
          "s1", [](const SchemeAnalysis& a) { return per_state_dict(a.s1); })
      .def(
          "amplitudes",
          [](const SchemeAnalysis& a, BellState s) {
            return detector_map_dict(
                a.amplitudes[static_cast<std::size_t>(s)]);
          },
          py::arg("state"))
      .def(
          "probabilities",
          [](const SchemeAnalysis& a, BellState s) {
            return probability_dict(
                a.probabilities[static_cast<std::size_t>(s)]);
          },
          py::arg("state"));

  m.def("analyze", &analyze_scheme, py::arg("circuit"));

  m.def(
      "multi_pair_success",
      [](const SchemeAnalysis& a, int n) {
        return per_state_dict(multi_pair_success(a.s1, a.rules, n));
      },
      py::arg("analysis"), py::arg("pairs"));

  m.def(
      "success_curve",
      [](const Circuit& c, int n_max) {
        py::list rows;
        for (const SuccessCurveRow& row : success_curve(c, n_max)) {
          py::dict entry = per_state_dict(row.s);
          entry["N"] = row.n;
          rows.append(entry);
        }
        return rows;
      },
      py::arg("circuit"), py::arg("n_max"));

  m.def(
      "success_report",
      [](const Circuit& c, int n_max) {
        return json_to_py(to_json(success_report(c, n_max)));
      },
      py::arg("circuit"), py::arg("n_max") = 15);

  m.def(
      "capacity",
      [](const SchemeAnalysis& a, CapacityRegime regime) {
        return capacity(a.rules, regime);
      },
      py::arg("analysis"), py::arg("regime") = CapacityRegime::AsymptoticAllFour);

  m.def(
      "classify",
      [](const std::vector<std::pair<int, int>>& events, const RuleSet& rules,
         EvidencePolicy policy) -> py::object {
        const Classification c = classify(to_events(events), rules, policy);
        if (c.declared) return py::cast(*c.declared);
        return py::none();
      },
      py::arg("events"), py::arg("rules"),
      py::arg("policy") = EvidencePolicy::PairsOnly,
      "Returns the declared BellState or None when inconclusive");

  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def_readonly("scheme", &ConfusionMatrix::scheme)
      .def_readonly("pairs", &ConfusionMatrix::pairs)
      .def_readonly("trials", &ConfusionMatrix::trials)
      .def_property_readonly(
          "seed", [](const ConfusionMatrix& m) { return m.seed.value; })
      .def_readonly("rng", &ConfusionMatrix::rng)
      .def("declared_frequency", &ConfusionMatrix::declared_frequency,
           py::arg("truth"), py::arg("declared"))
      .def("inconclusive_frequency", &ConfusionMatrix::inconclusive_frequency,
           py::arg("truth"))
      .def("to_dict",
           [](const ConfusionMatrix& m) { return json_to_py(to_json(m)); });

  m.def(
      "estimate_confusion",
      [](const Circuit& c, int pairs, std::uint64_t trials,
         std::uint64_t seed, EvidencePolicy policy, unsigned workers) {
        return estimate_confusion(c, pairs, trials, Seed{seed}, policy,
                                  workers);
      },
      py::arg("circuit"), py::arg("pairs"), py::arg("trials"), py::arg("seed"),
      py::arg("policy") = EvidencePolicy::PairsOnly, py::arg("workers") = 1);

  m.attr("RNG_NAME") = std::string(kRngName);
  m.attr("TOLERANCE") = kTol;
}
