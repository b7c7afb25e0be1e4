#include "bellsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bellsim {

std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::BeamSplitter: return "bs";
    case ElementKind::HalfWavePlate: return "hwp";
    case ElementKind::PolarizationPhase: return "phase";
    case ElementKind::PolarizingBeamSplitter: return "pbs";
  }
  throw std::logic_error("unreachable element kind");
}

Element Element::beam_splitter(SpatialMode in1, SpatialMode in2,
                               SpatialMode out1, SpatialMode out2) {
  return Element{ElementKind::BeamSplitter,
                 {std::move(in1), std::move(in2)},
                 {std::move(out1), std::move(out2)}};
}

Element Element::half_wave_plate(SpatialMode in, SpatialMode out) {
  return Element{ElementKind::HalfWavePlate, {std::move(in)}, {std::move(out)}};
}

Element Element::polarization_phase(double phase, SpatialMode in,
                                    SpatialMode out) {
  Element e{ElementKind::PolarizationPhase, {std::move(in)}, {std::move(out)}};
  e.phase = phase;
  return e;
}

Element Element::polarizing_beam_splitter(SpatialMode in, DetectorId transmit,
                                          DetectorId reflect) {
  Element e{ElementKind::PolarizingBeamSplitter, {std::move(in)}, {}};
  e.detectors = {transmit, reflect};
  return e;
}

int Circuit::detector_count() const {
  int max_index = 0;
  for (const auto& [mode, det] : detector_map) {
    max_index = std::max(max_index, det.index);
  }
  return max_index;
}

std::optional<std::size_t> Circuit::find_tap(std::string_view name) const {
  for (std::size_t i = 0; i < taps.size(); ++i) {
    if (taps[i].name == name) return i;
  }
  return std::nullopt;
}

Circuit assemble_circuit(std::string name, std::vector<Element> elements,
                         std::vector<TapPoint> taps) {
  Circuit c;
  c.name = std::move(name);
  c.elements = std::move(elements);
  c.taps = std::move(taps);
  // Canonical tap order follows the cut position, so serialization is stable.
  std::stable_sort(c.taps.begin(), c.taps.end(),
                   [](const TapPoint& a, const TapPoint& b) {
                     return a.after_element < b.after_element;
                   });

  std::set<SpatialMode> produced;
  std::set<SpatialMode> seen_inputs;
  for (const Element& e : c.elements) {
    for (const SpatialMode& m : e.inputs) {
      if (m.is_vacuum()) continue;
      if (!produced.contains(m) && seen_inputs.insert(m).second) {
        c.input_modes.push_back(m);
      }
    }
    for (const SpatialMode& m : e.outputs) produced.insert(m);
    if (e.kind == ElementKind::PolarizingBeamSplitter && !e.inputs.empty()) {
      const SpatialMode& in = e.inputs.front();
      c.detector_map[PhotonMode{in, Polarization::H}] = e.detectors[0];
      c.detector_map[PhotonMode{in, Polarization::V}] = e.detectors[1];
    }
  }
  return c;
}

Circuit build_symmetry_broken() {
  std::vector<Element> elements;
  elements.push_back(Element::beam_splitter({"a'"}, {"b'"}, {"a"}, {"b"}));
  elements.push_back(
      Element::beam_splitter({"a"}, SpatialMode::vacuum(), {"c"}, {"d"}));
  elements.push_back(Element::half_wave_plate({"c"}, {"c_H"}));
  elements.push_back(Element::beam_splitter({"c_H"}, {"d"}, {"e"}, {"f"}));
  elements.push_back(
      Element::polarizing_beam_splitter({"e"}, DetectorId{1}, DetectorId{2}));
  elements.push_back(
      Element::polarizing_beam_splitter({"f"}, DetectorId{4}, DetectorId{3}));
  elements.push_back(
      Element::polarizing_beam_splitter({"b"}, DetectorId{6}, DetectorId{5}));
  std::vector<TapPoint> taps = {
      {"after_bs1", 0}, {"after_bs2", 1}, {"after_hwp", 2}};
  return assemble_circuit("symmetry_broken", std::move(elements),
                          std::move(taps));
}

Circuit build_symmetric() {
  std::vector<Element> elements;
  elements.push_back(Element::beam_splitter({"a'"}, {"b'"}, {"a"}, {"b"}));
  // a side, identical to the symmetry-broken analyzer
  elements.push_back(
      Element::beam_splitter({"a"}, SpatialMode::vacuum(), {"c"}, {"d"}));
  elements.push_back(Element::half_wave_plate({"c"}, {"c_H"}));
  elements.push_back(Element::beam_splitter({"c_H"}, {"d"}, {"e"}, {"f"}));
  elements.push_back(
      Element::polarizing_beam_splitter({"e"}, DetectorId{1}, DetectorId{2}));
  elements.push_back(
      Element::polarizing_beam_splitter({"f"}, DetectorId{4}, DetectorId{3}));
  // b side, mirrored port order
  elements.push_back(
      Element::beam_splitter(SpatialMode::vacuum(), {"b"}, {"c'"}, {"d'"}));
  elements.push_back(Element::half_wave_plate({"c'"}, {"c'_H"}));
  elements.push_back(Element::beam_splitter({"d'"}, {"c'_H"}, {"f'"}, {"e'"}));
  elements.push_back(
      Element::polarizing_beam_splitter({"e'"}, DetectorId{8}, DetectorId{7}));
  elements.push_back(
      Element::polarizing_beam_splitter({"f'"}, DetectorId{5}, DetectorId{6}));
  std::vector<TapPoint> taps = {{"after_bs1", 0},
                                {"after_bs2", 1},
                                {"after_hwp", 2},
                                {"after_bs2_b", 6},
                                {"after_hwp_b", 7}};
  return assemble_circuit("symmetric", std::move(elements), std::move(taps));
}

namespace {

void check_ports(const Element& e, std::vector<ValidationIssue>& issues,
                 std::size_t idx) {
  auto expect = [&](bool ok, std::string msg) {
    if (!ok) issues.push_back({idx, std::nullopt, std::move(msg)});
  };
  switch (e.kind) {
    case ElementKind::BeamSplitter:
      expect(e.inputs.size() == 2 && e.outputs.size() == 2,
             "bs requires 2 inputs and 2 outputs");
      break;
    case ElementKind::HalfWavePlate:
      expect(e.inputs.size() == 1 && e.outputs.size() == 1,
             "hwp requires 1 input and 1 output");
      break;
    case ElementKind::PolarizationPhase:
      expect(e.inputs.size() == 1 && e.outputs.size() == 1,
             "phase requires 1 input and 1 output");
      expect(std::isfinite(e.phase), "phase angle must be finite");
      break;
    case ElementKind::PolarizingBeamSplitter:
      expect(e.inputs.size() == 1 && e.outputs.empty(),
             "pbs requires 1 input and detector outputs only");
      break;
  }
  for (const SpatialMode& m : e.outputs) {
    expect(!m.is_vacuum(), "vacuum is not a legal output port");
  }
  if (e.kind != ElementKind::BeamSplitter) {
    for (const SpatialMode& m : e.inputs) {
      expect(!m.is_vacuum(), "vacuum is only a legal input on a bs");
    }
  }
}

}  // namespace

std::vector<ValidationIssue> validate_circuit(const Circuit& c) {
  std::vector<ValidationIssue> issues;

  std::map<SpatialMode, std::size_t> produced_by;
  std::map<SpatialMode, std::size_t> consumed_by;

  // External inputs are the modes no element ever produces; a mode consumed
  // ahead of its producing element must not masquerade as one.
  std::set<SpatialMode> produced_anywhere;
  for (const Element& e : c.elements) {
    for (const SpatialMode& m : e.outputs) {
      if (!m.is_vacuum()) produced_anywhere.insert(m);
    }
  }
  std::set<SpatialMode> available;
  for (const SpatialMode& m : c.input_modes) {
    if (!produced_anywhere.contains(m)) available.insert(m);
  }

  for (std::size_t i = 0; i < c.elements.size(); ++i) {
    const Element& e = c.elements[i];
    check_ports(e, issues, i);

    for (const SpatialMode& m : e.inputs) {
      if (m.is_vacuum()) continue;
      if (auto it = consumed_by.find(m); it != consumed_by.end()) {
        issues.push_back({i, m.name,
                          "mode '" + m.name + "' consumed twice (already used by element " +
                              std::to_string(it->second) + ")"});
        continue;
      }
      consumed_by[m] = i;
      if (!available.contains(m)) {
        issues.push_back({i, m.name,
                          "mode '" + m.name + "' consumed before it is produced"});
      } else {
        available.erase(m);
      }
    }
    for (const SpatialMode& m : e.outputs) {
      if (m.is_vacuum()) continue;
      if (auto it = produced_by.find(m); it != produced_by.end()) {
        issues.push_back({i, m.name,
                          "mode '" + m.name + "' produced twice (already produced by element " +
                              std::to_string(it->second) + ")"});
        continue;
      }
      produced_by[m] = i;
      available.insert(m);
    }
  }

  // Terminal modes must be bound to detectors through a pbs.
  for (const SpatialMode& m : available) {
    std::string owner = produced_by.contains(m)
                            ? "element " + std::to_string(produced_by[m])
                            : "circuit input";
    issues.push_back({produced_by.contains(m)
                          ? std::optional<std::size_t>(produced_by[m])
                          : std::nullopt,
                      m.name,
                      "terminal mode '" + m.name + "' (" + owner +
                          ") is not bound to detectors"});
  }

  // Detector indices: positive, unique, contiguous from 1.
  std::map<int, std::size_t> detector_owner;
  int max_index = 0;
  for (std::size_t i = 0; i < c.elements.size(); ++i) {
    const Element& e = c.elements[i];
    if (e.kind != ElementKind::PolarizingBeamSplitter) continue;
    for (const DetectorId& d : e.detectors) {
      if (d.index < 1) {
        issues.push_back({i, "D" + std::to_string(d.index),
                          "detector index " + std::to_string(d.index) +
                              " must be >= 1"});
        continue;
      }
      if (auto it = detector_owner.find(d.index); it != detector_owner.end()) {
        issues.push_back({i, "D" + std::to_string(d.index),
                          "detector D" + std::to_string(d.index) +
                              " declared twice (already used by element " +
                              std::to_string(it->second) + ")"});
        continue;
      }
      detector_owner[d.index] = i;
      max_index = std::max(max_index, d.index);
    }
  }
  for (int k = 1; k <= max_index; ++k) {
    if (!detector_owner.contains(k)) {
      issues.push_back({std::nullopt, "D" + std::to_string(k),
                        "detector indices are not contiguous: D" +
                            std::to_string(k) + " is missing"});
    }
  }

  std::set<std::string> tap_names;
  for (const TapPoint& t : c.taps) {
    if (t.after_element >= c.elements.size()) {
      issues.push_back({std::nullopt, t.name,
                        "tap '" + t.name + "' is placed after element " +
                            std::to_string(t.after_element) +
                            " but the circuit has " +
                            std::to_string(c.elements.size()) + " elements"});
    }
    if (!tap_names.insert(t.name).second) {
      issues.push_back({std::nullopt, t.name,
                        "tap '" + t.name + "' declared twice"});
    }
  }

  return issues;
}

std::vector<std::string> validate(const Circuit& c) {
  std::vector<std::string> out;
  for (const ValidationIssue& issue : validate_circuit(c)) {
    std::string line;
    if (issue.element) {
      line = "element " + std::to_string(*issue.element) + ": ";
    }
    line += issue.message;
    out.push_back(std::move(line));
  }
  return out;
}

namespace {

SpatialMode port_or_vacuum_name(const SpatialMode& m, int position) {
  if (!m.is_vacuum()) return m;
  return SpatialMode{"~vac" + std::to_string(position)};
}

}  // namespace

ElementMatrix element_matrix(const Element& e) {
  ElementMatrix em;
  const Amplitude one{1.0, 0.0};
  switch (e.kind) {
    case ElementKind::BeamSplitter: {
      if (e.inputs.size() != 2 || e.outputs.size() != 2) {
        throw std::invalid_argument("bs requires 2 inputs and 2 outputs");
      }
      const SpatialMode in1 = port_or_vacuum_name(e.inputs[0], 1);
      const SpatialMode in2 = port_or_vacuum_name(e.inputs[1], 2);
      for (Polarization p : {Polarization::H, Polarization::V}) {
        em.inputs.push_back({in1, p});
        em.inputs.push_back({in2, p});
        em.outputs.push_back({e.outputs[0], p});
        em.outputs.push_back({e.outputs[1], p});
      }
      const double r = kInvSqrt2;
      em.mat = {{{r, 0}, {r, 0}, {0, 0}, {0, 0}},
                {{r, 0}, {-r, 0}, {0, 0}, {0, 0}},
                {{0, 0}, {0, 0}, {r, 0}, {r, 0}},
                {{0, 0}, {0, 0}, {r, 0}, {-r, 0}}};
      break;
    }
    case ElementKind::HalfWavePlate: {
      if (e.inputs.size() != 1 || e.outputs.size() != 1) {
        throw std::invalid_argument("hwp requires 1 input and 1 output");
      }
      em.inputs = {{e.inputs[0], Polarization::H}, {e.inputs[0], Polarization::V}};
      em.outputs = {{e.outputs[0], Polarization::H}, {e.outputs[0], Polarization::V}};
      em.mat = {{{0, 0}, one}, {one, {0, 0}}};
      break;
    }
    case ElementKind::PolarizationPhase: {
      if (e.inputs.size() != 1 || e.outputs.size() != 1) {
        throw std::invalid_argument("phase requires 1 input and 1 output");
      }
      em.inputs = {{e.inputs[0], Polarization::H}, {e.inputs[0], Polarization::V}};
      em.outputs = {{e.outputs[0], Polarization::H}, {e.outputs[0], Polarization::V}};
      em.mat = {{one, {0, 0}}, {{0, 0}, std::polar(1.0, e.phase)}};
      break;
    }
    case ElementKind::PolarizingBeamSplitter: {
      if (e.inputs.size() != 1) {
        throw std::invalid_argument("pbs requires exactly 1 input");
      }
      em.inputs = {{e.inputs[0], Polarization::H}, {e.inputs[0], Polarization::V}};
      em.outputs = {
          {SpatialMode{"~D" + std::to_string(e.detectors[0].index)}, Polarization::H},
          {SpatialMode{"~D" + std::to_string(e.detectors[1].index)}, Polarization::V}};
      em.mat = {{one, {0, 0}}, {{0, 0}, one}};
      break;
    }
  }
  return em;
}

}  // namespace bellsim
