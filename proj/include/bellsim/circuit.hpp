#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bellsim/state.hpp"

namespace bellsim {

enum class ElementKind : std::uint8_t {
  BeamSplitter,
  HalfWavePlate,
  PolarizationPhase,
  PolarizingBeamSplitter,
};

std::string_view to_string(ElementKind k);

struct DetectorId {
  int index = 0;   // >= 1, contiguous from 1 within a circuit

  auto operator<=>(const DetectorId&) const = default;
};

/// A lossless linear element. Beam splitters follow a single Hadamard
/// convention with ordered ports:
///   in1 -> (out1 + out2)/sqrt(2),   in2 -> (out1 - out2)/sqrt(2)
/// per polarization; either input port may be the vacuum. Polarizing beam
/// splitters terminate a mode: H transmits to detectors[0], V reflects to
/// detectors[1].
struct Element {
  ElementKind kind;
  std::vector<SpatialMode> inputs;
  std::vector<SpatialMode> outputs;
  double phase = 0.0;                    // PolarizationPhase only, radians on |V>
  std::array<DetectorId, 2> detectors{}; // PolarizingBeamSplitter only

  bool operator==(const Element&) const = default;

  static Element beam_splitter(SpatialMode in1, SpatialMode in2,
                               SpatialMode out1, SpatialMode out2);
  static Element half_wave_plate(SpatialMode in, SpatialMode out);
  static Element polarization_phase(double phase, SpatialMode in,
                                    SpatialMode out);
  static Element polarizing_beam_splitter(SpatialMode in, DetectorId transmit,
                                          DetectorId reflect);
};

/// A named cut through the circuit, placed after the element at the given
/// index. Tap states are taken on the open modes at that point.
struct TapPoint {
  std::string name;
  std::size_t after_element = 0;

  bool operator==(const TapPoint&) const = default;
};

struct Circuit {
  std::string name;
  std::vector<Element> elements;          // topological order
  std::vector<SpatialMode> input_modes;   // derived: consumed, never produced
  std::map<PhotonMode, DetectorId> detector_map;  // derived from PBS elements
  std::vector<TapPoint> taps;

  bool operator==(const Circuit&) const = default;

  [[nodiscard]] int detector_count() const;
  [[nodiscard]] std::optional<std::size_t> find_tap(std::string_view name) const;
};

/// Builds a circuit from its element list, deriving input modes (in order of
/// first consumption) and the detector map. Performs no validation.
Circuit assemble_circuit(std::string name, std::vector<Element> elements,
                         std::vector<TapPoint> taps = {});

/// Six-detector analyzer in which only one output arm of the first beam
/// splitter passes through the second interferometer stage.
Circuit build_symmetry_broken();

/// Eight-detector analyzer with the second interferometer stage duplicated
/// on both output arms.
Circuit build_symmetric();

struct ValidationIssue {
  std::optional<std::size_t> element;  // offending element index, if any
  std::optional<std::string> token;    // offending mode/detector text, if any
  std::string message;
};

/// Structural checks: single production and consumption per mode, topological
/// availability, every terminal mode detector-bound, detector indices unique
/// and contiguous from 1, taps in range with unique names. Empty result means
/// the circuit is well-formed.
std::vector<ValidationIssue> validate_circuit(const Circuit& c);

/// Same checks flattened to human-readable strings with element indices.
std::vector<std::string> validate(const Circuit& c);

/// A linear element as an explicit matrix over its photon-mode span, with
/// vacuum ports materialized so the matrix stays square and unitary.
struct ElementMatrix {
  std::vector<PhotonMode> inputs;   // column basis
  std::vector<PhotonMode> outputs;  // row basis
  std::vector<std::vector<Amplitude>> mat;  // mat[row][col]
};

ElementMatrix element_matrix(const Element& e);

}  // namespace bellsim
