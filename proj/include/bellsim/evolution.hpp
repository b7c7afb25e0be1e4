#pragma once

#include <map>
#include <string>
#include <vector>

#include "bellsim/circuit.hpp"
#include "bellsim/state.hpp"

namespace bellsim {

/// Unordered detector pair with i <= j; (i, i) means both photons at one
/// detector. Sorted lexicographically, which is also the sampling order.
struct DetectorPair {
  int i = 0;
  int j = 0;

  auto operator<=>(const DetectorPair&) const = default;

  static DetectorPair of(int a, int b) {
    return a <= b ? DetectorPair{a, b} : DetectorPair{b, a};
  }
  [[nodiscard]] bool diagonal() const { return i == j; }
  [[nodiscard]] std::string label() const;  // "(i,j)"
};

/// Unordered photon-mode pair in canonical order, for states taken at taps.
struct PhotonModePair {
  PhotonMode a;
  PhotonMode b;

  auto operator<=>(const PhotonModePair&) const = default;

  static PhotonModePair of(PhotonMode x, PhotonMode y) {
    return x <= y ? PhotonModePair{std::move(x), std::move(y)}
                  : PhotonModePair{std::move(y), std::move(x)};
  }
  [[nodiscard]] bool diagonal() const { return a == b; }
};

/// The four single-photon transfer rows of a two-input analyzer:
/// row 0 = H on arm 1, row 1 = H on arm 2, row 2 = V on arm 1,
/// row 3 = V on arm 2, each over detectors 1..detector_count.
struct CoefficientTable {
  std::string scheme;
  int detector_count = 0;
  std::array<std::vector<Amplitude>, 4> rows;

  [[nodiscard]] Amplitude at(int row, DetectorId det) const {
    return rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(det.index - 1)];
  }
};

/// Merged two-photon amplitudes over detector pairs. The coefficient on a
/// diagonal key (i, i) is the product-form amplitude; the physical
/// two-photon-at-one-detector amplitude carries an extra sqrt(2), so the
/// event probability is |c|^2 off the diagonal and 2|c|^2 on it.
struct TwoPhotonAmplitudeMap {
  std::string scheme;
  BellState state = BellState::PsiMinus;
  std::map<DetectorPair, Amplitude> entries;

  [[nodiscard]] Amplitude at(DetectorPair k) const;
  /// sum_{i<j} |c_ij|^2 + sum_i 2 |c_ii|^2; equals 1 for a full evolution.
  [[nodiscard]] double total_probability() const;
};

/// Same merged representation keyed by photon modes, for mid-circuit cuts.
struct TapState {
  std::string tap;
  BellState state = BellState::PsiMinus;
  std::map<PhotonModePair, Amplitude> entries;

  [[nodiscard]] Amplitude at(const PhotonModePair& k) const;
  [[nodiscard]] double total_probability() const;
};

/// Propagates one single-photon basis state through every element, returning
/// the amplitudes on the terminal (detector-bound) photon modes.
SinglePhotonState evolve_single(const Circuit& c, const PhotonMode& input);

/// As above but stopping after the first n_elements elements.
SinglePhotonState evolve_single_partial(const Circuit& c,
                                        const PhotonMode& input,
                                        std::size_t n_elements);

/// Maps a terminal-mode state through the detector bindings; index k holds
/// the amplitude at detector k+1.
std::vector<Amplitude> to_detector_row(const Circuit& c,
                                       const SinglePhotonState& s);

/// Stacks the four canonical input evolutions. Requires a circuit with
/// exactly two input modes that passes validation.
CoefficientTable coefficient_table(const Circuit& c);

/// Merges two coefficient rows per Bell term into coincidence amplitudes:
///   c_ij = sum_t g_t (R[r1]_i R[r2]_j + R[r1]_j R[r2]_i)   (i < j)
///   c_ii = sum_t g_t  R[r1]_i R[r2]_i
/// This route never touches the two-photon tensor; the tensor lives in
/// brute_force_two_photon so the two computations stay independent.
TwoPhotonAmplitudeMap combine_two_photon(const CoefficientTable& t,
                                         BellState state);

/// Two-photon state on the open modes at a named tap cut.
TapState evolve_to_tap(const Circuit& c, BellState state,
                       std::string_view tap_name);

/// Independent oracle: composes the full single-photon unitary over every
/// mode in the circuit, forms the ordered two-photon tensor from the Bell
/// expansion, symmetrizes it onto merged detector pairs and checks that the
/// projected probabilities (with the bosonic factor 2 on diagonals) sum to 1.
TwoPhotonAmplitudeMap brute_force_two_photon(const Circuit& c,
                                             BellState state);

}  // namespace bellsim
