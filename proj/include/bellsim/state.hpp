#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <string_view>

namespace bellsim {

using Amplitude = std::complex<double>;

/// Global tolerance for amplitude comparisons. Every quantity handled here is
/// a small dyadic multiple of 1/sqrt(2), so machine precision leaves ~4 orders
/// of magnitude of headroom below this.
inline constexpr double kTol = 1e-12;

inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

enum class Polarization : std::uint8_t { H = 0, V = 1 };

char to_char(Polarization p);

/// A labelled spatial mode (an interferometer arm). Primes are legal in
/// names, mirroring the usual a'/b' conventions for input arms.
struct SpatialMode {
  std::string name;

  auto operator<=>(const SpatialMode&) const = default;
  [[nodiscard]] bool is_vacuum() const { return name.empty(); }
  static SpatialMode vacuum() { return SpatialMode{}; }
};

/// One slot of the single-photon basis: a spatial mode together with a
/// polarization. Ordering is lexicographic on the mode name with H before V,
/// which fixes the canonical index of every amplitude vector.
struct PhotonMode {
  SpatialMode spatial;
  Polarization pol = Polarization::H;

  auto operator<=>(const PhotonMode&) const = default;

  /// Canonical text form, e.g. "H@a'".
  [[nodiscard]] std::string label() const;
  static PhotonMode from_label(std::string_view label);
};

inline PhotonMode horizontal(std::string name) {
  return PhotonMode{SpatialMode{std::move(name)}, Polarization::H};
}
inline PhotonMode vertical(std::string name) {
  return PhotonMode{SpatialMode{std::move(name)}, Polarization::V};
}

/// Sparse single-photon amplitude vector. Absent modes carry amplitude zero;
/// entries with negligible magnitude are dropped on insertion so that the
/// support of the map is exactly the support of the state.
class SinglePhotonState {
 public:
  using Map = std::map<PhotonMode, Amplitude>;

  SinglePhotonState() = default;

  [[nodiscard]] Amplitude amplitude(const PhotonMode& m) const;
  void accumulate(const PhotonMode& m, Amplitude a);

  [[nodiscard]] double squared_norm() const;
  [[nodiscard]] bool is_normalized(double tol = kTol) const;

  [[nodiscard]] const Map& entries() const { return entries_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  bool operator==(const SinglePhotonState&) const = default;

 private:
  Map entries_;
};

enum class BellState : std::uint8_t {
  PsiMinus = 0,
  PsiPlus = 1,
  PhiMinus = 2,
  PhiPlus = 3,
};

inline constexpr std::array<BellState, 4> kAllBellStates = {
    BellState::PsiMinus, BellState::PsiPlus, BellState::PhiMinus,
    BellState::PhiPlus};

/// Machine name used in JSON/CSV artifacts: psi_minus, psi_plus, ...
std::string_view to_string(BellState s);
/// Accepts psi-, psi+, phi-, phi+ and the machine names above.
BellState bell_state_from_string(std::string_view name);

/// One product term of a Bell state over the two input arms.
struct BellTerm {
  PhotonMode first;    // photon on the first input arm
  PhotonMode second;   // photon on the second input arm
  Amplitude coeff;

  bool operator==(const BellTerm&) const = default;
};

/// The two-term expansion of a Bell state, coefficients +-1/sqrt(2).
struct BellDecomposition {
  std::array<BellTerm, 2> terms;

  bool operator==(const BellDecomposition&) const = default;
};

/// Expands a Bell state over the given input arms (defaults a', b').
BellDecomposition decompose_bell(BellState s);
BellDecomposition decompose_bell(BellState s, const SpatialMode& arm1,
                                 const SpatialMode& arm2);

/// <X|Y> of two decompositions viewed as vectors over ordered term slots.
Amplitude decomposition_inner_product(const BellDecomposition& x,
                                      const BellDecomposition& y);

/// Single-arm polarization operations. Both applies the exchange first and
/// the V phase flip second; note that Both squared is minus the identity.
enum class LocalOp : std::uint8_t {
  PolarizationExchange,    // |H> <-> |V>
  PolarizationPhaseFlip,   // |V> -> -|V>
  Both,
};

struct LocalTransformResult {
  BellState state;
  Amplitude phase;   // transformed decomposition == phase * canonical(state)
};

/// Applies op to one input arm and identifies the resulting Bell state
/// together with the exact global phase picked up. The Bell basis is closed
/// under these operations, so this never fails for a valid arm.
LocalTransformResult local_transform(BellState s, const SpatialMode& arm,
                                     LocalOp op);

}  // namespace bellsim
