#include "bellsim/state.hpp"

#include <cmath>
#include <stdexcept>

namespace bellsim {

namespace {

// Magnitudes this small can only be rounding residue: every genuine amplitude
// in a normalized two-photon pipeline is at least 1/(4*sqrt(2)) ~ 0.177.
constexpr double kPruneThreshold = 1e-15;

}  // namespace

char to_char(Polarization p) { return p == Polarization::H ? 'H' : 'V'; }

std::string PhotonMode::label() const {
  std::string out;
  out += to_char(pol);
  out += '@';
  out += spatial.name;
  return out;
}

PhotonMode PhotonMode::from_label(std::string_view label) {
  if (label.size() < 3 || label[1] != '@' || (label[0] != 'H' && label[0] != 'V')) {
    throw std::invalid_argument("bad photon mode label: " + std::string(label));
  }
  Polarization pol = label[0] == 'H' ? Polarization::H : Polarization::V;
  return PhotonMode{SpatialMode{std::string(label.substr(2))}, pol};
}

Amplitude SinglePhotonState::amplitude(const PhotonMode& m) const {
  auto it = entries_.find(m);
  return it == entries_.end() ? Amplitude{} : it->second;
}

void SinglePhotonState::accumulate(const PhotonMode& m, Amplitude a) {
  auto [it, inserted] = entries_.try_emplace(m, a);
  if (!inserted) it->second += a;
  if (std::abs(it->second) <= kPruneThreshold) entries_.erase(it);
}

double SinglePhotonState::squared_norm() const {
  double total = 0.0;
  for (const auto& [mode, amp] : entries_) total += std::norm(amp);
  return total;
}

bool SinglePhotonState::is_normalized(double tol) const {
  return std::abs(squared_norm() - 1.0) <= tol;
}

std::string_view to_string(BellState s) {
  switch (s) {
    case BellState::PsiMinus: return "psi_minus";
    case BellState::PsiPlus: return "psi_plus";
    case BellState::PhiMinus: return "phi_minus";
    case BellState::PhiPlus: return "phi_plus";
  }
  throw std::logic_error("unreachable bell state");
}

BellState bell_state_from_string(std::string_view name) {
  if (name == "psi-" || name == "psi_minus") return BellState::PsiMinus;
  if (name == "psi+" || name == "psi_plus") return BellState::PsiPlus;
  if (name == "phi-" || name == "phi_minus") return BellState::PhiMinus;
  if (name == "phi+" || name == "phi_plus") return BellState::PhiPlus;
  throw std::invalid_argument("unknown bell state: " + std::string(name));
}

BellDecomposition decompose_bell(BellState s) {
  return decompose_bell(s, SpatialMode{"a'"}, SpatialMode{"b'"});
}

BellDecomposition decompose_bell(BellState s, const SpatialMode& arm1,
                                 const SpatialMode& arm2) {
  const PhotonMode h1{arm1, Polarization::H};
  const PhotonMode v1{arm1, Polarization::V};
  const PhotonMode h2{arm2, Polarization::H};
  const PhotonMode v2{arm2, Polarization::V};
  const Amplitude plus{kInvSqrt2, 0.0};
  const Amplitude minus{-kInvSqrt2, 0.0};
  switch (s) {
    case BellState::PsiMinus:
      return {{BellTerm{h1, v2, plus}, BellTerm{v1, h2, minus}}};
    case BellState::PsiPlus:
      return {{BellTerm{h1, v2, plus}, BellTerm{v1, h2, plus}}};
    case BellState::PhiMinus:
      return {{BellTerm{h1, h2, plus}, BellTerm{v1, v2, minus}}};
    case BellState::PhiPlus:
      return {{BellTerm{h1, h2, plus}, BellTerm{v1, v2, plus}}};
  }
  throw std::logic_error("unreachable bell state");
}

Amplitude decomposition_inner_product(const BellDecomposition& x,
                                      const BellDecomposition& y) {
  Amplitude total{};
  for (const auto& tx : x.terms) {
    for (const auto& ty : y.terms) {
      if (tx.first == ty.first && tx.second == ty.second) {
        total += std::conj(tx.coeff) * ty.coeff;
      }
    }
  }
  return total;
}

namespace {

// Applies op to a single polarization ket, returning (new pol, scale).
std::pair<Polarization, Amplitude> apply_local_op(LocalOp op, Polarization p) {
  const Polarization flipped =
      p == Polarization::H ? Polarization::V : Polarization::H;
  switch (op) {
    case LocalOp::PolarizationExchange:
      return {flipped, Amplitude{1.0, 0.0}};
    case LocalOp::PolarizationPhaseFlip:
      return {p, p == Polarization::V ? Amplitude{-1.0, 0.0} : Amplitude{1.0, 0.0}};
    case LocalOp::Both: {
      // exchange first, then flip V
      const Amplitude scale =
          flipped == Polarization::V ? Amplitude{-1.0, 0.0} : Amplitude{1.0, 0.0};
      return {flipped, scale};
    }
  }
  throw std::logic_error("unreachable local op");
}

}  // namespace

LocalTransformResult local_transform(BellState s, const SpatialMode& arm,
                                     LocalOp op) {
  const SpatialMode arm1{"a'"};
  const SpatialMode arm2{"b'"};
  if (arm != arm1 && arm != arm2) {
    throw std::invalid_argument("arm '" + arm.name +
                                "' is not one of the input arms a', b'");
  }

  BellDecomposition d = decompose_bell(s);
  for (auto& term : d.terms) {
    PhotonMode& target = (arm == arm1) ? term.first : term.second;
    auto [pol, scale] = apply_local_op(op, target.pol);
    target.pol = pol;
    term.coeff *= scale;
  }

  // Match against the canonical decompositions up to a global phase.
  for (BellState candidate : kAllBellStates) {
    const BellDecomposition ref = decompose_bell(candidate);
    Amplitude phase{};
    bool consistent = true;
    for (const auto& term : d.terms) {
      bool found = false;
      for (const auto& rterm : ref.terms) {
        if (term.first == rterm.first && term.second == rterm.second) {
          const Amplitude ratio = term.coeff / rterm.coeff;
          if (phase == Amplitude{}) {
            phase = ratio;
          } else if (std::abs(phase - ratio) > kTol) {
            consistent = false;
          }
          found = true;
          break;
        }
      }
      if (!found) consistent = false;
      if (!consistent) break;
    }
    if (consistent && std::abs(std::abs(phase) - 1.0) <= kTol) {
      return LocalTransformResult{candidate, phase};
    }
  }
  throw std::logic_error("transformed state left the Bell basis");
}

}  // namespace bellsim
