#include "bellsim/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bellsim {

namespace {

constexpr double kPrune = 1e-15;

void require_valid(const Circuit& c) {
  auto issues = validate(c);
  if (!issues.empty()) {
    throw std::invalid_argument("circuit '" + c.name +
                                "' fails validation: " + issues.front());
  }
}

}  // namespace

std::string DetectorPair::label() const {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

Amplitude TwoPhotonAmplitudeMap::at(DetectorPair k) const {
  auto it = entries.find(k);
  return it == entries.end() ? Amplitude{} : it->second;
}

double TwoPhotonAmplitudeMap::total_probability() const {
  double total = 0.0;
  for (const auto& [key, amp] : entries) {
    total += (key.diagonal() ? 2.0 : 1.0) * std::norm(amp);
  }
  return total;
}

Amplitude TapState::at(const PhotonModePair& k) const {
  auto it = entries.find(k);
  return it == entries.end() ? Amplitude{} : it->second;
}

double TapState::total_probability() const {
  double total = 0.0;
  for (const auto& [key, amp] : entries) {
    total += (key.diagonal() ? 2.0 : 1.0) * std::norm(amp);
  }
  return total;
}

SinglePhotonState evolve_single_partial(const Circuit& c,
                                        const PhotonMode& input,
                                        std::size_t n_elements) {
  if (std::find(c.input_modes.begin(), c.input_modes.end(), input.spatial) ==
      c.input_modes.end()) {
    throw std::invalid_argument("input mode '" + input.spatial.name +
                                "' is not an input of circuit '" + c.name + "'");
  }
  SinglePhotonState state;
  state.accumulate(input, Amplitude{1.0, 0.0});

  const std::size_t limit = std::min(n_elements, c.elements.size());
  for (std::size_t idx = 0; idx < limit; ++idx) {
    const Element& e = c.elements[idx];
    switch (e.kind) {
      case ElementKind::BeamSplitter: {
        for (Polarization p : {Polarization::H, Polarization::V}) {
          Amplitude a1{}, a2{};
          if (!e.inputs[0].is_vacuum()) {
            PhotonMode m{e.inputs[0], p};
            a1 = state.amplitude(m);
            state.accumulate(m, -a1);
          }
          if (!e.inputs[1].is_vacuum()) {
            PhotonMode m{e.inputs[1], p};
            a2 = state.amplitude(m);
            state.accumulate(m, -a2);
          }
          if (a1 != Amplitude{} || a2 != Amplitude{}) {
            state.accumulate({e.outputs[0], p}, (a1 + a2) * kInvSqrt2);
            state.accumulate({e.outputs[1], p}, (a1 - a2) * kInvSqrt2);
          }
        }
        break;
      }
      case ElementKind::HalfWavePlate: {
        const Amplitude h = state.amplitude({e.inputs[0], Polarization::H});
        const Amplitude v = state.amplitude({e.inputs[0], Polarization::V});
        state.accumulate({e.inputs[0], Polarization::H}, -h);
        state.accumulate({e.inputs[0], Polarization::V}, -v);
        state.accumulate({e.outputs[0], Polarization::V}, h);
        state.accumulate({e.outputs[0], Polarization::H}, v);
        break;
      }
      case ElementKind::PolarizationPhase: {
        const Amplitude h = state.amplitude({e.inputs[0], Polarization::H});
        const Amplitude v = state.amplitude({e.inputs[0], Polarization::V});
        state.accumulate({e.inputs[0], Polarization::H}, -h);
        state.accumulate({e.inputs[0], Polarization::V}, -v);
        state.accumulate({e.outputs[0], Polarization::H}, h);
        state.accumulate({e.outputs[0], Polarization::V},
                         v * std::polar(1.0, e.phase));
        break;
      }
      case ElementKind::PolarizingBeamSplitter:
        // Terminal: amplitudes stay on the pbs input mode and are routed to
        // detectors via the detector map.
        break;
    }
  }
  return state;
}

SinglePhotonState evolve_single(const Circuit& c, const PhotonMode& input) {
  return evolve_single_partial(c, input, c.elements.size());
}

std::vector<Amplitude> to_detector_row(const Circuit& c,
                                       const SinglePhotonState& s) {
  std::vector<Amplitude> row(static_cast<std::size_t>(c.detector_count()));
  for (const auto& [mode, amp] : s.entries()) {
    auto it = c.detector_map.find(mode);
    if (it == c.detector_map.end()) {
      throw std::invalid_argument("mode '" + mode.label() +
                                  "' carries amplitude but is not detector-bound");
    }
    row[static_cast<std::size_t>(it->second.index - 1)] += amp;
  }
  return row;
}

CoefficientTable coefficient_table(const Circuit& c) {
  require_valid(c);
  if (c.input_modes.size() != 2) {
    throw std::invalid_argument("coefficient tables need a two-input circuit; '" +
                                c.name + "' has " +
                                std::to_string(c.input_modes.size()));
  }
  const SpatialMode& arm1 = c.input_modes[0];
  const SpatialMode& arm2 = c.input_modes[1];

  CoefficientTable t;
  t.scheme = c.name;
  t.detector_count = c.detector_count();
  const std::array<PhotonMode, 4> inputs = {
      PhotonMode{arm1, Polarization::H}, PhotonMode{arm2, Polarization::H},
      PhotonMode{arm1, Polarization::V}, PhotonMode{arm2, Polarization::V}};
  for (std::size_t r = 0; r < 4; ++r) {
    t.rows[r] = to_detector_row(c, evolve_single(c, inputs[r]));
  }
  return t;
}

namespace {

// Row index of a Bell-term photon mode in the coefficient table:
// (H, arm1)=0, (H, arm2)=1, (V, arm1)=2, (V, arm2)=3. The decomposition is
// built over arms a'/b' which map positionally onto the circuit's two inputs.
std::size_t term_row(const PhotonMode& m, bool first_arm) {
  std::size_t r = first_arm ? 0 : 1;
  if (m.pol == Polarization::V) r += 2;
  return r;
}

}  // namespace

TwoPhotonAmplitudeMap combine_two_photon(const CoefficientTable& t,
                                         BellState state) {
  TwoPhotonAmplitudeMap out;
  out.scheme = t.scheme;
  out.state = state;

  const int n = t.detector_count;
  for (const BellTerm& term : decompose_bell(state).terms) {
    const auto& row1 = t.rows[term_row(term.first, true)];
    const auto& row2 = t.rows[term_row(term.second, false)];
    for (int i = 1; i <= n; ++i) {
      const Amplitude r1i = row1[static_cast<std::size_t>(i - 1)];
      const Amplitude r2i = row2[static_cast<std::size_t>(i - 1)];
      out.entries[{i, i}] += term.coeff * r1i * r2i;
      for (int j = i + 1; j <= n; ++j) {
        const Amplitude r1j = row1[static_cast<std::size_t>(j - 1)];
        const Amplitude r2j = row2[static_cast<std::size_t>(j - 1)];
        out.entries[{i, j}] += term.coeff * (r1i * r2j + r1j * r2i);
      }
    }
  }
  std::erase_if(out.entries,
                [](const auto& kv) { return std::abs(kv.second) <= kPrune; });
  return out;
}

TapState evolve_to_tap(const Circuit& c, BellState state,
                       std::string_view tap_name) {
  auto tap_index = c.find_tap(tap_name);
  if (!tap_index) {
    std::string known;
    for (const TapPoint& t : c.taps) {
      if (!known.empty()) known += ", ";
      known += t.name;
    }
    throw std::invalid_argument("unknown tap '" + std::string(tap_name) +
                                "' in circuit '" + c.name + "' (taps: " + known +
                                ")");
  }
  if (c.input_modes.size() != 2) {
    throw std::invalid_argument("tap states need a two-input circuit");
  }
  const std::size_t n_elements = c.taps[*tap_index].after_element + 1;

  TapState out;
  out.tap = std::string(tap_name);
  out.state = state;

  const BellDecomposition d =
      decompose_bell(state, c.input_modes[0], c.input_modes[1]);
  for (const BellTerm& term : d.terms) {
    const SinglePhotonState u = evolve_single_partial(c, term.first, n_elements);
    const SinglePhotonState v = evolve_single_partial(c, term.second, n_elements);
    for (const auto& [pm, pa] : u.entries()) {
      for (const auto& [qm, qa] : v.entries()) {
        out.entries[PhotonModePair::of(pm, qm)] += term.coeff * pa * qa;
      }
    }
  }
  std::erase_if(out.entries,
                [](const auto& kv) { return std::abs(kv.second) <= kPrune; });
  return out;
}

namespace {

using Matrix = std::vector<std::vector<Amplitude>>;

Matrix identity(std::size_t n) {
  Matrix m(n, std::vector<Amplitude>(n));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = Amplitude{1.0, 0.0};
  return m;
}

// Basis of every photon mode touched by the circuit, with a fresh virtual
// mode per vacuum port so each element block stays square and unitary.
struct GlobalBasis {
  std::vector<PhotonMode> modes;
  std::map<PhotonMode, std::size_t> index;
  // per element: resolved input spatial modes (vacuum ports replaced)
  std::vector<std::array<SpatialMode, 2>> bs_inputs;

  std::size_t at(const PhotonMode& m) const {
    auto it = index.find(m);
    if (it == index.end()) throw std::logic_error("mode missing from basis");
    return it->second;
  }
};

GlobalBasis build_basis(const Circuit& c) {
  GlobalBasis basis;
  auto add_spatial = [&](const SpatialMode& m) {
    for (Polarization p : {Polarization::H, Polarization::V}) {
      PhotonMode pm{m, p};
      if (basis.index.emplace(pm, basis.modes.size()).second) {
        basis.modes.push_back(pm);
      }
    }
  };

  std::set<std::string> taken;
  for (const SpatialMode& m : c.input_modes) taken.insert(m.name);
  for (const Element& e : c.elements) {
    for (const SpatialMode& m : e.outputs) taken.insert(m.name);
  }
  int vacuum_counter = 0;
  auto fresh_vacuum_name = [&] {
    std::string name;
    do {
      name = "~vac" + std::to_string(vacuum_counter++);
    } while (taken.contains(name));
    return SpatialMode{name};
  };

  for (const SpatialMode& m : c.input_modes) add_spatial(m);
  basis.bs_inputs.resize(c.elements.size());
  for (std::size_t i = 0; i < c.elements.size(); ++i) {
    const Element& e = c.elements[i];
    if (e.kind == ElementKind::BeamSplitter) {
      for (int port = 0; port < 2; ++port) {
        SpatialMode in = e.inputs[static_cast<std::size_t>(port)];
        if (in.is_vacuum()) in = fresh_vacuum_name();
        basis.bs_inputs[i][static_cast<std::size_t>(port)] = in;
        add_spatial(in);
      }
    }
    for (const SpatialMode& m : e.outputs) add_spatial(m);
  }
  return basis;
}

// Full-space unitary of one element: the element block on its span, identity
// elsewhere. Polarizing beam splitters are relabelings and contribute
// identity; their routing is applied through the detector map afterwards.
Matrix element_global_matrix(const Circuit& c, const GlobalBasis& basis,
                             std::size_t idx) {
  const Element& e = c.elements[idx];
  Matrix m = identity(basis.modes.size());
  auto clear_column = [&](std::size_t col) {
    for (auto& row : m) row[col] = Amplitude{};
  };
  switch (e.kind) {
    case ElementKind::BeamSplitter: {
      const SpatialMode& in1 = basis.bs_inputs[idx][0];
      const SpatialMode& in2 = basis.bs_inputs[idx][1];
      for (Polarization p : {Polarization::H, Polarization::V}) {
        const std::size_t c1 = basis.at({in1, p});
        const std::size_t c2 = basis.at({in2, p});
        const std::size_t r1 = basis.at({e.outputs[0], p});
        const std::size_t r2 = basis.at({e.outputs[1], p});
        clear_column(c1);
        clear_column(c2);
        m[r1][c1] = Amplitude{kInvSqrt2, 0.0};
        m[r2][c1] = Amplitude{kInvSqrt2, 0.0};
        m[r1][c2] = Amplitude{kInvSqrt2, 0.0};
        m[r2][c2] = Amplitude{-kInvSqrt2, 0.0};
      }
      break;
    }
    case ElementKind::HalfWavePlate: {
      const std::size_t ch = basis.at({e.inputs[0], Polarization::H});
      const std::size_t cv = basis.at({e.inputs[0], Polarization::V});
      const std::size_t rh = basis.at({e.outputs[0], Polarization::H});
      const std::size_t rv = basis.at({e.outputs[0], Polarization::V});
      clear_column(ch);
      clear_column(cv);
      m[rv][ch] = Amplitude{1.0, 0.0};
      m[rh][cv] = Amplitude{1.0, 0.0};
      break;
    }
    case ElementKind::PolarizationPhase: {
      const std::size_t ch = basis.at({e.inputs[0], Polarization::H});
      const std::size_t cv = basis.at({e.inputs[0], Polarization::V});
      const std::size_t rh = basis.at({e.outputs[0], Polarization::H});
      const std::size_t rv = basis.at({e.outputs[0], Polarization::V});
      clear_column(ch);
      clear_column(cv);
      m[rh][ch] = Amplitude{1.0, 0.0};
      m[rv][cv] = std::polar(1.0, e.phase);
      break;
    }
    case ElementKind::PolarizingBeamSplitter:
      break;
  }
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix out(n, std::vector<Amplitude>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Amplitude aik = a[i][k];
      if (aik == Amplitude{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out[i][j] += aik * b[k][j];
      }
    }
  }
  return out;
}

}  // namespace

TwoPhotonAmplitudeMap brute_force_two_photon(const Circuit& c,
                                             BellState state) {
  require_valid(c);
  if (c.input_modes.size() != 2) {
    throw std::invalid_argument("two-photon evolution needs a two-input circuit");
  }

  const GlobalBasis basis = build_basis(c);
  Matrix total = identity(basis.modes.size());
  for (std::size_t i = 0; i < c.elements.size(); ++i) {
    total = multiply(element_global_matrix(c, basis, i), total);
  }

  // Ordered two-photon tensor from the Bell expansion.
  const std::size_t n = basis.modes.size();
  Matrix tensor(n, std::vector<Amplitude>(n));
  const BellDecomposition d =
      decompose_bell(state, c.input_modes[0], c.input_modes[1]);
  for (const BellTerm& term : d.terms) {
    const std::size_t col1 = basis.at(term.first);
    const std::size_t col2 = basis.at(term.second);
    for (std::size_t p = 0; p < n; ++p) {
      const Amplitude up = total[p][col1];
      if (up == Amplitude{}) continue;
      for (std::size_t q = 0; q < n; ++q) {
        tensor[p][q] += term.coeff * up * total[q][col2];
      }
    }
  }

  // Symmetrize onto merged detector pairs.
  TwoPhotonAmplitudeMap out;
  out.scheme = c.name;
  out.state = state;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      const Amplitude amp = tensor[p][q];
      if (std::abs(amp) <= kPrune) continue;
      auto ip = c.detector_map.find(basis.modes[p]);
      auto iq = c.detector_map.find(basis.modes[q]);
      if (ip == c.detector_map.end() || iq == c.detector_map.end()) {
        throw std::logic_error("two-photon amplitude stranded on unbound mode '" +
                               basis.modes[p].label() + "'/'" +
                               basis.modes[q].label() + "'");
      }
      out.entries[DetectorPair::of(ip->second.index, iq->second.index)] += amp;
    }
  }
  std::erase_if(out.entries,
                [](const auto& kv) { return std::abs(kv.second) <= kPrune; });

  const double total_prob = out.total_probability();
  if (std::abs(total_prob - 1.0) > kTol) {
    throw std::logic_error("two-photon projection lost probability: " +
                           std::to_string(total_prob));
  }
  return out;
}

}  // namespace bellsim
