#include "bellsim/json_io.hpp"

#include <cstdio>

namespace bellsim {

namespace {

Json complex_json(const Amplitude& a) {
  return Json{{"re", a.real()}, {"im", a.imag()}};
}

Json event_key(const DetectorPair& k) { return Json::array({k.i, k.j}); }

Json per_state_json(const PerState& values) {
  Json out = Json::object();
  for (BellState s : kAllBellStates) {
    out[std::string(to_string(s))] = values[static_cast<std::size_t>(s)];
  }
  return out;
}

constexpr std::array<const char*, 5> kDeclaredNames = {
    "psi_minus", "psi_plus", "phi_minus", "phi_plus", "inconclusive"};

}  // namespace

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Json to_json(const BellDecomposition& d) {
  Json terms = Json::array();
  for (const BellTerm& t : d.terms) {
    terms.push_back(Json{{"first", t.first.label()},
                         {"second", t.second.label()},
                         {"re", t.coeff.real()},
                         {"im", t.coeff.imag()}});
  }
  return Json{{"terms", terms}};
}

Json to_json(const SinglePhotonState& s) {
  Json entries = Json::array();
  for (const auto& [mode, amp] : s.entries()) {
    entries.push_back(
        Json{{"mode", mode.label()}, {"re", amp.real()}, {"im", amp.imag()}});
  }
  return entries;
}

Json to_json(const Circuit& c) {
  Json elements = Json::array();
  for (const Element& e : c.elements) {
    Json el{{"kind", std::string(to_string(e.kind))}};
    switch (e.kind) {
      case ElementKind::BeamSplitter: {
        Json ins = Json::array();
        for (const SpatialMode& m : e.inputs) {
          ins.push_back(m.is_vacuum() ? "vac" : m.name);
        }
        el["inputs"] = ins;
        el["outputs"] = Json::array({e.outputs[0].name, e.outputs[1].name});
        break;
      }
      case ElementKind::HalfWavePlate:
        el["inputs"] = Json::array({e.inputs[0].name});
        el["outputs"] = Json::array({e.outputs[0].name});
        break;
      case ElementKind::PolarizationPhase:
        el["inputs"] = Json::array({e.inputs[0].name});
        el["outputs"] = Json::array({e.outputs[0].name});
        el["phase"] = e.phase;
        break;
      case ElementKind::PolarizingBeamSplitter:
        el["inputs"] = Json::array({e.inputs[0].name});
        el["transmit"] = e.detectors[0].index;
        el["reflect"] = e.detectors[1].index;
        break;
    }
    elements.push_back(el);
  }
  Json inputs = Json::array();
  for (const SpatialMode& m : c.input_modes) inputs.push_back(m.name);
  Json taps = Json::array();
  for (const TapPoint& t : c.taps) {
    taps.push_back(Json{{"name", t.name}, {"after", t.after_element}});
  }
  Json detectors = Json::object();
  for (const auto& [mode, det] : c.detector_map) {
    detectors[mode.label()] = det.index;
  }
  return Json{{"name", c.name},
              {"inputs", inputs},
              {"elements", elements},
              {"taps", taps},
              {"detectors", detectors}};
}

Json to_json(const CoefficientTable& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::array();
    for (const Amplitude& a : row) r.push_back(complex_json(a));
    rows.push_back(r);
  }
  return Json{{"scheme", t.scheme},
              {"detectors", t.detector_count},
              {"rows", rows}};
}

Json to_json(const TwoPhotonAmplitudeMap& m) {
  Json entries = Json::object();
  for (const auto& [key, amp] : m.entries) {
    Json e = complex_json(amp);
    e["prob"] = (key.diagonal() ? 2.0 : 1.0) * std::norm(amp);
    entries[key.label()] = e;
  }
  return Json{{"scheme", m.scheme},
              {"state", std::string(to_string(m.state))},
              {"entries", entries}};
}

Json to_json(const TapState& t, std::string_view scheme, BellState state) {
  Json entries = Json::object();
  for (const auto& [key, amp] : t.entries) {
    entries["(" + key.a.label() + "," + key.b.label() + ")"] = complex_json(amp);
  }
  return Json{{"scheme", std::string(scheme)},
              {"state", std::string(to_string(state))},
              {"tap", t.tap},
              {"entries", entries}};
}

Json to_json(const EventProbabilityMap& p) {
  Json probs = Json::object();
  for (const auto& [key, prob] : p.probs) probs[key.label()] = prob;
  return Json{{"scheme", p.scheme},
              {"state", std::string(to_string(p.state))},
              {"probs", probs}};
}

Json to_json(const RuleSet& r) {
  Json unique = Json::object();
  for (BellState s : kAllBellStates) {
    Json events = Json::array();
    for (const DetectorPair& e : r.unique_for(s)) events.push_back(event_key(e));
    unique[std::string(to_string(s))] = events;
  }
  Json evidence = Json::array();
  for (const DetectorPair& e : r.evidence_events) evidence.push_back(event_key(e));
  Json ambiguous = Json::array();
  for (BellState s : r.ambiguous_states) {
    ambiguous.push_back(std::string(to_string(s)));
  }
  Json class_events = Json::array();
  for (const DetectorPair& e : r.ambiguous_class_events) {
    class_events.push_back(event_key(e));
  }
  return Json{{"scheme", r.scheme},
              {"unique_events", unique},
              {"elimination_target",
               r.elimination_target
                   ? Json(std::string(to_string(*r.elimination_target)))
                   : Json(nullptr)},
              {"evidence_events", evidence},
              {"ambiguous_states", ambiguous},
              {"ambiguous_class_events", class_events}};
}

Json to_json(const SuccessReport& r) {
  Json curve = Json::array();
  for (const SuccessCurveRow& row : r.curve) {
    Json entry = per_state_json(row.s);
    entry["N"] = row.n;
    curve.push_back(entry);
  }
  return Json{{"scheme", r.scheme},
              {"s1", per_state_json(r.s1)},
              {"curve", curve},
              {"capacity_bits",
               Json{{"single_pair", r.capacity_single_pair_bits},
                    {"asymptotic", r.capacity_asymptotic_bits}}}};
}

Json to_json(const ConfusionMatrix& m) {
  Json rows = Json::object();
  Json counts = Json::object();
  for (BellState truth : kAllBellStates) {
    const auto& row = m.counts[static_cast<std::size_t>(truth)];
    std::uint64_t total = 0;
    for (std::uint64_t v : row) total += v;
    if (total == 0) continue;  // row not simulated
    Json freq = Json::object();
    Json cnt = Json::object();
    for (std::size_t k = 0; k < 5; ++k) {
      freq[kDeclaredNames[k]] =
          static_cast<double>(row[k]) / static_cast<double>(m.trials);
      cnt[kDeclaredNames[k]] = row[k];
    }
    rows[std::string(to_string(truth))] = freq;
    counts[std::string(to_string(truth))] = cnt;
  }
  return Json{{"scheme", m.scheme},
              {"N", m.pairs},
              {"trials", m.trials},
              {"seed", m.seed.value},
              {"rng", m.rng},
              {"evidence_policy", std::string(to_string(m.policy))},
              {"rows", rows},
              {"counts", counts}};
}

namespace {

std::string csv_complex(const Amplitude& a) {
  if (a.imag() == 0.0) return csv_number(a.real());
  std::string out = csv_number(a.real());
  out += a.imag() < 0 ? "-" : "+";
  out += csv_number(std::abs(a.imag()));
  out += "i";
  return out;
}

}  // namespace

std::string coefficient_table_csv(const CoefficientTable& t) {
  std::string out = "row";
  for (int d = 1; d <= t.detector_count; ++d) {
    out += ",D" + std::to_string(d);
  }
  out += "\n";
  for (std::size_t r = 0; r < 4; ++r) {
    out += "C" + std::to_string(r + 1);
    for (const Amplitude& a : t.rows[r]) {
      out += "," + csv_complex(a);
    }
    out += "\n";
  }
  return out;
}

std::string success_curve_csv(const std::vector<SuccessCurveRow>& rows) {
  std::string out = "N,psi_minus,psi_plus,phi_minus,phi_plus\n";
  for (const SuccessCurveRow& row : rows) {
    out += std::to_string(row.n);
    for (double v : row.s) out += "," + csv_number(v);
    out += "\n";
  }
  return out;
}

std::string coefficient_table_pretty(const CoefficientTable& t) {
  std::string out = "coefficient table for " + t.scheme + " (" +
                    std::to_string(t.detector_count) + " detectors)\n";
  for (std::size_t r = 0; r < 4; ++r) {
    out += "  C" + std::to_string(r + 1) + ":";
    for (const Amplitude& a : t.rows[r]) {
      char buf[64];
      if (a.imag() == 0.0) {
        std::snprintf(buf, sizeof(buf), " %+9.6f", a.real());
      } else {
        std::snprintf(buf, sizeof(buf), " %+.4f%+.4fi", a.real(), a.imag());
      }
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string amplitude_map_pretty(const TwoPhotonAmplitudeMap& m) {
  std::string out = std::string(to_string(m.state)) + " through " + m.scheme + ":\n";
  for (const auto& [key, amp] : m.entries) {
    char buf[96];
    const double prob = (key.diagonal() ? 2.0 : 1.0) * std::norm(amp);
    if (amp.imag() == 0.0) {
      std::snprintf(buf, sizeof(buf), "  %-7s %+9.6f   P=%.6f\n",
                    key.label().c_str(), amp.real(), prob);
    } else {
      std::snprintf(buf, sizeof(buf), "  %-7s %+.4f%+.4fi P=%.6f\n",
                    key.label().c_str(), amp.real(), amp.imag(), prob);
    }
    out += buf;
  }
  return out;
}

std::string rules_pretty(const RuleSet& r) {
  std::string out = "discrimination rules for " + r.scheme + "\n";
  for (BellState s : kAllBellStates) {
    out += "  " + std::string(to_string(s)) + " unique:";
    if (r.unique_for(s).empty()) out += " (none)";
    for (const DetectorPair& e : r.unique_for(s)) out += " " + e.label();
    out += "\n";
  }
  if (r.elimination_target) {
    out += "  elimination target: " +
           std::string(to_string(*r.elimination_target)) + ", evidence:";
    for (const DetectorPair& e : r.evidence_events) out += " " + e.label();
    out += "\n";
  } else if (!r.ambiguous_states.empty()) {
    out += "  indistinguishable class:";
    for (BellState s : r.ambiguous_states) {
      out += " " + std::string(to_string(s));
    }
    out += "\n";
  }
  return out;
}

std::string success_report_pretty(const SuccessReport& r) {
  std::string out = "success probabilities for " + r.scheme + "\n  S1: ";
  for (BellState s : kAllBellStates) {
    out += std::string(to_string(s)) + "=" +
           csv_number(r.s1[static_cast<std::size_t>(s)]) + " ";
  }
  out += "\n  capacity: single-pair " + csv_number(r.capacity_single_pair_bits) +
         " bits, asymptotic " + csv_number(r.capacity_asymptotic_bits) +
         " bits\n";
  out += "  N  psi-      psi+      phi-      phi+\n";
  for (const SuccessCurveRow& row : r.curve) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  %-3d%-10.6g%-10.6g%-10.6g%-10.6g\n",
                  row.n, row.s[0], row.s[1], row.s[2], row.s[3]);
    out += buf;
  }
  return out;
}

std::string confusion_pretty(const ConfusionMatrix& m) {
  std::string out = "confusion matrix for " + m.scheme +
                    " (pairs=" + std::to_string(m.pairs) +
                    ", trials=" + std::to_string(m.trials) +
                    ", seed=" + std::to_string(m.seed.value) + ", rng=" + m.rng +
                    ")\n";
  out += "  true\\declared  psi-      psi+      phi-      phi+      inconcl.\n";
  for (BellState truth : kAllBellStates) {
    const auto& row = m.counts[static_cast<std::size_t>(truth)];
    std::uint64_t total = 0;
    for (std::uint64_t v : row) total += v;
    if (total == 0) continue;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "  %-13s %-10.6g%-10.6g%-10.6g%-10.6g%-10.6g\n",
                  std::string(to_string(truth)).c_str(),
                  static_cast<double>(row[0]) / static_cast<double>(m.trials),
                  static_cast<double>(row[1]) / static_cast<double>(m.trials),
                  static_cast<double>(row[2]) / static_cast<double>(m.trials),
                  static_cast<double>(row[3]) / static_cast<double>(m.trials),
                  static_cast<double>(row[4]) / static_cast<double>(m.trials));
    out += buf;
  }
  return out;
}

}  // namespace bellsim
