#pragma once

// Random valid circuits for round-trip and property tests: grow a DAG of
// bs/hwp/phase layers from a couple of input arms, then bind every open mode
// to detectors through a pbs.

#include <string>
#include <vector>

#include "bellsim/circuit.hpp"
#include "bellsim/montecarlo.hpp"

namespace bellsim::testing {

inline Circuit random_circuit(SplitMix64& rng, int index) {
  std::vector<Element> elements;
  std::vector<TapPoint> taps;
  std::vector<SpatialMode> open;
  int next_mode = 0;
  auto fresh = [&] {
    std::string name = "m" + std::to_string(next_mode++);
    if (rng.next() % 4 == 0) name += "'";
    return SpatialMode{name};
  };

  const int n_inputs = 1 + static_cast<int>(rng.next() % 3);
  for (int i = 0; i < n_inputs; ++i) open.push_back(fresh());

  auto take_open = [&] {
    const std::size_t k = rng.next() % open.size();
    SpatialMode m = open[k];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(k));
    return m;
  };

  const int n_elements = 1 + static_cast<int>(rng.next() % 8);
  for (int i = 0; i < n_elements; ++i) {
    switch (rng.next() % 3) {
      case 0: {
        SpatialMode in1 = take_open();
        SpatialMode in2 =
            (!open.empty() && rng.next() % 2 == 0) ? take_open()
                                                   : SpatialMode::vacuum();
        if (rng.next() % 4 == 0) std::swap(in1, in2);
        SpatialMode out1 = fresh();
        SpatialMode out2 = fresh();
        elements.push_back(Element::beam_splitter(in1, in2, out1, out2));
        open.push_back(out1);
        open.push_back(out2);
        break;
      }
      case 1: {
        SpatialMode in = take_open();
        SpatialMode out = fresh();
        elements.push_back(Element::half_wave_plate(in, out));
        open.push_back(out);
        break;
      }
      default: {
        SpatialMode in = take_open();
        SpatialMode out = fresh();
        // a few representative angles plus a fully random one
        const double angles[] = {3.141592653589793, 1.5707963267948966, 0.25,
                                 rng.next_double() * 6.0 - 3.0};
        elements.push_back(
            Element::polarization_phase(angles[rng.next() % 4], in, out));
        open.push_back(out);
        break;
      }
    }
    if (rng.next() % 3 == 0) {
      taps.push_back({"t" + std::to_string(elements.size()) + "_" +
                          std::to_string(taps.size()),
                      elements.size() - 1});
    }
  }

  int detector = 1;
  while (!open.empty()) {
    SpatialMode in = take_open();
    const DetectorId d1{detector++};
    const DetectorId d2{detector++};
    elements.push_back(rng.next() % 2 == 0
                           ? Element::polarizing_beam_splitter(in, d1, d2)
                           : Element::polarizing_beam_splitter(in, d2, d1));
  }
  return assemble_circuit("gen" + std::to_string(index), std::move(elements),
                          std::move(taps));
}

}  // namespace bellsim::testing
