// bellsim: linear-optics Bell-state analyzer toolkit.
//
// Subcommands cover the full pipeline: single-photon coefficient tables,
// two-photon coincidence amplitude maps, tap states at named cuts,
// discrimination rules, success curves, channel capacity, seeded Monte Carlo
// confusion matrices, and the .loc circuit format.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bellsim/dsl.hpp"
#include "bellsim/json_io.hpp"

namespace {

using namespace bellsim;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;

struct SchemeOptions {
  std::string scheme;  // "broken" or "symmetric"
  std::string file;    // path to a .loc circuit
};

void add_scheme_options(CLI::App* cmd, SchemeOptions& opts) {
  auto* scheme = cmd->add_option("--scheme", opts.scheme,
                                 "Built-in analyzer: broken or symmetric")
                     ->check(CLI::IsMember({"broken", "symmetric"}));
  auto* file =
      cmd->add_option("--file", opts.file, "Circuit file (.loc) to analyze")
          ->check(CLI::ExistingFile);
  scheme->excludes(file);
  file->excludes(scheme);
}

// Exits with kExitInvalid on parse or validation failure.
Circuit resolve_circuit(const SchemeOptions& opts) {
  if (opts.scheme == "broken") return build_symmetry_broken();
  if (opts.scheme == "symmetric") return build_symmetric();
  if (opts.file.empty()) {
    std::cerr << "error: pass --scheme broken|symmetric or --file <path.loc>\n";
    std::exit(kExitUsage);
  }
  std::ifstream in(opts.file);
  std::ostringstream buf;
  buf << in.rdbuf();
  const ParseResult parsed = parse_circuit_text(buf.str());
  for (const ParseDiagnostic& d : parsed.diagnostics) {
    std::cerr << opts.file << ":" << d.render() << "\n";
  }
  if (!parsed.ok()) std::exit(kExitInvalid);
  const auto issues = validate(*parsed.circuit);
  if (!issues.empty()) {
    for (const std::string& msg : issues) {
      std::cerr << opts.file << ": " << msg << "\n";
    }
    std::exit(kExitInvalid);
  }
  return *parsed.circuit;
}

std::vector<BellState> states_for(const std::string& selector) {
  if (selector.empty() || selector == "all") {
    return {kAllBellStates.begin(), kAllBellStates.end()};
  }
  return {bell_state_from_string(selector)};
}

void emit_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-optics polarization Bell-state analysis toolkit"};
  app.require_subcommand(1);

  std::string format = "json";
  app.add_option("--format", format, "Output format: json, csv or pretty")
      ->check(CLI::IsMember({"json", "csv", "pretty"}))
      ->capture_default_str();

  // coeffs ------------------------------------------------------------
  SchemeOptions coeffs_opts;
  auto* coeffs = app.add_subcommand(
      "coeffs",
      "Single-photon coefficient table over the detectors.\n"
      "csv schema: header 'row,D1,...,DK', one line per input row C1..C4, "
      "10 significant digits (complex cells as re+imi)");
  add_scheme_options(coeffs, coeffs_opts);

  // amplitudes ---------------------------------------------------------
  SchemeOptions amp_opts;
  std::string amp_state = "all";
  auto* amplitudes = app.add_subcommand(
      "amplitudes", "Two-photon coincidence amplitude maps per input state");
  add_scheme_options(amplitudes, amp_opts);
  amplitudes->add_option("--state", amp_state,
                         "psi-, psi+, phi-, phi+ or all");

  // taps ----------------------------------------------------------------
  SchemeOptions taps_opts;
  std::string taps_state = "all";
  std::string tap_name;
  auto* taps = app.add_subcommand(
      "taps", "Two-photon states at the named circuit cuts");
  add_scheme_options(taps, taps_opts);
  taps->add_option("--state", taps_state, "psi-, psi+, phi-, phi+ or all");
  taps->add_option("--tap", tap_name, "Tap name (default: every tap)");

  // rules ----------------------------------------------------------------
  SchemeOptions rules_opts;
  auto* rules = app.add_subcommand(
      "rules", "Unique-event discrimination rules and elimination target");
  add_scheme_options(rules, rules_opts);

  // success ---------------------------------------------------------------
  SchemeOptions success_opts;
  int success_n_max = 15;
  auto* success = app.add_subcommand(
      "success",
      "S1 and S_N success probabilities per input state.\n"
      "csv schema: header 'N,psi_minus,psi_plus,phi_minus,phi_plus', one "
      "line per N = 1..n-max, 10 significant digits");
  add_scheme_options(success, success_opts);
  success->add_option("--n-max", success_n_max, "Largest pair count N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // capacity ----------------------------------------------------------------
  SchemeOptions capacity_opts;
  std::string regime = "asymptotic";
  auto* capacity_cmd = app.add_subcommand(
      "capacity", "Post-selection channel capacity in bits");
  add_scheme_options(capacity_cmd, capacity_opts);
  capacity_cmd
      ->add_option("--regime", regime,
                   "single (one pair) or asymptotic (many pairs)")
      ->check(CLI::IsMember({"single", "asymptotic"}))
      ->capture_default_str();

  // simulate ----------------------------------------------------------------
  SchemeOptions sim_opts;
  int sim_pairs = 1;
  std::uint64_t sim_trials = 100000;
  std::uint64_t sim_seed = 0;
  unsigned sim_workers = 1;
  std::string sim_state;
  std::string sim_evidence = "pairs";
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo confusion matrix over sampled coincidences");
  add_scheme_options(simulate, sim_opts);
  simulate->add_option("--pairs", sim_pairs, "Photon pairs per trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--trials", sim_trials, "Trials per true state")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate
      ->add_option("--seed", sim_seed,
                   "RNG seed (required; there is no silent default)")
      ->required();
  simulate->add_option("--state", sim_state,
                       "Only simulate this true state (psi-, psi+, phi-, phi+)");
  simulate
      ->add_option("--workers", sim_workers,
                   "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  simulate
      ->add_option("--evidence", sim_evidence,
                   "Elimination evidence: pairs or diagonals")
      ->check(CLI::IsMember({"pairs", "diagonals"}))
      ->capture_default_str();

  // parse ----------------------------------------------------------------
  std::string parse_file;
  auto* parse_cmd = app.add_subcommand(
      "parse", "Validate a .loc file and print its canonical form");
  parse_cmd->add_option("--file", parse_file, "Circuit file to check")
      ->required()
      ->check(CLI::ExistingFile);

  // fig2 ----------------------------------------------------------------
  int fig2_n_max = 15;
  std::string fig2_dir = ".";
  auto* fig2 = app.add_subcommand(
      "fig2",
      "Write success-curve CSVs for both analyzers: fig2a.csv "
      "(symmetry-broken) and fig2b.csv (symmetric), both with the "
      "'N,psi_minus,psi_plus,phi_minus,phi_plus' schema of 'success'");
  fig2->add_option("--n-max", fig2_n_max, "Largest pair count N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fig2->add_option("--out-dir", fig2_dir, "Directory for fig2a.csv/fig2b.csv")
      ->capture_default_str();

  // let --format (declared on the app) appear after a subcommand name
  for (CLI::App* sub : app.get_subcommands(
           [](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*coeffs) {
      const CoefficientTable t = coefficient_table(resolve_circuit(coeffs_opts));
      if (format == "csv") {
        std::cout << coefficient_table_csv(t);
      } else if (format == "pretty") {
        std::cout << coefficient_table_pretty(t);
      } else {
        emit_json(to_json(t));
      }
    } else if (*amplitudes) {
      const Circuit c = resolve_circuit(amp_opts);
      const CoefficientTable t = coefficient_table(c);
      if (format == "csv") {
        std::cerr << "error: amplitude maps have no csv form; use json\n";
        return kExitUsage;
      }
      Json all = Json::object();
      for (BellState s : states_for(amp_state)) {
        const TwoPhotonAmplitudeMap m = combine_two_photon(t, s);
        if (format == "pretty") {
          std::cout << amplitude_map_pretty(m);
        } else {
          all[std::string(to_string(s))] = to_json(m);
        }
      }
      if (format == "json") {
        emit_json(Json{{"scheme", c.name}, {"states", all}});
      }
    } else if (*taps) {
      const Circuit c = resolve_circuit(taps_opts);
      if (format == "csv") {
        std::cerr << "error: tap states have no csv form; use json\n";
        return kExitUsage;
      }
      std::vector<std::string> tap_names;
      if (!tap_name.empty()) {
        tap_names.push_back(tap_name);
      } else {
        for (const TapPoint& t : c.taps) tap_names.push_back(t.name);
      }
      Json all = Json::object();
      for (BellState s : states_for(taps_state)) {
        Json per_tap = Json::object();
        for (const std::string& name : tap_names) {
          const TapState t = evolve_to_tap(c, s, name);
          if (format == "pretty") {
            std::cout << c.name << " / " << to_string(s) << " @ " << name
                      << ": " << t.entries.size() << " entries\n";
            for (const auto& [key, amp] : t.entries) {
              std::cout << "  (" << key.a.label() << "," << key.b.label()
                        << ") " << amp.real() << (amp.imag() < 0 ? "-" : "+")
                        << std::abs(amp.imag()) << "i\n";
            }
          } else {
            per_tap[name] = to_json(t, c.name, s);
          }
        }
        all[std::string(to_string(s))] = per_tap;
      }
      if (format == "json") {
        emit_json(Json{{"scheme", c.name}, {"states", all}});
      }
    } else if (*rules) {
      const SchemeAnalysis a = analyze_scheme(resolve_circuit(rules_opts));
      if (format == "pretty") {
        std::cout << rules_pretty(a.rules);
      } else if (format == "csv") {
        std::cerr << "error: rules have no csv form; use json\n";
        return kExitUsage;
      } else {
        emit_json(to_json(a.rules));
      }
    } else if (*success) {
      const SuccessReport report =
          success_report(resolve_circuit(success_opts), success_n_max);
      if (format == "csv") {
        std::cout << success_curve_csv(report.curve);
      } else if (format == "pretty") {
        std::cout << success_report_pretty(report);
      } else {
        emit_json(to_json(report));
      }
    } else if (*capacity_cmd) {
      const SchemeAnalysis a = analyze_scheme(resolve_circuit(capacity_opts));
      const CapacityRegime r =
          regime == "single" ? CapacityRegime::SinglePairDistinguishableClasses
                             : CapacityRegime::AsymptoticAllFour;
      const Json j{{"scheme", a.rules.scheme},
                   {"regime", regime},
                   {"classes", distinguishable_classes(a.rules, r)},
                   {"bits", bellsim::capacity(a.rules, r)}};
      if (format == "pretty") {
        std::cout << j["scheme"].get<std::string>() << " (" << regime
                  << "): " << j["classes"] << " classes, "
                  << csv_number(j["bits"].get<double>()) << " bits\n";
      } else {
        emit_json(j);
      }
    } else if (*simulate) {
      const Circuit c = resolve_circuit(sim_opts);
      const EvidencePolicy policy = sim_evidence == "diagonals"
                                        ? EvidencePolicy::IncludeDiagonals
                                        : EvidencePolicy::PairsOnly;
      const ConfusionMatrix m =
          sim_state.empty()
              ? estimate_confusion(c, sim_pairs, sim_trials, Seed{sim_seed},
                                   policy, sim_workers)
              : estimate_confusion_row(c, bell_state_from_string(sim_state),
                                       sim_pairs, sim_trials, Seed{sim_seed},
                                       policy, sim_workers);
      if (format == "pretty") {
        std::cout << confusion_pretty(m);
      } else if (format == "csv") {
        std::cerr << "error: confusion matrices have no csv form; use json\n";
        return kExitUsage;
      } else {
        emit_json(to_json(m));
      }
    } else if (*parse_cmd) {
      const Circuit c = resolve_circuit({.scheme = "", .file = parse_file});
      if (format == "json") {
        emit_json(to_json(c));
      } else {
        std::cout << serialize(c);
      }
    } else if (*fig2) {
      const auto broken_rows = success_curve(build_symmetry_broken(), fig2_n_max);
      const auto symmetric_rows = success_curve(build_symmetric(), fig2_n_max);
      const std::string path_a = fig2_dir + "/fig2a.csv";
      const std::string path_b = fig2_dir + "/fig2b.csv";
      std::ofstream a(path_a);
      std::ofstream b(path_b);
      if (!a.good() || !b.good()) {
        std::cerr << "error: cannot write into " << fig2_dir << "\n";
        return kExitUsage;
      }
      a << success_curve_csv(broken_rows);
      b << success_curve_csv(symmetric_rows);
      std::cerr << "wrote " << path_a << " and " << path_b << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
