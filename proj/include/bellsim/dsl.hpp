#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bellsim/circuit.hpp"

namespace bellsim {

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 0;

  bool operator==(const SourceSpan&) const = default;
};

struct ParseDiagnostic {
  enum class Severity : std::uint8_t { Error, Warning };

  Severity severity = Severity::Error;
  SourceSpan span;
  std::string message;

  [[nodiscard]] std::string render() const;  // "line:col: error: message"
};

/// Result of parsing a .loc file. The circuit is present iff no error-level
/// diagnostics were produced; the parser never throws on any input.
struct ParseResult {
  std::optional<Circuit> circuit;
  std::vector<ParseDiagnostic> diagnostics;

  [[nodiscard]] bool ok() const { return circuit.has_value(); }
};

/// Line-oriented circuit format:
///
///   circuit NAME
///     bs IN1 IN2 -> OUT1 OUT2     # IN may be "vac"; port 2 carries the minus
///     hwp IN -> OUT
///     phase FLOAT IN -> OUT       # radians applied to |V>
///     pbs IN -> Dk Dm             # H transmits to Dk, V reflects to Dm
///     tap NAME                    # cut after the previous element
///
/// '#' starts a comment; blank lines are ignored. Identifiers match
/// [A-Za-z][A-Za-z0-9_']*.
ParseResult parse_circuit_text(std::string_view text);

/// Canonical text form: one element per line, topological order, two-space
/// indent, taps interleaved after their element. parse(serialize(c)) is
/// structurally equal to c for every valid circuit.
std::string serialize(const Circuit& c);

}  // namespace bellsim
