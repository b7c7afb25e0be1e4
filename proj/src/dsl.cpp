#include "bellsim/dsl.hpp"

#include <cctype>
#include <charconv>
#include <map>

namespace bellsim {

namespace {

struct Token {
  std::string text;
  SourceSpan span;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !is_ident_start(s[0])) return false;
  for (char c : s) {
    if (!is_ident_char(c)) return false;
  }
  return true;
}

std::vector<Token> tokenize_line(std::string_view line, int line_no) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r' && line[i] != '#') {
      ++i;
    }
    tokens.push_back({std::string(line.substr(start, i - start)),
                      {line_no, static_cast<int>(start) + 1,
                       static_cast<int>(i - start)}});
  }
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult run() {
    std::size_t pos = 0;
    int line_no = 0;
    bool saw_circuit = false;
    while (pos <= text_.size()) {
      const std::size_t eol = text_.find('\n', pos);
      const std::string_view line =
          text_.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                          : eol - pos);
      ++line_no;
      auto tokens = tokenize_line(line, line_no);
      if (!tokens.empty()) {
        if (!saw_circuit) {
          parse_header(tokens);
          saw_circuit = true;
        } else {
          parse_statement(tokens);
        }
      }
      if (eol == std::string_view::npos) break;
      pos = eol + 1;
    }
    last_line_ = line_no;

    if (!saw_circuit) {
      error({line_no, 1, 0}, "no circuit declaration");
    }
    if (has_errors()) {
      return {std::nullopt, std::move(diagnostics_)};
    }

    Circuit c = assemble_circuit(std::move(name_), std::move(elements_),
                                 std::move(taps_));
    attach_semantic_diagnostics(c);
    if (has_errors()) {
      return {std::nullopt, std::move(diagnostics_)};
    }
    return {std::move(c), std::move(diagnostics_)};
  }

 private:
  void error(SourceSpan span, std::string message) {
    diagnostics_.push_back(
        {ParseDiagnostic::Severity::Error, span, std::move(message)});
  }

  bool has_errors() const {
    for (const auto& d : diagnostics_) {
      if (d.severity == ParseDiagnostic::Severity::Error) return true;
    }
    return false;
  }

  void parse_header(const std::vector<Token>& tokens) {
    if (tokens[0].text != "circuit") {
      error(tokens[0].span,
            "expected 'circuit NAME' before any statement, found '" +
                tokens[0].text + "'");
      return;
    }
    if (tokens.size() != 2 || !is_identifier(tokens[1].text)) {
      error(tokens.size() > 1 ? tokens[1].span : tokens[0].span,
            "'circuit' takes a single identifier name");
      return;
    }
    name_ = tokens[1].text;
  }

  // Expects tokens[k] to be an identifier or (when allow_vacuum) "vac".
  std::optional<SpatialMode> parse_port(const std::vector<Token>& tokens,
                                        std::size_t k, bool allow_vacuum) {
    if (k >= tokens.size()) {
      error(tokens.back().span, "missing mode name");
      return std::nullopt;
    }
    const Token& t = tokens[k];
    if (allow_vacuum && t.text == "vac") return SpatialMode::vacuum();
    if (t.text == "vac") {
      error(t.span, "'vac' is only legal as a bs input port");
      return std::nullopt;
    }
    if (!is_identifier(t.text)) {
      error(t.span, "'" + t.text + "' is not a valid mode name");
      return std::nullopt;
    }
    return SpatialMode{t.text};
  }

  bool expect_arrow(const std::vector<Token>& tokens, std::size_t k,
                    std::string_view stmt) {
    if (k >= tokens.size() || tokens[k].text != "->") {
      error(k < tokens.size() ? tokens[k].span : tokens.back().span,
            std::string(stmt) + " requires '->' between inputs and outputs");
      return false;
    }
    return true;
  }

  bool check_arity(const std::vector<Token>& tokens, std::size_t expected,
                   std::string_view shape) {
    if (tokens.size() != expected) {
      error(tokens[0].span, "expected '" + std::string(shape) + "' (got " +
                                std::to_string(tokens.size()) + " tokens)");
      return false;
    }
    return true;
  }

  std::optional<DetectorId> parse_detector(const std::vector<Token>& tokens,
                                           std::size_t k) {
    if (k >= tokens.size()) {
      error(tokens.back().span, "missing detector");
      return std::nullopt;
    }
    const Token& t = tokens[k];
    if (t.text.size() < 2 || t.text[0] != 'D') {
      error(t.span, "'" + t.text + "' is not a detector (expected D<index>)");
      return std::nullopt;
    }
    int value = 0;
    const char* first = t.text.data() + 1;
    const char* last = t.text.data() + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || value < 1) {
      error(t.span, "'" + t.text + "' is not a detector (expected D<index>)");
      return std::nullopt;
    }
    return DetectorId{value};
  }

  void parse_statement(const std::vector<Token>& tokens) {
    const std::string& head = tokens[0].text;
    const SourceSpan stmt_span = tokens[0].span;

    if (head == "circuit") {
      error(stmt_span, "only one circuit declaration is allowed per file");
    } else if (head == "bs") {
      if (!check_arity(tokens, 6, "bs IN1 IN2 -> OUT1 OUT2")) return;
      auto in1 = parse_port(tokens, 1, true);
      auto in2 = parse_port(tokens, 2, true);
      if (!expect_arrow(tokens, 3, "bs")) return;
      auto out1 = parse_port(tokens, 4, false);
      auto out2 = parse_port(tokens, 5, false);
      if (in1 && in2 && out1 && out2) {
        if (in1->is_vacuum() && in2->is_vacuum()) {
          error(tokens[1].span, "a bs needs at least one non-vacuum input");
          return;
        }
        push_element(Element::beam_splitter(*in1, *in2, *out1, *out2), stmt_span);
      }
    } else if (head == "hwp") {
      if (!check_arity(tokens, 4, "hwp IN -> OUT")) return;
      auto in = parse_port(tokens, 1, false);
      if (!expect_arrow(tokens, 2, "hwp")) return;
      auto out = parse_port(tokens, 3, false);
      if (in && out) push_element(Element::half_wave_plate(*in, *out), stmt_span);
    } else if (head == "phase") {
      if (!check_arity(tokens, 5, "phase FLOAT IN -> OUT")) return;
      double value = 0.0;
      const std::string& lit = tokens[1].text;
      auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), value);
      if (ec != std::errc{} || ptr != lit.data() + lit.size()) {
        error(tokens[1].span, "'" + lit + "' is not a valid phase (radians)");
        return;
      }
      auto in = parse_port(tokens, 2, false);
      if (!expect_arrow(tokens, 3, "phase")) return;
      auto out = parse_port(tokens, 4, false);
      if (in && out) {
        push_element(Element::polarization_phase(value, *in, *out), stmt_span);
      }
    } else if (head == "pbs") {
      if (!check_arity(tokens, 5, "pbs IN -> Dk Dm")) return;
      auto in = parse_port(tokens, 1, false);
      if (!expect_arrow(tokens, 2, "pbs")) return;
      auto transmit = parse_detector(tokens, 3);
      auto reflect = parse_detector(tokens, 4);
      if (in && transmit && reflect) {
        if (transmit->index == reflect->index) {
          error(tokens[4].span, "detector D" + std::to_string(reflect->index) +
                                    " declared twice on one pbs");
          return;
        }
        push_element(
            Element::polarizing_beam_splitter(*in, *transmit, *reflect),
            stmt_span);
      }
    } else if (head == "tap") {
      if (!check_arity(tokens, 2, "tap NAME")) return;
      if (!is_identifier(tokens[1].text)) {
        error(tokens[1].span, "'" + tokens[1].text + "' is not a valid tap name");
        return;
      }
      if (elements_.empty()) {
        error(stmt_span, "a tap needs a preceding element to cut after");
        return;
      }
      taps_.push_back({tokens[1].text, elements_.size() - 1});
    } else {
      error(stmt_span, "unknown directive '" + head + "'");
    }
  }

  void push_element(Element e, SourceSpan span) {
    elements_.push_back(std::move(e));
    element_spans_.push_back(span);
    element_lines_.push_back(span.line);
  }

  // Semantic checks come from the circuit validator; spans are recovered by
  // locating the offending token on the element's source line.
  void attach_semantic_diagnostics(const Circuit& c) {
    const auto issues = validate_circuit(c);
    for (const ValidationIssue& issue : issues) {
      SourceSpan span{1, 1, 0};
      if (issue.element && *issue.element < element_spans_.size()) {
        span = element_spans_[*issue.element];
        if (issue.token) {
          if (auto located = find_token_on_line(element_lines_[*issue.element],
                                                *issue.token)) {
            span = *located;
          }
        }
      } else if (issue.token) {
        // No element attribution (e.g. missing detector index in a
        // contiguity gap): point at the first mention anywhere.
        for (int ln = 1; ln <= last_line_; ++ln) {
          if (auto located = find_token_on_line(ln, *issue.token)) {
            span = *located;
            break;
          }
        }
      }
      error(span, issue.message);
    }
  }

  std::optional<SourceSpan> find_token_on_line(int line_no,
                                               const std::string& token) {
    std::size_t pos = 0;
    int current = 1;
    while (current < line_no && pos <= text_.size()) {
      const std::size_t eol = text_.find('\n', pos);
      if (eol == std::string_view::npos) return std::nullopt;
      pos = eol + 1;
      ++current;
    }
    const std::size_t eol = text_.find('\n', pos);
    const std::string_view line =
        text_.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                        : eol - pos);
    for (const Token& t : tokenize_line(line, line_no)) {
      if (t.text == token) return t.span;
    }
    return std::nullopt;
  }

  std::string_view text_;
  std::string name_;
  std::vector<Element> elements_;
  std::vector<SourceSpan> element_spans_;
  std::vector<int> element_lines_;
  std::vector<TapPoint> taps_;
  std::vector<ParseDiagnostic> diagnostics_;
  int last_line_ = 0;
};

}  // namespace

std::string ParseDiagnostic::render() const {
  std::string out = std::to_string(span.line) + ":" + std::to_string(span.column);
  out += severity == Severity::Error ? ": error: " : ": warning: ";
  out += message;
  return out;
}

ParseResult parse_circuit_text(std::string_view text) {
  Parser parser(text);
  return parser.run();
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string port_text(const SpatialMode& m) {
  return m.is_vacuum() ? "vac" : m.name;
}

}  // namespace

std::string serialize(const Circuit& c) {
  std::string out = "circuit " + c.name + "\n";
  for (std::size_t i = 0; i < c.elements.size(); ++i) {
    const Element& e = c.elements[i];
    out += "  ";
    switch (e.kind) {
      case ElementKind::BeamSplitter:
        out += "bs " + port_text(e.inputs[0]) + " " + port_text(e.inputs[1]) +
               " -> " + e.outputs[0].name + " " + e.outputs[1].name;
        break;
      case ElementKind::HalfWavePlate:
        out += "hwp " + e.inputs[0].name + " -> " + e.outputs[0].name;
        break;
      case ElementKind::PolarizationPhase:
        out += "phase " + format_double(e.phase) + " " + e.inputs[0].name +
               " -> " + e.outputs[0].name;
        break;
      case ElementKind::PolarizingBeamSplitter:
        out += "pbs " + e.inputs[0].name + " -> D" +
               std::to_string(e.detectors[0].index) + " D" +
               std::to_string(e.detectors[1].index);
        break;
    }
    out += "\n";
    for (const TapPoint& t : c.taps) {
      if (t.after_element == i) {
        out += "  tap " + t.name + "\n";
      }
    }
  }
  return out;
}

}  // namespace bellsim
