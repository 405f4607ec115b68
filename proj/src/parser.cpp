#include "crn/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "crn/error.hpp"

namespace crn {

namespace {

struct Token {
  enum Kind { kNumber, kIdent, kPlus, kArrow, kRevArrow, kSemicolon, kEquals, kComma, kLParen, kRParen, kEnd };
  Kind kind = kEnd;
  double number = 0.0;
  std::string text;
  std::size_t column = 0;  // 1-based
};

/// Per-line lexer with column tracking.
class Lexer {
 public:
  Lexer(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_no_, current_.column, msg);
  }

  Token expect(Token::Kind kind, const std::string& what) {
    if (current_.kind != kind) fail("expected " + what);
    return take();
  }

 private:
  void advance() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    current_ = Token{};
    current_.column = pos_ + 1;
    if (pos_ >= line_.size()) {
      current_.kind = Token::kEnd;
      return;
    }
    const char ch = line_[pos_];
    if (ch == '<' && line_.compare(pos_, 3, "<->") == 0) {
      current_.kind = Token::kRevArrow;
      pos_ += 3;
      return;
    }
    if (ch == '-' && pos_ + 1 < line_.size() && line_[pos_ + 1] == '>') {
      current_.kind = Token::kArrow;
      pos_ += 2;
      return;
    }
    switch (ch) {
      case '+': current_.kind = Token::kPlus; ++pos_; return;
      case ';': current_.kind = Token::kSemicolon; ++pos_; return;
      case '=': current_.kind = Token::kEquals; ++pos_; return;
      case ',': current_.kind = Token::kComma; ++pos_; return;
      case '(': current_.kind = Token::kLParen; ++pos_; return;
      case ')': current_.kind = Token::kRParen; ++pos_; return;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::size_t end = pos_;
      while (end < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[end])) || line_[end] == '_'))
        ++end;
      current_.kind = Token::kIdent;
      current_.text = std::string(line_.substr(pos_, end - pos_));
      pos_ = end;
      return;
    }
    const char* start = line_.data() + pos_;
    char* end = nullptr;
    const double value = std::strtod(start, &end);
    if (end != start) {
      current_.kind = Token::kNumber;
      current_.number = value;
      current_.text = std::string(start, static_cast<std::size_t>(end - start));
      pos_ += static_cast<std::size_t>(end - start);
      return;
    }
    throw ParseError(line_no_, pos_ + 1, std::string("unexpected character '") + ch + "'");
  }

  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
  Token current_;
};

using SparseComplex = std::map<std::string, double>;

struct ParsedReaction {
  SparseComplex reactant, product;
  double rate = 0.0;
  std::size_t line = 0;
};

struct DocBuilder {
  NetworkDocument doc;
  std::vector<ParsedReaction> parsed;
  std::map<std::string, std::size_t> species_index;
  bool species_declared = false;
  bool saw_reaction = false;

  void declare(const std::string& name) {
    if (species_index.emplace(name, doc.species.size()).second) doc.species.push_back(name);
  }

  void touch(const std::string& name, std::size_t line, std::size_t col) {
    if (species_index.count(name)) return;
    if (species_declared)
      throw ParseError(line, col, "species '" + name + "' not listed in @species");
    declare(name);
  }
};

SparseComplex parse_complex(Lexer& lex, DocBuilder& builder, std::size_t line_no) {
  SparseComplex out;
  // A lone "0" is the zero complex.
  if (lex.peek().kind == Token::kNumber && lex.peek().number == 0.0) {
    Lexer probe = lex;
    probe.take();
    if (probe.peek().kind != Token::kIdent) {
      lex.take();
      if (lex.peek().kind == Token::kPlus) lex.fail("zero complex cannot carry more terms");
      return out;
    }
  }
  while (true) {
    double coeff = 1.0;
    if (lex.peek().kind == Token::kNumber) {
      const Token t = lex.take();
      coeff = t.number;
      if (coeff < 0.0 && !builder.doc.generalized)
        throw ParseError(line_no, t.column, "negative coefficient requires @generalized");
    }
    const Token sp = lex.expect(Token::kIdent, "species name");
    builder.touch(sp.text, line_no, sp.column);
    out[sp.text] += coeff;
    if (out[sp.text] == 0.0) out.erase(sp.text);
    if (lex.peek().kind != Token::kPlus) break;
    lex.take();
  }
  return out;
}

std::vector<double> parse_vector(Lexer& lex) {
  std::vector<double> values;
  lex.expect(Token::kLParen, "'('");
  while (true) {
    const Token t = lex.expect(Token::kNumber, "number");
    values.push_back(t.number);
    if (lex.peek().kind == Token::kComma) {
      lex.take();
      continue;
    }
    break;
  }
  lex.expect(Token::kRParen, "')'");
  return values;
}

void parse_header(const std::string& line, std::size_t line_no, DocBuilder& builder) {
  if (builder.saw_reaction) throw ParseError(line_no, 1, "headers must precede reactions");
  Lexer lex(std::string_view(line).substr(1), line_no);
  const Token key = lex.expect(Token::kIdent, "header name after '@'");
  if (key.text == "name") {
    lex.expect(Token::kEquals, "'='");
    const auto pos = line.find('=');
    std::string value = line.substr(pos + 1);
    const auto b = value.find_first_not_of(" \t");
    const auto e = value.find_last_not_of(" \t");
    builder.doc.name = b == std::string::npos ? "" : value.substr(b, e - b + 1);
    return;
  }
  if (key.text == "generalized") {
    builder.doc.generalized = true;
    if (lex.peek().kind == Token::kEquals) {
      lex.take();
      const Token v = lex.expect(Token::kIdent, "'true' or 'false'");
      builder.doc.generalized = (v.text == "true");
    }
    return;
  }
  if (key.text == "species") {
    lex.expect(Token::kEquals, "'='");
    while (true) {
      const Token sp = lex.expect(Token::kIdent, "species name");
      builder.declare(sp.text);
      if (lex.peek().kind == Token::kComma) {
        lex.take();
        continue;
      }
      break;
    }
    builder.species_declared = true;
    if (lex.peek().kind != Token::kEnd) lex.fail("trailing input after species list");
    return;
  }
  if (key.text == "equilibrium" || key.text == "x0") {
    lex.expect(Token::kEquals, "'='");
    auto values = parse_vector(lex);
    if (lex.peek().kind != Token::kEnd) lex.fail("trailing input after vector");
    if (key.text == "equilibrium")
      builder.doc.equilibrium_hint = std::move(values);
    else
      builder.doc.x0_hint = std::move(values);
    return;
  }
  throw ParseError(line_no, key.column + 1, "unknown header '@" + key.text + "'");
}

void parse_reaction_line(const std::string& line, std::size_t line_no, DocBuilder& builder) {
  Lexer lex(line, line_no);
  ParsedReaction rx;
  rx.line = line_no;
  rx.reactant = parse_complex(lex, builder, line_no);
  const Token arrow = lex.take();
  if (arrow.kind != Token::kArrow && arrow.kind != Token::kRevArrow)
    throw ParseError(line_no, arrow.column, "expected '->' or '<->'");
  rx.product = parse_complex(lex, builder, line_no);
  lex.expect(Token::kSemicolon, "';'");
  const Token k = lex.expect(Token::kIdent, "'k'");
  if (k.text != "k") throw ParseError(line_no, k.column, "expected 'k'");
  lex.expect(Token::kEquals, "'='");
  const Token kf = lex.expect(Token::kNumber, "rate value");
  if (!(kf.number > 0.0) || !std::isfinite(kf.number))
    throw ParseError(line_no, kf.column, "rate must be positive and finite");
  rx.rate = kf.number;

  if (rx.reactant == rx.product)
    throw ParseError(line_no, 1, "reactant and product complexes are identical");

  builder.saw_reaction = true;
  builder.parsed.push_back(rx);
  if (arrow.kind == Token::kRevArrow) {
    lex.expect(Token::kComma, "',' and a reverse rate");
    const Token kr = lex.expect(Token::kNumber, "reverse rate value");
    if (!(kr.number > 0.0) || !std::isfinite(kr.number))
      throw ParseError(line_no, kr.column, "rate must be positive and finite");
    ParsedReaction rev;
    rev.line = line_no;
    rev.reactant = rx.product;
    rev.product = rx.reactant;
    rev.rate = kr.number;
    builder.parsed.push_back(rev);
  }
  if (lex.peek().kind != Token::kEnd) lex.fail("trailing input after reaction");
}

}  // namespace

NetworkDocument parse_network(const std::string& text) {
  DocBuilder builder;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line.erase(0, first);
    if (const auto last = line.find_last_not_of(" \t\r"); last != std::string::npos)
      line.erase(last + 1);
    if (line[0] == '@')
      parse_header(line, line_no, builder);
    else
      parse_reaction_line(line, line_no, builder);
  }
  if (builder.parsed.empty()) throw ParseError(line_no, 1, "no reactions found");

  const std::size_t n = builder.doc.species.size();
  auto densify = [&](const SparseComplex& sparse) {
    std::vector<double> coeffs(n, 0.0);
    for (const auto& [name, coeff] : sparse) coeffs[builder.species_index.at(name)] = coeff;
    return Complex(std::move(coeffs));
  };
  for (const auto& rx : builder.parsed)
    builder.doc.reactions.push_back({densify(rx.reactant), densify(rx.product), rx.rate});
  return builder.doc;
}

std::string format_double(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string complex_to_string(const Complex& cpx, const std::vector<std::string>& species_names) {
  if (cpx.is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < cpx.size(); ++i) {
    const double coeff = cpx[i];
    if (coeff == 0.0) continue;
    if (!out.empty()) out += " + ";
    if (coeff != 1.0) out += format_double(coeff) + " ";
    out += species_names[i];
  }
  return out;
}

std::string serialize_network(const Network& net, std::string_view name) {
  std::ostringstream out;
  if (!name.empty()) out << "@name = " << name << "\n";
  if (net.generalized()) out << "@generalized = true\n";
  const auto names = net.species_names();
  out << "@species = ";
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  out << "\n";
  for (const Reaction& rx : net.reactions())
    out << complex_to_string(rx.reactant, names) << " -> " << complex_to_string(rx.product, names)
        << " ; k = " << format_double(rx.rate) << "\n";
  return out.str();
}

}  // namespace crn
