#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "taukit/reaction_network.hpp"

namespace taukit {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                           ": " + what_),
        line(line_),
        col(col_) {}
};

namespace parser_detail {

enum class Tok { ident, number, colon, arrow, at, plus, star, caret, end };

struct Token {
  Tok kind;
  std::string text;
  int col;  // 1-based
};

inline std::vector<Token> tokenize_line(std::string_view s, int line) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < s.size()) {
    const char c = s[i];
    const int col = static_cast<int>(i) + 1;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident(s[j])) ++j;
      out.push_back({Tok::ident, std::string(s.substr(i, j - i)), col});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
               (c == '-' && i + 1 < s.size() &&
                (std::isdigit(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '.'))) {
      std::size_t j = i + 1;
      while (j < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.' || s[j] == 'e' ||
              s[j] == 'E' || ((s[j] == '+' || s[j] == '-') && (s[j - 1] == 'e' || s[j - 1] == 'E'))))
        ++j;
      out.push_back({Tok::number, std::string(s.substr(i, j - i)), col});
      i = j;
    } else if (c == ':') {
      out.push_back({Tok::colon, ":", col});
      ++i;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::arrow, "->", col});
      i += 2;
    } else if (c == '@') {
      out.push_back({Tok::at, "@", col});
      ++i;
    } else if (c == '+') {
      out.push_back({Tok::plus, "+", col});
      ++i;
    } else if (c == '*') {
      out.push_back({Tok::star, "*", col});
      ++i;
    } else if (c == '^') {
      out.push_back({Tok::caret, "^", col});
      ++i;
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line) : toks_(std::move(toks)), line_(line) {}

  const Token& peek() const {
    static const Token end{Tok::end, "", 0};
    return pos_ < toks_.size() ? toks_[pos_] : end;
  }
  Token expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(what);
    return toks_[pos_++];
  }
  bool accept(Tok kind) {
    if (peek().kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool at_end() const { return pos_ >= toks_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    const int col = pos_ < toks_.size() ? toks_[pos_].col : end_col();
    throw ParseError(line_, col, "expected " + what);
  }
  [[noreturn]] void fail_at(const Token& t, const std::string& what) const {
    throw ParseError(line_, t.col, what);
  }
  int line() const { return line_; }

 private:
  int end_col() const { return toks_.empty() ? 1 : toks_.back().col + static_cast<int>(toks_.back().text.size()); }
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

inline double to_number(const LineParser& p, const Token& t) {
  try {
    std::size_t used = 0;
    const double v = std::stod(t.text, &used);
    if (used != t.text.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    p.fail_at(t, "malformed number '" + t.text + "'");
  }
}

inline std::int64_t to_count(const LineParser& p, const Token& t, const char* what) {
  const double v = to_number(p, t);
  const auto n = static_cast<std::int64_t>(v);
  if (v != static_cast<double>(n) || n < 0) p.fail_at(t, std::string(what) + " must be a non-negative integer");
  return n;
}

}  // namespace parser_detail

/// Parses the line-oriented model DSL:
///
///   species <name> [<name> ...]
///   reaction <id>: <k>*<sp> + ... -> <k>*<sp> + ... @ mass_action <rate>
///   reaction <id>: ... @ polynomial <coeff>*<sp>^<e>*... [+ <term> ...]
///
/// "0" denotes the empty complex; '#' starts a comment.
inline ReactionNetwork parse_network(const std::string& text) {
  using namespace parser_detail;

  std::vector<std::string> species;
  std::map<std::string, int> species_index;
  std::vector<std::string> reaction_ids;
  std::map<std::string, int> reaction_index;
  std::vector<std::vector<Coord>> nu_columns;
  std::vector<PropensitySpec> props;

  auto species_of = [&](LineParser& p, const Token& t) {
    auto it = species_index.find(t.text);
    if (it == species_index.end()) p.fail_at(t, "unknown species '" + t.text + "'");
    return it->second;
  };

  // complex := "0" | [count*]species (+ ...)* ; returns per-species multiplicities
  auto parse_complex = [&](LineParser& p) {
    std::map<int, std::int64_t> mult;
    if (p.peek().kind == Tok::number && p.peek().text == "0") {
      p.accept(Tok::number);
      return mult;
    }
    while (true) {
      std::int64_t count = 1;
      if (p.peek().kind == Tok::number) {
        const Token t = p.expect(Tok::number, "count");
        count = to_count(p, t, "stoichiometric count");
        if (count == 0) p.fail_at(t, "stoichiometric count must be positive");
        p.expect(Tok::star, "'*' after count");
      }
      const Token sp = p.expect(Tok::ident, "species name");
      mult[species_of(p, sp)] += count;
      if (!p.accept(Tok::plus)) break;
    }
    return mult;
  };

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string_view line_sv(text.data() + start,
                                   (nl == std::string::npos ? text.size() : nl) - start);
    ++line_no;
    start = (nl == std::string::npos) ? text.size() + 1 : nl + 1;

    LineParser p(tokenize_line(line_sv, line_no), line_no);
    if (p.at_end()) continue;
    const Token head = p.expect(Tok::ident, "'species' or 'reaction'");

    if (head.text == "species") {
      if (p.at_end()) p.fail("at least one species name");
      while (!p.at_end()) {
        const Token t = p.expect(Tok::ident, "species name");
        if (species_index.count(t.text)) p.fail_at(t, "duplicate species '" + t.text + "'");
        species_index[t.text] = static_cast<int>(species.size());
        species.push_back(t.text);
      }
      continue;
    }
    if (head.text != "reaction") p.fail_at(head, "expected 'species' or 'reaction'");

    const Token id = p.expect(Tok::ident, "reaction id");
    if (reaction_index.count(id.text)) p.fail_at(id, "duplicate reaction id '" + id.text + "'");
    p.expect(Tok::colon, "':' after reaction id");
    const auto reactants = parse_complex(p);
    p.expect(Tok::arrow, "'->'");
    const auto products = parse_complex(p);
    p.expect(Tok::at, "'@' before the propensity");
    const Token kind = p.expect(Tok::ident, "propensity kind");

    PropensitySpec spec;
    if (kind.text == "mass_action") {
      const Token rate_tok = p.expect(Tok::number, "rate constant");
      const double rate = to_number(p, rate_tok);
      if (rate < 0) p.fail_at(rate_tok, "negative rate constant");
      std::vector<std::pair<int, int>> r;
      for (auto& [sp, m] : reactants) r.emplace_back(sp, static_cast<int>(m));
      spec = PropensitySpec::mass_action(rate, std::move(r));
    } else if (kind.text == "polynomial") {
      std::vector<PolynomialTerm> terms;
      while (true) {
        PolynomialTerm term;
        term.exps.assign(species.size(), 0);
        const Token coeff = p.expect(Tok::number, "term coefficient");
        term.coeff = to_number(p, coeff);
        while (p.accept(Tok::star)) {
          const Token sp = p.expect(Tok::ident, "species name in term");
          int e = 1;
          if (p.accept(Tok::caret)) {
            const Token et = p.expect(Tok::number, "exponent");
            e = static_cast<int>(to_count(p, et, "exponent"));
          }
          term.exps[species_of(p, sp)] += e;
        }
        terms.push_back(std::move(term));
        if (!p.accept(Tok::plus)) break;
      }
      spec = PropensitySpec::polynomial(std::move(terms));
    } else {
      p.fail_at(kind, "unknown propensity kind '" + kind.text + "'");
    }
    if (!p.at_end()) p.fail("end of line");

    std::vector<Coord> nu(species.size(), 0);
    for (auto& [sp, m] : products) nu[sp] += m;
    for (auto& [sp, m] : reactants) nu[sp] -= m;
    if (std::all_of(nu.begin(), nu.end(), [](Coord c) { return c == 0; }))
      p.fail_at(id, "reaction '" + id.text + "' does not change the state");

    reaction_index[id.text] = static_cast<int>(reaction_ids.size());
    reaction_ids.push_back(id.text);
    nu_columns.push_back(std::move(nu));
    props.push_back(std::move(spec));
  }

  if (species.empty()) throw ParseError(line_no, 1, "model declares no species");
  // reactions may precede later species lines; pad columns/exponents to final N
  for (auto& col : nu_columns) col.resize(species.size(), 0);
  for (auto& spec : props)
    if (spec.kind == PropensitySpec::Kind::polynomial)
      for (auto& t : spec.terms) t.exps.resize(species.size(), 0);

  return ReactionNetwork(std::move(species), std::move(nu_columns), std::move(props),
                         std::move(reaction_ids));
}

}  // namespace taukit
