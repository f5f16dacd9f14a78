#include "kgenrich/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include "kgenrich/text_io.hpp"

namespace kgenrich {

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

enum class Tok { Iri, Name, Var, Literal, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
};

bool is_name_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c == ':' || c == '.' || c == '%' || c >= 0x80;
}

bool is_iri_char(char c) {
  return !(std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"' || c == '{' ||
           c == '}' || c == '|' || c == '^' || c == '`' || c == '\\');
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Token next() {
    char c = src_[pos_];
    if (c == '<') {
      std::size_t end = pos_ + 1;
      while (end < src_.size() && src_[end] != '>' && is_iri_char(src_[end])) ++end;
      if (end < src_.size() && src_[end] == '>') {
        Token t{Tok::Iri, std::string(src_.substr(pos_ + 1, end - pos_ - 1))};
        pos_ = end + 1;
        return t;
      }
      ++pos_;
      return {Tok::Punct, "<"};
    }
    if (c == '?' || c == '$') {
      std::size_t end = pos_ + 1;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_' ||
              static_cast<unsigned char>(src_[end]) >= 0x80))
        ++end;
      if (end == pos_ + 1) {
        ++pos_;
        return {Tok::Punct, std::string(1, c)};
      }
      Token t{Tok::Var, std::string(src_.substr(pos_ + 1, end - pos_ - 1))};
      pos_ = end;
      return t;
    }
    if (c == '"' || c == '\'') return string_literal(c);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '+' || c == '-') && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t end = pos_ + 1;
      while (end < src_.size()) {
        char d = src_[end];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == 'e' || d == 'E') {
          ++end;
        } else if (d == '.' && end + 1 < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[end + 1]))) {
          ++end;
        } else {
          break;
        }
      }
      Token t{Tok::Literal, std::string(src_.substr(pos_, end - pos_))};
      pos_ = end;
      return t;
    }
    if (is_name_char(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '%') {
      std::size_t end = pos_;
      while (end < src_.size() && is_name_char(static_cast<unsigned char>(src_[end]))) ++end;
      // A trailing '.' terminates the triple rather than belonging to the name.
      while (end > pos_ + 1 && src_[end - 1] == '.') --end;
      Token t{Tok::Name, std::string(src_.substr(pos_, end - pos_))};
      pos_ = end;
      return t;
    }
    ++pos_;
    return {Tok::Punct, std::string(1, c)};
  }

  Token string_literal(char quote) {
    const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
    std::size_t i = pos_ + (triple ? 3 : 1);
    std::string value;
    while (true) {
      if (i >= src_.size()) throw SparqlParseError("unterminated string literal");
      char d = src_[i];
      if (d == '\\' && i + 1 < src_.size()) {
        value.push_back(src_[i + 1]);
        i += 2;
        continue;
      }
      if (d == quote) {
        if (!triple) {
          ++i;
          break;
        }
        if (i + 2 < src_.size() && src_[i + 1] == quote && src_[i + 2] == quote) {
          i += 3;
          break;
        }
      }
      value.push_back(d);
      ++i;
    }
    // Language tag or datatype belongs to the literal.
    if (i < src_.size() && src_[i] == '@') {
      ++i;
      while (i < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '-'))
        ++i;
    } else if (i + 1 < src_.size() && src_[i] == '^' && src_[i + 1] == '^') {
      i += 2;
      if (i < src_.size() && src_[i] == '<') {
        while (i < src_.size() && src_[i] != '>') ++i;
        if (i < src_.size()) ++i;
      } else {
        while (i < src_.size() && is_name_char(static_cast<unsigned char>(src_[i]))) ++i;
        while (src_[i - 1] == '.') --i;
      }
    }
    pos_ = i;
    return {Tok::Literal, std::move(value)};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

bool keyword_is(const Token& t, std::string_view kw) {
  if (t.kind != Tok::Name || t.text.size() != kw.size()) return false;
  return starts_with_icase(t.text, kw);
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, SparqlQuery& query)
      : toks_(std::move(tokens)), query_(query) {}

  // Consumes the prologue and returns the form keyword.
  QueryForm prologue() {
    while (true) {
      if (keyword_is(peek(), "PREFIX")) {
        ++pos_;
        Token name = take();
        if (name.kind != Tok::Name || name.text.back() != ':')
          throw SparqlParseError("malformed PREFIX declaration");
        Token iri = take();
        if (iri.kind != Tok::Iri) throw SparqlParseError("PREFIX without IRI");
        query_.prefixes[name.text.substr(0, name.text.size() - 1)] = iri.text;
      } else if (keyword_is(peek(), "BASE")) {
        ++pos_;
        Token iri = take();
        if (iri.kind != Tok::Iri) throw SparqlParseError("BASE without IRI");
        base_ = iri.text;
      } else {
        break;
      }
    }
    const Token& t = peek();
    if (keyword_is(t, "SELECT")) return QueryForm::Select;
    if (keyword_is(t, "CONSTRUCT")) return QueryForm::Construct;
    if (keyword_is(t, "ASK")) return QueryForm::Ask;
    if (keyword_is(t, "DESCRIBE")) return QueryForm::Describe;
    return QueryForm::Other;
  }

  void select_body() {
    ++pos_;  // SELECT
    int depth = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::End) throw SparqlParseError("SELECT without WHERE group");
      if (depth == 0 && (keyword_is(t, "WHERE") || (t.kind == Tok::Punct && t.text == "{"))) break;
      if (t.kind == Tok::Punct && t.text == "(") ++depth;
      if (t.kind == Tok::Punct && t.text == ")") --depth;
      ++pos_;
    }
    if (keyword_is(peek(), "WHERE")) ++pos_;
    expect("{");
    group();
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    static const Token end{};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : end;
  }
  Token take() {
    Token t = peek();
    if (pos_ < toks_.size()) ++pos_;
    return t;
  }
  bool at_punct(std::string_view p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }
  void expect(std::string_view p) {
    if (!at_punct(p)) throw SparqlParseError("expected '" + std::string(p) + "'");
    ++pos_;
  }

  // Skips a balanced bracketed region starting at the current opening token.
  void skip_balanced(std::string_view open, std::string_view close) {
    expect(open);
    int depth = 1;
    while (depth > 0) {
      const Token& t = peek();
      if (t.kind == Tok::End) throw SparqlParseError("unbalanced '" + std::string(open) + "'");
      if (t.kind == Tok::Punct && t.text == open) ++depth;
      if (t.kind == Tok::Punct && t.text == close) --depth;
      ++pos_;
    }
  }

  // Parses group contents after the opening brace, through the closing brace.
  void group() {
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::End) throw SparqlParseError("unterminated group");
      if (at_punct("}")) {
        ++pos_;
        return;
      }
      if (at_punct(".")) {
        ++pos_;
      } else if (at_punct("{")) {
        ++pos_;
        group();
        while (keyword_is(peek(), "UNION")) {
          ++pos_;
          expect("{");
          group();
        }
      } else if (keyword_is(t, "OPTIONAL")) {
        ++pos_;
        expect("{");
        group();
      } else if (keyword_is(t, "GRAPH")) {
        ++pos_;
        take();
        expect("{");
        group();
      } else if (keyword_is(t, "MINUS")) {
        ++pos_;
        skip_balanced("{", "}");
      } else if (keyword_is(t, "SERVICE")) {
        ++pos_;
        if (keyword_is(peek(), "SILENT")) ++pos_;
        take();
        skip_balanced("{", "}");
      } else if (keyword_is(t, "FILTER")) {
        ++pos_;
        skip_constraint();
      } else if (keyword_is(t, "BIND")) {
        ++pos_;
        skip_balanced("(", ")");
      } else if (keyword_is(t, "VALUES")) {
        ++pos_;
        if (at_punct("(")) {
          skip_balanced("(", ")");
        } else {
          take();
        }
        skip_balanced("{", "}");
      } else if (keyword_is(t, "SELECT")) {
        throw SparqlParseError("subqueries are not supported");
      } else {
        triples_same_subject();
      }
    }
  }

  void skip_constraint() {
    if (at_punct("(")) {
      skip_balanced("(", ")");
      return;
    }
    if (keyword_is(peek(), "NOT")) ++pos_;
    if (keyword_is(peek(), "EXISTS")) {
      ++pos_;
      skip_balanced("{", "}");
      return;
    }
    // Built-in or function call such as regex(...).
    if (peek().kind == Tok::Name || peek().kind == Tok::Iri) {
      ++pos_;
      skip_balanced("(", ")");
      return;
    }
    throw SparqlParseError("malformed FILTER");
  }

  void triples_same_subject() {
    Term subject = term(/*verb=*/false);
    while (true) {
      Term verb = term(/*verb=*/true);
      if (at_punct("/") || at_punct("|") || at_punct("*") || at_punct("+") || at_punct("?"))
        throw SparqlParseError("property paths are not supported");
      while (true) {
        Term object = term(/*verb=*/false);
        query_.patterns.push_back({subject, verb, std::move(object)});
        if (!at_punct(",")) break;
        ++pos_;
      }
      if (!at_punct(";")) break;
      while (at_punct(";")) ++pos_;
      if (at_punct(".") || at_punct("}")) break;
    }
    if (at_punct(".")) {
      ++pos_;
    } else if (!at_punct("}")) {
      throw SparqlParseError("expected '.' or '}' after triple pattern");
    }
  }

  Term term(bool verb) {
    Token t = peek();
    switch (t.kind) {
      case Tok::Iri:
        ++pos_;
        return Term::iri(resolve_relative(t.text));
      case Tok::Var:
        ++pos_;
        return Term::variable(t.text);
      case Tok::Literal:
        if (verb) throw SparqlParseError("literal in predicate position");
        ++pos_;
        return Term::literal(t.text);
      case Tok::Name:
        ++pos_;
        return name_term(t.text, verb);
      case Tok::Punct:
        if (t.text == "[" && peek(1).kind == Tok::Punct && peek(1).text == "]" && !verb) {
          pos_ += 2;
          return Term::variable("_anon" + std::to_string(anon_++));
        }
        if (t.text == "^" || t.text == "!") throw SparqlParseError("property paths are not supported");
        throw SparqlParseError("unexpected '" + t.text + "' in triple pattern");
      case Tok::End:
        break;
    }
    throw SparqlParseError("unexpected end of query");
  }

  Term name_term(const std::string& text, bool verb) {
    if (verb && text == "a") return Term::iri(std::string(kRdfType));
    if (text.rfind("_:", 0) == 0) return Term::variable(text);
    if (text == "true" || text == "false") return Term::literal(text);
    if (auto colon = text.find(':'); colon != std::string::npos) {
      auto it = query_.prefixes.find(text.substr(0, colon));
      if (it != query_.prefixes.end()) return Term::iri(it->second + text.substr(colon + 1));
    }
    // Undeclared prefixes and bare words are kept verbatim.
    return Term::iri(text);
  }

  std::string resolve_relative(const std::string& iri) const {
    if (base_.empty() || iri.find(':') != std::string::npos) return iri;
    return base_ + iri;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SparqlQuery& query_;
  std::string base_;
  int anon_ = 0;
};

}  // namespace

const char* to_string(QueryForm form) {
  switch (form) {
    case QueryForm::Select: return "SELECT";
    case QueryForm::Construct: return "CONSTRUCT";
    case QueryForm::Ask: return "ASK";
    case QueryForm::Describe: return "DESCRIBE";
    case QueryForm::Other: return "OTHER";
  }
  return "?";
}

SparqlQuery parse_query(std::string_view text) {
  SparqlQuery query;
  std::vector<Token> tokens;
  try {
    tokens = Lexer(text).run();
  } catch (const SparqlParseError& e) {
    // Fall back to classifying by the first keyword only.
    query.extractable = false;
    query.error = e.what();
    auto head = trim(text);
    if (starts_with_icase(head, "SELECT")) query.form = QueryForm::Select;
    return query;
  }
  Parser parser(std::move(tokens), query);
  try {
    query.form = parser.prologue();
  } catch (const SparqlParseError& e) {
    query.extractable = false;
    query.error = e.what();
    return query;
  }
  if (query.form != QueryForm::Select) return query;
  try {
    parser.select_body();
  } catch (const SparqlParseError& e) {
    query.patterns.clear();
    query.extractable = false;
    query.error = e.what();
  }
  return query;
}

std::vector<QueryPair> extract_pairs(const SparqlQuery& query) {
  std::vector<QueryPair> out;
  if (query.form != QueryForm::Select) return out;
  for (const auto& p : query.patterns) {
    if (!p.predicate.is_iri()) continue;
    QueryPair pair;
    if (p.subject.is_iri() && p.object.is_variable()) {
      pair = {p.subject.value, p.predicate.value, Orientation::SubjectKnown};
    } else if (p.subject.is_variable() && p.object.is_iri()) {
      pair = {p.object.value, p.predicate.value, Orientation::ObjectKnown};
    } else {
      continue;
    }
    if (std::find(out.begin(), out.end(), pair) == out.end()) out.push_back(std::move(pair));
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '+') {
      out.push_back(' ');
    } else if (c == '%' && i + 2 < text.size() && hex(text[i + 1]) >= 0 && hex(text[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex(text[i + 1]) * 16 + hex(text[i + 2])));
      i += 2;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace kgenrich
