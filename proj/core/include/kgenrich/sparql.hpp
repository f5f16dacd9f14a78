#pragma once
// A SPARQL subset sufficient for mining entity-predicate pairs out of query
// logs: PREFIX/BASE prologue, form classification, and basic graph patterns
// inside WHERE, including OPTIONAL, UNION, GRAPH and nested groups, with the
// `;` and `,` abbreviations. FILTER, BIND, VALUES, MINUS, SERVICE and solution
// modifiers are skipped. Property paths, blank-node property lists,
// collections and subqueries make the WHERE body unextractable.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgenrich/kg.hpp"

namespace kgenrich {

enum class QueryForm { Select, Construct, Ask, Describe, Other };

inline constexpr std::size_t kNumQueryForms = 5;

const char* to_string(QueryForm form);

struct Term {
  enum class Kind { Iri, Variable, Literal };
  Kind kind = Kind::Variable;
  std::string value;  // expanded IRI, variable name without sigil, or literal text

  static Term iri(std::string v) { return {Kind::Iri, std::move(v)}; }
  static Term variable(std::string v) { return {Kind::Variable, std::move(v)}; }
  static Term literal(std::string v) { return {Kind::Literal, std::move(v)}; }

  bool is_iri() const { return kind == Kind::Iri; }
  bool is_variable() const { return kind == Kind::Variable; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

struct SparqlQuery {
  QueryForm form = QueryForm::Other;
  std::map<std::string, std::string> prefixes;
  std::vector<TriplePattern> patterns;
  // False when the WHERE body of a SELECT could not be parsed; the form is
  // still classified.
  bool extractable = true;
  std::string error;
};

class SparqlParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SparqlQuery parse_query(std::string_view text);

// An entity-predicate pair at label level, before resolution against a KG.
struct QueryPair {
  std::string entity;
  std::string predicate;
  Orientation orientation = Orientation::SubjectKnown;

  friend bool operator==(const QueryPair&, const QueryPair&) = default;
  friend auto operator<=>(const QueryPair&, const QueryPair&) = default;
};

// Pairs named by the patterns of a SELECT query, in pattern order, each pair
// reported once per query. Non-SELECT queries yield nothing.
std::vector<QueryPair> extract_pairs(const SparqlQuery& query);

// Decodes %XX escapes and '+' (form encoding of a space).
std::string percent_decode(std::string_view text);

}  // namespace kgenrich
