#pragma once

// Rewriting of EL++ ontologies into normal forms, plus a completion-rule
// classifier used as an entailment oracle.

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ozsl/ontology.hpp"

namespace ozsl {

inline constexpr std::string_view kFreshPrefix = "NORM_";
inline constexpr std::string_view kNominalPrefix = "IND_";
inline constexpr std::string_view kTopName = "Top";
inline constexpr std::string_view kBottomName = "Bottom";

enum class NormalForm {
  NF1,   // A [= B
  NF2,   // A [= Some r.B
  NF3,   // Some r.A [= B
  NF4,   // A and B [= C
  DISJ,  // A and B [= Bottom
  RSUB,  // r [= s
};

/// A normalized axiom; operand meaning depends on `form`:
///   NF1(a,b)  NF2(a=A, b=r, c=B)  NF3(a=r, b=A, c=B)  NF4(a,b,c)  DISJ(a,b)  RSUB(a=r, b=s)
struct NormalAxiom {
  NormalForm form;
  std::string a;
  std::string b;
  std::string c;

  static NormalAxiom nf1(std::string A, std::string B) { return {NormalForm::NF1, std::move(A), std::move(B), {}}; }
  static NormalAxiom nf2(std::string A, std::string r, std::string B) {
    return {NormalForm::NF2, std::move(A), std::move(r), std::move(B)};
  }
  static NormalAxiom nf3(std::string r, std::string A, std::string B) {
    return {NormalForm::NF3, std::move(r), std::move(A), std::move(B)};
  }
  static NormalAxiom nf4(std::string A, std::string B, std::string C) {
    return {NormalForm::NF4, std::move(A), std::move(B), std::move(C)};
  }
  static NormalAxiom disj(std::string A, std::string B) { return {NormalForm::DISJ, std::move(A), std::move(B), {}}; }
  static NormalAxiom rsub(std::string r, std::string s) { return {NormalForm::RSUB, std::move(r), std::move(s), {}}; }

  auto operator<=>(const NormalAxiom&) const = default;
  bool operator==(const NormalAxiom&) const = default;
};

/// `NF2 A r B` style line, as used by the normalized axiom file.
std::string to_string(const NormalAxiom& ax);

struct NormalizedOntology {
  /// Unique axioms in derivation order.
  std::vector<NormalAxiom> axioms;
  /// Original concepts, then nominal-derived names, then fresh names, then Top/Bottom if used.
  std::vector<std::string> concepts;
  std::vector<std::string> relations;
  std::vector<std::string> fresh_names;
  /// Fresh name -> ELF text of the expression it stands for.
  std::map<std::string, std::string> provenance;
  /// Individual -> generated concept name.
  std::map<std::string, std::string> nominal_map;
  /// Annotation axioms of the source ontology, untouched.
  std::vector<Annotation> annotations;

  bool operator==(const NormalizedOntology&) const = default;

  bool is_nominal_concept(std::string_view name) const;
};

/// Rewrites `o` into normal form. Throws DataError on RelationChain axioms
/// or an invalid ontology.
NormalizedOntology normalize(const Ontology& o);

/// Renders the normalized ontology back into ELF (one SubClassOf/SubRelationOf per axiom).
Ontology to_ontology(const NormalizedOntology& n);

/// Normalized axiom file: one axiom per line, `#` metadata lines, `# fresh:` trailer.
std::string write_normalized(const NormalizedOntology& n);
NormalizedOntology read_normalized(std::string_view text);

using Subsumptions = std::set<std::pair<std::string, std::string>>;

/// Saturates the completion rules over NF1-NF4/DISJ/RSUB; returns {(A,B) : B in S(A)}
/// for every concept name A of `n`.
Subsumptions classify(const NormalizedOntology& n);

/// Pairs of `s` whose members both appear in `names`.
Subsumptions restrict_to(const Subsumptions& s, const std::vector<std::string>& names);

}  // namespace ozsl
