#pragma once

// EL++ data model, the line-oriented ELF text format and structural validation.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ozsl {

/// Immutable EL++ concept expression:
///   Top | Bottom | Atomic(name) | Conjunction(left, right) | Existential(relation, filler) | Nominal(individual)
/// Copies share the underlying tree. Equality is structural.
class Expr {
public:
  enum class Kind { Top, Bottom, Atomic, Conjunction, Existential, Nominal };

  static Expr top();
  static Expr bottom();
  static Expr atomic(std::string name);
  static Expr conjunction(Expr left, Expr right);
  static Expr existential(std::string relation, Expr filler);
  static Expr nominal(std::string individual);
  /// Right-folds `parts` (size >= 1) into nested binary conjunctions.
  static Expr conjunction_of(const std::vector<Expr>& parts);

  Kind kind() const noexcept;
  /// Atomic: concept name, Existential: relation name, Nominal: individual name.
  const std::string& name() const noexcept;
  /// Conjunction left operand.
  const Expr& left() const;
  /// Conjunction right operand.
  const Expr& right() const;
  /// Existential filler.
  const Expr& filler() const;

  bool is_basic() const noexcept;

  /// Number of Conjunction/Existential nodes in the tree.
  std::size_t complex_count() const;
  std::size_t depth() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Kind kind;
  std::string name;
  std::optional<Expr> first;
  std::optional<Expr> second;
};

inline Expr::Kind Expr::kind() const noexcept { return node_->kind; }
inline const std::string& Expr::name() const noexcept { return node_->name; }

/// ELF text of an expression, e.g. `And(TW Some(hasTexture Patches))`.
std::string to_elf(const Expr& e);

struct SubClassOf {
  Expr sub;
  Expr sup;
  bool operator==(const SubClassOf&) const = default;
};

struct EquivalentTo {
  Expr left;
  Expr right;
  bool operator==(const EquivalentTo&) const = default;
};

struct SubRelationOf {
  std::string sub;
  std::string sup;
  bool operator==(const SubRelationOf&) const = default;
};

/// r1 o ... o rn [= s. Parsed and validated; normalization rejects it.
struct RelationChain {
  std::vector<std::string> chain;
  std::string sup;
  bool operator==(const RelationChain&) const = default;
};

struct Instance {
  std::string individual;
  Expr type;
  bool operator==(const Instance&) const = default;
};

struct RelationInstance {
  std::string relation;
  std::string subject;
  std::string object;
  bool operator==(const RelationInstance&) const = default;
};

enum class AnnotationKind { Label, Comment };

struct Annotation {
  std::string entity;
  AnnotationKind kind = AnnotationKind::Label;
  std::string text;
  bool operator==(const Annotation&) const = default;
};

using Axiom = std::variant<SubClassOf, EquivalentTo, SubRelationOf, RelationChain, Instance,
                           RelationInstance, Annotation>;

struct Ontology {
  std::vector<std::string> concepts;
  std::vector<std::string> relations;
  std::vector<std::string> individuals;
  std::vector<Axiom> axioms;

  bool operator==(const Ontology&) const = default;

  bool has_concept(std::string_view name) const;
  bool has_relation(std::string_view name) const;
  bool has_individual(std::string_view name) const;

  /// First Label annotation of `entity`, if any.
  std::optional<std::string> label_of(std::string_view entity) const;
};

/// Words with special meaning in ELF; they cannot be declared as names.
bool is_reserved_word(std::string_view word);
/// `[A-Za-z_][A-Za-z0-9_]*` and not reserved.
bool is_valid_name(std::string_view name);

/// Parses ELF text. Throws ParseError for syntax errors and DataError for
/// undeclared names, duplicate declarations and signature overlap.
Ontology parse_ontology(std::string_view text);

/// Canonical ELF: declarations (concepts, relations, individuals) then axioms, one per line.
std::string serialize_ontology(const Ontology& o);

std::string axiom_to_elf(const Axiom& a);

struct Violation {
  /// Index into Ontology::axioms, or nullopt for signature-level problems.
  std::optional<std::size_t> axiom_index;
  std::string reason;
  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate(const Ontology& o);

}  // namespace ozsl
