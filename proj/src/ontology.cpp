#include "ozsl/ontology.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>

namespace ozsl {

Expr Expr::top() { return Expr(std::make_shared<const Node>(Node{Kind::Top, {}, {}, {}})); }
Expr Expr::bottom() { return Expr(std::make_shared<const Node>(Node{Kind::Bottom, {}, {}, {}})); }

Expr Expr::atomic(std::string name) {
  return Expr(std::make_shared<const Node>(Node{Kind::Atomic, std::move(name), {}, {}}));
}

Expr Expr::conjunction(Expr left, Expr right) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::Conjunction, {}, std::move(left), std::move(right)}));
}

Expr Expr::existential(std::string relation, Expr filler) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::Existential, std::move(relation), std::move(filler), {}}));
}

Expr Expr::nominal(std::string individual) {
  return Expr(std::make_shared<const Node>(Node{Kind::Nominal, std::move(individual), {}, {}}));
}

Expr Expr::conjunction_of(const std::vector<Expr>& parts) {
  if (parts.empty()) throw std::invalid_argument("conjunction_of: no operands");
  Expr acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = conjunction(parts[i], acc);
  return acc;
}

const Expr& Expr::left() const {
  if (kind() != Kind::Conjunction) throw std::logic_error("Expr::left on non-conjunction");
  return *node_->first;
}

const Expr& Expr::right() const {
  if (kind() != Kind::Conjunction) throw std::logic_error("Expr::right on non-conjunction");
  return *node_->second;
}

const Expr& Expr::filler() const {
  if (kind() != Kind::Existential) throw std::logic_error("Expr::filler on non-existential");
  return *node_->first;
}

bool Expr::is_basic() const noexcept {
  return kind() != Kind::Conjunction && kind() != Kind::Existential;
}

std::size_t Expr::complex_count() const {
  switch (kind()) {
    case Kind::Conjunction:
      return 1 + left().complex_count() + right().complex_count();
    case Kind::Existential:
      return 1 + filler().complex_count();
    default:
      return 0;
  }
}

std::size_t Expr::depth() const {
  switch (kind()) {
    case Kind::Conjunction:
      return 1 + std::max(left().depth(), right().depth());
    case Kind::Existential:
      return 1 + filler().depth();
    default:
      return 0;
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Top:
    case Expr::Kind::Bottom:
      return true;
    case Expr::Kind::Atomic:
    case Expr::Kind::Nominal:
      return a.name() == b.name();
    case Expr::Kind::Conjunction:
      return a.left() == b.left() && a.right() == b.right();
    case Expr::Kind::Existential:
      return a.name() == b.name() && a.filler() == b.filler();
  }
  return false;
}

namespace {

void append_elf(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Top:
      out += "Top";
      return;
    case Expr::Kind::Bottom:
      out += "Bottom";
      return;
    case Expr::Kind::Atomic:
      out += e.name();
      return;
    case Expr::Kind::Nominal:
      out += "One(" + e.name() + ")";
      return;
    case Expr::Kind::Existential:
      out += "Some(" + e.name() + " ";
      append_elf(e.filler(), out);
      out += ")";
      return;
    case Expr::Kind::Conjunction: {
      // Flatten the right spine back into n-ary And(...).
      out += "And(";
      append_elf(e.left(), out);
      const Expr* rest = &e.right();
      while (rest->kind() == Expr::Kind::Conjunction) {
        out += " ";
        append_elf(rest->left(), out);
        rest = &rest->right();
      }
      out += " ";
      append_elf(*rest, out);
      out += ")";
      return;
    }
  }
}

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  out += '"';
  return out;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string to_elf(const Expr& e) {
  std::string out;
  append_elf(e, out);
  return out;
}

std::string axiom_to_elf(const Axiom& a) {
  return std::visit(
      overloaded{
          [](const SubClassOf& x) { return "SubClassOf(" + to_elf(x.sub) + " " + to_elf(x.sup) + ")"; },
          [](const EquivalentTo& x) {
            return "EquivalentTo(" + to_elf(x.left) + " " + to_elf(x.right) + ")";
          },
          [](const SubRelationOf& x) { return "SubRelationOf(" + x.sub + " " + x.sup + ")"; },
          [](const RelationChain& x) {
            std::string s = "RelationChain(";
            for (const auto& r : x.chain) s += r + " ";
            return s + "-> " + x.sup + ")";
          },
          [](const Instance& x) { return "Instance(" + x.individual + " " + to_elf(x.type) + ")"; },
          [](const RelationInstance& x) {
            return "RelationInstance(" + x.relation + " " + x.subject + " " + x.object + ")";
          },
          [](const Annotation& x) {
            return std::string(x.kind == AnnotationKind::Label ? "Label(" : "Comment(") + x.entity +
                   " " + quote(x.text) + ")";
          },
      },
      a);
}

std::string serialize_ontology(const Ontology& o) {
  std::string out;
  for (const auto& c : o.concepts) out += "Concept(" + c + ")\n";
  for (const auto& r : o.relations) out += "Relation(" + r + ")\n";
  for (const auto& i : o.individuals) out += "Individual(" + i + ")\n";
  for (const auto& a : o.axioms) out += axiom_to_elf(a) + "\n";
  return out;
}

bool Ontology::has_concept(std::string_view name) const {
  return std::find(concepts.begin(), concepts.end(), name) != concepts.end();
}

bool Ontology::has_relation(std::string_view name) const {
  return std::find(relations.begin(), relations.end(), name) != relations.end();
}

bool Ontology::has_individual(std::string_view name) const {
  return std::find(individuals.begin(), individuals.end(), name) != individuals.end();
}

std::optional<std::string> Ontology::label_of(std::string_view entity) const {
  for (const auto& a : axioms) {
    if (const auto* ann = std::get_if<Annotation>(&a)) {
      if (ann->kind == AnnotationKind::Label && ann->entity == entity) return ann->text;
    }
  }
  return std::nullopt;
}

bool is_reserved_word(std::string_view word) {
  static constexpr std::array<std::string_view, 5> kReserved = {"Top", "Bottom", "And", "Some", "One"};
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

bool is_valid_name(std::string_view name) {
  if (name.empty() || is_reserved_word(name)) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(name[0])) return false;
  return std::all_of(name.begin() + 1, name.end(),
                     [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

namespace {

enum class Sort { Concept, Relation, Individual };

struct Resolver {
  std::map<std::string, std::set<Sort>, std::less<>> sorts;

  bool has(std::string_view name, Sort s) const {
    auto it = sorts.find(name);
    return it != sorts.end() && it->second.count(s) > 0;
  }
  bool any(std::string_view name) const { return sorts.find(name) != sorts.end(); }
};

void check_expr(const Expr& e, const Resolver& r, std::vector<std::string>& problems) {
  switch (e.kind()) {
    case Expr::Kind::Top:
    case Expr::Kind::Bottom:
      return;
    case Expr::Kind::Atomic:
      if (!r.has(e.name(), Sort::Concept)) problems.push_back("undeclared concept '" + e.name() + "'");
      return;
    case Expr::Kind::Nominal:
      if (!r.has(e.name(), Sort::Individual))
        problems.push_back("undeclared individual '" + e.name() + "'");
      return;
    case Expr::Kind::Conjunction:
      check_expr(e.left(), r, problems);
      check_expr(e.right(), r, problems);
      return;
    case Expr::Kind::Existential:
      if (!r.has(e.name(), Sort::Relation))
        problems.push_back("undeclared relation '" + e.name() + "'");
      check_expr(e.filler(), r, problems);
      return;
  }
}

std::vector<std::string> check_axiom(const Axiom& a, const Resolver& r) {
  std::vector<std::string> p;
  auto need = [&](const std::string& name, Sort s, const char* what) {
    if (!r.has(name, s)) p.push_back(std::string("undeclared ") + what + " '" + name + "'");
  };
  std::visit(overloaded{
                 [&](const SubClassOf& x) {
                   check_expr(x.sub, r, p);
                   check_expr(x.sup, r, p);
                 },
                 [&](const EquivalentTo& x) {
                   check_expr(x.left, r, p);
                   check_expr(x.right, r, p);
                 },
                 [&](const SubRelationOf& x) {
                   need(x.sub, Sort::Relation, "relation");
                   need(x.sup, Sort::Relation, "relation");
                 },
                 [&](const RelationChain& x) {
                   if (x.chain.empty()) p.push_back("empty relation chain");
                   for (const auto& c : x.chain) need(c, Sort::Relation, "relation");
                   need(x.sup, Sort::Relation, "relation");
                 },
                 [&](const Instance& x) {
                   need(x.individual, Sort::Individual, "individual");
                   check_expr(x.type, r, p);
                 },
                 [&](const RelationInstance& x) {
                   need(x.relation, Sort::Relation, "relation");
                   need(x.subject, Sort::Individual, "individual");
                   need(x.object, Sort::Individual, "individual");
                 },
                 [&](const Annotation& x) {
                   if (!r.any(x.entity)) p.push_back("undeclared entity '" + x.entity + "'");
                   if (x.text.empty()) p.push_back("empty annotation text");
                 },
             },
             a);
  return p;
}

}  // namespace

std::vector<Violation> validate(const Ontology& o) {
  std::vector<Violation> out;
  Resolver r;
  auto declare = [&](const std::vector<std::string>& names, Sort s, const char* what) {
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (!is_valid_name(n)) out.push_back({std::nullopt, std::string("invalid ") + what + " name '" + n + "'"});
      if (!seen.insert(n).second)
        out.push_back({std::nullopt, std::string("duplicate ") + what + " '" + n + "'"});
      r.sorts[n].insert(s);
    }
  };
  declare(o.concepts, Sort::Concept, "concept");
  declare(o.relations, Sort::Relation, "relation");
  declare(o.individuals, Sort::Individual, "individual");
  for (const auto& [name, sorts] : r.sorts) {
    if (sorts.size() > 1)
      out.push_back({std::nullopt, "name '" + name + "' declared in more than one signature set"});
  }
  for (std::size_t i = 0; i < o.axioms.size(); ++i) {
    for (auto& reason : check_axiom(o.axioms[i], r)) out.push_back({i, std::move(reason)});
  }
  return out;
}

}  // namespace ozsl
