#include "ozsl/normalizer.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "ozsl/error.hpp"

namespace ozsl {

std::string to_string(const NormalAxiom& ax) {
  switch (ax.form) {
    case NormalForm::NF1:
      return "NF1 " + ax.a + " " + ax.b;
    case NormalForm::NF2:
      return "NF2 " + ax.a + " " + ax.b + " " + ax.c;
    case NormalForm::NF3:
      return "NF3 " + ax.a + " " + ax.b + " " + ax.c;
    case NormalForm::NF4:
      return "NF4 " + ax.a + " " + ax.b + " " + ax.c;
    case NormalForm::DISJ:
      return "DISJ " + ax.a + " " + ax.b;
    case NormalForm::RSUB:
      return "RSUB " + ax.a + " " + ax.b;
  }
  return {};
}

bool NormalizedOntology::is_nominal_concept(std::string_view name) const {
  return std::any_of(nominal_map.begin(), nominal_map.end(),
                     [&](const auto& kv) { return kv.second == name; });
}

namespace {

class Normalizer {
public:
  explicit Normalizer(const Ontology& o) : o_(o) {
    for (const auto& c : o.concepts) taken_.insert(c);
    for (const auto& r : o.relations) taken_.insert(r);
    for (const auto& i : o.individuals) taken_.insert(i);
    out_.concepts = o.concepts;
    out_.relations = o.relations;
    for (const auto& ind : o.individuals) {
      std::string base = std::string(kNominalPrefix) + ind;
      std::string name = base;
      for (int k = 2; taken_.count(name); ++k) name = base + "_" + std::to_string(k);
      taken_.insert(name);
      out_.nominal_map[ind] = name;
      out_.concepts.push_back(name);
    }
  }

  NormalizedOntology run() {
    for (std::size_t i = 0; i < o_.axioms.size(); ++i) {
      const Axiom& ax = o_.axioms[i];
      if (const auto* x = std::get_if<SubClassOf>(&ax)) {
        gci(x->sub, x->sup);
      } else if (const auto* x = std::get_if<EquivalentTo>(&ax)) {
        gci(x->left, x->right);
        gci(x->right, x->left);
      } else if (const auto* x = std::get_if<SubRelationOf>(&ax)) {
        emit(NormalAxiom::rsub(x->sub, x->sup));
      } else if (std::holds_alternative<RelationChain>(ax)) {
        throw DataError("unsupported axiom at index " + std::to_string(i) +
                        ": relation composition cannot be normalized (" + axiom_to_elf(ax) + ")");
      } else if (const auto* x = std::get_if<Instance>(&ax)) {
        gci(Expr::nominal(x->individual), x->type);
      } else if (const auto* x = std::get_if<RelationInstance>(&ax)) {
        gci(Expr::nominal(x->subject), Expr::existential(x->relation, Expr::nominal(x->object)));
      } else if (const auto* x = std::get_if<Annotation>(&ax)) {
        out_.annotations.push_back(*x);
      }
    }
    out_.concepts.insert(out_.concepts.end(), out_.fresh_names.begin(), out_.fresh_names.end());
    bool top = false, bottom = false;
    for (const auto& ax : out_.axioms) {
      if (ax.form == NormalForm::RSUB) continue;
      for (const std::string* s : operands(ax)) {
        top = top || *s == kTopName;
        bottom = bottom || *s == kBottomName;
      }
    }
    if (top) out_.concepts.emplace_back(kTopName);
    if (bottom) out_.concepts.emplace_back(kBottomName);
    check_shape();
    return std::move(out_);
  }

private:
  static std::vector<const std::string*> operands(const NormalAxiom& ax) {
    switch (ax.form) {
      case NormalForm::NF1:
      case NormalForm::DISJ:
        return {&ax.a, &ax.b};
      case NormalForm::NF2:
        return {&ax.a, &ax.c};
      case NormalForm::NF3:
        return {&ax.b, &ax.c};
      case NormalForm::NF4:
        return {&ax.a, &ax.b, &ax.c};
      case NormalForm::RSUB:
        return {};
    }
    return {};
  }

  void check_shape() const {
    std::set<std::string, std::less<>> concepts(out_.concepts.begin(), out_.concepts.end());
    std::set<std::string, std::less<>> relations(out_.relations.begin(), out_.relations.end());
    auto is_rel = [&](const std::string& r) { return relations.count(r) > 0; };
    for (const auto& ax : out_.axioms) {
      bool ok = true;
      for (const std::string* s : operands(ax)) ok = ok && concepts.count(*s) > 0;
      if (ax.form == NormalForm::NF2) ok = ok && is_rel(ax.b);
      if (ax.form == NormalForm::NF3) ok = ok && is_rel(ax.a);
      if (ax.form == NormalForm::RSUB) ok = is_rel(ax.a) && is_rel(ax.b);
      if (!ok) throw std::logic_error("normalizer produced a non-normal axiom: " + to_string(ax));
    }
  }

  void emit(NormalAxiom ax) {
    if (seen_.insert(ax).second) out_.axioms.push_back(std::move(ax));
  }

  std::string basic_name(const Expr& e) const {
    switch (e.kind()) {
      case Expr::Kind::Top:
        return std::string(kTopName);
      case Expr::Kind::Bottom:
        return std::string(kBottomName);
      case Expr::Kind::Atomic:
        return e.name();
      case Expr::Kind::Nominal: {
        auto it = out_.nominal_map.find(e.name());
        if (it == out_.nominal_map.end()) throw DataError("undeclared individual '" + e.name() + "'");
        return it->second;
      }
      default:
        throw std::logic_error("basic_name on complex expression");
    }
  }

  // One fresh name per distinct complex expression, shared by both polarities.
  std::string fresh_for(const Expr& c) {
    std::string key = to_elf(c);
    auto it = fresh_by_expr_.find(key);
    if (it != fresh_by_expr_.end()) return it->second;
    std::string name;
    do {
      name = std::string(kFreshPrefix) + std::to_string(++counter_);
    } while (taken_.count(name));
    taken_.insert(name);
    out_.fresh_names.push_back(name);
    out_.provenance[name] = key;
    fresh_by_expr_.emplace(key, name);
    return name;
  }

  // Name N with C [= N emitted.
  std::string lower_name(const Expr& c) {
    if (c.is_basic()) return basic_name(c);
    std::string n = fresh_for(c);
    if (defined_lower_.insert(n).second) gci(c, Expr::atomic(n));
    return n;
  }

  // Name N with N [= C emitted.
  std::string upper_name(const Expr& c) {
    if (c.is_basic()) return basic_name(c);
    std::string n = fresh_for(c);
    if (defined_upper_.insert(n).second) gci(Expr::atomic(n), c);
    return n;
  }

  void gci(const Expr& lhs, const Expr& rhs) {
    if (rhs.kind() == Expr::Kind::Top || lhs.kind() == Expr::Kind::Bottom) return;
    if (rhs.kind() == Expr::Kind::Conjunction) {
      gci(lhs, rhs.left());
      gci(lhs, rhs.right());
      return;
    }
    if (!lhs.is_basic() && !rhs.is_basic()) {
      std::string n = lower_name(lhs);
      gci(Expr::atomic(n), rhs);
      return;
    }
    if (lhs.is_basic()) {
      std::string a = basic_name(lhs);
      if (rhs.is_basic()) {
        emit(NormalAxiom::nf1(a, basic_name(rhs)));
      } else {  // existential
        std::string b = upper_name(rhs.filler());
        emit(NormalAxiom::nf2(a, rhs.name(), b));
      }
      return;
    }
    std::string target = basic_name(rhs);
    if (lhs.kind() == Expr::Kind::Conjunction) {
      std::string a = lower_name(lhs.left());
      std::string b = lower_name(lhs.right());
      if (rhs.kind() == Expr::Kind::Bottom)
        emit(NormalAxiom::disj(a, b));
      else
        emit(NormalAxiom::nf4(a, b, target));
    } else {  // existential
      std::string a = lower_name(lhs.filler());
      emit(NormalAxiom::nf3(lhs.name(), a, target));
    }
  }

  const Ontology& o_;
  NormalizedOntology out_;
  std::set<NormalAxiom> seen_;
  std::set<std::string> taken_;
  std::map<std::string, std::string> fresh_by_expr_;
  std::set<std::string> defined_lower_;
  std::set<std::string> defined_upper_;
  int counter_ = 0;
};

Expr concept_expr(const std::string& name) {
  if (name == kTopName) return Expr::top();
  if (name == kBottomName) return Expr::bottom();
  return Expr::atomic(name);
}

}  // namespace

NormalizedOntology normalize(const Ontology& o) {
  auto violations = validate(o);
  if (!violations.empty()) {
    const auto& v = violations.front();
    std::string where = v.axiom_index ? "axiom " + std::to_string(*v.axiom_index) + ": " : "";
    throw DataError("invalid ontology: " + where + v.reason);
  }
  return Normalizer(o).run();
}

Ontology to_ontology(const NormalizedOntology& n) {
  Ontology o;
  for (const auto& c : n.concepts) {
    if (c != kTopName && c != kBottomName) o.concepts.push_back(c);
  }
  o.relations = n.relations;
  for (const auto& ax : n.axioms) {
    switch (ax.form) {
      case NormalForm::NF1:
        o.axioms.emplace_back(SubClassOf{concept_expr(ax.a), concept_expr(ax.b)});
        break;
      case NormalForm::NF2:
        o.axioms.emplace_back(SubClassOf{concept_expr(ax.a), Expr::existential(ax.b, concept_expr(ax.c))});
        break;
      case NormalForm::NF3:
        o.axioms.emplace_back(SubClassOf{Expr::existential(ax.a, concept_expr(ax.b)), concept_expr(ax.c)});
        break;
      case NormalForm::NF4:
        o.axioms.emplace_back(SubClassOf{Expr::conjunction(concept_expr(ax.a), concept_expr(ax.b)),
                                         concept_expr(ax.c)});
        break;
      case NormalForm::DISJ:
        o.axioms.emplace_back(
            SubClassOf{Expr::conjunction(concept_expr(ax.a), concept_expr(ax.b)), Expr::bottom()});
        break;
      case NormalForm::RSUB:
        o.axioms.emplace_back(SubRelationOf{ax.a, ax.b});
        break;
    }
  }
  for (Annotation ann : n.annotations) {
    auto it = n.nominal_map.find(ann.entity);
    if (it != n.nominal_map.end()) ann.entity = it->second;
    if (o.has_concept(ann.entity) || o.has_relation(ann.entity)) o.axioms.emplace_back(std::move(ann));
  }
  return o;
}

std::string write_normalized(const NormalizedOntology& n) {
  std::ostringstream out;
  auto list = [&](const char* key, const std::vector<std::string>& names) {
    out << "# " << key << ":";
    for (const auto& s : names) out << ' ' << s;
    out << '\n';
  };
  list("concepts", n.concepts);
  list("relations", n.relations);
  for (const auto& [ind, name] : n.nominal_map) out << "# nominal: " << ind << ' ' << name << '\n';
  for (const auto& f : n.fresh_names) out << "# provenance: " << f << ' ' << n.provenance.at(f) << '\n';
  for (const auto& a : n.annotations) out << "# annotation: " << axiom_to_elf(a) << '\n';
  for (const auto& ax : n.axioms) out << to_string(ax) << '\n';
  list("fresh", n.fresh_names);
  return out.str();
}

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

NormalizedOntology read_normalized(std::string_view text) {
  NormalizedOntology n;
  bool have_concepts = false, have_relations = false;
  std::set<std::string> seen;
  std::vector<std::string> derived_concepts, derived_relations;
  auto note = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto err = [&](const std::string& msg) {
      return DataError("normalized file line " + std::to_string(line_no) + ": " + msg);
    };
    if (starts_with(line, "#")) {
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (starts_with(body, "concepts:")) {
        n.concepts = split_ws(body.substr(9));
        have_concepts = true;
      } else if (starts_with(body, "relations:")) {
        n.relations = split_ws(body.substr(10));
        have_relations = true;
      } else if (starts_with(body, "fresh:")) {
        n.fresh_names = split_ws(body.substr(6));
      } else if (starts_with(body, "nominal:")) {
        auto w = split_ws(body.substr(8));
        if (w.size() != 2) throw err("nominal line needs 2 fields");
        n.nominal_map[w[0]] = w[1];
      } else if (starts_with(body, "provenance:")) {
        std::string_view rest = body.substr(11);
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        auto sp = rest.find(' ');
        if (sp == std::string_view::npos) throw err("provenance line needs name and expression");
        n.provenance[std::string(rest.substr(0, sp))] = std::string(rest.substr(sp + 1));
      } else if (starts_with(body, "annotation:")) {
        std::string_view rest = body.substr(11);
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        auto open = rest.find('('), sp = rest.find(' ');
        if (open == std::string_view::npos || sp == std::string_view::npos || sp < open)
          throw err("malformed annotation");
        // Declare the entity so the annotation parses on its own.
        std::string doc = "Concept(" + std::string(rest.substr(open + 1, sp - open - 1)) + ")\n" + std::string(rest);
        Ontology one;
        try {
          one = parse_ontology(doc);
        } catch (const DataError& e) {
          throw err(std::string("malformed annotation: ") + e.what());
        }
        const Annotation* a = one.axioms.size() == 1 ? std::get_if<Annotation>(&one.axioms[0]) : nullptr;
        if (!a) throw err("malformed annotation");
        n.annotations.push_back(*a);
      }
      continue;
    }
    auto w = split_ws(line);
    if (w.empty()) continue;
    const std::string& tag = w[0];
    auto arity = [&](std::size_t k) {
      if (w.size() != k + 1) throw err(tag + " expects " + std::to_string(k) + " operands");
    };
    NormalAxiom ax;
    if (tag == "NF1") {
      arity(2);
      ax = NormalAxiom::nf1(w[1], w[2]);
    } else if (tag == "NF2") {
      arity(3);
      ax = NormalAxiom::nf2(w[1], w[2], w[3]);
    } else if (tag == "NF3") {
      arity(3);
      ax = NormalAxiom::nf3(w[1], w[2], w[3]);
    } else if (tag == "NF4") {
      arity(3);
      ax = NormalAxiom::nf4(w[1], w[2], w[3]);
    } else if (tag == "DISJ") {
      arity(2);
      ax = NormalAxiom::disj(w[1], w[2]);
    } else if (tag == "RSUB") {
      arity(2);
      ax = NormalAxiom::rsub(w[1], w[2]);
    } else {
      throw err("unknown axiom form '" + tag + "'");
    }
    switch (ax.form) {
      case NormalForm::NF1:
      case NormalForm::DISJ:
        note(derived_concepts, ax.a);
        note(derived_concepts, ax.b);
        break;
      case NormalForm::NF2:
        note(derived_concepts, ax.a);
        note(derived_relations, ax.b);
        note(derived_concepts, ax.c);
        break;
      case NormalForm::NF3:
        note(derived_relations, ax.a);
        note(derived_concepts, ax.b);
        note(derived_concepts, ax.c);
        break;
      case NormalForm::NF4:
        note(derived_concepts, ax.a);
        note(derived_concepts, ax.b);
        note(derived_concepts, ax.c);
        break;
      case NormalForm::RSUB:
        note(derived_relations, ax.a);
        note(derived_relations, ax.b);
        break;
    }
    if (seen.insert(to_string(ax)).second) n.axioms.push_back(std::move(ax));
  }
  if (!have_concepts) n.concepts = derived_concepts;
  if (!have_relations) n.relations = derived_relations;
  for (const auto& c : derived_concepts) {
    if (std::find(n.concepts.begin(), n.concepts.end(), c) == n.concepts.end())
      throw DataError("normalized file: concept '" + c + "' missing from concepts header");
  }
  for (const auto& r : derived_relations) {
    if (std::find(n.relations.begin(), n.relations.end(), r) == n.relations.end())
      throw DataError("normalized file: relation '" + r + "' missing from relations header");
  }
  return n;
}

Subsumptions restrict_to(const Subsumptions& s, const std::vector<std::string>& names) {
  std::set<std::string> keep(names.begin(), names.end());
  Subsumptions out;
  for (const auto& p : s) {
    if (keep.count(p.first) && keep.count(p.second)) out.insert(p);
  }
  return out;
}

}  // namespace ozsl
