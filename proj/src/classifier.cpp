#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "ozsl/normalizer.hpp"

namespace ozsl {

Subsumptions classify(const NormalizedOntology& n) {
  std::unordered_map<std::string, int> idx;
  std::vector<std::string> names;
  auto index_of = [&](const std::string& s) {
    auto [it, inserted] = idx.emplace(s, static_cast<int>(names.size()));
    if (inserted) names.push_back(s);
    return it->second;
  };
  for (const auto& c : n.concepts) index_of(c);
  const std::size_t reported = names.size();
  const bool has_top = idx.count(std::string(kTopName)) > 0;
  // Bottom gets a slot even when only DISJ axioms imply it.
  const int bottom = index_of(std::string(kBottomName));
  const int top = has_top ? idx.at(std::string(kTopName)) : -1;

  struct Ax {
    NormalForm form;
    int a, b, c;
    std::string rel, rel2;
  };
  std::vector<Ax> axioms;
  for (const auto& ax : n.axioms) {
    switch (ax.form) {
      case NormalForm::NF1:
      case NormalForm::DISJ:
        axioms.push_back({ax.form, index_of(ax.a), index_of(ax.b), -1, {}, {}});
        break;
      case NormalForm::NF2:
        axioms.push_back({ax.form, index_of(ax.a), -1, index_of(ax.c), ax.b, {}});
        break;
      case NormalForm::NF3:
        axioms.push_back({ax.form, -1, index_of(ax.b), index_of(ax.c), ax.a, {}});
        break;
      case NormalForm::NF4:
        axioms.push_back({ax.form, index_of(ax.a), index_of(ax.b), index_of(ax.c), {}, {}});
        break;
      case NormalForm::RSUB:
        axioms.push_back({ax.form, -1, -1, -1, ax.a, ax.b});
        break;
    }
  }

  const std::size_t count = names.size();
  std::vector<std::vector<char>> S(count, std::vector<char>(count, 0));
  for (std::size_t a = 0; a < count; ++a) {
    S[a][a] = 1;
    if (top >= 0) S[a][top] = 1;
  }
  std::map<std::string, std::set<std::pair<int, int>>> edges;

  bool changed = true;
  auto add = [&](int a, int c) {
    if (!S[a][c]) {
      S[a][c] = 1;
      changed = true;
    }
  };
  while (changed) {
    changed = false;
    for (const auto& ax : axioms) {
      switch (ax.form) {
        case NormalForm::NF1:
          for (std::size_t a = 0; a < count; ++a)
            if (S[a][ax.a]) add(static_cast<int>(a), ax.b);
          break;
        case NormalForm::NF4:
          for (std::size_t a = 0; a < count; ++a)
            if (S[a][ax.a] && S[a][ax.b]) add(static_cast<int>(a), ax.c);
          break;
        case NormalForm::DISJ:
          for (std::size_t a = 0; a < count; ++a)
            if (S[a][ax.a] && S[a][ax.b]) add(static_cast<int>(a), bottom);
          break;
        case NormalForm::NF2:
          for (std::size_t a = 0; a < count; ++a) {
            if (S[a][ax.a] && edges[ax.rel].emplace(static_cast<int>(a), ax.c).second) changed = true;
          }
          break;
        case NormalForm::NF3: {
          auto it = edges.find(ax.rel);
          if (it == edges.end()) break;
          for (const auto& [a, b] : it->second)
            if (S[b][ax.b]) add(a, ax.c);
          break;
        }
        case NormalForm::RSUB: {
          auto it = edges.find(ax.rel);
          if (it == edges.end()) break;
          auto copy = it->second;
          auto& dst = edges[ax.rel2];
          for (const auto& e : copy)
            if (dst.insert(e).second) changed = true;
          break;
        }
      }
    }
    // An edge into an unsatisfiable concept makes the source unsatisfiable.
    for (const auto& [rel, es] : edges) {
      for (const auto& [a, b] : es)
        if (S[b][bottom]) add(a, bottom);
    }
  }

  Subsumptions out;
  for (std::size_t a = 0; a < reported; ++a) {
    for (std::size_t b = 0; b < count; ++b)
      if (S[a][b]) out.emplace(names[a], names[b]);
  }
  return out;
}

}  // namespace ozsl
