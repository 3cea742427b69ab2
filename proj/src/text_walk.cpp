#include "ozsl/text_walk.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

#include "ozsl/error.hpp"
#include "ozsl/io_util.hpp"
#include "ozsl/normalizer.hpp"

namespace ozsl {

ProjectedGraph project(const Ontology& o) {
  ProjectedGraph g;
  Ontology filtered = o;
  filtered.axioms.clear();
  for (const auto& ax : o.axioms) {
    if (std::holds_alternative<RelationChain>(ax))
      ++g.skipped_axioms;
    else
      filtered.axioms.push_back(ax);
  }
  NormalizedOntology n = normalize(filtered);

  // Fresh names are renumbered by their expression text so the graph does not
  // depend on axiom order.
  std::set<std::string> taken(o.concepts.begin(), o.concepts.end());
  taken.insert(o.relations.begin(), o.relations.end());
  taken.insert(o.individuals.begin(), o.individuals.end());
  std::vector<std::pair<std::string, std::string>> by_expr;
  for (const auto& f : n.fresh_names) by_expr.emplace_back(n.provenance.at(f), f);
  std::sort(by_expr.begin(), by_expr.end());
  std::map<std::string, std::string> rename;
  int counter = 0;
  for (const auto& [expr, old] : by_expr) {
    std::string name;
    do {
      name = std::string(kFreshPrefix) + std::to_string(++counter);
    } while (taken.count(name));
    rename[old] = name;
  }
  for (const auto& [ind, concept_name] : n.nominal_map) rename[concept_name] = ind;
  auto node = [&](const std::string& s) {
    auto it = rename.find(s);
    return it == rename.end() ? s : it->second;
  };

  std::set<Triple> edges;
  for (const auto& ax : n.axioms) {
    switch (ax.form) {
      case NormalForm::NF1:
        edges.insert({node(ax.a), std::string(kSubClassOf), node(ax.b)});
        break;
      case NormalForm::NF2:
        edges.insert({node(ax.a), ax.b, node(ax.c)});
        break;
      case NormalForm::NF3:
        edges.insert({node(ax.c), ax.a, node(ax.b)});
        break;
      default:
        break;
    }
  }
  std::set<std::string> nodes(o.concepts.begin(), o.concepts.end());
  nodes.insert(o.individuals.begin(), o.individuals.end());
  for (const auto& e : edges) {
    nodes.insert(e.subject);
    nodes.insert(e.object);
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

std::string write_graph(const ProjectedGraph& g) {
  std::string out;
  for (const auto& e : g.edges) out += e.subject + "\t" + e.predicate + "\t" + e.object + "\n";
  return out;
}

ProjectedGraph read_graph(std::string_view text) {
  std::set<Triple> edges;
  std::set<std::string> nodes;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    auto f = split(lines[i], '\t');
    if (f.size() != 3) throw DataError("graph file line " + std::to_string(i + 1) + ": expected 3 fields");
    edges.insert({std::string(f[0]), std::string(f[1]), std::string(f[2])});
    nodes.emplace(f[0]);
    nodes.emplace(f[2]);
  }
  ProjectedGraph g;
  g.nodes.assign(nodes.begin(), nodes.end());
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

void WalkConfig::check() const {
  if (walks_per_node == 0) throw UsageError("walks per node must be positive");
  if (walk_length == 0) throw UsageError("walk length must be at least 1");
}

std::vector<Walk> random_walks(const ProjectedGraph& g, const WalkConfig& cfg) {
  cfg.check();
  std::map<std::string, std::vector<const Triple*>, std::less<>> out_edges;
  for (const auto& e : g.edges) out_edges[e.subject].push_back(&e);
  std::mt19937_64 rng(cfg.seed);
  std::vector<Walk> walks;
  walks.reserve(g.nodes.size() * cfg.walks_per_node);
  for (const auto& start : g.nodes) {
    for (std::size_t w = 0; w < cfg.walks_per_node; ++w) {
      Walk walk{start};
      const std::string* at = &start;
      for (std::size_t step = 0; step < cfg.walk_length; ++step) {
        auto it = out_edges.find(*at);
        if (it == out_edges.end()) break;
        const auto& choices = it->second;
        std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
        const Triple* e = choices[pick(rng)];
        walk.push_back(e->predicate);
        walk.push_back(e->object);
        at = &e->object;
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_word_byte(char c) {
  return is_lower(c) || is_upper(c) || is_digit(c) || static_cast<unsigned char>(c) >= 0x80;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::vector<std::string> split_identifier(std::string_view name) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(lower(std::move(cur)));
    cur.clear();
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (!is_word_byte(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      char prev = cur.back();
      bool boundary = (is_upper(c) && (is_lower(prev) || is_digit(prev))) ||
                      (is_upper(c) && is_upper(prev) && i + 1 < name.size() && is_lower(name[i + 1])) ||
                      (is_digit(c) != is_digit(prev));
      if (boundary) flush();
    }
    cur += c;
  }
  flush();
  return out;
}

std::vector<std::string> tokenize_text(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_word_byte(c)) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(lower(std::move(cur)));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(lower(std::move(cur)));
  return out;
}

std::vector<std::string> lexicalize_name(std::string_view name, const Ontology& o) {
  if (auto label = o.label_of(name)) {
    auto toks = tokenize_text(*label);
    if (!toks.empty()) return toks;
  }
  return split_identifier(name);
}

WalkCorpus lexicalize(const std::vector<Walk>& walks, const Ontology& o) {
  WalkCorpus corpus;
  std::map<std::string, std::vector<std::string>, std::less<>> cache;
  auto tokens_of = [&](const std::string& name) -> const std::vector<std::string>& {
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, lexicalize_name(name, o)).first;
    return it->second;
  };
  auto add = [&](std::vector<std::string> sentence) {
    if (sentence.empty()) return;
    for (const auto& t : sentence) ++corpus.vocabulary[t];
    corpus.sentences.push_back(std::move(sentence));
  };
  for (const auto& walk : walks) {
    std::vector<std::string> sentence;
    for (const auto& name : walk) {
      const auto& toks = tokens_of(name);
      sentence.insert(sentence.end(), toks.begin(), toks.end());
    }
    add(std::move(sentence));
  }
  for (const auto& ax : o.axioms) {
    if (const auto* a = std::get_if<Annotation>(&ax); a && a->kind == AnnotationKind::Comment)
      add(tokenize_text(a->text));
  }
  return corpus;
}

std::string write_corpus(const WalkCorpus& c) {
  std::string out;
  for (const auto& s : c.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ' ';
      out += s[i];
    }
    out += '\n';
  }
  return out;
}

WalkCorpus read_corpus(std::string_view text) {
  WalkCorpus c;
  for (auto line : lines_of(text)) {
    auto toks = split_whitespace(line);
    if (toks.empty()) continue;
    for (const auto& t : toks) ++c.vocabulary[t];
    c.sentences.push_back(std::move(toks));
  }
  return c;
}

bool WordVectors::contains(std::string_view token) const { return vectors_.find(token) != vectors_.end(); }

const Eigen::VectorXd& WordVectors::at(std::string_view token) const {
  auto it = vectors_.find(token);
  if (it == vectors_.end()) throw DataError("unknown token '" + std::string(token) + "'");
  return it->second;
}

void WordVectors::set(std::string token, Eigen::VectorXd v) {
  if (static_cast<std::size_t>(v.size()) != dim_)
    throw DataError("word vector for '" + token + "' has dimension " + std::to_string(v.size()) + ", expected " +
                    std::to_string(dim_));
  vectors_.insert_or_assign(std::move(token), std::move(v));
}

bool WordVectors::operator==(const WordVectors& o) const {
  if (dim_ != o.dim_ || vectors_.size() != o.vectors_.size()) return false;
  for (auto a = vectors_.begin(), b = o.vectors_.begin(); a != vectors_.end(); ++a, ++b) {
    if (a->first != b->first || a->second != b->second) return false;
  }
  return true;
}

Eigen::VectorXd word_encoding(std::string_view name, const WordVectors& wv, const Ontology& o) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(wv.dim()));
  std::size_t known = 0;
  for (const auto& tok : lexicalize_name(name, o)) {
    if (!wv.contains(tok)) continue;
    sum += wv.at(tok);
    ++known;
  }
  if (known == 0) throw DataError("no word vector for any token of '" + std::string(name) + "'");
  return sum / static_cast<double>(known);
}

std::string write_word_vectors(const WordVectors& wv) {
  std::string out = std::to_string(wv.size()) + " " + std::to_string(wv.dim()) + "\n";
  for (const auto& [tok, v] : wv.entries()) {
    out += tok;
    for (Eigen::Index i = 0; i < v.size(); ++i) out += " " + format_double(v[i]);
    out += "\n";
  }
  return out;
}

WordVectors read_word_vectors(std::string_view text) {
  auto lines = lines_of(text);
  if (lines.empty()) throw DataError("word vector file line 1: missing 'count dim' header");
  auto head = split_whitespace(lines[0]);
  if (head.size() != 2) throw DataError("word vector file line 1: expected 'count dim'");
  long long count = parse_int(head[0], "word vector file line 1");
  long long dim = parse_int(head[1], "word vector file line 1");
  if (count < 0 || dim <= 0) throw DataError("word vector file line 1: invalid header");
  WordVectors wv(static_cast<std::size_t>(dim));
  std::size_t rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split_whitespace(lines[i]);
    if (f.empty()) continue;
    std::string where = "word vector file line " + std::to_string(i + 1);
    if (f.size() != static_cast<std::size_t>(dim) + 1)
      throw DataError(where + ": expected token and " + std::to_string(dim) + " values");
    Eigen::VectorXd v(dim);
    for (long long k = 0; k < dim; ++k) v[k] = parse_double(f[k + 1], where);
    wv.set(f[0], std::move(v));
    ++rows;
  }
  if (rows != static_cast<std::size_t>(count))
    throw DataError("word vector file: header announces " + std::to_string(count) + " rows, found " +
                    std::to_string(rows));
  return wv;
}

}  // namespace ozsl
