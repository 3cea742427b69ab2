#pragma once

// Ontology -> triple graph -> random-walk sentences -> skip-gram word vectors.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ozsl/ontology.hpp"

namespace ozsl {

inline constexpr std::string_view kSubClassOf = "subClassOf";

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
  auto operator<=>(const Triple&) const = default;
};

struct ProjectedGraph {
  /// Sorted, unique.
  std::vector<std::string> nodes;
  /// Sorted, unique.
  std::vector<Triple> edges;
  /// RelationChain axioms that had no projection.
  std::size_t skipped_axioms = 0;
};

/// Projects axioms to triples: A [= B -> (A, subClassOf, B); A [= Some r.B and
/// Some r.B [= A -> (A, r, B); assertions keep individual names. Nested
/// expressions go through normalization and fresh names become nodes.
ProjectedGraph project(const Ontology& o);

/// Tab-separated `subject predicate object` lines.
std::string write_graph(const ProjectedGraph& g);
ProjectedGraph read_graph(std::string_view text);

struct WalkConfig {
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 4;  // edges
  std::uint64_t seed = 42;
  void check() const;
};

/// Alternating node, predicate, node, ... names.
using Walk = std::vector<std::string>;

/// `walks_per_node` uniform random walks from every node, truncated at sinks.
std::vector<Walk> random_walks(const ProjectedGraph& g, const WalkConfig& cfg);

struct WalkCorpus {
  std::vector<std::vector<std::string>> sentences;
  std::map<std::string, std::size_t> vocabulary;
};

/// Splits an identifier on underscores, camel-case and letter/digit boundaries; lowercased.
std::vector<std::string> split_identifier(std::string_view name);
/// Lowercased alphanumeric runs of free text (bytes >= 0x80 count as letters).
std::vector<std::string> tokenize_text(std::string_view text);
/// Label tokens when the entity has a Label annotation, else split_identifier.
std::vector<std::string> lexicalize_name(std::string_view name, const Ontology& o);

/// One sentence per walk, then one sentence per Comment annotation.
WalkCorpus lexicalize(const std::vector<Walk>& walks, const Ontology& o);

/// One sentence per line, space-separated tokens.
std::string write_corpus(const WalkCorpus& c);
WalkCorpus read_corpus(std::string_view text);

struct SkipGramConfig {
  std::size_t dim = 25;
  std::size_t window = 2;
  std::size_t negatives = 5;
  std::size_t epochs = 50;
  double learning_rate = 0.025;
  std::size_t min_count = 1;
  std::uint64_t seed = 42;
  void check() const;
};

class WordVectors {
public:
  WordVectors() = default;
  explicit WordVectors(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool contains(std::string_view token) const;
  /// Throws DataError on unknown tokens.
  const Eigen::VectorXd& at(std::string_view token) const;
  void set(std::string token, Eigen::VectorXd v);
  const std::map<std::string, Eigen::VectorXd, std::less<>>& entries() const noexcept { return vectors_; }

  bool operator==(const WordVectors& o) const;

private:
  std::size_t dim_ = 0;
  std::map<std::string, Eigen::VectorXd, std::less<>> vectors_;
};

/// Skip-gram with negative sampling. Tokens present in `init` start from
/// their init vectors and init-only tokens are carried over unchanged.
/// Per-epoch mean objective goes to `epoch_loss` when given.
WordVectors train_skipgram(const WalkCorpus& corpus, const SkipGramConfig& cfg, const WordVectors* init = nullptr,
                           std::vector<double>* epoch_loss = nullptr);

/// Mean vector of the lexicalized tokens of `name`; OOV tokens skipped.
Eigen::VectorXd word_encoding(std::string_view name, const WordVectors& wv, const Ontology& o);

/// `count dim` header then `token v1 ... vd` lines.
std::string write_word_vectors(const WordVectors& wv);
WordVectors read_word_vectors(std::string_view text);

}  // namespace ozsl
