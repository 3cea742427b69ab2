#pragma once

// Ball embeddings of concepts and translation vectors of relations, learned
// from a normalized ontology with margin-based geometric losses.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ozsl/normalizer.hpp"

namespace ozsl {

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

/// Concept balls and relation vectors of a common dimension, stored densely
/// and addressed either by name or by insertion index.
class EmbeddingSpace {
public:
  EmbeddingSpace() = default;
  explicit EmbeddingSpace(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t concept_count() const noexcept { return concept_names_.size(); }
  std::size_t relation_count() const noexcept { return relation_names_.size(); }

  std::size_t add_concept(std::string name, std::span<const double> center, double radius);
  std::size_t add_relation(std::string name, std::span<const double> vec);

  const std::string& concept_name(std::size_t i) const { return concept_names_[i]; }
  const std::string& relation_name(std::size_t i) const { return relation_names_[i]; }
  const std::vector<std::string>& concept_names() const noexcept { return concept_names_; }
  const std::vector<std::string>& relation_names() const noexcept { return relation_names_; }

  std::optional<std::size_t> find_concept(std::string_view name) const;
  std::optional<std::size_t> find_relation(std::string_view name) const;
  /// Throws DataError naming the missing entry.
  std::size_t concept_index(std::string_view name) const;
  std::size_t relation_index(std::string_view name) const;

  std::span<const double> center(std::size_t i) const { return {centers_.data() + i * dim_, dim_}; }
  std::span<double> center(std::size_t i) { return {centers_.data() + i * dim_, dim_}; }
  double radius(std::size_t i) const { return radii_[i]; }
  double& radius(std::size_t i) { return radii_[i]; }
  std::span<const double> relation(std::size_t i) const { return {relations_.data() + i * dim_, dim_}; }
  std::span<double> relation(std::size_t i) { return {relations_.data() + i * dim_, dim_}; }

  Ball ball(std::string_view concept_name) const;

  /// Bit-exact equality of names and all stored values.
  bool operator==(const EmbeddingSpace& other) const;

private:
  std::size_t dim_ = 0;
  std::vector<std::string> concept_names_;
  std::unordered_map<std::string, std::size_t> concept_index_;
  std::vector<double> centers_;
  std::vector<double> radii_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, std::size_t> relation_index_;
  std::vector<double> relations_;
};

struct ElTrainConfig {
  std::size_t dim = 50;
  double margin = 0.1;
  double learning_rate = 0.01;
  std::size_t epochs = 1000;
  std::size_t batch_size = 64;
  std::size_t negatives = 1;
  double gamma_min = 1e-3;
  std::uint64_t seed = 42;

  /// Throws UsageError on out-of-range fields.
  void check() const;
};

// Per-axiom losses. Norms are L2; every loss except loss_role carries the
// |‖ν‖ - 1| penalties of the concepts it touches. Unknown names throw DataError.

/// max(0, ‖ν(A)-ν(B)‖ + γ(A) - γ(B) - ε) + penalties
double loss_nf1(const EmbeddingSpace& s, std::string_view A, std::string_view B, double eps);
/// max(0, ‖ν(A)+ν(r)-ν(B)‖ + γ(A) - γ(B) - ε) + penalties
double loss_nf2(const EmbeddingSpace& s, std::string_view A, std::string_view r, std::string_view B, double eps);
/// max(0, ‖ν(A)-ν(r)-ν(B)‖ - γ(A) - γ(B) - ε) + penalties
double loss_nf3(const EmbeddingSpace& s, std::string_view r, std::string_view A, std::string_view B, double eps);
/// Balls A and B intersect and both centers lie within reach of C's ball.
double loss_nf4(const EmbeddingSpace& s, std::string_view A, std::string_view B, std::string_view C, double eps);
/// max(0, γ(A) + γ(B) - ‖ν(A)-ν(B)‖ + ε) + penalties
double loss_disjoint(const EmbeddingSpace& s, std::string_view A, std::string_view B, double eps);
/// ‖ν(r) - ν(t)‖
double loss_role(const EmbeddingSpace& s, std::string_view r, std::string_view t);
/// max(0, γ(A) + γ(B') + ε - ‖ν(A)+ν(r)-ν(B')‖) + penalties
double loss_nf2_negative(const EmbeddingSpace& s, std::string_view A, std::string_view r, std::string_view B_neg,
                         double eps);

enum class LossKind { NF1, NF2, NF3, NF4, Disjoint, Role, NF2Negative };

/// A normal axiom bound to space indices. For NF2/NF3/NF2Negative `rel` is
/// the relation index; for Role `a`/`b` are relation indices.
struct BoundAxiom {
  LossKind kind;
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t c = 0;
  std::size_t rel = 0;
};

/// Dense gradient buffer shaped like an EmbeddingSpace.
struct Gradient {
  std::vector<double> centers;
  std::vector<double> radii;
  std::vector<double> relations;

  explicit Gradient(const EmbeddingSpace& s)
      : centers(s.concept_count() * s.dim(), 0.0),
        radii(s.concept_count(), 0.0),
        relations(s.relation_count() * s.dim(), 0.0) {}
};

/// Loss of one bound axiom; adds its gradient to `grad` when given.
double axiom_loss(const EmbeddingSpace& s, const BoundAxiom& ax, double eps, Gradient* grad = nullptr);

/// Binds normal axioms to indices of `s`. NF4 with C = Bottom dispatches to
/// Disjoint; other axioms mentioning Bottom contribute nothing and are dropped.
std::vector<BoundAxiom> bind_axioms(const EmbeddingSpace& s, const NormalizedOntology& n);

/// Bound axioms followed, after every NF2, by `cfg.negatives` corrupted-filler
/// negatives drawn from a generator seeded with `cfg.seed`.
std::vector<BoundAxiom> with_negatives(const EmbeddingSpace& s, const std::vector<BoundAxiom>& axioms,
                                       const ElTrainConfig& cfg);

/// Sum of all axiom losses plus sampled negatives; deterministic in (s, n, cfg).
double total_loss(const EmbeddingSpace& s, const NormalizedOntology& n, const ElTrainConfig& cfg);

/// Seeded initial space: centers uniform on the unit sphere, radii 0.1
/// (nominal concepts at gamma_min), relations uniform in [-0.1, 0.1]^n.
EmbeddingSpace initial_space(const NormalizedOntology& n, const ElTrainConfig& cfg);

struct ElTrainResult {
  EmbeddingSpace space;
  double final_loss = 0.0;
  std::vector<double> epoch_loss;
};

/// Minibatch SGD with analytic gradients. Throws NumericalError on a
/// non-finite loss, naming the step.
ElTrainResult train_el(const NormalizedOntology& n, const ElTrainConfig& cfg);

/// TSV: `#dim<TAB>n`, then `C name v1,...,vn radius` and `R name v1,...,vn` rows.
std::string export_space(const EmbeddingSpace& s);
EmbeddingSpace import_space(std::string_view text);

namespace detail {
std::optional<std::size_t> draw_negative(std::size_t concept_count, std::size_t truth, std::mt19937_64& rng);
}  // namespace detail

}  // namespace ozsl
