#pragma once

// Semantic encodings of class labels, feature -> encoding mappers and
// nearest-neighbour label prediction.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ozsl/el_embed.hpp"
#include "ozsl/ontology.hpp"
#include "ozsl/text_walk.hpp"

namespace ozsl {

enum class EncodingComponent { ElCenter, Word, Attribute };

std::string to_string(EncodingComponent c);
/// Accepts `el_center`/`el`, `word`/`w2v`, `attribute`/`attr`. Throws UsageError.
EncodingComponent parse_component(std::string_view s);
/// Comma-separated list; must be non-empty and free of duplicates.
std::vector<EncodingComponent> parse_components(std::string_view s);

using AttributeTable = std::map<std::string, Eigen::VectorXd, std::less<>>;
/// label -> concept name
using ClassMap = std::map<std::string, std::string, std::less<>>;

/// TSV `label<TAB>conceptName`.
ClassMap read_class_map(std::string_view text);
std::string write_class_map(const ClassMap& m);
/// TSV `label<TAB>a1,...,ak`; all rows share one length.
AttributeTable read_attributes(std::string_view text);
std::string write_attributes(const AttributeTable& t);

struct EncodingTable {
  std::vector<EncodingComponent> components;
  std::vector<std::size_t> component_dims;
  std::map<std::string, Eigen::VectorXd, std::less<>> encodings;

  std::size_t dim() const;
  /// Throws DataError for unknown labels.
  const Eigen::VectorXd& at(std::string_view label) const;
};

struct EncodeSources {
  const EmbeddingSpace* space = nullptr;
  const WordVectors* words = nullptr;
  const Ontology* ontology = nullptr;
  const AttributeTable* attributes = nullptr;
  const ClassMap* class_map = nullptr;
};

struct EncodeOptions {
  /// L2-normalize each component before concatenation.
  bool normalize_components = true;
  /// Append the ball radius after the EL center.
  bool include_radius = false;
};

/// z = [component_1(y), ..., component_k(y)] in the declared order.
EncodingTable encode_labels(const std::vector<std::string>& labels, const EncodeSources& src,
                            const std::vector<EncodingComponent>& components, const EncodeOptions& opts = {});

/// Same labels and component layout with entries replaced by seeded standard
/// normal noise, optionally L2-normalized per component.
EncodingTable random_encodings(const EncodingTable& table, std::uint64_t seed, bool normalize_components = true);

/// `#components<TAB>a,b` header then `label<TAB>v1,...,vm` rows.
std::string write_encodings(const EncodingTable& t);
EncodingTable read_encodings(std::string_view text);

/// ‖X - WᵀZ‖²_F + λ‖WX - Z‖²_F with W: m×p, X: p×N, Z: m×N.
double sae_loss(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, double lambda);
/// d(sae_loss)/dW = -2 Z (X - WᵀZ)ᵀ + 2λ (WX - Z) Xᵀ
Eigen::MatrixXd sae_gradient(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z,
                             double lambda);

struct SaeConfig {
  double lambda = 0.5;
  std::size_t max_iters = 20000;
  double tol = 1e-12;
  std::uint64_t seed = 42;
  double init_scale = 0.01;
};

struct SaeModel {
  Eigen::MatrixXd W;
  double lambda = 0.0;
  double train_loss = 0.0;
  std::size_t iterations = 0;
};

/// Gradient descent with step 1/L (L the gradient's Lipschitz constant) from
/// `init`, or from seeded N(0, init_scale²) entries.
SaeModel train_sae(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, const SaeConfig& cfg,
                   const Eigen::MatrixXd* init = nullptr);

/// Z Xᵀ (X Xᵀ + αI)⁻¹ by a dense Cholesky solve. α must be positive.
Eigen::MatrixXd train_ridge(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, double alpha);

enum class MapperKind { Sae, Ridge };

struct LinearMapper {
  MapperKind kind = MapperKind::Sae;
  Eigen::MatrixXd W;
  /// λ for SAE, α for ridge.
  double parameter = 0.0;
  double train_loss = 0.0;
};

/// W·x; throws DataError on a dimension mismatch.
Eigen::VectorXd map_features(const LinearMapper& model, const Eigen::VectorXd& x);

std::string write_mapper(const LinearMapper& m);
LinearMapper read_mapper(std::string_view text);

enum class DistanceKind { L2, Cosine };
enum class CandidateMode { UnseenOnly, SeenAndUnseen };

struct PredictConfig {
  DistanceKind distance = DistanceKind::L2;
  CandidateMode candidates = CandidateMode::UnseenOnly;
};

DistanceKind parse_distance(std::string_view s);
CandidateMode parse_candidates(std::string_view s);
std::string to_string(DistanceKind d);
std::string to_string(CandidateMode c);

/// L2: ‖a-b‖; cosine: 1 - a·b/(‖a‖‖b‖), DataError for a zero vector.
double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, DistanceKind kind);

/// Sorted candidate labels for the mode.
std::vector<std::string> candidate_labels(const std::vector<std::string>& seen, const std::vector<std::string>& unseen,
                                          CandidateMode mode);

/// argmin over `candidates` of distance(h(y), gx); ties go to the
/// lexicographically smallest label.
std::string predict(const Eigen::VectorXd& gx, const EncodingTable& table, const std::vector<std::string>& candidates,
                    DistanceKind kind);

}  // namespace ozsl
