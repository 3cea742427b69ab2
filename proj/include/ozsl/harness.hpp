#pragma once

// Datasets, metrics, the synthetic benchmark generator and the end-to-end
// pipeline driven by a flat key-value run configuration.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ozsl/el_embed.hpp"
#include "ozsl/ontology.hpp"
#include "ozsl/text_walk.hpp"
#include "ozsl/zsl_map.hpp"

namespace ozsl {

struct Sample {
  std::string id;
  std::string label;
  Eigen::VectorXd x;
};

/// Features TSV: `id<TAB>label<TAB>f1,...,fp`. All rows share one length.
std::vector<Sample> read_features(std::string_view text);
std::string write_features(const std::vector<Sample>& samples);

/// `[seen]` and `[unseen]` sections, one label per line. An optional
/// `[heldout]` section lists ids of seen-class samples kept for testing.
struct SplitSpec {
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
  std::vector<std::string> heldout;
};

SplitSpec read_split(std::string_view text);
std::string write_split(const SplitSpec& s);

struct ZslDataset {
  std::size_t feature_dim = 0;
  std::vector<Sample> samples;
  /// Sorted, disjoint.
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
  /// Sorted ids of held-out seen-class samples.
  std::vector<std::string> heldout;

  bool is_seen(std::string_view label) const;
  bool is_unseen(std::string_view label) const;
  /// Seen-class samples that are not held out, in file order.
  std::vector<std::size_t> train_indices() const;
  /// Unseen-class samples and held-out samples, in file order.
  std::vector<std::size_t> test_indices() const;
};

/// Validates the split against the samples: disjoint label sets, every sample
/// label listed, held-out ids naming seen-class samples.
ZslDataset make_dataset(std::vector<Sample> samples, const SplitSpec& split);
ZslDataset load_dataset(const std::filesystem::path& features, const std::filesystem::path& split);

/// Unweighted mean over `unseen` of per-class accuracy (the fraction of a
/// class's samples predicted as that class).
double macro_accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& truth,
                      const std::vector<std::string>& unseen);
/// Per-class accuracy for every label appearing in `truth`.
std::map<std::string, double> per_class_accuracy(const std::vector<std::string>& predictions,
                                                 const std::vector<std::string>& truth);
/// correct / total.
double sample_accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& truth);

struct SyntheticConfig {
  std::size_t k_seen = 8;
  std::size_t k_unseen = 2;
  std::size_t per_class = 30;
  std::size_t feature_dim = 16;
  double noise = 0.05;
  std::uint64_t seed = 42;
  /// Seen-class samples per class listed under [heldout] for testing.
  std::size_t heldout_per_class = 0;
  void check() const;
};

struct SyntheticData {
  Ontology ontology;
  std::vector<Sample> samples;
  SplitSpec split;
  ClassMap class_map;
  AttributeTable attributes;
  /// Latent class prototypes the features were generated from.
  std::map<std::string, Eigen::VectorXd> prototypes;
};

/// Classes are `parent ⊓ ∃hasAttrᵢ.Vᵢⱼ` definitions over generated group and
/// value concepts; features are a seeded random linear image of each class's
/// indicator prototype plus Gaussian noise.
SyntheticData gen_synthetic(const SyntheticConfig& cfg);

enum class MapperChoice { Sae, Ridge };

struct RunConfig {
  std::string ontology;
  std::string features;
  std::string split;
  std::string class_map;
  std::string attributes;
  std::string word_vectors;
  std::string output_dir = "run";

  std::vector<EncodingComponent> components{EncodingComponent::ElCenter};
  EncodeOptions encode;
  ElTrainConfig el;
  WalkConfig walk;
  SkipGramConfig w2v;
  MapperChoice mapper = MapperChoice::Sae;
  SaeConfig sae;
  double ridge_alpha = 1e-3;
  PredictConfig predict;
  std::uint64_t seed = 42;
  /// Replace label encodings by seeded noise of the same shape.
  bool random_encodings = false;

  /// Directory relative paths are resolved against.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const;
  /// Throws UsageError on an unknown key or malformed value.
  void set(std::string_view key, std::string_view value);
  /// Every key with its canonical value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> echo() const;
  /// Checks referenced files exist and module configs are in range.
  void check() const;
};

/// Keys accepted by RunConfig::set, in echo order.
const std::vector<std::string>& run_config_keys();

/// `key = value` lines; `#` starts a comment. Relative paths are resolved
/// against the directory holding the file.
RunConfig read_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
std::string write_run_config(const RunConfig& cfg);

/// Writes ontology.elf, features.tsv, split.txt, class_map.tsv,
/// attributes.tsv and config.txt (pointing at them) into `dir`.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir, const RunConfig& defaults = {});

struct MetricsReport {
  /// Per-class (micro) accuracy of every tested class.
  std::map<std::string, double> per_class_accuracy;
  double macro_unseen_accuracy = 0.0;
  double sample_accuracy = 0.0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::size_t seen_classes = 0;
  std::size_t unseen_classes = 0;
  std::size_t encoding_dim = 0;
  double mapper_train_loss = 0.0;
  /// Final EL loss, when the EL stage ran.
  std::optional<double> el_final_loss;
  std::vector<std::pair<std::string, std::string>> config_echo;
};

std::string report_text(const MetricsReport& r);
std::string report_json(const MetricsReport& r);

/// parse -> normalize -> train_el -> project/walk/skip-gram -> encode ->
/// train mapper -> predict -> metrics. Stages a component list does not need
/// are skipped. Artifacts, report.txt, report.json and manifest.txt go to
/// the output directory. Errors carry the failing stage's name.
MetricsReport run_pipeline(const RunConfig& cfg);

}  // namespace ozsl
