#include <charconv>
#include <cstdio>

#include "json.hpp"
#include "ozsl/error.hpp"
#include "ozsl/harness.hpp"
#include "ozsl/io_util.hpp"
#include "ozsl/kernels.hpp"
#include "ozsl/normalizer.hpp"

namespace ozsl {

namespace {

// Shortest round-trip form; config echoes stay readable.
std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("config key '" + std::string(key) + "': expected a boolean, got '" + std::string(v) + "'");
}

std::size_t parse_count(std::string_view key, std::string_view v) {
  long long n;
  try {
    n = parse_int(v, "config key '" + std::string(key) + "'");
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  if (n < 0) throw UsageError("config key '" + std::string(key) + "' must be non-negative");
  return static_cast<std::size_t>(n);
}

double parse_real(std::string_view key, std::string_view v) {
  try {
    return parse_double(v, "config key '" + std::string(key) + "'");
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

std::string components_text(const std::vector<EncodingComponent>& cs) {
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += ',';
    out += to_string(cs[i]);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = {
      "ontology",       "features",           "split",          "class_map",        "attributes",
      "word_vectors",   "output_dir",         "components",     "normalize_components",
      "include_radius", "el_dim",             "el_margin",      "el_learning_rate", "el_epochs",
      "el_batch_size",  "el_negatives",       "el_gamma_min",   "walks_per_node",   "walk_length",
      "w2v_dim",        "w2v_window",         "w2v_negatives",  "w2v_epochs",       "w2v_learning_rate",
      "w2v_min_count",  "mapper",             "sae_lambda",     "sae_max_iters",    "sae_tol",
      "ridge_alpha",    "distance",           "candidates",     "seed",             "random_encodings"};
  return keys;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  std::string v(trim(value));
  if (key == "ontology") ontology = v;
  else if (key == "features") features = v;
  else if (key == "split") split = v;
  else if (key == "class_map") class_map = v;
  else if (key == "attributes") attributes = v;
  else if (key == "word_vectors") word_vectors = v;
  else if (key == "output_dir") output_dir = v;
  else if (key == "components") components = parse_components(v);
  else if (key == "normalize_components") encode.normalize_components = parse_bool(key, v);
  else if (key == "include_radius") encode.include_radius = parse_bool(key, v);
  else if (key == "el_dim") el.dim = parse_count(key, v);
  else if (key == "el_margin") el.margin = parse_real(key, v);
  else if (key == "el_learning_rate") el.learning_rate = parse_real(key, v);
  else if (key == "el_epochs") el.epochs = parse_count(key, v);
  else if (key == "el_batch_size") el.batch_size = parse_count(key, v);
  else if (key == "el_negatives") el.negatives = parse_count(key, v);
  else if (key == "el_gamma_min") el.gamma_min = parse_real(key, v);
  else if (key == "walks_per_node") walk.walks_per_node = parse_count(key, v);
  else if (key == "walk_length") walk.walk_length = parse_count(key, v);
  else if (key == "w2v_dim") w2v.dim = parse_count(key, v);
  else if (key == "w2v_window") w2v.window = parse_count(key, v);
  else if (key == "w2v_negatives") w2v.negatives = parse_count(key, v);
  else if (key == "w2v_epochs") w2v.epochs = parse_count(key, v);
  else if (key == "w2v_learning_rate") w2v.learning_rate = parse_real(key, v);
  else if (key == "w2v_min_count") w2v.min_count = parse_count(key, v);
  else if (key == "mapper") {
    if (v == "sae") mapper = MapperChoice::Sae;
    else if (v == "ridge") mapper = MapperChoice::Ridge;
    else throw UsageError("config key 'mapper': expected 'sae' or 'ridge', got '" + v + "'");
  } else if (key == "sae_lambda") sae.lambda = parse_real(key, v);
  else if (key == "sae_max_iters") sae.max_iters = parse_count(key, v);
  else if (key == "sae_tol") sae.tol = parse_real(key, v);
  else if (key == "ridge_alpha") ridge_alpha = parse_real(key, v);
  else if (key == "distance") predict.distance = parse_distance(v);
  else if (key == "candidates") predict.candidates = parse_candidates(v);
  else if (key == "seed") seed = parse_count(key, v);
  else if (key == "random_encodings") random_encodings = parse_bool(key, v);
  else throw UsageError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  auto n = [](std::size_t x) { return std::to_string(x); };
  return {{"ontology", ontology},
          {"features", features},
          {"split", split},
          {"class_map", class_map},
          {"attributes", attributes},
          {"word_vectors", word_vectors},
          {"output_dir", output_dir},
          {"components", components_text(components)},
          {"normalize_components", b(encode.normalize_components)},
          {"include_radius", b(encode.include_radius)},
          {"el_dim", n(el.dim)},
          {"el_margin", shortest(el.margin)},
          {"el_learning_rate", shortest(el.learning_rate)},
          {"el_epochs", n(el.epochs)},
          {"el_batch_size", n(el.batch_size)},
          {"el_negatives", n(el.negatives)},
          {"el_gamma_min", shortest(el.gamma_min)},
          {"walks_per_node", n(walk.walks_per_node)},
          {"walk_length", n(walk.walk_length)},
          {"w2v_dim", n(w2v.dim)},
          {"w2v_window", n(w2v.window)},
          {"w2v_negatives", n(w2v.negatives)},
          {"w2v_epochs", n(w2v.epochs)},
          {"w2v_learning_rate", shortest(w2v.learning_rate)},
          {"w2v_min_count", n(w2v.min_count)},
          {"mapper", mapper == MapperChoice::Sae ? "sae" : "ridge"},
          {"sae_lambda", shortest(sae.lambda)},
          {"sae_max_iters", n(sae.max_iters)},
          {"sae_tol", shortest(sae.tol)},
          {"ridge_alpha", shortest(ridge_alpha)},
          {"distance", to_string(predict.distance)},
          {"candidates", to_string(predict.candidates)},
          {"seed", std::to_string(seed)},
          {"random_encodings", b(random_encodings)}};
}

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path;
  return base_dir / path;
}

void RunConfig::check() const {
  if (components.empty()) throw UsageError("encoding component list is empty");
  auto uses = [&](EncodingComponent c) { return std::find(components.begin(), components.end(), c) != components.end(); };
  auto need = [&](const std::string& p, const char* key) {
    if (p.empty()) throw UsageError(std::string("config key '") + key + "' is required");
    if (!std::filesystem::exists(resolve(p)))
      throw UsageError(std::string("config key '") + key + "': file '" + resolve(p).string() + "' does not exist");
  };
  need(features, "features");
  need(split, "split");
  if (uses(EncodingComponent::ElCenter) || uses(EncodingComponent::Word)) need(ontology, "ontology");
  if (uses(EncodingComponent::ElCenter)) need(class_map, "class_map");
  if (uses(EncodingComponent::Attribute)) need(attributes, "attributes");
  if (!class_map.empty()) need(class_map, "class_map");
  if (!word_vectors.empty()) need(word_vectors, "word_vectors");
  if (output_dir.empty()) throw UsageError("config key 'output_dir' is empty");
  if (uses(EncodingComponent::ElCenter)) el.check();
  if (uses(EncodingComponent::Word)) {
    walk.check();
    w2v.check();
  }
  if (!(sae.lambda >= 0.0)) throw UsageError("config key 'sae_lambda' must be non-negative");
  if (!(ridge_alpha > 0.0)) throw UsageError("config key 'ridge_alpha' must be positive");
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(i + 1) + ": expected 'key = value'");
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig read_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  return parse_run_config(text, path.parent_path());
}

std::string write_run_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg.echo()) out += k + " = " + v + "\n";
  return out;
}

std::string report_text(const MetricsReport& r) {
  std::string out = "# zero-shot evaluation report\n";
  out += "macro_unseen_accuracy\t" + format_double(r.macro_unseen_accuracy) + "\n";
  out += "sample_accuracy\t" + format_double(r.sample_accuracy) + "\n";
  out += "train_samples\t" + std::to_string(r.train_samples) + "\n";
  out += "test_samples\t" + std::to_string(r.test_samples) + "\n";
  out += "seen_classes\t" + std::to_string(r.seen_classes) + "\n";
  out += "unseen_classes\t" + std::to_string(r.unseen_classes) + "\n";
  out += "encoding_dim\t" + std::to_string(r.encoding_dim) + "\n";
  out += "mapper_train_loss\t" + format_double(r.mapper_train_loss) + "\n";
  if (r.el_final_loss) out += "el_final_loss\t" + format_double(*r.el_final_loss) + "\n";
  out += "\n# per-class micro accuracy\n";
  for (const auto& [label, acc] : r.per_class_accuracy) out += label + "\t" + format_double(acc) + "\n";
  out += "\n# config\n";
  for (const auto& [k, v] : r.config_echo) out += k + " = " + v + "\n";
  return out;
}

std::string report_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["macro_unseen_accuracy"] = r.macro_unseen_accuracy;
  j["sample_accuracy"] = r.sample_accuracy;
  j["counts"] = {{"train_samples", r.train_samples},
                 {"test_samples", r.test_samples},
                 {"seen_classes", r.seen_classes},
                 {"unseen_classes", r.unseen_classes}};
  j["encoding_dim"] = r.encoding_dim;
  j["mapper_train_loss"] = r.mapper_train_loss;
  if (r.el_final_loss) j["el_final_loss"] = *r.el_final_loss;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [label, acc] : r.per_class_accuracy) per[label] = acc;
  j["per_class_micro_accuracy"] = per;
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config_echo) echo[k] = v;
  j["config"] = echo;
  return j.dump(2) + "\n";
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  const std::string prefix = std::string("stage '") + name + "': ";
  try {
    return f();
  } catch (const UsageError& e) {
    throw UsageError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class RunDir {
public:
  explicit RunDir(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void put(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(content)));
    manifest_ += name + "\t" + std::to_string(content.size()) + "\t" + hash + "\n";
  }
  void finish() { write_file(dir_ / "manifest.txt", manifest_); }

private:
  std::filesystem::path dir_;
  std::string manifest_ = "# file\tbytes\tfnv1a64\n";
};

}  // namespace

MetricsReport run_pipeline(const RunConfig& cfg) {
  stage("config", [&] { cfg.check(); });
  auto uses = [&](EncodingComponent c) {
    return std::find(cfg.components.begin(), cfg.components.end(), c) != cfg.components.end();
  };
  const bool need_el = uses(EncodingComponent::ElCenter);
  const bool need_words = uses(EncodingComponent::Word);

  MetricsReport report;
  report.config_echo = cfg.echo();
  RunDir run(cfg.resolve(cfg.output_dir));
  run.put("config.txt", write_run_config(cfg));

  ZslDataset data = stage("load", [&] { return load_dataset(cfg.resolve(cfg.features), cfg.resolve(cfg.split)); });
  ClassMap class_map;
  if (!cfg.class_map.empty()) class_map = stage("load", [&] { return read_class_map(read_file(cfg.resolve(cfg.class_map))); });

  Ontology ontology;
  std::optional<EmbeddingSpace> space;
  std::optional<WordVectors> words;
  if (need_el || need_words) {
    ontology = stage("parse", [&] {
      Ontology o = parse_ontology(read_file(cfg.resolve(cfg.ontology)));
      auto problems = validate(o);
      if (!problems.empty()) throw DataError("ontology is invalid: " + problems.front().reason);
      return o;
    });
  }
  if (need_el) {
    NormalizedOntology normalized = stage("normalize", [&] { return normalize(ontology); });
    run.put("normalized.txt", write_normalized(normalized));
    ElTrainConfig el = cfg.el;
    el.seed = cfg.seed;
    ElTrainResult trained = stage("train_el", [&] { return train_el(normalized, el); });
    report.el_final_loss = trained.final_loss;
    run.put("embedding.tsv", export_space(trained.space));
    space = std::move(trained.space);
  }
  if (need_words) {
    WalkCorpus corpus = stage("walk", [&] {
      ProjectedGraph g = project(ontology);
      run.put("graph.tsv", write_graph(g));
      WalkConfig w = cfg.walk;
      w.seed = cfg.seed + 1;
      return lexicalize(random_walks(g, w), ontology);
    });
    run.put("corpus.txt", write_corpus(corpus));
    words = stage("skipgram", [&] {
      SkipGramConfig sg = cfg.w2v;
      sg.seed = cfg.seed + 2;
      std::optional<WordVectors> init;
      if (!cfg.word_vectors.empty()) init = read_word_vectors(read_file(cfg.resolve(cfg.word_vectors)));
      return train_skipgram(corpus, sg, init ? &*init : nullptr);
    });
    run.put("word_vectors.txt", write_word_vectors(*words));
  }

  EncodingTable table = stage("encode", [&] {
    AttributeTable attrs;
    if (uses(EncodingComponent::Attribute)) attrs = read_attributes(read_file(cfg.resolve(cfg.attributes)));
    EncodeSources src;
    src.space = space ? &*space : nullptr;
    src.words = words ? &*words : nullptr;
    src.ontology = &ontology;
    src.attributes = &attrs;
    src.class_map = &class_map;
    std::vector<std::string> labels = data.seen;
    labels.insert(labels.end(), data.unseen.begin(), data.unseen.end());
    EncodingTable t = encode_labels(labels, src, cfg.components, cfg.encode);
    if (cfg.random_encodings) t = random_encodings(t, cfg.seed + 4, cfg.encode.normalize_components);
    return t;
  });
  run.put("encodings.tsv", write_encodings(table));
  report.encoding_dim = table.dim();

  const auto train = data.train_indices();
  const auto test = data.test_indices();
  LinearMapper mapper = stage("train_map", [&] {
    if (train.empty()) throw DataError("no training samples");
    const auto p = static_cast<Eigen::Index>(data.feature_dim);
    const auto m = static_cast<Eigen::Index>(table.dim());
    Eigen::MatrixXd X(p, static_cast<Eigen::Index>(train.size()));
    Eigen::MatrixXd Z(m, static_cast<Eigen::Index>(train.size()));
    for (std::size_t j = 0; j < train.size(); ++j) {
      X.col(static_cast<Eigen::Index>(j)) = data.samples[train[j]].x;
      Z.col(static_cast<Eigen::Index>(j)) = table.at(data.samples[train[j]].label);
    }
    LinearMapper lm;
    if (cfg.mapper == MapperChoice::Sae) {
      SaeConfig sc = cfg.sae;
      sc.seed = cfg.seed + 3;
      SaeModel sm = train_sae(X, Z, sc);
      lm.kind = MapperKind::Sae;
      lm.W = std::move(sm.W);
      lm.parameter = sc.lambda;
      lm.train_loss = sm.train_loss;
    } else {
      lm.kind = MapperKind::Ridge;
      lm.W = train_ridge(X, Z, cfg.ridge_alpha);
      lm.parameter = cfg.ridge_alpha;
      lm.train_loss = (lm.W * X - Z).squaredNorm() + cfg.ridge_alpha * lm.W.squaredNorm();
    }
    return lm;
  });
  run.put("model.txt", write_mapper(mapper));
  report.mapper_train_loss = mapper.train_loss;

  std::vector<std::string> predicted, truth;
  stage("predict", [&] {
    if (test.empty()) throw DataError("no test samples");
    auto candidates = candidate_labels(data.seen, data.unseen, cfg.predict.candidates);
    Eigen::MatrixXd C(static_cast<Eigen::Index>(table.dim()), static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t j = 0; j < candidates.size(); ++j) C.col(static_cast<Eigen::Index>(j)) = table.at(candidates[j]);
    Eigen::MatrixXd Q(mapper.W.rows(), static_cast<Eigen::Index>(test.size()));
    for (std::size_t j = 0; j < test.size(); ++j)
      Q.col(static_cast<Eigen::Index>(j)) = map_features(mapper, data.samples[test[j]].x);
    auto nearest = kernels::omp::nearest(Q, C, cfg.predict.distance);
    std::string out = "# id\ttruth\tpredicted\n";
    for (std::size_t j = 0; j < test.size(); ++j) {
      const Sample& s = data.samples[test[j]];
      predicted.push_back(candidates[nearest[j]]);
      truth.push_back(s.label);
      out += s.id + "\t" + s.label + "\t" + predicted.back() + "\n";
    }
    run.put("predictions.tsv", out);
  });

  stage("metrics", [&] {
    std::vector<std::string> unseen_pred, unseen_truth;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (!data.is_unseen(truth[i])) continue;
      unseen_pred.push_back(predicted[i]);
      unseen_truth.push_back(truth[i]);
    }
    report.macro_unseen_accuracy = macro_accuracy(unseen_pred, unseen_truth, data.unseen);
    report.sample_accuracy = sample_accuracy(predicted, truth);
    report.per_class_accuracy = per_class_accuracy(predicted, truth);
  });
  report.train_samples = train.size();
  report.test_samples = test.size();
  report.seen_classes = data.seen.size();
  report.unseen_classes = data.unseen.size();

  run.put("report.txt", report_text(report));
  run.put("report.json", report_json(report));
  run.finish();
  return report;
}

}  // namespace ozsl
