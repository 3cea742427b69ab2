#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "ozsl/error.hpp"
#include "ozsl/harness.hpp"
#include "ozsl/io_util.hpp"

namespace ozsl {

void SyntheticConfig::check() const {
  if (k_seen == 0 || k_unseen == 0) throw UsageError("synthetic data needs at least one seen and one unseen class");
  if (per_class == 0) throw UsageError("samples per class must be positive");
  if (feature_dim == 0) throw UsageError("feature dimension must be positive");
  if (!(noise >= 0.0)) throw UsageError("noise must be non-negative");
  if (heldout_per_class >= per_class) throw UsageError("held-out samples per class must be below samples per class");
}

namespace {

const std::vector<std::string> kGroupWords = {"feline", "canine", "bird", "fish", "reptile", "insect", "rodent",
                                              "primate"};
const std::vector<std::string> kColorWords = {"red", "blue", "green", "yellow", "black", "white", "grey", "brown"};
const std::vector<std::string> kTextureWords = {"striped", "spotted", "plain", "furry", "scaly", "feathered",
                                                "smooth", "woolly"};

std::string word_at(const std::vector<std::string>& pool, std::size_t i) {
  std::string w = pool[i % pool.size()];
  if (i >= pool.size()) w += std::to_string(i / pool.size() + 1);
  return w;
}

std::string capitalized(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

struct Combo {
  std::size_t group;
  std::size_t color;
  std::size_t texture;
};

// Every value and group must occur among seen classes, otherwise an unseen
// class would need a direction the mapper never saw. Unseen classes should
// also differ in their attribute pair when there is room for it.
bool usable(const std::vector<Combo>& classes, std::size_t k_seen, std::size_t groups, std::size_t values) {
  std::set<std::size_t> g, c, t;
  for (std::size_t i = 0; i < k_seen; ++i) {
    g.insert(classes[i].group);
    c.insert(classes[i].color);
    t.insert(classes[i].texture);
  }
  if (g.size() != groups || c.size() != values || t.size() != values) return false;
  std::set<std::pair<std::size_t, std::size_t>> unseen_pairs;
  std::size_t k_unseen = classes.size() - k_seen;
  for (std::size_t i = k_seen; i < classes.size(); ++i) unseen_pairs.emplace(classes[i].color, classes[i].texture);
  return unseen_pairs.size() == std::min(k_unseen, values * values);
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticConfig& cfg) {
  cfg.check();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t K = cfg.k_seen + cfg.k_unseen;
  const std::size_t G = std::max<std::size_t>(1, std::min(std::max<std::size_t>(2, cfg.k_unseen), cfg.k_seen));
  const std::size_t per_group = (K + G - 1) / G;
  std::size_t V = 2;
  while (V * V < per_group) ++V;

  // Class i belongs to group i % G and takes the next attribute pair of its
  // group's shuffled pair list; the last k_unseen classes are unseen.
  std::vector<Combo> classes;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs(G);
    for (auto& list : pairs) {
      for (std::size_t c = 0; c < V; ++c)
        for (std::size_t t = 0; t < V; ++t) list.emplace_back(c, t);
      std::shuffle(list.begin(), list.end(), rng);
    }
    classes.clear();
    std::vector<std::size_t> used(G, 0);
    for (std::size_t i = 0; i < K; ++i) {
      std::size_t g = i % G;
      auto [c, t] = pairs[g][used[g]++];
      classes.push_back({g, c, t});
    }
    if (usable(classes, cfg.k_seen, G, V)) break;
  }

  SyntheticData d;
  Ontology& o = d.ontology;
  o.concepts = {"Entity", "Color", "Texture"};
  o.relations = {"hasColor", "hasTexture"};
  std::vector<std::string> group_names, color_names, texture_names;
  for (std::size_t g = 0; g < G; ++g) group_names.push_back(capitalized(word_at(kGroupWords, g)));
  for (std::size_t v = 0; v < V; ++v) {
    color_names.push_back(capitalized(word_at(kColorWords, v)));
    texture_names.push_back(capitalized(word_at(kTextureWords, v)));
  }
  auto atomic = [](const std::string& n) { return Expr::atomic(n); };
  auto disjoint_all = [&](const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j)
        o.axioms.emplace_back(SubClassOf{Expr::conjunction(atomic(names[i]), atomic(names[j])), Expr::bottom()});
  };
  for (std::size_t g = 0; g < G; ++g) {
    o.concepts.push_back(group_names[g]);
    o.axioms.emplace_back(SubClassOf{atomic(group_names[g]), atomic("Entity")});
    o.axioms.emplace_back(Annotation{group_names[g], AnnotationKind::Label, word_at(kGroupWords, g)});
  }
  for (std::size_t v = 0; v < V; ++v) {
    o.concepts.push_back(color_names[v]);
    o.concepts.push_back(texture_names[v]);
    o.axioms.emplace_back(SubClassOf{atomic(color_names[v]), atomic("Color")});
    o.axioms.emplace_back(SubClassOf{atomic(texture_names[v]), atomic("Texture")});
    o.axioms.emplace_back(Annotation{color_names[v], AnnotationKind::Label, word_at(kColorWords, v)});
    o.axioms.emplace_back(Annotation{texture_names[v], AnnotationKind::Label, word_at(kTextureWords, v)});
  }
  disjoint_all(group_names);
  disjoint_all(color_names);
  disjoint_all(texture_names);

  std::vector<std::string> labels;
  for (const auto& c : classes) {
    std::string g = word_at(kGroupWords, c.group);
    std::string col = word_at(kColorWords, c.color);
    std::string tex = word_at(kTextureWords, c.texture);
    std::string name = capitalized(col) + capitalized(tex) + capitalized(g);
    std::string label = col + "_" + tex + "_" + g;
    o.concepts.push_back(name);
    o.axioms.emplace_back(EquivalentTo{
        atomic(name), Expr::conjunction_of({atomic(group_names[c.group]),
                                            Expr::existential("hasColor", atomic(color_names[c.color])),
                                            Expr::existential("hasTexture", atomic(texture_names[c.texture]))})});
    o.axioms.emplace_back(Annotation{name, AnnotationKind::Label, col + " " + tex + " " + g});
    o.axioms.emplace_back(Annotation{name, AnnotationKind::Comment, "a " + tex + " " + g + " that is " + col});
    d.class_map[label] = name;
    labels.push_back(label);
  }

  const std::size_t q = G + 2 * V;
  for (std::size_t i = 0; i < K; ++i) {
    Eigen::VectorXd proto = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q));
    proto[static_cast<Eigen::Index>(classes[i].group)] = 1.0;
    proto[static_cast<Eigen::Index>(G + classes[i].color)] = 1.0;
    proto[static_cast<Eigen::Index>(G + V + classes[i].texture)] = 1.0;
    d.prototypes[labels[i]] = proto;
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(cfg.feature_dim), static_cast<Eigen::Index>(q));
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index r = 0; r < A.rows(); ++r) A(r, j) = gauss(rng);

  std::size_t next_id = 0;
  for (std::size_t i = 0; i < K; ++i) {
    const Eigen::VectorXd clean = A * d.prototypes[labels[i]];
    for (std::size_t s = 0; s < cfg.per_class; ++s) {
      Sample smp;
      char id[32];
      std::snprintf(id, sizeof id, "s%05zu", next_id++);
      smp.id = id;
      smp.label = labels[i];
      smp.x = clean;
      for (Eigen::Index k = 0; k < smp.x.size(); ++k) smp.x[k] += cfg.noise * gauss(rng);
      if (i < cfg.k_seen && s < cfg.heldout_per_class) d.split.heldout.push_back(smp.id);
      d.samples.push_back(std::move(smp));
    }
  }

  for (std::size_t i = 0; i < K; ++i) {
    Eigen::VectorXd a = d.prototypes[labels[i]];
    for (Eigen::Index k = 0; k < a.size(); ++k) a[k] += cfg.noise * gauss(rng);
    d.attributes[labels[i]] = a;
    (i < cfg.k_seen ? d.split.seen : d.split.unseen).push_back(labels[i]);
  }
  return d;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir, const RunConfig& defaults) {
  std::filesystem::create_directories(dir);
  write_file(dir / "ontology.elf", serialize_ontology(data.ontology));
  write_file(dir / "features.tsv", write_features(data.samples));
  write_file(dir / "split.txt", write_split(data.split));
  write_file(dir / "class_map.tsv", write_class_map(data.class_map));
  write_file(dir / "attributes.tsv", write_attributes(data.attributes));
  RunConfig cfg = defaults;
  cfg.ontology = "ontology.elf";
  cfg.features = "features.tsv";
  cfg.split = "split.txt";
  cfg.class_map = "class_map.tsv";
  cfg.attributes = "attributes.tsv";
  if (cfg.output_dir.empty()) cfg.output_dir = "run";
  write_file(dir / "config.txt", write_run_config(cfg));
}

}  // namespace ozsl
