#include <doctest.h>

#include <filesystem>
#include <random>

#include <json.hpp>

#include "ozsl/error.hpp"
#include "ozsl/harness.hpp"
#include "ozsl/io_util.hpp"

using namespace ozsl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ozsl_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kFeatures =
    "s1\tcat\t1,0,0\n"
    "s2\tcat\t0.9,0.1,0\n"
    "s3\tdog\t0,1,0\n"
    "s4\tfox\t0,0,1\n";
const char* kSplit = "[seen]\ncat\ndog\n\n[unseen]\nfox\n";

RunConfig synthetic_run(const std::string& name, const SyntheticConfig& sc = {}) {
  fs::path dir = scratch(name);
  write_synthetic(gen_synthetic(sc), dir);
  return read_run_config(dir / "config.txt");
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("dataset loading") {
  ZslDataset d = make_dataset(read_features(kFeatures), read_split(kSplit));
  CHECK(d.samples.size() == 4);
  CHECK(d.feature_dim == 3);
  CHECK(d.seen == std::vector<std::string>{"cat", "dog"});
  CHECK(d.unseen == std::vector<std::string>{"fox"});
  CHECK(d.train_indices() == std::vector<std::size_t>{0, 1, 2});
  CHECK(d.test_indices() == std::vector<std::size_t>{3});

  fs::path dir = scratch("dataset");
  write_file(dir / "f.tsv", kFeatures);
  write_file(dir / "s.txt", "[seen]\ncat\ndog\n[unseen]\nfox\n[heldout]\ns2\n");
  ZslDataset h = load_dataset(dir / "f.tsv", dir / "s.txt");
  CHECK(h.train_indices() == std::vector<std::size_t>{0, 2});
  CHECK(h.test_indices() == std::vector<std::size_t>{1, 3});
  CHECK(read_features(write_features(h.samples)).size() == 4);
}

TEST_CASE("dataset errors") {
  CHECK_THROWS_WITH_AS(make_dataset(read_features(kFeatures), read_split("[seen]\ncat\ndog\nfox\n[unseen]\nfox\n")),
                       doctest::Contains("fox"), DataError);
  CHECK_THROWS_WITH_AS(read_features("s1\tcat\t1,0,0\ns2\tcat\t1,0\n"), doctest::Contains("s2"), DataError);
  CHECK_THROWS_WITH_AS(read_features("s1\tcat\t1,0,0\ns2\tcat\t1,0\n"), doctest::Contains("line 2"), DataError);
  CHECK_THROWS_AS(read_features("s1\tcat\t1,x,0\n"), DataError);
  CHECK_THROWS_AS(read_split("[seen]\ncat\n"), DataError);
  CHECK_THROWS_AS(read_split("cat\n[seen]\n[unseen]\n"), DataError);
  CHECK_THROWS_AS(make_dataset(read_features(kFeatures), read_split("[seen]\ncat\n[unseen]\nfox\n")), DataError);
  CHECK_THROWS_AS(make_dataset(read_features(kFeatures), read_split("[seen]\ncat\ndog\n[unseen]\nfox\n[heldout]\ns4\n")),
                  DataError);
}

TEST_CASE("metrics") {
  std::vector<std::string> truth = {"A", "A", "B", "B"};
  CHECK(macro_accuracy(truth, truth, {"A", "B"}) == 1.0);
  CHECK(macro_accuracy({"A", "B", "B", "B"}, truth, {"A", "B"}) == 0.75);
  CHECK(macro_accuracy({"B", "B", "A", "A"}, truth, {"A", "B"}) == 0.0);
  CHECK_THROWS_AS(macro_accuracy(truth, truth, {"A", "C"}), DataError);
  CHECK(sample_accuracy({"A", "A", "B", "A"}, truth) == 0.75);
  CHECK(sample_accuracy(truth, truth) == 1.0);
  CHECK_THROWS_AS(sample_accuracy({}, {}), DataError);
  CHECK_THROWS_AS(sample_accuracy({"A"}, truth), DataError);
  auto pc = per_class_accuracy({"A", "B", "B", "B"}, truth);
  CHECK(pc == std::map<std::string, double>{{"A", 0.5}, {"B", 1.0}});
}

TEST_CASE("metrics are order independent and bounded") {
  std::mt19937_64 rng(1);
  const std::vector<std::string> labels = {"a", "b", "c", "d"};
  for (int t = 0; t < 200; ++t) {
    std::vector<std::string> pred, truth;
    std::size_t n = 4 + rng() % 20;
    for (std::size_t i = 0; i < n; ++i) {
      truth.push_back(i < 4 ? labels[i] : labels[rng() % 4]);
      pred.push_back(labels[rng() % 4]);
    }
    double macro = macro_accuracy(pred, truth, {"c", "d"});
    double sample = sample_accuracy(pred, truth);
    CHECK(macro >= 0.0);
    CHECK(macro <= 1.0);
    CHECK(sample >= 0.0);
    CHECK(sample <= 1.0);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> p2, t2;
    for (std::size_t i : perm) {
      p2.push_back(pred[i]);
      t2.push_back(truth[i]);
    }
    CHECK(macro_accuracy(p2, t2, {"c", "d"}) == macro);
  }
}

TEST_CASE("synthetic data invariants") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SyntheticConfig sc;
    sc.seed = seed;
    sc.k_seen = 5 + seed;
    sc.k_unseen = seed;
    sc.per_class = 7;
    sc.heldout_per_class = 2;
    SyntheticData d = gen_synthetic(sc);
    CHECK(validate(d.ontology).empty());
    CHECK(d.split.seen.size() == sc.k_seen);
    CHECK(d.split.unseen.size() == sc.k_unseen);
    ZslDataset ds = make_dataset(d.samples, d.split);
    std::map<std::string, std::size_t> counts;
    for (const auto& s : ds.samples) counts[s.label]++;
    CHECK(counts.size() == sc.k_seen + sc.k_unseen);
    for (const auto& [label, c] : counts) CHECK(c == 7);
    CHECK(ds.heldout.size() == 2 * sc.k_seen);
    for (const auto& y : ds.seen) CHECK_FALSE(ds.is_unseen(y));
    for (const auto& [label, concept_name] : d.class_map) CHECK(d.ontology.has_concept(concept_name));
    CHECK(d.attributes.size() == sc.k_seen + sc.k_unseen);
  }
  CHECK_THROWS_AS(gen_synthetic({.k_seen = 0}), UsageError);
}

TEST_CASE("synthetic generation is byte-reproducible") {
  fs::path a = scratch("syn_a"), b = scratch("syn_b");
  write_synthetic(gen_synthetic({}), a);
  write_synthetic(gen_synthetic({}), b);
  for (const char* f : {"ontology.elf", "features.tsv", "split.txt", "class_map.tsv", "attributes.tsv", "config.txt"})
    CHECK(read_file(a / f) == read_file(b / f));
  SyntheticConfig other;
  other.seed = 43;
  write_synthetic(gen_synthetic(other), b);
  CHECK(read_file(a / "features.tsv") != read_file(b / "features.tsv"));
}

TEST_CASE("noise-free synthetic classes are linearly separable") {
  SyntheticConfig sc;
  sc.noise = 0.0;
  SyntheticData d = gen_synthetic(sc);
  ZslDataset ds = make_dataset(d.samples, d.split);
  auto train = ds.train_indices();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(ds.feature_dim), static_cast<Eigen::Index>(train.size()));
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ds.seen.size()), X.cols());
  for (std::size_t j = 0; j < train.size(); ++j) {
    const Sample& s = ds.samples[train[j]];
    X.col(static_cast<Eigen::Index>(j)) = s.x;
    auto k = std::lower_bound(ds.seen.begin(), ds.seen.end(), s.label) - ds.seen.begin();
    Y(k, static_cast<Eigen::Index>(j)) = 1.0;
  }
  Eigen::MatrixXd W = train_ridge(X, Y, 1e-6);
  std::vector<std::string> pred, truth;
  for (std::size_t j = 0; j < train.size(); ++j) {
    Eigen::Index k;
    (W * X.col(static_cast<Eigen::Index>(j))).maxCoeff(&k);
    pred.push_back(ds.seen[static_cast<std::size_t>(k)]);
    truth.push_back(ds.samples[train[j]].label);
  }
  CHECK(sample_accuracy(pred, truth) == 1.0);
}

TEST_CASE("run config parsing and echo") {
  RunConfig c = parse_run_config(
      "# comment\nontology = o.elf\ncomponents = el_center,word\nel_dim = 8\nsae_lambda = 0.25\n"
      "distance = cosine\ncandidates = all\nrandom_encodings = true\n",
      "/data");
  CHECK(c.resolve(c.ontology) == fs::path("/data/o.elf"));
  CHECK(c.el.dim == 8);
  CHECK(c.sae.lambda == 0.25);
  CHECK(c.predict.distance == DistanceKind::Cosine);
  CHECK(c.random_encodings);
  RunConfig back = parse_run_config(write_run_config(c), "/data");
  CHECK(back.echo() == c.echo());
  CHECK(c.echo().size() == run_config_keys().size());
  CHECK_THROWS_AS(parse_run_config("nonsense = 1\n", "."), UsageError);
  CHECK_THROWS_AS(parse_run_config("el_dim = two\n", "."), UsageError);
  CHECK_THROWS_AS(parse_run_config("el_dim\n", "."), UsageError);
  CHECK_THROWS_AS(read_run_config("/nonexistent/config.txt"), UsageError);
  RunConfig missing;
  CHECK_THROWS_AS(missing.check(), UsageError);
}

TEST_CASE("pipeline on synthetic data") {
  RunConfig cfg = synthetic_run("pipe");
  MetricsReport r = run_pipeline(cfg);
  CHECK(r.macro_unseen_accuracy >= 0.0);
  CHECK(r.macro_unseen_accuracy <= 1.0);
  CHECK(r.config_echo == cfg.echo());
  CHECK(r.encoding_dim == cfg.el.dim);
  CHECK(r.el_final_loss.has_value());
  CHECK(r.unseen_classes == 2);
  fs::path out = cfg.resolve(cfg.output_dir);
  for (const char* f : {"config.txt", "normalized.txt", "embedding.tsv", "encodings.tsv", "model.txt",
                        "predictions.tsv", "report.txt", "report.json", "manifest.txt"})
    CHECK(fs::exists(out / f));
  auto j = nlohmann::json::parse(read_file(out / "report.json"));
  CHECK(j["macro_unseen_accuracy"].get<double>() == r.macro_unseen_accuracy);
  CHECK(report_text(r).find("macro") != std::string::npos);

  std::string report = read_file(out / "report.txt"), emb = read_file(out / "embedding.tsv");
  run_pipeline(cfg);
  CHECK(read_file(out / "report.txt") == report);
  CHECK(read_file(out / "embedding.tsv") == emb);
}

TEST_CASE("encoding dimensions follow the component list") {
  RunConfig cfg = synthetic_run("dims");
  cfg.el.dim = 6;
  cfg.el.epochs = 100;
  cfg.w2v.dim = 4;
  cfg.w2v.epochs = 5;
  cfg.components = {EncodingComponent::ElCenter};
  CHECK(run_pipeline(cfg).encoding_dim == 6);
  cfg.components = {EncodingComponent::Word};
  MetricsReport w = run_pipeline(cfg);
  CHECK(w.encoding_dim == 4);
  CHECK_FALSE(w.el_final_loss.has_value());
  cfg.components = {EncodingComponent::ElCenter, EncodingComponent::Word};
  CHECK(run_pipeline(cfg).encoding_dim == 10);
  cfg.components = {EncodingComponent::Attribute};
  cfg.mapper = MapperChoice::Ridge;
  CHECK(run_pipeline(cfg).encoding_dim == 8);
}

TEST_CASE("pipeline errors name the stage") {
  RunConfig cfg = synthetic_run("errors");
  write_file(cfg.resolve(cfg.features), "s1\tghost\t1,2\n");
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("stage 'load'"), DataError);

  cfg = synthetic_run("errors2");
  write_file(cfg.resolve(cfg.ontology), "Concept(A)\nSubClassOf(A B)\n");
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("stage 'parse'"), DataError);
}

}  // TEST_SUITE
