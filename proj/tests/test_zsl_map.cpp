#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ozsl/error.hpp"
#include "ozsl/zsl_map.hpp"

using namespace ozsl;

namespace {

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) M(i, j) = g(rng);
  return M;
}

struct Fixture {
  Ontology onto = parse_ontology("Concept(KillerWhale)\nConcept(Seal)\nLabel(KillerWhale \"killer whale\")");
  EmbeddingSpace space{2};
  WordVectors words{3};
  AttributeTable attrs;
  ClassMap map{{"orca", "KillerWhale"}, {"seal", "Seal"}};

  Fixture() {
    space.add_concept("KillerWhale", std::vector<double>{0.1, 0.2}, 0.5);
    space.add_concept("Seal", std::vector<double>{3, 4}, 0.25);
    words.set("killer", Eigen::Vector3d(1, 0, 0));
    words.set("whale", Eigen::Vector3d(0, 1, 0));
    words.set("seal", Eigen::Vector3d(0, 0, 2));
    attrs["orca"] = Eigen::Vector4d(1, 0, 0, 0);
    attrs["seal"] = Eigen::Vector4d(0, 1, 1, 0);
  }
  EncodeSources sources() const { return {&space, &words, &onto, &attrs, &map}; }
};

}  // namespace

TEST_SUITE("zsl_map") {

TEST_CASE("component names") {
  CHECK(parse_components("el_center,word,attribute") ==
        std::vector<EncodingComponent>{EncodingComponent::ElCenter, EncodingComponent::Word,
                                       EncodingComponent::Attribute});
  CHECK(parse_component("EL_CENTER") == EncodingComponent::ElCenter);
  CHECK(parse_component("w2v") == EncodingComponent::Word);
  CHECK_THROWS_AS(parse_components(""), UsageError);
  CHECK_THROWS_AS(parse_components("word,word"), UsageError);
  CHECK_THROWS_AS(parse_component("radius"), UsageError);
}

TEST_CASE("single EL component without normalization") {
  Fixture f;
  EncodeOptions raw;
  raw.normalize_components = false;
  EncodingTable t = encode_labels({"orca"}, f.sources(), {EncodingComponent::ElCenter}, raw);
  CHECK(t.at("orca") == Eigen::Vector2d(0.1, 0.2));
  CHECK(t.dim() == 2);
}

TEST_CASE("concatenation order and dimensions") {
  Fixture f;
  EncodingTable t = encode_labels({"orca", "seal"}, f.sources(), {EncodingComponent::ElCenter, EncodingComponent::Word});
  CHECK(t.dim() == 5);
  CHECK(t.component_dims == std::vector<std::size_t>{2, 3});
  Eigen::VectorXd z = t.at("seal");
  CHECK(z.head(2).isApprox(Eigen::Vector2d(0.6, 0.8)));
  CHECK(z.tail(3).isApprox(Eigen::Vector3d(0, 0, 1)));

  EncodingTable all = encode_labels({"orca", "seal"}, f.sources(),
                                    {EncodingComponent::Word, EncodingComponent::Attribute, EncodingComponent::ElCenter});
  CHECK(all.dim() == 9);
  for (const auto& [label, v] : all.encodings) {
    CHECK(v.size() == 9);
    CHECK(v.head(3).norm() == doctest::Approx(1.0));
    CHECK(v.segment(3, 4).norm() == doctest::Approx(1.0));
    CHECK(v.tail(2).norm() == doctest::Approx(1.0));
  }
  EncodeOptions radius;
  radius.include_radius = true;
  radius.normalize_components = false;
  EncodingTable r = encode_labels({"seal"}, f.sources(), {EncodingComponent::ElCenter}, radius);
  CHECK(r.at("seal") == Eigen::Vector3d(3, 4, 0.25));
}

TEST_CASE("missing sources name the label") {
  Fixture f;
  CHECK_THROWS_WITH_AS(encode_labels({"narwhal"}, f.sources(), {EncodingComponent::ElCenter}),
                       doctest::Contains("narwhal"), DataError);
  CHECK_THROWS_WITH_AS(encode_labels({"narwhal"}, f.sources(), {EncodingComponent::Attribute}),
                       doctest::Contains("narwhal"), DataError);
  CHECK_THROWS_WITH_AS(encode_labels({"narwhal"}, f.sources(), {EncodingComponent::Word}),
                       doctest::Contains("narwhal"), DataError);
}

TEST_CASE("random encodings keep the layout") {
  Fixture f;
  EncodingTable t = encode_labels({"orca", "seal"}, f.sources(), {EncodingComponent::ElCenter, EncodingComponent::Word});
  EncodingTable r = random_encodings(t, 7);
  CHECK(r.components == t.components);
  CHECK(r.component_dims == t.component_dims);
  CHECK(r.encodings.size() == 2);
  CHECK(r.at("orca").head(2).norm() == doctest::Approx(1.0));
  CHECK(random_encodings(t, 7).encodings == r.encodings);
  CHECK(random_encodings(t, 8).encodings != r.encodings);
}

TEST_CASE("table file formats") {
  Fixture f;
  EncodingTable t = encode_labels({"orca", "seal"}, f.sources(), {EncodingComponent::ElCenter, EncodingComponent::Word});
  EncodingTable back = read_encodings(write_encodings(t));
  CHECK(back.components == t.components);
  CHECK(back.component_dims == t.component_dims);
  CHECK(back.encodings == t.encodings);
  CHECK(read_class_map(write_class_map(f.map)) == f.map);
  CHECK(read_attributes(write_attributes(f.attrs)) == f.attrs);
  CHECK_THROWS_AS(read_attributes("a\t1,2\nb\t1\n"), DataError);
  CHECK_THROWS_AS(read_class_map("a\n"), DataError);
}

TEST_CASE("sae loss examples") {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd X = gaussian(rng, 3, 4);
  CHECK(sae_loss(Eigen::MatrixXd::Identity(3, 3), X, X, 0.7) == 0.0);
  Eigen::MatrixXd Z = gaussian(rng, 2, 4);
  CHECK(sae_loss(Eigen::MatrixXd::Zero(2, 3), X, Z, 0.7) ==
        doctest::Approx(X.squaredNorm() + 0.7 * Z.squaredNorm()).epsilon(1e-14));
  Eigen::MatrixXd W = gaussian(rng, 2, 3);
  CHECK(sae_loss(W, X, Z, 0.7) == doctest::Approx(oracle::sae_loss_elementwise(W, X, Z, 0.7)).epsilon(1e-13));
  CHECK_THROWS_AS(sae_loss(W, X, gaussian(rng, 2, 5), 0.7), DataError);
}

TEST_CASE("sae gradient matches finite differences") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) CHECK(oracle::sae_gradient_probe(rng) < 1e-4);
}

TEST_CASE("sae recovers identity and orthogonal maps") {
  std::mt19937_64 rng(3);
  Eigen::MatrixXd X = gaussian(rng, 4, 30);
  SaeConfig cfg;
  Eigen::MatrixXd near = Eigen::MatrixXd::Identity(4, 4) + 0.01 * gaussian(rng, 4, 4);
  CHECK(train_sae(X, X, cfg, &near).train_loss < 1e-6);

  Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(rng, 4, 4)).householderQ();
  SaeModel m = train_sae(X, Q * X, cfg);
  CHECK(m.train_loss < 1e-6);
  CHECK((m.W - Q).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("sae matches the exact minimizer on small problems") {
  std::mt19937_64 rng(4);
  for (int p = 2; p <= 4; ++p)
    for (int m = 2; m <= 4; ++m) {
      Eigen::MatrixXd X = gaussian(rng, p, 12), Z = gaussian(rng, m, 12);
      SaeConfig cfg;
      SaeModel model = train_sae(X, Z, cfg);
      Eigen::MatrixXd exact = oracle::sae_exact(X, Z, cfg.lambda);
      CHECK((model.W - exact).cwiseAbs().maxCoeff() < 1e-4);
      CHECK(model.train_loss == doctest::Approx(sae_loss(model.W, X, Z, cfg.lambda)));
      CHECK(train_sae(X, Z, cfg).W == model.W);
    }
}

TEST_CASE("sae divergence and shapes") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd X = gaussian(rng, 2, 5);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Constant(2, 5, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(train_sae(X, Z, {}), NumericalError);
  CHECK_THROWS_AS(train_sae(X, gaussian(rng, 2, 4), {}), DataError);
}

TEST_CASE("ridge") {
  std::mt19937_64 rng(6);
  Eigen::MatrixXd X = gaussian(rng, 3, 10);
  CHECK(train_ridge(X, X, 1e-9).isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-6));
  Eigen::MatrixXd x(1, 2), z(1, 2);
  x << 1, 2;
  z << 2, 4;
  CHECK(train_ridge(x, z, 1e-6)(0, 0) == doctest::Approx(10.0 / (5.0 + 1e-6)).epsilon(1e-12));
  Eigen::MatrixXd W = train_ridge(X, gaussian(rng, 5, 10), 0.1);
  CHECK(W.rows() == 5);
  CHECK(W.cols() == 3);
  CHECK_THROWS_AS(train_ridge(X, X, 0.0), UsageError);
}

TEST_CASE("map features") {
  LinearMapper id{MapperKind::Sae, Eigen::MatrixXd::Identity(3, 3), 0.5, 0.0};
  Eigen::Vector3d x(1, -2, 3);
  CHECK(map_features(id, x) == Eigen::VectorXd(x));
  LinearMapper zero{MapperKind::Ridge, Eigen::MatrixXd::Zero(2, 3), 1e-3, 0.0};
  CHECK(map_features(zero, x) == Eigen::VectorXd::Zero(2));
  Eigen::MatrixXd W(2, 2);
  W << 1, 2, 3, 4;
  LinearMapper two{MapperKind::Sae, W, 0.5, 0.0};
  CHECK(map_features(two, Eigen::Vector2d(5, 6)) == Eigen::Vector2d(17, 39));
  CHECK_THROWS_AS(map_features(two, x), DataError);
  LinearMapper back = read_mapper(write_mapper(two));
  CHECK(back.W == two.W);
  CHECK(back.kind == MapperKind::Sae);
  CHECK(back.parameter == 0.5);
}

TEST_CASE("distances") {
  CHECK(distance(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4), DistanceKind::L2) == 5.0);
  CHECK(distance(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.3, 0.7), DistanceKind::Cosine) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(distance(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), DistanceKind::Cosine) == 1.0);
  CHECK_THROWS_AS(distance(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1), DistanceKind::Cosine), DataError);
  CHECK_THROWS_AS(distance(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 1, 0), DistanceKind::L2), DataError);
  CHECK(parse_distance("cosine") == DistanceKind::Cosine);
  CHECK(parse_candidates("all") == CandidateMode::SeenAndUnseen);
  CHECK_THROWS_AS(parse_distance("l1"), UsageError);
}

TEST_CASE("predict examples") {
  EncodingTable t;
  t.encodings["y1"] = Eigen::Vector2d(0, 0);
  t.encodings["y2"] = Eigen::Vector2d(1, 1);
  CHECK(predict(Eigen::Vector2d(0.9, 0.8), t, {"y1"}, DistanceKind::L2) == "y1");
  CHECK(predict(Eigen::Vector2d(0.9, 0.8), t, {"y1", "y2"}, DistanceKind::L2) == "y2");
  t.encodings["a"] = Eigen::Vector2d(1, 1);
  CHECK(predict(Eigen::Vector2d(0.9, 0.8), t, {"y2", "y1", "a"}, DistanceKind::L2) == "a");
  CHECK_THROWS_AS(predict(Eigen::Vector2d(0, 0), t, {}, DistanceKind::L2), DataError);
  CHECK_THROWS_AS(predict(Eigen::Vector3d(0, 0, 1), t, {"y1"}, DistanceKind::L2), DataError);
  CHECK_THROWS_AS(predict(Eigen::Vector2d(0, 0), t, {"zz"}, DistanceKind::L2), DataError);
  CHECK(candidate_labels({"s2", "s1"}, {"u1"}, CandidateMode::UnseenOnly) == std::vector<std::string>{"u1"});
  CHECK(candidate_labels({"s2", "s1"}, {"u1"}, CandidateMode::SeenAndUnseen) ==
        std::vector<std::string>{"s1", "s2", "u1"});
}

TEST_CASE("predict agrees with a linear scan and is an argmin") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> small(-2, 2);
  for (int i = 0; i < 2000; ++i) {
    const int m = 1 + static_cast<int>(rng() % 4);
    const int k = 1 + static_cast<int>(rng() % 5);
    EncodingTable t;
    std::map<std::string, Eigen::VectorXd> enc;
    std::vector<std::string> cands;
    DistanceKind kind = rng() % 2 ? DistanceKind::L2 : DistanceKind::Cosine;
    for (int c = 0; c < k; ++c) {
      std::string label(1, static_cast<char>('a' + rng() % 26));
      label += std::to_string(rng() % 3);
      if (enc.count(label)) continue;
      Eigen::VectorXd v(m);
      do {
        for (int d = 0; d < m; ++d) v[d] = small(rng);
      } while (kind == DistanceKind::Cosine && v.isZero(0.0));
      enc[label] = v;
      t.encodings[label] = v;
      cands.push_back(label);
    }
    Eigen::VectorXd gx(m);
    do {
      for (int d = 0; d < m; ++d) gx[d] = small(rng) * 0.5;
    } while (kind == DistanceKind::Cosine && gx.isZero(0.0));
    std::string got = predict(gx, t, cands, kind);
    CHECK(got == oracle::brute_force_predict(gx, enc, cands, kind));
    for (const auto& c : cands) CHECK(distance(t.at(got), gx, kind) <= distance(t.at(c), gx, kind));
    if (kind == DistanceKind::Cosine) CHECK(predict(gx * 4.0, t, cands, kind) == got);
  }
}

}  // TEST_SUITE
