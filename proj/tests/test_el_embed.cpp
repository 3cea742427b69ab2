#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ozsl/el_embed.hpp"
#include "ozsl/error.hpp"

using namespace ozsl;

namespace {

struct SpaceBuilder {
  EmbeddingSpace s{2};
  SpaceBuilder& ball(const std::string& name, std::vector<double> c, double r) {
    s.add_concept(name, c, r);
    return *this;
  }
  SpaceBuilder& rel(const std::string& name, std::vector<double> v) {
    s.add_relation(name, v);
    return *this;
  }
};

NormalizedOntology normal(const std::string& elf) { return normalize(parse_ontology(elf)); }

double containment_gap(const EmbeddingSpace& s, const std::string& a, const std::string& b) {
  Ball A = s.ball(a), B = s.ball(b);
  return oracle::norm2(oracle::lin(A.center, 1, B.center, -1)) + A.radius - B.radius;
}

}  // namespace

TEST_SUITE("el_embed") {

TEST_CASE("loss_nf1 examples") {
  auto s = SpaceBuilder().ball("A", {1, 0}, 0.5).ball("B", {1, 0}, 0.5).s;
  CHECK(loss_nf1(s, "A", "B", 0.1) == 0.0);
  s = SpaceBuilder().ball("A", {1, 0}, 0.1).ball("B", {0, 1}, 0.2).s;
  CHECK(loss_nf1(s, "A", "B", 0.05) == doctest::Approx(std::sqrt(2.0) + 0.1 - 0.2 - 0.05).epsilon(1e-12));
  CHECK(std::abs(loss_nf1(s, "A", "B", 0.05) - 1.264214) < 1e-6);
  s = SpaceBuilder().ball("A", {2, 0}, 0).ball("B", {0, 0}, 0).s;
  CHECK(loss_nf1(s, "A", "B", 0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(loss_nf1(s, "A", "Z", 0), DataError);
}

TEST_CASE("loss_nf2 examples") {
  auto s = SpaceBuilder().ball("A", {1, 0}, 0.1).ball("B", {0, 1}, 0.3).rel("r", {-1, 1}).s;
  CHECK(loss_nf2(s, "A", "r", "B", 0.1) == 0.0);
  s = SpaceBuilder().ball("A", {0, 1}, 0.2).ball("B", {1, 0}, 0.1).rel("r", {1, 0}).s;
  CHECK(loss_nf2(s, "A", "r", "B", 0.05) == doctest::Approx(1.05).epsilon(1e-12));
  CHECK_THROWS_AS(loss_nf2(s, "A", "q", "B", 0.05), DataError);
}

TEST_CASE("loss_nf2 with a zero translation equals loss_nf1") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2), r(0, 1);
  for (int i = 0; i < 200; ++i) {
    auto s = SpaceBuilder().ball("A", {u(rng), u(rng)}, r(rng)).ball("B", {u(rng), u(rng)}, r(rng)).rel("r", {0, 0}).s;
    double eps = r(rng);
    CHECK(loss_nf2(s, "A", "r", "B", eps) == loss_nf1(s, "A", "B", eps));
  }
}

TEST_CASE("loss_nf3 examples") {
  auto s = SpaceBuilder().ball("A", {1, 0}, 0).ball("B", {0, 0}, 0).rel("r", {1, 0}).s;
  CHECK(loss_nf3(s, "r", "A", "B", 0) == doctest::Approx(1.0));
  s = SpaceBuilder().ball("A", {0, 1}, 0.1).ball("B", {0, 1}, 0.1).rel("r", {0, 0}).s;
  CHECK(loss_nf3(s, "r", "A", "B", 0) == 0.0);
  s = SpaceBuilder().ball("A", {1, 0}, 0.25).ball("B", {-1, 0}, 0.25).rel("r", {0, 0}).s;
  CHECK(loss_nf3(s, "r", "A", "B", 0.1) == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("loss_nf4 examples") {
  auto s = SpaceBuilder().ball("A", {0.6, 0.8}, 0.3).ball("B", {0.6, 0.8}, 0.3).ball("C", {0.6, 0.8}, 0.3).s;
  CHECK(loss_nf4(s, "A", "B", "C", 0) == doctest::Approx(0.0).epsilon(1e-15));
  s = SpaceBuilder().ball("A", {1, 0}, 0.5).ball("B", {-1, 0}, 0.5).ball("C", {0, 1}, 0.5).s;
  CHECK(loss_nf4(s, "A", "B", "C", 0) == doctest::Approx(2.828427).epsilon(1e-6));
  CHECK(loss_nf4(s, "A", "B", "C", 0) == doctest::Approx(1.0 + 2 * (std::sqrt(2.0) - 0.5)).epsilon(1e-12));
}

TEST_CASE("loss_disjoint examples") {
  auto s = SpaceBuilder().ball("A", {1, 0}, 0.5).ball("B", {-1, 0}, 0.5).s;
  CHECK(loss_disjoint(s, "A", "B", 0.5) == 0.0);
  s = SpaceBuilder().ball("A", {0, 1}, 0.5).ball("B", {0, 1}, 0.5).s;
  CHECK(loss_disjoint(s, "A", "B", 0) == doctest::Approx(1.0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2), r(0, 1);
  for (int i = 0; i < 100; ++i) {
    auto t = SpaceBuilder().ball("A", {u(rng), u(rng)}, r(rng)).ball("B", {u(rng), u(rng)}, r(rng)).s;
    double eps = r(rng);
    CHECK(loss_disjoint(t, "A", "B", eps) == loss_disjoint(t, "B", "A", eps));
  }
}

TEST_CASE("loss_role examples") {
  auto s = SpaceBuilder().rel("r", {3, 4}).rel("t", {0, 0}).rel("u", {3, 4}).s;
  CHECK(loss_role(s, "r", "u") == 0.0);
  CHECK(loss_role(s, "r", "t") == doctest::Approx(5.0));
  CHECK(loss_role(s, "t", "r") == loss_role(s, "r", "t"));
}

TEST_CASE("loss_nf2_negative examples") {
  auto s = SpaceBuilder().ball("A", {1, 0}, 0.1).ball("B", {-1, 0}, 0.1).rel("r", {0, 0}).s;
  CHECK(loss_nf2_negative(s, "A", "r", "B", 0.1) == 0.0);
  s = SpaceBuilder().ball("A", {1, 0}, 0.1).ball("B", {0, 1}, 0.1).rel("r", {-1, 1}).s;
  CHECK(loss_nf2_negative(s, "A", "r", "B", 0.1) == doctest::Approx(0.3));
  // Rotating B' away from the translated center along the unit circle never increases the loss.
  double prev = loss_nf2_negative(s, "A", "r", "B", 0.1);
  for (double t = 0.0; t < 3.0; t += 0.05) {
    auto u = SpaceBuilder().ball("A", {1, 0}, 0.1).ball("B", {std::sin(t), std::cos(t)}, 0.1).rel("r", {-1, 1}).s;
    double cur = loss_nf2_negative(u, "A", "r", "B", 0.1);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("nf1 zero set") {
  std::mt19937_64 rng(3);
  const std::vector<std::vector<double>> units = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}, {0, -1, 0}};
  std::uniform_real_distribution<double> r(0, 1), scale(0.5, 1.5), eps_d(0, 0.5);
  std::size_t zeros = 0;
  for (int i = 0; i < 1000; ++i) {
    EmbeddingSpace s(3);
    std::vector<double> a = units[rng() % units.size()], b = units[rng() % units.size()];
    if (rng() % 4 == 0) a = oracle::lin(a, scale(rng), a, 0);
    if (rng() % 4 == 0) b = oracle::lin(b, scale(rng), b, 0);
    double ra = r(rng), rb = r(rng), eps = eps_d(rng);
    s.add_concept("A", a, ra);
    s.add_concept("B", b, rb);
    bool expect_zero = oracle::norm2(oracle::lin(a, 1, b, -1)) + ra - rb <= eps && oracle::norm2(a) == 1.0 &&
                       oracle::norm2(b) == 1.0;
    double loss = loss_nf1(s, "A", "B", eps);
    CHECK((loss == 0.0) == expect_zero);
    CHECK(loss >= 0.0);
    zeros += expect_zero;
  }
  CHECK(zeros > 50);
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(4);
  for (LossKind k : {LossKind::NF1, LossKind::NF2, LossKind::NF3, LossKind::NF4, LossKind::Disjoint, LossKind::Role,
                     LossKind::NF2Negative}) {
    for (int i = 0; i < 30; ++i) {
      oracle::ElProbe p = oracle::el_gradient_probe(k, rng);
      CHECK(p.gradient_error < 1e-4);
      CHECK(p.value_error < 1e-12);
    }
  }
}

TEST_CASE("binding and total loss") {
  NormalizedOntology n = normal(
      "Concept(A)\nConcept(B)\nConcept(C)\nSubClassOf(A B)\nSubClassOf(And(A C) Bottom)\nSubClassOf(C Bottom)");
  ElTrainConfig cfg;
  cfg.dim = 2;
  EmbeddingSpace s = initial_space(n, cfg);
  auto bound = bind_axioms(s, n);
  REQUIRE(bound.size() == 2);
  CHECK(bound[0].kind == LossKind::NF1);
  CHECK(bound[1].kind == LossKind::Disjoint);
  cfg.margin = 0.05;
  CHECK(total_loss(s, n, cfg) ==
        doctest::Approx(loss_nf1(s, "A", "B", 0.05) + loss_disjoint(s, "A", "C", 0.05)).epsilon(1e-14));

  NormalizedOntology empty;
  CHECK(total_loss(initial_space(empty, cfg), empty, cfg) == 0.0);

  NormalizedOntology single = normal("Concept(A)\nConcept(B)\nSubClassOf(A B)");
  EmbeddingSpace t = initial_space(single, cfg);
  CHECK(total_loss(t, single, cfg) == loss_nf1(t, "A", "B", cfg.margin));
}

TEST_CASE("negatives follow every NF2 and avoid the true filler") {
  NormalizedOntology n = normal(
      "Concept(A)\nConcept(B)\nConcept(C)\nConcept(D)\nRelation(r)\nSubClassOf(A Some(r B))\nSubClassOf(C D)");
  ElTrainConfig cfg;
  cfg.dim = 3;
  cfg.negatives = 3;
  EmbeddingSpace s = initial_space(n, cfg);
  auto all = with_negatives(s, bind_axioms(s, n), cfg);
  REQUIRE(all.size() == 5);
  CHECK(all[0].kind == LossKind::NF2);
  for (int i = 1; i <= 3; ++i) {
    CHECK(all[i].kind == LossKind::NF2Negative);
    CHECK(all[i].a == all[0].a);
    CHECK(all[i].b != all[0].b);
  }
  CHECK(total_loss(s, n, cfg) == total_loss(s, n, cfg));
}

TEST_CASE("initial space") {
  NormalizedOntology n = normal("Concept(A)\nRelation(r)\nIndividual(a)\nInstance(a Some(r A))");
  ElTrainConfig cfg;
  cfg.dim = 4;
  EmbeddingSpace s = initial_space(n, cfg);
  CHECK(s.dim() == 4);
  for (const auto& c : n.concepts) REQUIRE(s.find_concept(c).has_value());
  REQUIRE(s.find_relation("r").has_value());
  Ball A = s.ball("A");
  CHECK(oracle::norm2(A.center) == doctest::Approx(1.0));
  CHECK(A.radius == 0.1);
  CHECK(s.ball("IND_a").radius == cfg.gamma_min);
  for (double x : s.relation(*s.find_relation("r"))) CHECK(std::abs(x) <= 0.1);
  CHECK(initial_space(n, cfg) == s);
}

TEST_CASE("toy chain converges to nested balls") {
  NormalizedOntology n = normal("Concept(A)\nConcept(B)\nConcept(C)\nSubClassOf(A B)\nSubClassOf(B C)");
  ElTrainConfig cfg;
  cfg.dim = 5;
  cfg.epochs = 2000;
  ElTrainResult r = train_el(n, cfg);
  CHECK(r.final_loss < 0.01);
  CHECK(r.epoch_loss.size() == 2000);
  CHECK(containment_gap(r.space, "A", "B") <= cfg.margin + 0.05);
  CHECK(containment_gap(r.space, "B", "C") <= cfg.margin + 0.05);
  for (std::size_t i = 0; i < r.space.concept_count(); ++i) CHECK(r.space.radius(i) >= cfg.gamma_min);

  ElTrainResult again = train_el(n, cfg);
  CHECK(again.space == r.space);
  CHECK(again.final_loss == r.final_loss);
}

TEST_CASE("disjoint balls separate") {
  NormalizedOntology n = normal("Concept(A)\nConcept(B)\nSubClassOf(And(A B) Bottom)");
  ElTrainConfig cfg;
  cfg.dim = 5;
  cfg.epochs = 2000;
  ElTrainResult r = train_el(n, cfg);
  CHECK(r.final_loss < 0.01);
  Ball A = r.space.ball("A"), B = r.space.ball("B");
  CHECK(oracle::norm2(oracle::lin(A.center, 1, B.center, -1)) >= A.radius + B.radius - 1e-6);
}

TEST_CASE("nominal radii stay frozen") {
  NormalizedOntology n = normal("Concept(A)\nIndividual(a)\nInstance(a A)");
  ElTrainConfig cfg;
  cfg.dim = 3;
  cfg.epochs = 50;
  ElTrainResult r = train_el(n, cfg);
  CHECK(r.space.ball("IND_a").radius == cfg.gamma_min);
}

TEST_CASE("empty ontology trains to an empty space") {
  ElTrainConfig cfg;
  cfg.epochs = 3;
  ElTrainResult r = train_el(NormalizedOntology{}, cfg);
  CHECK(r.space.concept_count() == 0);
  CHECK(r.final_loss == 0.0);
}

TEST_CASE("divergence is reported") {
  NormalizedOntology n = normal("Concept(A)\nConcept(B)\nSubClassOf(A B)");
  ElTrainConfig cfg;
  cfg.dim = 2;
  cfg.learning_rate = 1e308;
  cfg.epochs = 20;
  CHECK_THROWS_AS(train_el(n, cfg), NumericalError);
}

TEST_CASE("config validation") {
  ElTrainConfig cfg;
  CHECK_NOTHROW(cfg.check());
  cfg.dim = 0;
  CHECK_THROWS_AS(cfg.check(), UsageError);
  cfg = {};
  cfg.margin = -1;
  CHECK_THROWS_AS(cfg.check(), UsageError);
  cfg = {};
  cfg.gamma_min = 0;
  CHECK_THROWS_AS(cfg.check(), UsageError);
}

TEST_CASE("export and import") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    EmbeddingSpace s = oracle::random_space(rng, rng() % 5, rng() % 3, 1 + rng() % 4);
    CHECK(import_space(export_space(s)) == s);
  }
  auto s = SpaceBuilder().ball("A", {1, 0}, 0.5).rel("r", {0.25, -1}).s;
  std::string text = export_space(s);
  CHECK(text == "#dim\t2\nC\tA\t1,0\t0.5\nR\tr\t0.25,-1\n");
  CHECK_THROWS_WITH_AS(import_space("#dim\t2\nC\tA\t1,0\n"), doctest::Contains("line 2"), DataError);
  CHECK_THROWS_AS(import_space("#dim\t2\nC\tA\t1,0,3\t0.5\n"), DataError);
  CHECK_THROWS_AS(import_space("C\tA\t1,0\t0.5\n"), DataError);
}

TEST_CASE("trained space survives a round trip with the same loss") {
  NormalizedOntology n = normal(
      "Concept(A)\nConcept(B)\nConcept(C)\nRelation(r)\nSubClassOf(A Some(r B))\nSubClassOf(B C)");
  ElTrainConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 100;
  ElTrainResult r = train_el(n, cfg);
  EmbeddingSpace back = import_space(export_space(r.space));
  CHECK(back == r.space);
  CHECK(total_loss(back, n, cfg) == r.final_loss);
}

}  // TEST_SUITE
