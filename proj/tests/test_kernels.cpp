#include <doctest.h>

#include <cstring>
#include <random>

#include "oracles.hpp"
#include "ozsl/error.hpp"
#include "ozsl/kernels.hpp"

using namespace ozsl;

namespace {

Eigen::MatrixXd grid_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::uniform_int_distribution<int> v(-3, 3);
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    do {
      for (Eigen::Index i = 0; i < r; ++i) M(i, j) = v(rng) * 0.5;
    } while (M.col(j).isZero(0.0));
  }
  return M;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("axiom losses: omp equals serial bit for bit") {
  std::mt19937_64 rng(1);
  NormalizedOntology n = normalize(parse_ontology(
      "Concept(A)\nConcept(B)\nConcept(C)\nConcept(D)\nRelation(r)\nRelation(s)\nSubClassOf(A B)\n"
      "SubClassOf(A Some(r C))\nSubClassOf(Some(s C) D)\nSubClassOf(And(A D) C)\nSubClassOf(And(B C) Bottom)\n"
      "SubRelationOf(r s)"));
  ElTrainConfig cfg;
  cfg.dim = 7;
  cfg.negatives = 2;
  EmbeddingSpace s = initial_space(n, cfg);
  auto axioms = with_negatives(s, bind_axioms(s, n), cfg);
  std::vector<BoundAxiom> many;
  for (int i = 0; i < 500; ++i) many.insert(many.end(), axioms.begin(), axioms.end());
  auto a = kernels::serial::axiom_losses(s, many, 0.1);
  auto b = kernels::omp::axiom_losses(s, many, 0.1);
  REQUIRE(a.size() == many.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  for (std::size_t i = 0; i < axioms.size(); ++i) CHECK(a[i] == axiom_loss(s, axioms[i], 0.1));
}

TEST_CASE("nearest: ties go to the lowest index and omp matches serial") {
  Eigen::MatrixXd cands(2, 3);
  cands << 1, 0, 1, 0, 1, 0;
  Eigen::MatrixXd q(2, 1);
  q << 0.5, 0.5;
  CHECK(kernels::serial::nearest(q, cands, DistanceKind::L2) == std::vector<std::size_t>{0});

  std::mt19937_64 rng(2);
  for (DistanceKind kind : {DistanceKind::L2, DistanceKind::Cosine}) {
    Eigen::MatrixXd Q = grid_matrix(rng, 3, 4000), C = grid_matrix(rng, 3, 9);
    auto a = kernels::serial::nearest(Q, C, kind);
    auto b = kernels::omp::nearest(Q, C, kind);
    CHECK(a == b);
    for (Eigen::Index j = 0; j < Q.cols(); j += 97) {
      std::size_t best = 0;
      for (Eigen::Index c = 1; c < C.cols(); ++c)
        if (oracle::scan_distance(C.col(c), Q.col(j), kind) < oracle::scan_distance(C.col(best), Q.col(j), kind))
          best = static_cast<std::size_t>(c);
      CHECK(a[static_cast<std::size_t>(j)] == best);
    }
  }
}

TEST_CASE("nearest: input checks") {
  Eigen::MatrixXd q = Eigen::MatrixXd::Ones(2, 1);
  CHECK_THROWS_AS(kernels::omp::nearest(q, Eigen::MatrixXd(2, 0), DistanceKind::L2), DataError);
  CHECK_THROWS_AS(kernels::omp::nearest(q, Eigen::MatrixXd::Ones(3, 2), DistanceKind::L2), DataError);
  CHECK_THROWS_AS(kernels::omp::nearest(q, Eigen::MatrixXd::Zero(2, 2), DistanceKind::Cosine), DataError);
  CHECK_THROWS_AS(kernels::serial::nearest(Eigen::MatrixXd::Zero(2, 1), q, DistanceKind::Cosine), DataError);
}

}  // TEST_SUITE
