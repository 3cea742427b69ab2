// Serial vs OpenMP timings for the two data-parallel kernels.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "ozsl/kernels.hpp"
#include "ozsl/normalizer.hpp"
#include "ozsl/zsl_map.hpp"

using namespace ozsl;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double omp_ms, bool same) {
  std::printf("%-14s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", name, serial_ms, omp_ms,
              serial_ms / omp_ms, same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  std::string text = "Relation(r)\nRelation(s)\nSubRelationOf(r s)\n";
  for (int i = 0; i < 400; ++i) text += "Concept(C" + std::to_string(i) + ")\n";
  for (int i = 1; i < 400; ++i) {
    std::string a = "C" + std::to_string(i), b = "C" + std::to_string(i / 2), c = "C" + std::to_string((i * 7) % 400);
    text += "SubClassOf(" + a + " " + b + ")\nSubClassOf(" + a + " Some(r " + c + "))\n";
    text += "SubClassOf(Some(s " + b + ") " + c + ")\nSubClassOf(And(" + a + " " + c + ") " + b + ")\n";
  }
  NormalizedOntology n = normalize(parse_ontology(text));
  ElTrainConfig cfg;
  cfg.dim = 50;
  cfg.negatives = 4;
  EmbeddingSpace s = initial_space(n, cfg);
  auto bound = with_negatives(s, bind_axioms(s, n), cfg);
  std::vector<BoundAxiom> axioms;
  for (int i = 0; i < 50; ++i) axioms.insert(axioms.end(), bound.begin(), bound.end());

  std::vector<double> ls, lo;
  double ts = best_of(5, [&] { ls = kernels::serial::axiom_losses(s, axioms, 0.1); });
  double to = best_of(5, [&] { lo = kernels::omp::axiom_losses(s, axioms, 0.1); });
  report("axiom_losses", ts, to, ls == lo);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Eigen::MatrixXd Q(64, 20000), C(64, 200);
  for (Eigen::Index i = 0; i < Q.size(); ++i) Q.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < C.size(); ++i) C.data()[i] = g(rng);
  for (DistanceKind kind : {DistanceKind::L2, DistanceKind::Cosine}) {
    std::vector<std::size_t> ns, no;
    ts = best_of(5, [&] { ns = kernels::serial::nearest(Q, C, kind); });
    to = best_of(5, [&] { no = kernels::omp::nearest(Q, C, kind); });
    report(kind == DistanceKind::L2 ? "nearest/l2" : "nearest/cosine", ts, to, ns == no);
  }
}
