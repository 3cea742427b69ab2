#include "ozsl/kernels.hpp"

#include <cmath>

#include "ozsl/error.hpp"
#include "ozsl/zsl_map.hpp"

namespace ozsl::kernels {

double raw_distance(const double* a, const double* b, std::size_t m, DistanceKind kind) {
  if (kind == DistanceKind::L2) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      double d = a[k] - b[k];
      s += d * d;
    }
    return std::sqrt(s);
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

void check_nearest(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& candidates, DistanceKind kind) {
  if (candidates.cols() == 0) throw DataError("empty candidate set");
  if (queries.rows() != candidates.rows())
    throw DataError("queries have dimension " + std::to_string(queries.rows()) + ", candidates " +
                    std::to_string(candidates.rows()));
  if (kind != DistanceKind::Cosine) return;
  for (Eigen::Index j = 0; j < candidates.cols(); ++j)
    if (candidates.col(j).isZero(0.0)) throw DataError("cosine distance with a zero candidate encoding");
  for (Eigen::Index j = 0; j < queries.cols(); ++j)
    if (queries.col(j).isZero(0.0)) throw DataError("cosine distance with a zero mapped feature vector");
}

std::size_t nearest_one(const Eigen::MatrixXd& queries, Eigen::Index q, const Eigen::MatrixXd& candidates,
                        DistanceKind kind) {
  const auto m = static_cast<std::size_t>(queries.rows());
  const double* x = queries.data() + q * queries.rows();
  std::size_t best = 0;
  double best_d = raw_distance(x, candidates.data(), m, kind);
  for (Eigen::Index j = 1; j < candidates.cols(); ++j) {
    double d = raw_distance(x, candidates.data() + j * candidates.rows(), m, kind);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(j);
    }
  }
  return best;
}

}  // namespace

namespace serial {

std::vector<double> axiom_losses(const EmbeddingSpace& s, std::span<const BoundAxiom> axioms, double eps) {
  std::vector<double> out(axioms.size());
  for (std::size_t i = 0; i < axioms.size(); ++i) out[i] = axiom_loss(s, axioms[i], eps);
  return out;
}

std::vector<std::size_t> nearest(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& candidates,
                                 DistanceKind kind) {
  check_nearest(queries, candidates, kind);
  std::vector<std::size_t> out(static_cast<std::size_t>(queries.cols()));
  for (Eigen::Index q = 0; q < queries.cols(); ++q) out[static_cast<std::size_t>(q)] = nearest_one(queries, q, candidates, kind);
  return out;
}

}  // namespace serial

namespace omp {

std::vector<double> axiom_losses(const EmbeddingSpace& s, std::span<const BoundAxiom> axioms, double eps) {
  std::vector<double> out(axioms.size());
  const auto n = static_cast<std::ptrdiff_t>(axioms.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = axiom_loss(s, axioms[static_cast<std::size_t>(i)], eps);
  return out;
}

std::vector<std::size_t> nearest(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& candidates,
                                 DistanceKind kind) {
  check_nearest(queries, candidates, kind);
  std::vector<std::size_t> out(static_cast<std::size_t>(queries.cols()));
  const auto n = static_cast<std::ptrdiff_t>(queries.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < n; ++q)
    out[static_cast<std::size_t>(q)] = nearest_one(queries, static_cast<Eigen::Index>(q), candidates, kind);
  return out;
}

}  // namespace omp

}  // namespace ozsl::kernels
