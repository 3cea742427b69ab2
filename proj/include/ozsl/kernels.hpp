#pragma once

// Data-parallel hot loops. `serial` is the reference; `omp` must produce
// bit-identical results (no cross-thread reductions).

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ozsl/el_embed.hpp"

namespace ozsl {
enum class DistanceKind;
}

namespace ozsl::kernels {

/// Scalar left-to-right distance used by every prediction path. Cosine
/// requires both norms to be non-zero; callers check beforehand.
double raw_distance(const double* a, const double* b, std::size_t m, DistanceKind kind);

namespace serial {

std::vector<double> axiom_losses(const EmbeddingSpace& s, std::span<const BoundAxiom> axioms, double eps);

/// For each column of `queries` (m×Q), the index of the nearest column of
/// `candidates` (m×C); ties resolve to the lowest index.
std::vector<std::size_t> nearest(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& candidates, DistanceKind kind);

}  // namespace serial

namespace omp {

std::vector<double> axiom_losses(const EmbeddingSpace& s, std::span<const BoundAxiom> axioms, double eps);
std::vector<std::size_t> nearest(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& candidates, DistanceKind kind);

}  // namespace omp

}  // namespace ozsl::kernels
