#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ozsl/el_embed.hpp"
#include "ozsl/error.hpp"

namespace ozsl {

EmbeddingSpace initial_space(const NormalizedOntology& n, const ElTrainConfig& cfg) {
  cfg.check();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> small(-0.1, 0.1);
  EmbeddingSpace s(cfg.dim);
  std::vector<double> v(cfg.dim);
  for (const auto& name : n.concepts) {
    double norm = 0.0;
    do {
      for (auto& x : v) x = gauss(rng);
      norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    } while (norm < 1e-12);
    for (auto& x : v) x /= norm;
    double radius = n.is_nominal_concept(name) ? cfg.gamma_min : std::max(0.1, cfg.gamma_min);
    s.add_concept(name, v, radius);
  }
  for (const auto& name : n.relations) {
    for (auto& x : v) x = small(rng);
    s.add_relation(name, v);
  }
  return s;
}

ElTrainResult train_el(const NormalizedOntology& n, const ElTrainConfig& cfg) {
  cfg.check();
  ElTrainResult result{initial_space(n, cfg), 0.0, {}};
  EmbeddingSpace& s = result.space;
  const std::size_t dim = s.dim();

  std::vector<char> frozen(s.concept_count(), 0);
  for (std::size_t i = 0; i < s.concept_count(); ++i) frozen[i] = n.is_nominal_concept(s.concept_name(i));

  const std::vector<BoundAxiom> axioms = bind_axioms(s, n);
  // Training stream is seeded apart from the initialization and from total_loss.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(axioms.size());
  std::iota(order.begin(), order.end(), 0);

  Gradient grad(s);
  std::vector<char> touched_c(s.concept_count(), 0), touched_r(s.relation_count(), 0);
  std::vector<std::size_t> list_c, list_r;
  auto touch_c = [&](std::size_t i) {
    if (!touched_c[i]) {
      touched_c[i] = 1;
      list_c.push_back(i);
    }
  };
  auto touch_r = [&](std::size_t i) {
    if (!touched_r[i]) {
      touched_r[i] = 1;
      list_r.push_back(i);
    }
  };
  auto touch = [&](const BoundAxiom& ax) {
    if (ax.kind == LossKind::Role) {
      touch_r(ax.a);
      touch_r(ax.b);
      return;
    }
    touch_c(ax.a);
    touch_c(ax.b);
    if (ax.kind == LossKind::NF4) touch_c(ax.c);
    if (ax.kind == LossKind::NF2 || ax.kind == LossKind::NF3 || ax.kind == LossKind::NF2Negative) touch_r(ax.rel);
  };

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    // Linear decay lets the non-smooth norm penalties settle.
    const double progress = static_cast<double>(epoch) / static_cast<double>(cfg.epochs);
    const double lr = cfg.learning_rate * std::max(1e-3, 1.0 - progress);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++step) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const BoundAxiom& ax = axioms[order[k]];
        batch_loss += axiom_loss(s, ax, cfg.margin, &grad);
        touch(ax);
        if (ax.kind != LossKind::NF2) continue;
        for (std::size_t j = 0; j < cfg.negatives; ++j) {
          auto neg = detail::draw_negative(s.concept_count(), ax.b, rng);
          if (!neg) break;
          BoundAxiom corrupt{LossKind::NF2Negative, ax.a, *neg, 0, ax.rel};
          batch_loss += axiom_loss(s, corrupt, cfg.margin, &grad);
          touch(corrupt);
        }
      }
      if (!std::isfinite(batch_loss))
        throw NumericalError("EL embedding diverged: non-finite loss at step " + std::to_string(step) +
                             " (epoch " + std::to_string(epoch) + ")");
      epoch_loss += batch_loss;

      for (std::size_t i : list_c) {
        auto c = s.center(i);
        double* g = grad.centers.data() + i * dim;
        for (std::size_t d = 0; d < dim; ++d) {
          c[d] -= lr * g[d];
          g[d] = 0.0;
        }
        if (frozen[i]) {
          s.radius(i) = cfg.gamma_min;
        } else {
          s.radius(i) = std::max(cfg.gamma_min, s.radius(i) - lr * grad.radii[i]);
        }
        grad.radii[i] = 0.0;
        touched_c[i] = 0;
      }
      for (std::size_t i : list_r) {
        auto r = s.relation(i);
        double* g = grad.relations.data() + i * dim;
        for (std::size_t d = 0; d < dim; ++d) {
          r[d] -= lr * g[d];
          g[d] = 0.0;
        }
        touched_r[i] = 0;
      }
      list_c.clear();
      list_r.clear();
    }
    result.epoch_loss.push_back(epoch_loss);
  }

  result.final_loss = total_loss(s, n, cfg);
  if (!std::isfinite(result.final_loss))
    throw NumericalError("EL embedding diverged: non-finite final loss after step " + std::to_string(step));
  return result;
}

}  // namespace ozsl
