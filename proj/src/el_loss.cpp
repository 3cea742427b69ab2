#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "ozsl/el_embed.hpp"
#include "ozsl/error.hpp"
#include "ozsl/kernels.hpp"

namespace ozsl {

std::size_t EmbeddingSpace::add_concept(std::string name, std::span<const double> center, double radius) {
  if (center.size() != dim_)
    throw DataError("concept '" + name + "': center has " + std::to_string(center.size()) +
                    " values, expected " + std::to_string(dim_));
  if (concept_index_.count(name)) throw DataError("duplicate concept '" + name + "' in embedding space");
  std::size_t i = concept_names_.size();
  concept_index_.emplace(name, i);
  concept_names_.push_back(std::move(name));
  centers_.insert(centers_.end(), center.begin(), center.end());
  radii_.push_back(radius);
  return i;
}

std::size_t EmbeddingSpace::add_relation(std::string name, std::span<const double> vec) {
  if (vec.size() != dim_)
    throw DataError("relation '" + name + "': vector has " + std::to_string(vec.size()) +
                    " values, expected " + std::to_string(dim_));
  if (relation_index_.count(name)) throw DataError("duplicate relation '" + name + "' in embedding space");
  std::size_t i = relation_names_.size();
  relation_index_.emplace(name, i);
  relation_names_.push_back(std::move(name));
  relations_.insert(relations_.end(), vec.begin(), vec.end());
  return i;
}

std::optional<std::size_t> EmbeddingSpace::find_concept(std::string_view name) const {
  auto it = concept_index_.find(std::string(name));
  if (it == concept_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> EmbeddingSpace::find_relation(std::string_view name) const {
  auto it = relation_index_.find(std::string(name));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingSpace::concept_index(std::string_view name) const {
  if (auto i = find_concept(name)) return *i;
  throw DataError("unknown concept '" + std::string(name) + "'");
}

std::size_t EmbeddingSpace::relation_index(std::string_view name) const {
  if (auto i = find_relation(name)) return *i;
  throw DataError("unknown relation '" + std::string(name) + "'");
}

Ball EmbeddingSpace::ball(std::string_view concept_name) const {
  std::size_t i = concept_index(concept_name);
  auto c = center(i);
  return Ball{{c.begin(), c.end()}, radius(i)};
}

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

bool EmbeddingSpace::operator==(const EmbeddingSpace& other) const {
  return dim_ == other.dim_ && concept_names_ == other.concept_names_ &&
         relation_names_ == other.relation_names_ && same_bits(centers_, other.centers_) &&
         same_bits(radii_, other.radii_) && same_bits(relations_, other.relations_);
}

void ElTrainConfig::check() const {
  if (dim == 0) throw UsageError("embedding dimension must be positive");
  if (!(margin >= 0.0)) throw UsageError("margin must be >= 0");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (batch_size == 0) throw UsageError("batch size must be positive");
  if (!(gamma_min > 0.0)) throw UsageError("gamma_min must be positive");
}

namespace {

// Accumulates d(loss)/d(params) for the terms of one axiom.
class Terms {
public:
  Terms(const EmbeddingSpace& s, Gradient* g) : s_(s), g_(g), n_(s.dim()), diff_(n_), unit_(n_) {}

  // |‖ν(C)‖ - 1|
  double penalty(std::size_t c) {
    auto v = s_.center(c);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    double dev = norm - 1.0;
    if (g_ && norm > 0.0 && dev != 0.0) {
      double k = (dev > 0 ? 1.0 : -1.0) / norm;
      double* gc = g_->centers.data() + c * n_;
      for (std::size_t i = 0; i < n_; ++i) gc[i] += k * v[i];
    }
    return std::abs(dev);
  }

  // ‖Σ sign_j · vec_j‖; sets unit_ to the normalized difference.
  double distance(std::initializer_list<std::pair<std::span<const double>, double>> parts) {
    std::fill(diff_.begin(), diff_.end(), 0.0);
    for (const auto& [v, sgn] : parts)
      for (std::size_t i = 0; i < n_; ++i) diff_[i] += sgn * v[i];
    double norm = 0.0;
    for (double x : diff_) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n_; ++i) unit_[i] = norm > 0.0 ? diff_[i] / norm : 0.0;
    return norm;
  }

  void center_grad(std::size_t c, double k) {
    if (!g_) return;
    double* gc = g_->centers.data() + c * n_;
    for (std::size_t i = 0; i < n_; ++i) gc[i] += k * unit_[i];
  }
  void relation_grad(std::size_t r, double k) {
    if (!g_) return;
    double* gr = g_->relations.data() + r * n_;
    for (std::size_t i = 0; i < n_; ++i) gr[i] += k * unit_[i];
  }
  void radius_grad(std::size_t c, double k) {
    if (g_) g_->radii[c] += k;
  }

private:
  const EmbeddingSpace& s_;
  Gradient* g_;
  std::size_t n_;
  std::vector<double> diff_;
  std::vector<double> unit_;
};

}  // namespace

double axiom_loss(const EmbeddingSpace& s, const BoundAxiom& ax, double eps, Gradient* grad) {
  Terms t(s, grad);
  switch (ax.kind) {
    case LossKind::NF1: {
      double h = t.distance({{s.center(ax.a), 1.0}, {s.center(ax.b), -1.0}}) + s.radius(ax.a) -
                 s.radius(ax.b) - eps;
      double loss = 0.0;
      if (h > 0) {
        loss = h;
        t.center_grad(ax.a, 1.0);
        t.center_grad(ax.b, -1.0);
        t.radius_grad(ax.a, 1.0);
        t.radius_grad(ax.b, -1.0);
      }
      return loss + t.penalty(ax.a) + t.penalty(ax.b);
    }
    case LossKind::NF2: {
      double h = t.distance({{s.center(ax.a), 1.0}, {s.relation(ax.rel), 1.0}, {s.center(ax.b), -1.0}}) +
                 s.radius(ax.a) - s.radius(ax.b) - eps;
      double loss = 0.0;
      if (h > 0) {
        loss = h;
        t.center_grad(ax.a, 1.0);
        t.relation_grad(ax.rel, 1.0);
        t.center_grad(ax.b, -1.0);
        t.radius_grad(ax.a, 1.0);
        t.radius_grad(ax.b, -1.0);
      }
      return loss + t.penalty(ax.a) + t.penalty(ax.b);
    }
    case LossKind::NF3: {
      double h = t.distance({{s.center(ax.a), 1.0}, {s.relation(ax.rel), -1.0}, {s.center(ax.b), -1.0}}) -
                 s.radius(ax.a) - s.radius(ax.b) - eps;
      double loss = 0.0;
      if (h > 0) {
        loss = h;
        t.center_grad(ax.a, 1.0);
        t.relation_grad(ax.rel, -1.0);
        t.center_grad(ax.b, -1.0);
        t.radius_grad(ax.a, -1.0);
        t.radius_grad(ax.b, -1.0);
      }
      return loss + t.penalty(ax.a) + t.penalty(ax.b);
    }
    case LossKind::NF4: {
      double loss = 0.0;
      double h1 = t.distance({{s.center(ax.a), 1.0}, {s.center(ax.b), -1.0}}) - s.radius(ax.a) -
                  s.radius(ax.b) - eps;
      if (h1 > 0) {
        loss += h1;
        t.center_grad(ax.a, 1.0);
        t.center_grad(ax.b, -1.0);
        t.radius_grad(ax.a, -1.0);
        t.radius_grad(ax.b, -1.0);
      }
      double h2 = t.distance({{s.center(ax.a), 1.0}, {s.center(ax.c), -1.0}}) - s.radius(ax.c) - eps;
      if (h2 > 0) {
        loss += h2;
        t.center_grad(ax.a, 1.0);
        t.center_grad(ax.c, -1.0);
        t.radius_grad(ax.c, -1.0);
      }
      double h3 = t.distance({{s.center(ax.b), 1.0}, {s.center(ax.c), -1.0}}) - s.radius(ax.c) - eps;
      if (h3 > 0) {
        loss += h3;
        t.center_grad(ax.b, 1.0);
        t.center_grad(ax.c, -1.0);
        t.radius_grad(ax.c, -1.0);
      }
      return loss + t.penalty(ax.a) + t.penalty(ax.b) + t.penalty(ax.c);
    }
    case LossKind::Disjoint: {
      double h = s.radius(ax.a) + s.radius(ax.b) - t.distance({{s.center(ax.a), 1.0}, {s.center(ax.b), -1.0}}) +
                 eps;
      double loss = 0.0;
      if (h > 0) {
        loss = h;
        t.center_grad(ax.a, -1.0);
        t.center_grad(ax.b, 1.0);
        t.radius_grad(ax.a, 1.0);
        t.radius_grad(ax.b, 1.0);
      }
      // Grouped so that swapping the arguments gives the same bits.
      return loss + (t.penalty(ax.a) + t.penalty(ax.b));
    }
    case LossKind::Role: {
      double d = t.distance({{s.relation(ax.a), 1.0}, {s.relation(ax.b), -1.0}});
      t.relation_grad(ax.a, 1.0);
      t.relation_grad(ax.b, -1.0);
      return d;
    }
    case LossKind::NF2Negative: {
      double h = s.radius(ax.a) + s.radius(ax.b) + eps -
                 t.distance({{s.center(ax.a), 1.0}, {s.relation(ax.rel), 1.0}, {s.center(ax.b), -1.0}});
      double loss = 0.0;
      if (h > 0) {
        loss = h;
        t.center_grad(ax.a, -1.0);
        t.relation_grad(ax.rel, -1.0);
        t.center_grad(ax.b, 1.0);
        t.radius_grad(ax.a, 1.0);
        t.radius_grad(ax.b, 1.0);
      }
      return loss + t.penalty(ax.a) + t.penalty(ax.b);
    }
  }
  return 0.0;
}

double loss_nf1(const EmbeddingSpace& s, std::string_view A, std::string_view B, double eps) {
  return axiom_loss(s, {LossKind::NF1, s.concept_index(A), s.concept_index(B)}, eps);
}

double loss_nf2(const EmbeddingSpace& s, std::string_view A, std::string_view r, std::string_view B, double eps) {
  return axiom_loss(s, {LossKind::NF2, s.concept_index(A), s.concept_index(B), 0, s.relation_index(r)}, eps);
}

double loss_nf3(const EmbeddingSpace& s, std::string_view r, std::string_view A, std::string_view B, double eps) {
  return axiom_loss(s, {LossKind::NF3, s.concept_index(A), s.concept_index(B), 0, s.relation_index(r)}, eps);
}

double loss_nf4(const EmbeddingSpace& s, std::string_view A, std::string_view B, std::string_view C, double eps) {
  if (C == kBottomName) return loss_disjoint(s, A, B, eps);
  return axiom_loss(s, {LossKind::NF4, s.concept_index(A), s.concept_index(B), s.concept_index(C)}, eps);
}

double loss_disjoint(const EmbeddingSpace& s, std::string_view A, std::string_view B, double eps) {
  return axiom_loss(s, {LossKind::Disjoint, s.concept_index(A), s.concept_index(B)}, eps);
}

double loss_role(const EmbeddingSpace& s, std::string_view r, std::string_view t) {
  return axiom_loss(s, {LossKind::Role, s.relation_index(r), s.relation_index(t)}, 0.0);
}

double loss_nf2_negative(const EmbeddingSpace& s, std::string_view A, std::string_view r, std::string_view B_neg,
                         double eps) {
  return axiom_loss(
      s, {LossKind::NF2Negative, s.concept_index(A), s.concept_index(B_neg), 0, s.relation_index(r)}, eps);
}

std::vector<BoundAxiom> bind_axioms(const EmbeddingSpace& s, const NormalizedOntology& n) {
  std::vector<BoundAxiom> out;
  out.reserve(n.axioms.size());
  auto bottom = [](const std::string& x) { return x == kBottomName; };
  for (const auto& ax : n.axioms) {
    switch (ax.form) {
      case NormalForm::NF1:
        // A ⊑ ⊥ has no satisfiable ball; it is left to the classifier.
        if (!bottom(ax.a) && !bottom(ax.b))
          out.push_back({LossKind::NF1, s.concept_index(ax.a), s.concept_index(ax.b)});
        break;
      case NormalForm::NF2:
        if (!bottom(ax.a) && !bottom(ax.c))
          out.push_back({LossKind::NF2, s.concept_index(ax.a), s.concept_index(ax.c), 0, s.relation_index(ax.b)});
        break;
      case NormalForm::NF3:
        if (!bottom(ax.b) && !bottom(ax.c))
          out.push_back({LossKind::NF3, s.concept_index(ax.b), s.concept_index(ax.c), 0, s.relation_index(ax.a)});
        break;
      case NormalForm::NF4:
        if (bottom(ax.c))
          out.push_back({LossKind::Disjoint, s.concept_index(ax.a), s.concept_index(ax.b)});
        else if (!bottom(ax.a) && !bottom(ax.b))
          out.push_back({LossKind::NF4, s.concept_index(ax.a), s.concept_index(ax.b), s.concept_index(ax.c)});
        break;
      case NormalForm::DISJ:
        out.push_back({LossKind::Disjoint, s.concept_index(ax.a), s.concept_index(ax.b)});
        break;
      case NormalForm::RSUB:
        out.push_back({LossKind::Role, s.relation_index(ax.a), s.relation_index(ax.b)});
        break;
    }
  }
  return out;
}

namespace detail {

// Corrupted filler for an NF2 axiom: uniform over concepts other than the true one.
std::optional<std::size_t> draw_negative(std::size_t concept_count, std::size_t truth, std::mt19937_64& rng) {
  if (concept_count < 2) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, concept_count - 2);
  std::size_t k = pick(rng);
  return k >= truth ? k + 1 : k;
}

}  // namespace detail

std::vector<BoundAxiom> with_negatives(const EmbeddingSpace& s, const std::vector<BoundAxiom>& axioms,
                                       const ElTrainConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<BoundAxiom> out;
  out.reserve(axioms.size() * (1 + cfg.negatives));
  for (const auto& ax : axioms) {
    out.push_back(ax);
    if (ax.kind != LossKind::NF2) continue;
    for (std::size_t k = 0; k < cfg.negatives; ++k) {
      if (auto neg = detail::draw_negative(s.concept_count(), ax.b, rng))
        out.push_back({LossKind::NF2Negative, ax.a, *neg, 0, ax.rel});
    }
  }
  return out;
}

double total_loss(const EmbeddingSpace& s, const NormalizedOntology& n, const ElTrainConfig& cfg) {
  auto bound = with_negatives(s, bind_axioms(s, n), cfg);
  auto losses = kernels::omp::axiom_losses(s, bound, cfg.margin);
  double total = 0.0;
  for (double l : losses) total += l;
  return total;
}

}  // namespace ozsl
