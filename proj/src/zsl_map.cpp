#include "ozsl/zsl_map.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ozsl/error.hpp"
#include "ozsl/io_util.hpp"
#include "ozsl/kernels.hpp"

namespace ozsl {

std::string to_string(EncodingComponent c) {
  switch (c) {
    case EncodingComponent::ElCenter: return "el_center";
    case EncodingComponent::Word: return "word";
    case EncodingComponent::Attribute: return "attribute";
  }
  return "?";
}

EncodingComponent parse_component(std::string_view s) {
  if (s == "el_center" || s == "el" || s == "EL_CENTER") return EncodingComponent::ElCenter;
  if (s == "word" || s == "w2v" || s == "WORD") return EncodingComponent::Word;
  if (s == "attribute" || s == "attr" || s == "ATTRIBUTE") return EncodingComponent::Attribute;
  throw UsageError("unknown encoding component '" + std::string(s) + "'");
}

std::vector<EncodingComponent> parse_components(std::string_view s) {
  std::vector<EncodingComponent> out;
  for (auto part : split(s, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    auto c = parse_component(part);
    if (std::find(out.begin(), out.end(), c) != out.end())
      throw UsageError("encoding component '" + std::string(part) + "' listed twice");
    out.push_back(c);
  }
  if (out.empty()) throw UsageError("encoding component list is empty");
  return out;
}

ClassMap read_class_map(std::string_view text) {
  ClassMap m;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    auto f = split(lines[i], '\t');
    std::string where = "class map line " + std::to_string(i + 1);
    if (f.size() != 2 || trim(f[0]).empty() || trim(f[1]).empty())
      throw DataError(where + ": expected 'label<TAB>concept'");
    if (!m.emplace(std::string(trim(f[0])), std::string(trim(f[1]))).second)
      throw DataError(where + ": label '" + std::string(trim(f[0])) + "' mapped twice");
  }
  return m;
}

std::string write_class_map(const ClassMap& m) {
  std::string out;
  for (const auto& [label, c] : m) out += label + "\t" + c + "\n";
  return out;
}

AttributeTable read_attributes(std::string_view text) {
  AttributeTable t;
  std::size_t width = 0;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    auto f = split(lines[i], '\t');
    std::string where = "attribute file line " + std::to_string(i + 1);
    if (f.size() != 2) throw DataError(where + ": expected 'label<TAB>a1,...,ak'");
    auto vals = parse_doubles(f[1], ',', where);
    if (vals.empty()) throw DataError(where + ": no values");
    if (width == 0) width = vals.size();
    if (vals.size() != width)
      throw DataError(where + ": " + std::to_string(vals.size()) + " values, expected " + std::to_string(width));
    std::string label(trim(f[0]));
    if (!t.emplace(label, Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()))).second)
      throw DataError(where + ": label '" + label + "' listed twice");
  }
  return t;
}

std::string write_attributes(const AttributeTable& t) {
  std::string out;
  for (const auto& [label, v] : t)
    out += label + "\t" + join_doubles(v.data(), static_cast<std::size_t>(v.size()), ',') + "\n";
  return out;
}

std::size_t EncodingTable::dim() const {
  std::size_t m = 0;
  for (auto d : component_dims) m += d;
  return m;
}

const Eigen::VectorXd& EncodingTable::at(std::string_view label) const {
  auto it = encodings.find(label);
  if (it == encodings.end()) throw DataError("no encoding for label '" + std::string(label) + "'");
  return it->second;
}

namespace {

void normalize_segment(Eigen::VectorXd& z, std::size_t offset, std::size_t len) {
  auto seg = z.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(len));
  double n = seg.norm();
  if (n > 0.0) seg /= n;
}

Eigen::VectorXd component_vector(EncodingComponent c, const std::string& label, const EncodeSources& src,
                                 const EncodeOptions& opts) {
  auto concept_of = [&]() -> const std::string* {
    if (!src.class_map) return nullptr;
    auto it = src.class_map->find(label);
    return it == src.class_map->end() ? nullptr : &it->second;
  };
  switch (c) {
    case EncodingComponent::ElCenter: {
      if (!src.space) throw UsageError("EL_CENTER encoding requires an embedding space");
      const std::string* concept_name = concept_of();
      if (!concept_name) throw DataError("missing concept mapping for label '" + label + "'");
      auto idx = src.space->find_concept(*concept_name);
      if (!idx)
        throw DataError("label '" + label + "' maps to concept '" + *concept_name + "' which has no embedding");
      auto center = src.space->center(*idx);
      Eigen::VectorXd v(static_cast<Eigen::Index>(center.size() + (opts.include_radius ? 1 : 0)));
      for (std::size_t k = 0; k < center.size(); ++k) v[static_cast<Eigen::Index>(k)] = center[k];
      if (opts.include_radius) v[v.size() - 1] = src.space->radius(*idx);
      return v;
    }
    case EncodingComponent::Word: {
      if (!src.words) throw UsageError("WORD encoding requires word vectors");
      static const Ontology empty;
      const Ontology& o = src.ontology ? *src.ontology : empty;
      const std::string* concept_name = concept_of();
      try {
        return word_encoding(concept_name ? *concept_name : label, *src.words, o);
      } catch (const DataError& e) {
        throw DataError("out-of-vocabulary label '" + label + "': " + e.what());
      }
    }
    case EncodingComponent::Attribute: {
      if (!src.attributes) throw UsageError("ATTRIBUTE encoding requires an attribute table");
      auto it = src.attributes->find(label);
      if (it == src.attributes->end()) throw DataError("missing attribute row for label '" + label + "'");
      return it->second;
    }
  }
  throw UsageError("unknown encoding component");
}

}  // namespace

EncodingTable encode_labels(const std::vector<std::string>& labels, const EncodeSources& src,
                            const std::vector<EncodingComponent>& components, const EncodeOptions& opts) {
  if (components.empty()) throw UsageError("encoding component list is empty");
  EncodingTable t;
  t.components = components;
  t.component_dims.assign(components.size(), 0);
  for (const auto& label : labels) {
    if (t.encodings.count(label)) continue;
    std::vector<Eigen::VectorXd> parts;
    for (std::size_t c = 0; c < components.size(); ++c) {
      parts.push_back(component_vector(components[c], label, src, opts));
      std::size_t d = static_cast<std::size_t>(parts.back().size());
      if (t.encodings.empty() && c < t.component_dims.size() && t.component_dims[c] == 0) t.component_dims[c] = d;
      if (d != t.component_dims[c])
        throw DataError("label '" + label + "': " + to_string(components[c]) + " component has dimension " +
                        std::to_string(d) + ", expected " + std::to_string(t.component_dims[c]));
    }
    Eigen::VectorXd z(static_cast<Eigen::Index>(t.dim()));
    std::size_t offset = 0;
    for (std::size_t c = 0; c < parts.size(); ++c) {
      z.segment(static_cast<Eigen::Index>(offset), parts[c].size()) = parts[c];
      if (opts.normalize_components) normalize_segment(z, offset, t.component_dims[c]);
      offset += t.component_dims[c];
    }
    t.encodings.emplace(label, std::move(z));
  }
  return t;
}

EncodingTable random_encodings(const EncodingTable& table, std::uint64_t seed, bool normalize_components) {
  EncodingTable t = table;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& [label, z] : t.encodings) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gauss(rng);
    if (!normalize_components) continue;
    std::size_t offset = 0;
    for (auto d : t.component_dims) {
      normalize_segment(z, offset, d);
      offset += d;
    }
  }
  return t;
}

std::string write_encodings(const EncodingTable& t) {
  std::string out = "#components\t";
  for (std::size_t c = 0; c < t.components.size(); ++c) {
    if (c) out += ',';
    out += to_string(t.components[c]) + ":" + std::to_string(t.component_dims[c]);
  }
  out += "\n";
  for (const auto& [label, z] : t.encodings)
    out += label + "\t" + join_doubles(z.data(), static_cast<std::size_t>(z.size()), ',') + "\n";
  return out;
}

EncodingTable read_encodings(std::string_view text) {
  auto lines = lines_of(text);
  if (lines.empty()) throw DataError("encoding file line 1: missing '#components' header");
  auto head = split(lines[0], '\t');
  if (head.size() != 2 || head[0] != "#components")
    throw DataError("encoding file line 1: expected '#components<TAB>name:dim,...'");
  EncodingTable t;
  for (auto part : split(head[1], ',')) {
    auto kv = split(part, ':');
    if (kv.size() != 2) throw DataError("encoding file line 1: malformed component '" + std::string(part) + "'");
    try {
      t.components.push_back(parse_component(kv[0]));
    } catch (const UsageError& e) {
      throw DataError(std::string("encoding file line 1: ") + e.what());
    }
    long long d = parse_int(kv[1], "encoding file line 1");
    if (d <= 0) throw DataError("encoding file line 1: component dimension must be positive");
    t.component_dims.push_back(static_cast<std::size_t>(d));
  }
  const std::size_t m = t.dim();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::string where = "encoding file line " + std::to_string(i + 1);
    auto f = split(lines[i], '\t');
    if (f.size() != 2) throw DataError(where + ": expected 'label<TAB>values'");
    auto vals = parse_doubles(f[1], ',', where);
    if (vals.size() != m)
      throw DataError(where + ": " + std::to_string(vals.size()) + " values, expected " + std::to_string(m));
    if (!t.encodings.emplace(std::string(f[0]), Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(m)))
             .second)
      throw DataError(where + ": label '" + std::string(f[0]) + "' listed twice");
  }
  return t;
}

namespace {

void check_sae_shapes(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z) {
  if (X.cols() != Z.cols())
    throw DataError("feature matrix has " + std::to_string(X.cols()) + " columns, encoding matrix " +
                    std::to_string(Z.cols()));
  if (W.rows() != Z.rows() || W.cols() != X.rows())
    throw DataError("mapper is " + std::to_string(W.rows()) + "x" + std::to_string(W.cols()) + ", expected " +
                    std::to_string(Z.rows()) + "x" + std::to_string(X.rows()));
}

double largest_eigenvalue(const Eigen::MatrixXd& S) {
  if (S.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

}  // namespace

double sae_loss(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, double lambda) {
  check_sae_shapes(W, X, Z);
  return (X - W.transpose() * Z).squaredNorm() + lambda * (W * X - Z).squaredNorm();
}

Eigen::MatrixXd sae_gradient(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z,
                             double lambda) {
  check_sae_shapes(W, X, Z);
  return -2.0 * Z * (X - W.transpose() * Z).transpose() + 2.0 * lambda * (W * X - Z) * X.transpose();
}

SaeModel train_sae(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, const SaeConfig& cfg,
                   const Eigen::MatrixXd* init) {
  if (!(cfg.lambda >= 0.0)) throw UsageError("SAE lambda must be non-negative");
  if (X.cols() != Z.cols())
    throw DataError("feature matrix has " + std::to_string(X.cols()) + " columns, encoding matrix " +
                    std::to_string(Z.cols()));
  if (X.cols() == 0) throw DataError("no training samples");

  SaeModel model;
  model.lambda = cfg.lambda;
  if (init) {
    model.W = *init;
  } else {
    model.W.resize(Z.rows(), X.rows());
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, cfg.init_scale);
    for (Eigen::Index j = 0; j < model.W.cols(); ++j)
      for (Eigen::Index i = 0; i < model.W.rows(); ++i) model.W(i, j) = gauss(rng);
  }
  check_sae_shapes(model.W, X, Z);

  const Eigen::MatrixXd ZZt = Z * Z.transpose();
  const Eigen::MatrixXd XXt = X * X.transpose();
  const Eigen::MatrixXd ZXt = Z * X.transpose();
  const double L = 2.0 * (largest_eigenvalue(ZZt) + cfg.lambda * largest_eigenvalue(XXt));
  const double c0 = X.squaredNorm() + cfg.lambda * Z.squaredNorm();

  // With the Gram matrices precomputed the loss and gradient cost O(m p (m + p))
  // per iteration instead of O(m p N).
  auto loss_of = [&](const Eigen::MatrixXd& W) {
    double cross = (W.cwiseProduct(ZXt)).sum();
    return c0 - 2.0 * (1.0 + cfg.lambda) * cross + (W.transpose() * ZZt).cwiseProduct(W.transpose()).sum() +
           cfg.lambda * (W * XXt).cwiseProduct(W).sum();
  };
  auto grad_of = [&](const Eigen::MatrixXd& W) {
    return Eigen::MatrixXd(2.0 * (ZZt * W + cfg.lambda * W * XXt - (1.0 + cfg.lambda) * ZXt));
  };

  double loss = loss_of(model.W);
  if (!std::isfinite(loss)) throw NumericalError("SAE loss is not finite at initialization");
  if (L > 0.0) {
    const double step = 1.0 / L;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
      Eigen::MatrixXd G = grad_of(model.W);
      if (G.squaredNorm() == 0.0) break;
      model.W -= step * G;
      double next = loss_of(model.W);
      ++model.iterations;
      if (!std::isfinite(next)) throw NumericalError("SAE diverged at iteration " + std::to_string(it + 1));
      double improvement = loss - next;
      loss = next;
      if (improvement <= cfg.tol * std::max(std::abs(loss + improvement), 1e-300)) break;
    }
  }
  // Recompute directly; the expanded form can lose a few digits near zero.
  model.train_loss = std::max(0.0, sae_loss(model.W, X, Z, cfg.lambda));
  if (!model.W.allFinite()) throw NumericalError("SAE produced non-finite weights");
  return model;
}

Eigen::MatrixXd train_ridge(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, double alpha) {
  if (!(alpha > 0.0)) throw UsageError("ridge alpha must be positive");
  if (X.cols() != Z.cols())
    throw DataError("feature matrix has " + std::to_string(X.cols()) + " columns, encoding matrix " +
                    std::to_string(Z.cols()));
  Eigen::MatrixXd S = X * X.transpose();
  S.diagonal().array() += alpha;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success) throw NumericalError("ridge system could not be factorized");
  // W S = Z Xᵀ with S symmetric, so Wᵀ = S⁻¹ X Zᵀ.
  Eigen::MatrixXd W = ldlt.solve(X * Z.transpose()).transpose();
  if (!W.allFinite()) throw NumericalError("ridge solution is not finite");
  return W;
}

Eigen::VectorXd map_features(const LinearMapper& model, const Eigen::VectorXd& x) {
  if (x.size() != model.W.cols())
    throw DataError("feature vector has dimension " + std::to_string(x.size()) + ", mapper expects " +
                    std::to_string(model.W.cols()));
  return model.W * x;
}

std::string write_mapper(const LinearMapper& m) {
  std::string out = "#ozsl-linear-map\n";
  out += std::string("kind ") + (m.kind == MapperKind::Sae ? "sae" : "ridge") + "\n";
  out += "parameter " + format_double(m.parameter) + "\n";
  out += "train_loss " + format_double(m.train_loss) + "\n";
  out += "shape " + std::to_string(m.W.rows()) + " " + std::to_string(m.W.cols()) + "\n";
  std::vector<double> row(static_cast<std::size_t>(m.W.cols()));
  for (Eigen::Index i = 0; i < m.W.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.W.cols(); ++j) row[static_cast<std::size_t>(j)] = m.W(i, j);
    out += join_doubles(row.data(), row.size(), ' ') + "\n";
  }
  return out;
}

LinearMapper read_mapper(std::string_view text) {
  auto lines = lines_of(text);
  auto field = [&](std::size_t i, std::string_view key) {
    std::string where = "model file line " + std::to_string(i + 1);
    if (i >= lines.size()) throw DataError(where + ": missing '" + std::string(key) + "'");
    auto f = split_whitespace(lines[i]);
    if (f.empty() || f[0] != key) throw DataError(where + ": expected '" + std::string(key) + "'");
    return f;
  };
  if (lines.empty() || trim(lines[0]) != "#ozsl-linear-map")
    throw DataError("model file line 1: missing '#ozsl-linear-map' header");
  LinearMapper m;
  auto kind = field(1, "kind");
  if (kind.size() != 2 || (kind[1] != "sae" && kind[1] != "ridge"))
    throw DataError("model file line 2: kind must be 'sae' or 'ridge'");
  m.kind = kind[1] == "sae" ? MapperKind::Sae : MapperKind::Ridge;
  auto param = field(2, "parameter");
  if (param.size() != 2) throw DataError("model file line 3: expected one value");
  m.parameter = parse_double(param[1], "model file line 3");
  auto loss = field(3, "train_loss");
  if (loss.size() != 2) throw DataError("model file line 4: expected one value");
  m.train_loss = parse_double(loss[1], "model file line 4");
  auto shape = field(4, "shape");
  if (shape.size() != 3) throw DataError("model file line 5: expected 'shape rows cols'");
  long long rows = parse_int(shape[1], "model file line 5");
  long long cols = parse_int(shape[2], "model file line 5");
  if (rows <= 0 || cols <= 0) throw DataError("model file line 5: shape must be positive");
  m.W.resize(rows, cols);
  long long r = 0;
  for (std::size_t i = 5; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::string where = "model file line " + std::to_string(i + 1);
    if (r >= rows) throw DataError(where + ": more rows than the declared shape");
    auto vals = split_whitespace(lines[i]);
    if (static_cast<long long>(vals.size()) != cols)
      throw DataError(where + ": " + std::to_string(vals.size()) + " values, expected " + std::to_string(cols));
    for (long long j = 0; j < cols; ++j) m.W(r, j) = parse_double(vals[static_cast<std::size_t>(j)], where);
    ++r;
  }
  if (r != rows) throw DataError("model file: " + std::to_string(r) + " rows, expected " + std::to_string(rows));
  return m;
}

DistanceKind parse_distance(std::string_view s) {
  if (s == "l2" || s == "L2") return DistanceKind::L2;
  if (s == "cosine") return DistanceKind::Cosine;
  throw UsageError("unknown distance '" + std::string(s) + "' (expected l2 or cosine)");
}

CandidateMode parse_candidates(std::string_view s) {
  if (s == "unseen" || s == "UNSEEN_ONLY") return CandidateMode::UnseenOnly;
  if (s == "all" || s == "SEEN_AND_UNSEEN") return CandidateMode::SeenAndUnseen;
  throw UsageError("unknown candidate mode '" + std::string(s) + "' (expected unseen or all)");
}

std::string to_string(DistanceKind d) { return d == DistanceKind::L2 ? "l2" : "cosine"; }
std::string to_string(CandidateMode c) { return c == CandidateMode::UnseenOnly ? "unseen" : "all"; }

double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, DistanceKind kind) {
  if (a.size() != b.size())
    throw DataError("distance between vectors of dimension " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  if (kind == DistanceKind::Cosine && (a.isZero(0.0) || b.isZero(0.0)))
    throw DataError("cosine distance with a zero vector");
  return kernels::raw_distance(a.data(), b.data(), static_cast<std::size_t>(a.size()), kind);
}

std::vector<std::string> candidate_labels(const std::vector<std::string>& seen, const std::vector<std::string>& unseen,
                                          CandidateMode mode) {
  std::set<std::string> out(unseen.begin(), unseen.end());
  if (mode == CandidateMode::SeenAndUnseen) out.insert(seen.begin(), seen.end());
  return {out.begin(), out.end()};
}

std::string predict(const Eigen::VectorXd& gx, const EncodingTable& table, const std::vector<std::string>& candidates,
                    DistanceKind kind) {
  if (candidates.empty()) throw DataError("empty candidate set");
  std::vector<std::string> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const Eigen::Index m = gx.size();
  Eigen::MatrixXd C(m, static_cast<Eigen::Index>(sorted.size()));
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    const auto& z = table.at(sorted[j]);
    if (z.size() != m)
      throw DataError("encoding of '" + sorted[j] + "' has dimension " + std::to_string(z.size()) +
                      ", mapped feature has " + std::to_string(m));
    C.col(static_cast<Eigen::Index>(j)) = z;
  }
  return sorted[kernels::serial::nearest(gx, C, kind).front()];
}

}  // namespace ozsl
