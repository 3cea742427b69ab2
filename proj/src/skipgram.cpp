#include <algorithm>
#include <cmath>
#include <random>

#include "ozsl/error.hpp"
#include "ozsl/text_walk.hpp"

namespace ozsl {

void SkipGramConfig::check() const {
  if (dim == 0) throw UsageError("word vector dimension must be positive");
  if (window == 0) throw UsageError("window must be positive");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (min_count == 0) throw UsageError("min count must be positive");
}

namespace {

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

}  // namespace

WordVectors train_skipgram(const WalkCorpus& corpus, const SkipGramConfig& cfg, const WordVectors* init,
                           std::vector<double>* epoch_loss) {
  cfg.check();
  if (init && init->size() > 0 && init->dim() != cfg.dim)
    throw DataError("pretrained vectors have dimension " + std::to_string(init->dim()) + ", expected " +
                    std::to_string(cfg.dim));

  std::vector<std::string> vocab;
  std::vector<double> counts;
  std::map<std::string, std::size_t, std::less<>> index;
  for (const auto& [tok, n] : corpus.vocabulary) {
    if (n < cfg.min_count) continue;
    index.emplace(tok, vocab.size());
    vocab.push_back(tok);
    counts.push_back(static_cast<double>(n));
  }
  if (vocab.empty()) throw DataError("empty vocabulary after min-count filtering");

  const std::size_t V = vocab.size();
  const std::size_t d = cfg.dim;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> init_dist(-0.5 / static_cast<double>(d), 0.5 / static_cast<double>(d));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> in(V * d), out(V * d, 0.0);
  for (std::size_t w = 0; w < V; ++w) {
    double* row = in.data() + w * d;
    if (init && init->contains(vocab[w])) {
      const auto& v = init->at(vocab[w]);
      for (std::size_t k = 0; k < d; ++k) row[k] = v[static_cast<Eigen::Index>(k)];
    } else {
      for (std::size_t k = 0; k < d; ++k) row[k] = init_dist(rng);
    }
  }

  // Unigram^0.75 noise distribution as a cumulative table.
  std::vector<double> cumulative(V);
  double acc = 0.0;
  for (std::size_t w = 0; w < V; ++w) {
    acc += std::pow(counts[w], 0.75);
    cumulative[w] = acc;
  }
  auto draw_noise = [&] {
    double u = unit(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), V - 1);
  };

  std::vector<std::vector<std::size_t>> sentences;
  std::size_t total_tokens = 0;
  for (const auto& s : corpus.sentences) {
    std::vector<std::size_t> ids;
    for (const auto& t : s) {
      auto it = index.find(t);
      if (it != index.end()) ids.push_back(it->second);
    }
    total_tokens += ids.size();
    if (ids.size() > 1) sentences.push_back(std::move(ids));
  }

  const double total_steps = static_cast<double>(std::max<std::size_t>(1, total_tokens * cfg.epochs));
  std::size_t processed = 0;
  std::vector<double> grad_in(d);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss = 0.0;
    std::size_t pairs = 0;
    for (const auto& s : sentences) {
      for (std::size_t i = 0; i < s.size(); ++i, ++processed) {
        const double lr = cfg.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed) / total_steps);
        const std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
        const std::size_t hi = std::min(s.size() - 1, i + cfg.window);
        double* center = in.data() + s[i] * d;
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          std::fill(grad_in.begin(), grad_in.end(), 0.0);
          for (std::size_t n = 0; n <= cfg.negatives; ++n) {
            std::size_t target;
            double label;
            if (n == 0) {
              target = s[j];
              label = 1.0;
            } else {
              target = draw_noise();
              if (target == s[j]) continue;
              label = 0.0;
            }
            double* ctx = out.data() + target * d;
            double f = 0.0;
            for (std::size_t k = 0; k < d; ++k) f += center[k] * ctx[k];
            loss -= label > 0 ? log_sigmoid(f) : log_sigmoid(-f);
            double g = (label - sigmoid(f)) * lr;
            for (std::size_t k = 0; k < d; ++k) {
              grad_in[k] += g * ctx[k];
              ctx[k] += g * center[k];
            }
          }
          for (std::size_t k = 0; k < d; ++k) center[k] += grad_in[k];
          ++pairs;
        }
      }
    }
    if (!std::isfinite(loss)) throw NumericalError("skip-gram diverged in epoch " + std::to_string(epoch));
    if (epoch_loss) epoch_loss->push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
  }

  WordVectors result(d);
  if (init) {
    for (const auto& [tok, v] : init->entries())
      if (!index.count(tok)) result.set(tok, v);
  }
  for (std::size_t w = 0; w < V; ++w) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) v[static_cast<Eigen::Index>(k)] = in[w * d + k];
    result.set(vocab[w], std::move(v));
  }
  return result;
}

}  // namespace ozsl
