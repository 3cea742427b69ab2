// Command-line front end. Exit codes: 0 success, 1 usage, 2 data, 3 numerical.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "ozsl/el_embed.hpp"
#include "ozsl/error.hpp"
#include "ozsl/harness.hpp"
#include "ozsl/io_util.hpp"
#include "ozsl/kernels.hpp"
#include "ozsl/normalizer.hpp"
#include "ozsl/ontology.hpp"
#include "ozsl/text_walk.hpp"
#include "ozsl/zsl_map.hpp"

using namespace ozsl;

namespace {

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-")
    std::cout << content;
  else
    write_file(out_path, content);
}

Ontology load_ontology(const std::string& path) {
  Ontology o = parse_ontology(read_file(path));
  auto problems = validate(o);
  if (!problems.empty()) {
    std::string msg = "ontology is invalid";
    for (const auto& v : problems)
      msg += "\n  " + (v.axiom_index ? "axiom " + std::to_string(*v.axiom_index + 1) + ": " : std::string()) + v.reason;
    throw DataError(msg);
  }
  return o;
}

std::vector<std::string> split_labels(const SplitSpec& s) {
  std::vector<std::string> labels = s.seen;
  labels.insert(labels.end(), s.unseen.begin(), s.unseen.end());
  return labels;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Usage: return 1;
    case ErrorKind::Data: return 2;
    case ErrorKind::Numerical: return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ozsl: ontology-guided zero-shot learning toolkit"};
  app.require_subcommand(1);
  std::function<void()> action;

  // parse
  std::string parse_in, parse_out;
  auto* parse = app.add_subcommand("parse", "Parse and validate an ELF ontology; print it in canonical form");
  parse->add_option("ontology", parse_in, "ELF file")->required();
  parse->add_option("-o,--out", parse_out, "Write canonical ELF here instead of stdout");
  parse->callback([&] {
    action = [&] {
      Ontology o = load_ontology(parse_in);
      emit(parse_out, serialize_ontology(o));
      std::cerr << o.concepts.size() << " concepts, " << o.relations.size() << " relations, "
                << o.individuals.size() << " individuals, " << o.axioms.size() << " axioms\n";
    };
  });

  // normalize
  std::string norm_in, norm_out;
  auto* norm = app.add_subcommand("normalize", "Rewrite an ontology into normal form");
  norm->add_option("ontology", norm_in, "ELF file")->required();
  norm->add_option("-o,--out", norm_out, "Normalized axiom file");
  norm->callback([&] { action = [&] { emit(norm_out, write_normalized(normalize(load_ontology(norm_in)))); }; });

  // classify
  std::string cls_in, cls_out;
  bool cls_all = false;
  auto* cls = app.add_subcommand("classify", "Print entailed atomic subsumptions A<TAB>B");
  cls->add_option("ontology", cls_in, "ELF file")->required();
  cls->add_option("-o,--out", cls_out, "Output file");
  cls->add_flag("--all", cls_all, "Include generated names and Top/Bottom");
  cls->callback([&] {
    action = [&] {
      Ontology o = load_ontology(cls_in);
      NormalizedOntology n = normalize(o);
      Subsumptions s = classify(n);
      if (!cls_all) s = restrict_to(s, o.concepts);
      std::string out;
      for (const auto& [a, b] : s) out += a + "\t" + b + "\n";
      emit(cls_out, out);
    };
  });

  // embed-el
  std::string el_in, el_norm, el_out;
  ElTrainConfig el_cfg;
  auto* el = app.add_subcommand("embed-el", "Train ball embeddings of a normalized ontology");
  auto* el_pos = el->add_option("ontology", el_in, "ELF file or normalized axiom file");
  auto* el_norm_opt = el->add_option("--normalized", el_norm, "Normalized axiom file");
  el_pos->excludes(el_norm_opt);
  el->add_option("-o,--out", el_out, "Embedding TSV")->required();
  el->add_option("--dim", el_cfg.dim, "Embedding dimension")->capture_default_str();
  el->add_option("--margin", el_cfg.margin, "Margin")->capture_default_str();
  el->add_option("--lr", el_cfg.learning_rate, "Learning rate")->capture_default_str();
  el->add_option("--epochs", el_cfg.epochs, "Epochs")->capture_default_str();
  el->add_option("--batch-size", el_cfg.batch_size, "Minibatch size")->capture_default_str();
  el->add_option("--negatives", el_cfg.negatives, "Negatives per NF2 axiom")->capture_default_str();
  el->add_option("--gamma-min", el_cfg.gamma_min, "Radius floor")->capture_default_str();
  el->add_option("--seed", el_cfg.seed, "Seed")->capture_default_str();
  el->callback([&] {
    action = [&] {
      if (el_in.empty() && el_norm.empty()) throw UsageError("embed-el needs an ontology or --normalized file");
      NormalizedOntology n;
      if (!el_norm.empty()) {
        n = read_normalized(read_file(el_norm));
      } else {
        std::string text = read_file(el_in);
        n = text.rfind("# concepts:", 0) == 0 ? read_normalized(text) : normalize(load_ontology(el_in));
      }
      ElTrainResult r = train_el(n, el_cfg);
      write_file(el_out, export_space(r.space));
      std::cerr << "final loss " << format_double(r.final_loss) << "\n";
    };
  });

  // project
  std::string proj_in, proj_out;
  auto* proj = app.add_subcommand("project", "Project an ontology onto a triple graph");
  proj->add_option("ontology", proj_in, "ELF file")->required();
  proj->add_option("-o,--out", proj_out, "Graph TSV");
  proj->callback([&] {
    action = [&] {
      ProjectedGraph g = project(load_ontology(proj_in));
      emit(proj_out, write_graph(g));
      if (g.skipped_axioms) std::cerr << g.skipped_axioms << " relation chain axioms skipped\n";
    };
  });

  // walk
  std::string walk_onto, walk_graph, walk_out;
  WalkConfig walk_cfg;
  auto* walk = app.add_subcommand("walk", "Random walks over the projected graph, lexicalized into a corpus");
  walk->add_option("ontology", walk_onto, "ELF file (labels and comments)")->required();
  walk->add_option("--graph", walk_graph, "Graph TSV; projected from the ontology when omitted");
  walk->add_option("-o,--out", walk_out, "Corpus file");
  walk->add_option("--walks-per-node", walk_cfg.walks_per_node, "Walks per node")->capture_default_str();
  walk->add_option("--walk-length", walk_cfg.walk_length, "Edges per walk")->capture_default_str();
  walk->add_option("--seed", walk_cfg.seed, "Seed")->capture_default_str();
  walk->callback([&] {
    action = [&] {
      Ontology o = load_ontology(walk_onto);
      ProjectedGraph g = walk_graph.empty() ? project(o) : read_graph(read_file(walk_graph));
      emit(walk_out, write_corpus(lexicalize(random_walks(g, walk_cfg), o)));
    };
  });

  // w2v
  std::string w2v_in, w2v_out, w2v_init;
  SkipGramConfig w2v_cfg;
  auto* w2v = app.add_subcommand("w2v", "Train skip-gram word vectors on a corpus");
  w2v->add_option("corpus", w2v_in, "Corpus file")->required();
  w2v->add_option("-o,--out", w2v_out, "Word vector file")->required();
  w2v->add_option("--init", w2v_init, "Pretrained vectors to fine-tune");
  w2v->add_option("--dim", w2v_cfg.dim, "Dimension")->capture_default_str();
  w2v->add_option("--window", w2v_cfg.window, "Context window")->capture_default_str();
  w2v->add_option("--negatives", w2v_cfg.negatives, "Negative samples")->capture_default_str();
  w2v->add_option("--epochs", w2v_cfg.epochs, "Epochs")->capture_default_str();
  w2v->add_option("--lr", w2v_cfg.learning_rate, "Learning rate")->capture_default_str();
  w2v->add_option("--min-count", w2v_cfg.min_count, "Minimum token count")->capture_default_str();
  w2v->add_option("--seed", w2v_cfg.seed, "Seed")->capture_default_str();
  w2v->callback([&] {
    action = [&] {
      std::optional<WordVectors> init;
      if (!w2v_init.empty()) init = read_word_vectors(read_file(w2v_init));
      std::vector<double> losses;
      WordVectors wv = train_skipgram(read_corpus(read_file(w2v_in)), w2v_cfg, init ? &*init : nullptr, &losses);
      write_file(w2v_out, write_word_vectors(wv));
      if (!losses.empty()) std::cerr << "final epoch loss " << format_double(losses.back()) << "\n";
    };
  });

  // encode
  std::string enc_split, enc_map, enc_emb, enc_words, enc_onto, enc_attrs, enc_components = "el_center", enc_out;
  bool enc_raw = false, enc_radius = false;
  auto* enc = app.add_subcommand("encode", "Build label encodings from embeddings, word vectors and attributes");
  enc->add_option("--split", enc_split, "Split file naming the labels")->required();
  enc->add_option("--class-map", enc_map, "label<TAB>concept file");
  enc->add_option("--embedding", enc_emb, "EL embedding TSV");
  enc->add_option("--word-vectors", enc_words, "Word vector file");
  enc->add_option("--ontology", enc_onto, "ELF file for label lexicalization");
  enc->add_option("--attributes", enc_attrs, "Attribute TSV");
  enc->add_option("--components", enc_components, "Comma list of el_center, word, attribute")->capture_default_str();
  enc->add_flag("--no-normalize", enc_raw, "Keep components at their raw scale");
  enc->add_flag("--include-radius", enc_radius, "Append the ball radius to the EL center");
  enc->add_option("-o,--out", enc_out, "Encoding TSV");
  enc->callback([&] {
    action = [&] {
      auto components = parse_components(enc_components);
      std::optional<EmbeddingSpace> space;
      std::optional<WordVectors> words;
      Ontology onto;
      AttributeTable attrs;
      ClassMap cmap;
      if (!enc_emb.empty()) space = import_space(read_file(enc_emb));
      if (!enc_words.empty()) words = read_word_vectors(read_file(enc_words));
      if (!enc_onto.empty()) onto = load_ontology(enc_onto);
      if (!enc_attrs.empty()) attrs = read_attributes(read_file(enc_attrs));
      if (!enc_map.empty()) cmap = read_class_map(read_file(enc_map));
      EncodeSources src{space ? &*space : nullptr, words ? &*words : nullptr, &onto,
                        enc_attrs.empty() ? nullptr : &attrs, &cmap};
      EncodeOptions opts{!enc_raw, enc_radius};
      emit(enc_out, write_encodings(encode_labels(split_labels(read_split(read_file(enc_split))), src, components, opts)));
    };
  });

  // train-map
  std::string tm_features, tm_split, tm_enc, tm_mapper = "sae", tm_out;
  SaeConfig tm_sae;
  double tm_alpha = 1e-3;
  auto* tm = app.add_subcommand("train-map", "Fit the feature-to-encoding mapper on seen-class samples");
  tm->add_option("--features", tm_features, "Features TSV")->required();
  tm->add_option("--split", tm_split, "Split file")->required();
  tm->add_option("--encodings", tm_enc, "Encoding TSV")->required();
  tm->add_option("--mapper", tm_mapper, "sae or ridge")->capture_default_str()->check(CLI::IsMember({"sae", "ridge"}));
  tm->add_option("--lambda", tm_sae.lambda, "SAE decoder weight")->capture_default_str();
  tm->add_option("--max-iters", tm_sae.max_iters, "SAE iterations")->capture_default_str();
  tm->add_option("--tol", tm_sae.tol, "SAE relative improvement tolerance")->capture_default_str();
  tm->add_option("--seed", tm_sae.seed, "SAE initialization seed")->capture_default_str();
  tm->add_option("--alpha", tm_alpha, "Ridge regularization")->capture_default_str();
  tm->add_option("-o,--out", tm_out, "Model file")->required();
  tm->callback([&] {
    action = [&] {
      ZslDataset d = load_dataset(tm_features, tm_split);
      EncodingTable t = read_encodings(read_file(tm_enc));
      auto train = d.train_indices();
      if (train.empty()) throw DataError("no training samples");
      Eigen::MatrixXd X(static_cast<Eigen::Index>(d.feature_dim), static_cast<Eigen::Index>(train.size()));
      Eigen::MatrixXd Z(static_cast<Eigen::Index>(t.dim()), static_cast<Eigen::Index>(train.size()));
      for (std::size_t j = 0; j < train.size(); ++j) {
        X.col(static_cast<Eigen::Index>(j)) = d.samples[train[j]].x;
        Z.col(static_cast<Eigen::Index>(j)) = t.at(d.samples[train[j]].label);
      }
      LinearMapper m;
      if (tm_mapper == "sae") {
        SaeModel sm = train_sae(X, Z, tm_sae);
        m = {MapperKind::Sae, sm.W, sm.lambda, sm.train_loss};
      } else {
        m.kind = MapperKind::Ridge;
        m.W = train_ridge(X, Z, tm_alpha);
        m.parameter = tm_alpha;
        m.train_loss = (m.W * X - Z).squaredNorm() + tm_alpha * m.W.squaredNorm();
      }
      write_file(tm_out, write_mapper(m));
      std::cerr << "train loss " << format_double(m.train_loss) << "\n";
    };
  });

  // predict
  std::string pr_features, pr_split, pr_enc, pr_model, pr_distance = "l2", pr_candidates = "unseen", pr_out;
  auto* pr = app.add_subcommand("predict", "Predict labels of test samples by nearest encoding");
  pr->add_option("--features", pr_features, "Features TSV")->required();
  pr->add_option("--split", pr_split, "Split file")->required();
  pr->add_option("--encodings", pr_enc, "Encoding TSV")->required();
  pr->add_option("--model", pr_model, "Model file")->required();
  pr->add_option("--distance", pr_distance, "l2 or cosine")->capture_default_str();
  pr->add_option("--candidates", pr_candidates, "unseen or all")->capture_default_str();
  pr->add_option("-o,--out", pr_out, "Predictions TSV (id, truth, predicted)");
  pr->callback([&] {
    action = [&] {
      DistanceKind dist = parse_distance(pr_distance);
      CandidateMode mode = parse_candidates(pr_candidates);
      ZslDataset d = load_dataset(pr_features, pr_split);
      EncodingTable t = read_encodings(read_file(pr_enc));
      LinearMapper m = read_mapper(read_file(pr_model));
      auto test = d.test_indices();
      if (test.empty()) throw DataError("no test samples");
      auto candidates = candidate_labels(d.seen, d.unseen, mode);
      Eigen::MatrixXd C(static_cast<Eigen::Index>(t.dim()), static_cast<Eigen::Index>(candidates.size()));
      for (std::size_t j = 0; j < candidates.size(); ++j) C.col(static_cast<Eigen::Index>(j)) = t.at(candidates[j]);
      Eigen::MatrixXd Q(m.W.rows(), static_cast<Eigen::Index>(test.size()));
      for (std::size_t j = 0; j < test.size(); ++j)
        Q.col(static_cast<Eigen::Index>(j)) = map_features(m, d.samples[test[j]].x);
      auto nearest = kernels::omp::nearest(Q, C, dist);
      std::string out = "# id\ttruth\tpredicted\n";
      for (std::size_t j = 0; j < test.size(); ++j)
        out += d.samples[test[j]].id + "\t" + d.samples[test[j]].label + "\t" + candidates[nearest[j]] + "\n";
      emit(pr_out, out);
    };
  });

  // eval
  std::string ev_pred, ev_split;
  auto* ev = app.add_subcommand("eval", "Score a predictions file");
  ev->add_option("predictions", ev_pred, "Predictions TSV")->required();
  ev->add_option("--split", ev_split, "Split file")->required();
  ev->callback([&] {
    action = [&] {
      SplitSpec s = read_split(read_file(ev_split));
      std::vector<std::string> pred, truth, upred, utruth;
      const std::string text = read_file(ev_pred);
      auto lines = lines_of(text);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
        auto f = split(lines[i], '\t');
        if (f.size() != 3) throw DataError("predictions line " + std::to_string(i + 1) + ": expected 3 fields");
        truth.emplace_back(f[1]);
        pred.emplace_back(f[2]);
        if (std::find(s.unseen.begin(), s.unseen.end(), truth.back()) != s.unseen.end()) {
          utruth.push_back(truth.back());
          upred.push_back(pred.back());
        }
      }
      std::cout << "macro_unseen_accuracy\t" << format_double(macro_accuracy(upred, utruth, s.unseen)) << "\n";
      std::cout << "sample_accuracy\t" << format_double(sample_accuracy(pred, truth)) << "\n";
      for (const auto& [label, acc] : per_class_accuracy(pred, truth))
        std::cout << label << "\t" << format_double(acc) << "\n";
    };
  });

  // synth
  std::string syn_out;
  SyntheticConfig syn_cfg;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic benchmark directory with a run config");
  syn->add_option("-o,--out", syn_out, "Output directory")->required();
  syn->add_option("--k-seen", syn_cfg.k_seen, "Seen classes")->capture_default_str();
  syn->add_option("--k-unseen", syn_cfg.k_unseen, "Unseen classes")->capture_default_str();
  syn->add_option("--per-class", syn_cfg.per_class, "Samples per class")->capture_default_str();
  syn->add_option("--dim", syn_cfg.feature_dim, "Feature dimension")->capture_default_str();
  syn->add_option("--noise", syn_cfg.noise, "Feature noise standard deviation")->capture_default_str();
  syn->add_option("--heldout", syn_cfg.heldout_per_class, "Held-out samples per seen class")->capture_default_str();
  syn->add_option("--seed", syn_cfg.seed, "Seed")->capture_default_str();
  syn->callback([&] {
    action = [&] {
      RunConfig defaults;
      defaults.seed = syn_cfg.seed;
      write_synthetic(gen_synthetic(syn_cfg), syn_out, defaults);
      std::cerr << "wrote " << syn_out << "/config.txt\n";
    };
  });

  // pipeline
  std::string pl_config;
  std::map<std::string, std::string> pl_overrides;
  auto* pl = app.add_subcommand("pipeline", "Run every stage from a config file and write a report");
  pl->add_option("config", pl_config, "Run config (key = value lines)");
  for (const auto& key : run_config_keys()) {
    pl->add_option_function<std::string>(
        "--" + key, [&pl_overrides, key](const std::string& v) { pl_overrides[key] = v; }, "Override '" + key + "'");
  }
  pl->callback([&] {
    action = [&] {
      RunConfig cfg = pl_config.empty() ? RunConfig{} : read_run_config(pl_config);
      for (const auto& key : run_config_keys())
        if (auto it = pl_overrides.find(key); it != pl_overrides.end()) cfg.set(key, it->second);
      MetricsReport r = run_pipeline(cfg);
      std::cout << report_text(r);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (action) action();
    return 0;
  } catch (const ozsl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
