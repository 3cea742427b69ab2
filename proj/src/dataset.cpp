#include <algorithm>
#include <set>

#include "ozsl/error.hpp"
#include "ozsl/harness.hpp"
#include "ozsl/io_util.hpp"

namespace ozsl {

std::vector<Sample> read_features(std::string_view text) {
  std::vector<Sample> out;
  std::set<std::string, std::less<>> ids;
  std::size_t p = 0;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    std::string where = "features line " + std::to_string(i + 1);
    auto f = split(lines[i], '\t');
    if (f.size() != 3) throw DataError(where + ": expected 'id<TAB>label<TAB>f1,...,fp'");
    if (f[0].empty() || f[1].empty()) throw DataError(where + ": empty id or label");
    auto vals = parse_doubles(f[2], ',', where);
    if (vals.empty()) throw DataError(where + ": no feature values");
    if (p == 0) p = vals.size();
    if (vals.size() != p)
      throw DataError(where + " (id '" + std::string(f[0]) + "'): " + std::to_string(vals.size()) +
                      " feature values, expected " + std::to_string(p));
    if (!ids.emplace(f[0]).second) throw DataError(where + ": duplicate sample id '" + std::string(f[0]) + "'");
    Sample s{std::string(f[0]), std::string(f[1]), Eigen::VectorXd(static_cast<Eigen::Index>(p))};
    for (std::size_t k = 0; k < p; ++k) s.x[static_cast<Eigen::Index>(k)] = vals[k];
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_features(const std::vector<Sample>& samples) {
  std::string out;
  for (const auto& s : samples)
    out += s.id + "\t" + s.label + "\t" + join_doubles(s.x.data(), static_cast<std::size_t>(s.x.size()), ',') + "\n";
  return out;
}

SplitSpec read_split(std::string_view text) {
  SplitSpec s;
  std::vector<std::string>* section = nullptr;
  bool saw_seen = false, saw_unseen = false;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[seen]") {
      section = &s.seen;
      saw_seen = true;
    } else if (line == "[unseen]") {
      section = &s.unseen;
      saw_unseen = true;
    } else if (line == "[heldout]") {
      section = &s.heldout;
    } else if (line.front() == '[') {
      throw DataError("split file line " + std::to_string(i + 1) + ": unknown section '" + std::string(line) + "'");
    } else if (!section) {
      throw DataError("split file line " + std::to_string(i + 1) + ": entry before any section header");
    } else {
      section->emplace_back(line);
    }
  }
  if (!saw_seen || !saw_unseen) throw DataError("split file needs both [seen] and [unseen] sections");
  return s;
}

std::string write_split(const SplitSpec& s) {
  std::string out = "[seen]\n";
  for (const auto& l : s.seen) out += l + "\n";
  out += "[unseen]\n";
  for (const auto& l : s.unseen) out += l + "\n";
  if (!s.heldout.empty()) {
    out += "[heldout]\n";
    for (const auto& l : s.heldout) out += l + "\n";
  }
  return out;
}

bool ZslDataset::is_seen(std::string_view label) const {
  return std::binary_search(seen.begin(), seen.end(), label);
}

bool ZslDataset::is_unseen(std::string_view label) const {
  return std::binary_search(unseen.begin(), unseen.end(), label);
}

std::vector<std::size_t> ZslDataset::train_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (is_seen(samples[i].label) && !std::binary_search(heldout.begin(), heldout.end(), samples[i].id))
      out.push_back(i);
  return out;
}

std::vector<std::size_t> ZslDataset::test_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (is_unseen(samples[i].label) || std::binary_search(heldout.begin(), heldout.end(), samples[i].id))
      out.push_back(i);
  return out;
}

namespace {

std::vector<std::string> sorted_unique(const std::vector<std::string>& v, const char* what) {
  std::vector<std::string> out = v;
  std::sort(out.begin(), out.end());
  auto dup = std::adjacent_find(out.begin(), out.end());
  if (dup != out.end()) throw DataError(std::string("split file lists ") + what + " '" + *dup + "' twice");
  return out;
}

}  // namespace

ZslDataset make_dataset(std::vector<Sample> samples, const SplitSpec& split) {
  ZslDataset d;
  d.seen = sorted_unique(split.seen, "seen label");
  d.unseen = sorted_unique(split.unseen, "unseen label");
  d.heldout = sorted_unique(split.heldout, "held-out id");
  if (d.seen.empty()) throw DataError("split file lists no seen labels");
  if (d.unseen.empty()) throw DataError("split file lists no unseen labels");
  std::vector<std::string> both;
  std::set_intersection(d.seen.begin(), d.seen.end(), d.unseen.begin(), d.unseen.end(), std::back_inserter(both));
  if (!both.empty()) throw DataError("label '" + both.front() + "' is listed as both seen and unseen");
  if (samples.empty()) throw DataError("feature file has no samples");
  d.feature_dim = static_cast<std::size_t>(samples.front().x.size());
  std::set<std::string> ids;
  for (const auto& s : samples) {
    if (static_cast<std::size_t>(s.x.size()) != d.feature_dim)
      throw DataError("sample '" + s.id + "' has " + std::to_string(s.x.size()) + " features, expected " +
                      std::to_string(d.feature_dim));
    if (!d.is_seen(s.label) && !d.is_unseen(s.label))
      throw DataError("sample '" + s.id + "' has label '" + s.label + "' which the split does not list");
    if (!ids.insert(s.id).second) throw DataError("duplicate sample id '" + s.id + "'");
  }
  for (const auto& h : d.heldout) {
    auto it = std::find_if(samples.begin(), samples.end(), [&](const Sample& s) { return s.id == h; });
    if (it == samples.end()) throw DataError("held-out id '" + h + "' names no sample");
    if (!d.is_seen(it->label)) throw DataError("held-out id '" + h + "' is not a seen-class sample");
  }
  d.samples = std::move(samples);
  return d;
}

ZslDataset load_dataset(const std::filesystem::path& features, const std::filesystem::path& split) {
  return make_dataset(read_features(read_file(features)), read_split(read_file(split)));
}

namespace {

void check_aligned(const std::vector<std::string>& predictions, const std::vector<std::string>& truth) {
  if (predictions.size() != truth.size())
    throw DataError(std::to_string(predictions.size()) + " predictions for " + std::to_string(truth.size()) +
                    " samples");
  if (truth.empty()) throw DataError("no predictions to evaluate");
}

}  // namespace

std::map<std::string, double> per_class_accuracy(const std::vector<std::string>& predictions,
                                                 const std::vector<std::string>& truth) {
  check_aligned(predictions, truth);
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto& c = counts[truth[i]];
    ++c.second;
    if (predictions[i] == truth[i]) ++c.first;
  }
  std::map<std::string, double> out;
  for (const auto& [label, c] : counts)
    out[label] = static_cast<double>(c.first) / static_cast<double>(c.second);
  return out;
}

double macro_accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& truth,
                      const std::vector<std::string>& unseen) {
  if (unseen.empty()) throw DataError("no unseen classes to average over");
  auto per_class = per_class_accuracy(predictions, truth);
  std::set<std::string> classes(unseen.begin(), unseen.end());
  double sum = 0.0;
  for (const auto& c : classes) {
    auto it = per_class.find(c);
    if (it == per_class.end()) throw DataError("unseen class '" + c + "' has no test samples");
    sum += it->second;
  }
  return sum / static_cast<double>(classes.size());
}

double sample_accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& truth) {
  check_aligned(predictions, truth);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (predictions[i] == truth[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

}  // namespace ozsl
