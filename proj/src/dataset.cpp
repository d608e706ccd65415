#include "vsaxmc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "vsaxmc/error.hpp"
#include "vsaxmc/text_format.hpp"

namespace vsaxmc::data {
namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

void parse_labels(std::string_view field, std::size_t num_labels, std::size_t line, Example& ex) {
  std::size_t start = 0;
  while (start <= field.size()) {
    const std::size_t comma = std::min(field.find(',', start), field.size());
    const std::string_view tok = field.substr(start, comma - start);
    LabelId id = 0;
    if (!parse_uint(tok, id)) throw ParseError(line, "non-numeric label \"" + std::string(tok) + "\"");
    if (id >= num_labels) {
      throw ParseError(line, "label " + std::to_string(id) + " >= declared L=" + std::to_string(num_labels));
    }
    ex.labels.push_back(id);
    start = comma + 1;
  }
  std::sort(ex.labels.begin(), ex.labels.end());
  if (std::adjacent_find(ex.labels.begin(), ex.labels.end()) != ex.labels.end()) {
    throw ParseError(line, "duplicate label id");
  }
}

Feature parse_feature(std::string_view tok, std::size_t num_features, std::size_t line) {
  const auto colon = tok.find(':');
  if (colon == std::string_view::npos) throw ParseError(line, "feature token without ':' \"" + std::string(tok) + "\"");
  Feature f{};
  if (!parse_uint(tok.substr(0, colon), f.index)) {
    throw ParseError(line, "non-numeric feature id \"" + std::string(tok) + "\"");
  }
  if (!parse_double(tok.substr(colon + 1), f.value) || !std::isfinite(f.value)) {
    throw ParseError(line, "non-numeric feature value \"" + std::string(tok) + "\"");
  }
  if (f.index >= num_features) {
    throw ParseError(line, "feature " + std::to_string(f.index) + " >= declared F=" + std::to_string(num_features));
  }
  return f;
}

Example parse_example(std::string_view text, const SparseDataset& ds, std::size_t line) {
  if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
  Example ex;
  const bool has_label_field = !text.empty() && text.front() != ' ' && text.front() != '\t';
  auto tokens = split_ws(text);
  std::size_t first_feature = 0;
  if (has_label_field && !tokens.empty() && tokens.front().find(':') == std::string_view::npos) {
    parse_labels(tokens.front(), ds.num_labels, line, ex);
    first_feature = 1;
  }
  for (std::size_t i = first_feature; i < tokens.size(); ++i) {
    ex.features.push_back(parse_feature(tokens[i], ds.num_features, line));
  }
  std::sort(ex.features.begin(), ex.features.end(),
            [](const Feature& a, const Feature& b) { return a.index < b.index; });
  for (std::size_t i = 1; i < ex.features.size(); ++i) {
    if (ex.features[i].index == ex.features[i - 1].index) throw ParseError(line, "duplicate feature id");
  }
  return ex;
}

}  // namespace

void SparseDataset::validate() const {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    for (std::size_t j = 0; j < ex.labels.size(); ++j) {
      if (ex.labels[j] >= num_labels) throw InvalidArgument("example " + std::to_string(i) + ": label out of range");
      if (j > 0 && ex.labels[j] <= ex.labels[j - 1]) {
        throw InvalidArgument("example " + std::to_string(i) + ": labels not sorted/unique");
      }
    }
    for (std::size_t j = 0; j < ex.features.size(); ++j) {
      if (ex.features[j].index >= num_features) {
        throw InvalidArgument("example " + std::to_string(i) + ": feature out of range");
      }
      if (j > 0 && ex.features[j].index <= ex.features[j - 1].index) {
        throw InvalidArgument("example " + std::to_string(i) + ": features not sorted/unique");
      }
    }
  }
}

SparseDataset parse_xmc(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split_ws(line);
  std::size_t n = 0;
  SparseDataset ds;
  if (head.size() != 3 || !parse_uint(head[0], n) || !parse_uint(head[1], ds.num_features) ||
      !parse_uint(head[2], ds.num_labels)) {
    throw ParseError(1, "header must be \"num_examples num_features num_labels\"");
  }
  ds.examples.reserve(n);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (ds.examples.size() == n) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError(lineno, "more examples than the header declares (" + std::to_string(n) + ")");
    }
    ds.examples.push_back(parse_example(line, ds, lineno));
  }
  if (ds.examples.size() != n) {
    throw ParseError(lineno, "header declares " + std::to_string(n) + " examples, found " +
                                 std::to_string(ds.examples.size()));
  }
  return ds;
}

SparseDataset parse_xmc(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_xmc(in);
}

void emit_xmc(const SparseDataset& ds, std::ostream& out) {
  out << ds.size() << ' ' << ds.num_features << ' ' << ds.num_labels << '\n';
  for (const auto& ex : ds.examples) {
    for (std::size_t j = 0; j < ex.labels.size(); ++j) out << (j ? "," : "") << ex.labels[j];
    for (const auto& f : ex.features) out << ' ' << f.index << ':' << format_double(f.value);
    out << '\n';
  }
}

void emit_xmc(const SparseDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  emit_xmc(ds, out);
  if (!out) throw Error("write failed: " + path.string());
}

DatasetStats dataset_stats(const SparseDataset& ds) {
  DatasetStats s;
  s.num_examples = ds.size();
  s.num_features = ds.num_features;
  s.num_labels = ds.num_labels;
  std::size_t features = 0;
  for (const auto& ex : ds.examples) {
    s.label_occurrences += ex.labels.size();
    features += ex.features.size();
  }
  const auto occ = static_cast<double>(s.label_occurrences);
  if (s.num_labels > 0) s.avg_samples_per_label = occ / static_cast<double>(s.num_labels);
  if (s.num_examples > 0) {
    s.avg_labels_per_example = occ / static_cast<double>(s.num_examples);
    s.avg_features_per_example = static_cast<double>(features) / static_cast<double>(s.num_examples);
  }
  return s;
}

SparseDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_labels == 0 || spec.labels_per_example == 0) {
    throw InvalidArgument("synthetic: L and k must be positive");
  }
  if (spec.labels_per_example > spec.num_labels) throw InvalidArgument("synthetic: k exceeds L");
  if (spec.num_labels > spec.num_features) throw InvalidArgument("synthetic: L exceeds F");
  if (!(spec.noise >= 0.0 && spec.noise < 1.0)) throw InvalidArgument("synthetic: noise must be in [0, 1)");

  const std::size_t block = spec.num_features / spec.num_labels;
  SparseDataset ds;
  ds.num_features = spec.num_features;
  ds.num_labels = spec.num_labels;
  ds.examples.reserve(spec.num_examples);
  Rng rng(spec.seed);
  std::bernoulli_distribution flip(spec.noise);
  std::vector<char> active(spec.num_features);
  for (std::size_t i = 0; i < spec.num_examples; ++i) {
    Example ex;
    ex.labels = sample_label_set(spec.num_labels, spec.labels_per_example, rng);
    std::fill(active.begin(), active.end(), 0);
    for (LabelId l : ex.labels) {
      for (std::size_t f = l * block; f < (l + 1) * block; ++f) active[f] = 1;
    }
    if (spec.noise > 0.0) {
      for (auto& a : active) {
        if (flip(rng)) a = !a;
      }
    }
    for (std::size_t f = 0; f < active.size(); ++f) {
      if (active[f]) ex.features.push_back({static_cast<FeatureId>(f), 1.0});
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::pair<SparseDataset, SparseDataset> split_at(const SparseDataset& ds, std::size_t n) {
  n = std::min(n, ds.size());
  SparseDataset head{ds.num_features, ds.num_labels, {}};
  SparseDataset tail{ds.num_features, ds.num_labels, {}};
  head.examples.assign(ds.examples.begin(), ds.examples.begin() + static_cast<std::ptrdiff_t>(n));
  tail.examples.assign(ds.examples.begin() + static_cast<std::ptrdiff_t>(n), ds.examples.end());
  return {std::move(head), std::move(tail)};
}

}  // namespace vsaxmc::data
