#pragma once

// Sparse multi-label datasets in the extreme-classification repository text
// format:
//
//   num_examples num_features num_labels
//   l1,l2,...,lm f1:v1 f2:v2 ...
//
// One example per line. A line starting with a space has no labels.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "vsaxmc/label_codec.hpp"

namespace vsaxmc::data {

using FeatureId = std::uint32_t;

struct Feature {
  FeatureId index;
  double value;
  friend bool operator==(const Feature&, const Feature&) = default;
};

struct Example {
  std::vector<LabelId> labels;     // sorted, unique
  std::vector<Feature> features;   // sorted by index, unique
  friend bool operator==(const Example&, const Example&) = default;
};

struct SparseDataset {
  std::size_t num_features = 0;
  std::size_t num_labels = 0;
  std::vector<Example> examples;

  std::size_t size() const noexcept { return examples.size(); }
  // Throws InvalidArgument when an id is out of range, duplicated or unsorted.
  void validate() const;
  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;
};

// Throws ParseError carrying the 1-based line number on a malformed header,
// ids beyond the declared bounds, duplicate ids, non-numeric tokens or a
// line count that disagrees with the header.
SparseDataset parse_xmc(std::istream& in);
SparseDataset parse_xmc(const std::filesystem::path& path);

// "\n" line endings, shortest round-trip formatting for values.
void emit_xmc(const SparseDataset& ds, std::ostream& out);
void emit_xmc(const SparseDataset& ds, const std::filesystem::path& path);

struct DatasetStats {
  std::size_t num_examples = 0;
  std::size_t num_features = 0;
  std::size_t num_labels = 0;
  std::size_t label_occurrences = 0;
  double avg_samples_per_label = 0.0;   // occurrences / L, 0 when L = 0
  double avg_labels_per_example = 0.0;  // occurrences / N, 0 when N = 0
  double avg_features_per_example = 0.0;
};

DatasetStats dataset_stats(const SparseDataset& ds);

struct SyntheticSpec {
  std::size_t num_examples = 0;
  std::size_t num_features = 0;
  std::size_t num_labels = 0;
  std::size_t labels_per_example = 1;
  double noise = 0.0;  // per-feature flip probability in [0, 1)
  std::uint64_t seed = 0;
};

// Label l owns the feature block [l*B, (l+1)*B) with B = floor(F/L). An
// example with label set S switches on every feature owned by S with value
// 1, then flips the presence of each of the F features with probability
// `noise`. Requires 1 <= k <= L <= F.
SparseDataset generate_synthetic(const SyntheticSpec& spec);

// First `n` examples and the rest, sharing F and L.
std::pair<SparseDataset, SparseDataset> split_at(const SparseDataset& ds, std::size_t n);

}  // namespace vsaxmc::data
