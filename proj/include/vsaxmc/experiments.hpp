#pragma once

// Monte-Carlo drivers for the synthetic capacity experiments: retrieval
// accuracy over a (d, k) grid and the spread of decoded similarities at a
// fixed dimension.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vsaxmc::experiments {

// Vector families compared by the experiments. `hrr` is Gaussian HRR without
// projection, `hrr_proj` projects every sampled vector to a unit spectrum.
enum class Variant : std::uint8_t { hrr = 0, hrr_proj = 1, chrr = 2 };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct SweepConfig {
  std::vector<Variant> variants{Variant::hrr_proj, Variant::chrr};
  std::vector<std::size_t> dims;
  std::vector<std::size_t> ks;
  std::size_t num_labels = 1000;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  // Worker threads; results never depend on this.
  std::size_t threads = 1;

  // Throws InvalidArgument on empty or non-positive grids, or k > N.
  void validate() const;
};

// Powers of two 1..1024 and k in {1, 5, 10, ..., 50}, 100 trials.
SweepConfig default_retrieval_config();

struct RetrievalCell {
  Variant variant;
  std::size_t d;
  std::size_t k;
  double mean;
  double std;  // sample standard deviation over trials, 0 for one trial
  std::size_t trials;
  friend bool operator==(const RetrievalCell&, const RetrievalCell&) = default;
};

struct RetrievalResult {
  // Ordered by (variant, d, k) as listed in the config.
  std::vector<RetrievalCell> cells;
  const RetrievalCell& at(Variant v, std::size_t d, std::size_t k) const;
  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

struct VarianceCell {
  Variant variant;
  std::size_t d;
  std::size_t k;
  double mean;
  double variance;  // population variance of the pooled samples
  std::size_t samples;
  friend bool operator==(const VarianceCell&, const VarianceCell&) = default;
};

struct VarianceResult {
  std::vector<VarianceCell> cells;
  const VarianceCell& at(Variant v, std::size_t k) const;
  friend bool operator==(const VarianceResult&, const VarianceResult&) = default;
};

// Seed of one trial: a stable mix of (base, variant, d, k, trial).
std::uint64_t trial_seed(std::uint64_t base, Variant v, std::size_t d, std::size_t k, std::size_t trial);

// For every (variant, d, k) runs `trials` independent codebooks of N labels,
// encodes k random labels, and averages the retrieval accuracy.
RetrievalResult run_retrieval_sweep(const SweepConfig& cfg);

// Uses cfg.dims.front() as d (400 in the reference setup). Each trial builds
// k fresh label vectors and a concept vector, encodes all k, decodes with the
// concept, and records s_j = sim(decoded, c_j) for j < k. Samples are pooled
// over trials. The two HRR variants share their Gaussian draws per
// (k, trial), so they differ only by the projection.
VarianceResult run_variance_sweep(const SweepConfig& cfg);

// Colour for a value in [0, 1]: cool blue at 0 through pale yellow to deep
// red at 1 (a diverging red-yellow-blue ramp). Returns "#rrggbb".
std::string warm_colormap(double value);

// `header` is written as the first line, prefixed with "# ".
void write_retrieval_csv(const RetrievalResult& r, std::ostream& out, std::string_view header = {});
RetrievalResult read_retrieval_csv(std::istream& in);
void write_heatmap_svg(const RetrievalResult& r, std::ostream& out, std::string_view header = {});
void write_variance_csv(const VarianceResult& r, std::ostream& out, std::string_view header = {});

// Writes `<stem>.csv` and `<stem>.svg` into `dir` (created if missing).
void emit_heatmap(const RetrievalResult& r, const std::filesystem::path& dir, std::string_view stem = "retrieval",
                  std::string_view header = {});

}  // namespace vsaxmc::experiments
