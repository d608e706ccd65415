#pragma once

// Ranking metrics for multi-label prediction and the model-size report.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsaxmc/dataset.hpp"

namespace vsaxmc::metrics {

// |top-k of ranking  n  truth| / k. The ranking must hold at least k distinct
// ids. Throws InvalidArgument for k = 0, a short ranking or duplicates.
double precision_at_k(std::span<const LabelId> ranking, std::span<const LabelId> truth, std::size_t k);

// Per-label relative frequency in a training set, floored at `floor`.
struct PropensityTable {
  std::vector<double> propensity;
  std::vector<std::size_t> counts;
  std::size_t num_train = 0;
  double floor = 1e-9;

  double operator[](LabelId l) const { return propensity.at(l); }
  std::size_t size() const noexcept { return propensity.size(); }
};

inline constexpr double kDefaultPropensityFloor = 1e-9;

// p_l = max(count_l / N_train, floor). Throws InvalidArgument on an empty set.
PropensityTable build_propensities(const data::SparseDataset& train, double floor = kDefaultPropensityFloor);

// (1/k) sum over the top k of [l in truth] / p_l. With `normalized`, the
// value is divided by the best score any ranking could reach for this truth
// set (0 when the truth set is empty).
double psp_at_k(std::span<const LabelId> ranking, std::span<const LabelId> truth, std::size_t k,
                const PropensityTable& props, bool normalized = false);

struct CompressionReport {
  double model_size_ratio;   // 1 - CHRR parameters / FC parameters
  double output_dim_ratio;   // 1 - d / L
};

// CHRR network size (F*hc + hc*hc) + (hc*2d + d*L) against FC size
// (F*hf + hf*hf) + hf*L. All arguments must be positive.
CompressionReport compression_report(std::size_t num_features, std::size_t hidden_chrr, std::size_t hidden_fc,
                                     std::size_t dim, std::size_t num_labels);

struct EvalRow {
  std::string metric;  // "P" or "PSP"
  std::size_t k;
  double value;
};

// CSV with columns metric,k,value; `header` becomes a leading "# " line.
void write_report_csv(std::span<const EvalRow> rows, std::ostream& out, std::string_view header = {});
// {"meta": "<header>", "metrics": [{"metric":..,"k":..,"value":..}, ...]}
void write_report_json(std::span<const EvalRow> rows, std::ostream& out, std::string_view header = {});

}  // namespace vsaxmc::metrics
