#include "vsaxmc/metrics.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

#include <json.hpp>

#include "vsaxmc/error.hpp"
#include "vsaxmc/text_format.hpp"

namespace vsaxmc::metrics {
namespace {

std::span<const LabelId> checked_top(std::span<const LabelId> ranking, std::size_t k) {
  if (k == 0) throw InvalidArgument("metric: k must be positive");
  if (ranking.size() < k) {
    throw InvalidArgument("metric: ranking has " + std::to_string(ranking.size()) + " entries, k=" +
                          std::to_string(k));
  }
  std::vector<LabelId> sorted(ranking.begin(), ranking.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("metric: duplicate id in ranking");
  }
  return ranking.first(k);
}

bool contains(std::span<const LabelId> set, LabelId l) { return std::find(set.begin(), set.end(), l) != set.end(); }

}  // namespace

double precision_at_k(std::span<const LabelId> ranking, std::span<const LabelId> truth, std::size_t k) {
  const auto top = checked_top(ranking, k);
  std::size_t hits = 0;
  for (LabelId l : top) hits += contains(truth, l) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

PropensityTable build_propensities(const data::SparseDataset& train, double floor) {
  if (train.size() == 0) throw InvalidArgument("build_propensities: empty training set");
  if (!(floor > 0.0)) throw InvalidArgument("build_propensities: floor must be positive");
  PropensityTable t;
  t.num_train = train.size();
  t.floor = floor;
  t.counts.assign(train.num_labels, 0);
  for (const auto& ex : train.examples) {
    for (LabelId l : ex.labels) ++t.counts.at(l);
  }
  t.propensity.resize(train.num_labels);
  for (std::size_t l = 0; l < train.num_labels; ++l) {
    t.propensity[l] = std::max(static_cast<double>(t.counts[l]) / static_cast<double>(t.num_train), floor);
  }
  return t;
}

double psp_at_k(std::span<const LabelId> ranking, std::span<const LabelId> truth, std::size_t k,
                const PropensityTable& props, bool normalized) {
  const auto top = checked_top(ranking, k);
  double score = 0.0;
  for (LabelId l : top) {
    if (contains(truth, l)) score += 1.0 / props[l];
  }
  score /= static_cast<double>(k);
  if (!normalized) return score;

  std::vector<double> gains;
  for (LabelId l : truth) gains.push_back(1.0 / props[l]);
  std::sort(gains.begin(), gains.end(), std::greater<>());
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, gains.size()); ++i) ideal += gains[i];
  ideal /= static_cast<double>(k);
  return ideal > 0.0 ? score / ideal : 0.0;
}

CompressionReport compression_report(std::size_t num_features, std::size_t hidden_chrr, std::size_t hidden_fc,
                                     std::size_t dim, std::size_t num_labels) {
  if (num_features == 0 || hidden_chrr == 0 || hidden_fc == 0 || dim == 0 || num_labels == 0) {
    throw InvalidArgument("compression_report: all sizes must be positive");
  }
  const auto F = static_cast<double>(num_features);
  const auto hc = static_cast<double>(hidden_chrr);
  const auto hf = static_cast<double>(hidden_fc);
  const auto d = static_cast<double>(dim);
  const auto L = static_cast<double>(num_labels);
  const double chrr_size = (F * hc + hc * hc) + (hc * 2.0 * d + d * L);
  const double fc_size = (F * hf + hf * hf) + hf * L;
  return {1.0 - chrr_size / fc_size, 1.0 - d / L};
}

void write_report_csv(std::span<const EvalRow> rows, std::ostream& out, std::string_view header) {
  if (!header.empty()) out << "# " << header << '\n';
  out << "metric,k,value\n";
  for (const auto& r : rows) out << r.metric << ',' << r.k << ',' << format_double(r.value) << '\n';
}

void write_report_json(std::span<const EvalRow> rows, std::ostream& out, std::string_view header) {
  nlohmann::ordered_json j;
  j["meta"] = std::string(header);
  j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) j["metrics"].push_back({{"metric", r.metric}, {"k", r.k}, {"value", r.value}});
  out << j.dump(2) << '\n';
}

}  // namespace vsaxmc::metrics
