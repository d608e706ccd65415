#include "vsaxmc/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "vsaxmc/error.hpp"
#include "vsaxmc/label_codec.hpp"
#include "vsaxmc/parallel.hpp"
#include "vsaxmc/random.hpp"
#include "vsaxmc/text_format.hpp"

namespace vsaxmc::experiments {
namespace {

double retrieval_trial(Variant v, std::size_t d, std::size_t k, std::size_t n, std::uint64_t seed) {
  Rng label_rng(mix64(seed ^ 0x5bd1e995ULL));
  const auto labels = sample_label_set(n, k, label_rng);
  const std::span<const LabelId> view(labels);
  switch (v) {
    case Variant::hrr:
      return retrieval_accuracy(HrrCodebook::generate(d, n, seed, false), view);
    case Variant::hrr_proj:
      return retrieval_accuracy(HrrCodebook::generate(d, n, seed, true), view);
    case Variant::chrr:
      return retrieval_accuracy(ChrrCodebook::generate(d, n, seed), view);
  }
  throw InvalidArgument("unknown variant");
}

template <class A>
std::vector<double> decoded_similarities(const Codebook<A>& cb) {
  std::vector<LabelId> all(cb.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<LabelId>(i);
  const auto decoded = decode(cb, encode(cb, std::span<const LabelId>(all)));
  std::vector<double> sims(cb.size());
  for (std::size_t i = 0; i < all.size(); ++i) sims[i] = A::similarity(decoded, cb.label(all[i]));
  return sims;
}

std::vector<double> variance_trial(Variant v, std::size_t d, std::size_t k, std::uint64_t seed) {
  switch (v) {
    case Variant::hrr:
      return decoded_similarities(HrrCodebook::generate(d, k, seed, false));
    case Variant::hrr_proj:
      return decoded_similarities(HrrCodebook::generate(d, k, seed, true));
    case Variant::chrr:
      return decoded_similarities(ChrrCodebook::generate(d, k, seed));
  }
  throw InvalidArgument("unknown variant");
}

void write_header(std::ostream& out, std::string_view header) {
  if (!header.empty()) out << "# " << header << '\n';
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) parts.push_back(cur);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::hrr:
      return "hrr";
    case Variant::hrr_proj:
      return "hrr_proj";
    case Variant::chrr:
      return "chrr";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "hrr") return Variant::hrr;
  if (name == "hrr_proj" || name == "hrr-proj") return Variant::hrr_proj;
  if (name == "chrr") return Variant::chrr;
  throw InvalidArgument("unknown variant \"" + std::string(name) + "\"");
}

void SweepConfig::validate() const {
  if (variants.empty()) throw InvalidArgument("sweep: no variants");
  if (dims.empty() || ks.empty()) throw InvalidArgument("sweep: empty d or k grid");
  if (trials == 0) throw InvalidArgument("sweep: trials must be positive");
  if (num_labels == 0) throw InvalidArgument("sweep: N must be positive");
  for (auto d : dims) {
    if (d == 0) throw InvalidArgument("sweep: d must be positive");
  }
  for (auto k : ks) {
    if (k == 0) throw InvalidArgument("sweep: k must be positive");
    if (k > num_labels) throw InvalidArgument("sweep: k=" + std::to_string(k) + " exceeds N");
  }
}

SweepConfig default_retrieval_config() {
  SweepConfig cfg;
  for (std::size_t d = 1; d <= 1024; d *= 2) cfg.dims.push_back(d);
  cfg.ks.push_back(1);
  for (std::size_t k = 5; k <= 50; k += 5) cfg.ks.push_back(k);
  return cfg;
}

const RetrievalCell& RetrievalResult::at(Variant v, std::size_t d, std::size_t k) const {
  for (const auto& c : cells) {
    if (c.variant == v && c.d == d && c.k == k) return c;
  }
  throw InvalidArgument("no retrieval cell for the requested key");
}

const VarianceCell& VarianceResult::at(Variant v, std::size_t k) const {
  for (const auto& c : cells) {
    if (c.variant == v && c.k == k) return c;
  }
  throw InvalidArgument("no variance cell for the requested key");
}

std::uint64_t trial_seed(std::uint64_t base, Variant v, std::size_t d, std::size_t k, std::size_t trial) {
  return derive_seed(base, {static_cast<std::uint64_t>(v), d, k, trial});
}

RetrievalResult run_retrieval_sweep(const SweepConfig& cfg) {
  cfg.validate();
  struct Key {
    Variant v;
    std::size_t d, k;
  };
  std::vector<Key> keys;
  for (auto v : cfg.variants)
    for (auto d : cfg.dims)
      for (auto k : cfg.ks) keys.push_back({v, d, k});

  const std::size_t jobs = keys.size() * cfg.trials;
  std::vector<double> acc(jobs);
  parallel_for(jobs, cfg.threads, [&](std::size_t i) {
    const Key& key = keys[i / cfg.trials];
    const std::size_t trial = i % cfg.trials;
    acc[i] = retrieval_trial(key.v, key.d, key.k, cfg.num_labels, trial_seed(cfg.seed, key.v, key.d, key.k, trial));
  });

  RetrievalResult result;
  for (std::size_t c = 0; c < keys.size(); ++c) {
    const double* first = acc.data() + c * cfg.trials;
    double mean = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) mean += first[t];
    mean /= static_cast<double>(cfg.trials);
    double ss = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) ss += (first[t] - mean) * (first[t] - mean);
    const double sd = cfg.trials > 1 ? std::sqrt(ss / static_cast<double>(cfg.trials - 1)) : 0.0;
    result.cells.push_back({keys[c].v, keys[c].d, keys[c].k, mean, sd, cfg.trials});
  }
  return result;
}

VarianceResult run_variance_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.dims.front();
  struct Key {
    Variant v;
    std::size_t k;
  };
  std::vector<Key> keys;
  for (auto v : cfg.variants)
    for (auto k : cfg.ks) keys.push_back({v, k});

  const std::size_t jobs = keys.size() * cfg.trials;
  std::vector<std::vector<double>> samples(jobs);
  parallel_for(jobs, cfg.threads, [&](std::size_t i) {
    const Key& key = keys[i / cfg.trials];
    const std::size_t trial = i % cfg.trials;
    // Both HRR variants draw from the hrr stream: common random numbers.
    const Variant stream = key.v == Variant::chrr ? Variant::chrr : Variant::hrr;
    samples[i] = variance_trial(key.v, d, key.k, trial_seed(cfg.seed, stream, d, key.k, trial));
  });

  VarianceResult result;
  for (std::size_t c = 0; c < keys.size(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      for (double s : samples[c * cfg.trials + t]) {
        sum += s;
        ++count;
      }
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      for (double s : samples[c * cfg.trials + t]) ss += (s - mean) * (s - mean);
    }
    result.cells.push_back({keys[c].v, d, keys[c].k, mean, ss / static_cast<double>(count), count});
  }
  return result;
}

std::string warm_colormap(double value) {
  // Reversed RdYlBu stops.
  static constexpr std::array<std::array<int, 3>, 7> stops{{{49, 54, 149},
                                                            {69, 117, 180},
                                                            {171, 217, 233},
                                                            {255, 255, 191},
                                                            {253, 174, 97},
                                                            {215, 48, 39},
                                                            {165, 0, 38}}};
  if (!std::isfinite(value)) value = 0.0;
  const double x = std::clamp(value, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
  const auto lo = std::min(static_cast<std::size_t>(x), stops.size() - 2);
  const double t = x - static_cast<double>(lo);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(stops[lo][c] + t * (stops[lo + 1][c] - stops[lo][c])));
  }
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

void write_retrieval_csv(const RetrievalResult& r, std::ostream& out, std::string_view header) {
  write_header(out, header);
  out << "algebra,d,k,mean,std,trials\n";
  for (const auto& c : r.cells) {
    out << to_string(c.variant) << ',' << c.d << ',' << c.k << ',' << format_double(c.mean) << ','
        << format_double(c.std) << ',' << c.trials << '\n';
  }
}

RetrievalResult read_retrieval_csv(std::istream& in) {
  RetrievalResult r;
  std::string line;
  std::size_t lineno = 0;
  bool seen_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    if (!seen_columns) {
      if (line != "algebra,d,k,mean,std,trials") throw ParseError(lineno, "unexpected CSV columns");
      seen_columns = true;
      continue;
    }
    const auto f = split(line, ',');
    RetrievalCell c{};
    if (f.size() != 6 || !parse_uint(f[1], c.d) || !parse_uint(f[2], c.k) || !parse_double(f[3], c.mean) ||
        !parse_double(f[4], c.std) || !parse_uint(f[5], c.trials)) {
      throw ParseError(lineno, "malformed retrieval row");
    }
    c.variant = parse_variant(f[0]);
    r.cells.push_back(c);
  }
  return r;
}

void write_heatmap_svg(const RetrievalResult& r, std::ostream& out, std::string_view header) {
  std::vector<Variant> variants;
  std::set<std::size_t> dim_set, k_set;
  for (const auto& c : r.cells) {
    if (std::find(variants.begin(), variants.end(), c.variant) == variants.end()) variants.push_back(c.variant);
    dim_set.insert(c.d);
    k_set.insert(c.k);
  }
  const std::vector<std::size_t> dims(dim_set.begin(), dim_set.end());
  const std::vector<std::size_t> ks(k_set.begin(), k_set.end());

  const double cell_w = ks.empty() ? 0.0 : std::max(4.0, 400.0 / static_cast<double>(ks.size()));
  const double cell_h = dims.empty() ? 0.0 : std::max(1.0, 300.0 / static_cast<double>(dims.size()));
  const double margin = 60.0;
  const double panel_w = margin + cell_w * static_cast<double>(ks.size()) + 20.0;
  const double panel_h = margin + cell_h * static_cast<double>(dims.size()) + 40.0;
  const double width = std::max(1.0, panel_w * static_cast<double>(variants.size()));
  const double height = panel_h + 30.0;

  if (!header.empty()) out << "<!-- " << header << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(width) << "\" height=\""
      << format_double(height) << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << format_double(width) << "\" height=\""
      << format_double(height) << "\" fill=\"#ffffff\"/>\n";
  for (std::size_t p = 0; p < variants.size(); ++p) {
    const double x0 = static_cast<double>(p) * panel_w + margin;
    const double y0 = 30.0;
    out << "<g class=\"panel\" data-algebra=\"" << to_string(variants[p]) << "\">\n";
    out << "<text x=\"" << format_double(x0) << "\" y=\"18\" font-size=\"14\">" << to_string(variants[p])
        << "</text>\n";
    for (const auto& c : r.cells) {
      if (c.variant != variants[p]) continue;
      const auto col = static_cast<double>(std::lower_bound(ks.begin(), ks.end(), c.k) - ks.begin());
      const auto row = static_cast<double>(std::lower_bound(dims.begin(), dims.end(), c.d) - dims.begin());
      // Larger d is drawn higher up.
      const double y = y0 + (static_cast<double>(dims.size()) - 1.0 - row) * cell_h;
      out << "<rect class=\"cell\" x=\"" << format_double(x0 + col * cell_w) << "\" y=\"" << format_double(y)
          << "\" width=\"" << format_double(cell_w) << "\" height=\"" << format_double(cell_h) << "\" fill=\""
          << warm_colormap(c.mean) << "\"><title>d=" << c.d << " k=" << c.k << " mean=" << format_double(c.mean)
          << "</title></rect>\n";
    }
    const double axis_y = y0 + cell_h * static_cast<double>(dims.size());
    out << "<text x=\"" << format_double(x0) << "\" y=\"" << format_double(axis_y + 28) << "\">k: "
        << (ks.empty() ? 0 : ks.front()) << " .. " << (ks.empty() ? 0 : ks.back()) << "</text>\n";
    out << "<text x=\"" << format_double(x0 - margin + 4) << "\" y=\"" << format_double(y0 + 10) << "\">d="
        << (dims.empty() ? 0 : dims.back()) << "</text>\n";
    out << "<text x=\"" << format_double(x0 - margin + 4) << "\" y=\"" << format_double(axis_y) << "\">d="
        << (dims.empty() ? 0 : dims.front()) << "</text>\n";
    out << "</g>\n";
  }
  out << "</svg>\n";
}

void write_variance_csv(const VarianceResult& r, std::ostream& out, std::string_view header) {
  write_header(out, header);
  out << "variant,d,k,mean,variance,samples\n";
  for (const auto& c : r.cells) {
    out << to_string(c.variant) << ',' << c.d << ',' << c.k << ',' << format_double(c.mean) << ','
        << format_double(c.variance) << ',' << c.samples << '\n';
  }
}

void emit_heatmap(const RetrievalResult& r, const std::filesystem::path& dir, std::string_view stem,
                  std::string_view header) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (std::string(stem) + ".csv");
  const auto svg_path = dir / (std::string(stem) + ".svg");
  std::ofstream csv(csv_path, std::ios::binary);
  std::ofstream svg(svg_path, std::ios::binary);
  if (!csv || !svg) throw Error("cannot write heatmap files in " + dir.string());
  write_retrieval_csv(r, csv, header);
  write_heatmap_svg(r, svg, header);
  if (!csv || !svg) throw Error("write failed in " + dir.string());
}

}  // namespace vsaxmc::experiments
