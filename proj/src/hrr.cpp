#include "vsaxmc/hrr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vsaxmc/error.hpp"
#include "vsaxmc/fft.hpp"

namespace vsaxmc::hrr {
namespace {

void require_same_dim(const RealHrrVector& a, const RealHrrVector& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

RealHrrVector from_bins(const std::vector<Complex>& bins) {
  return RealHrrVector(fft::inverse_real(bins));
}

}  // namespace

RealHrrVector::RealHrrVector(std::vector<double> components) : components_(std::move(components)) {
  if (components_.empty()) throw DimensionError("hrr vector: dimension must be >= 1");
  for (double c : components_) {
    if (!std::isfinite(c)) throw InvalidArgument("hrr vector: non-finite component");
  }
}

RealHrrVector RealHrrVector::zero(std::size_t d) { return RealHrrVector(std::vector<double>(d, 0.0)); }

RealHrrVector RealHrrVector::delta(std::size_t d) {
  std::vector<double> v(d, 0.0);
  if (d > 0) v[0] = 1.0;
  return RealHrrVector(std::move(v));
}

double RealHrrVector::norm() const noexcept {
  return std::sqrt(std::inner_product(components_.begin(), components_.end(), components_.begin(), 0.0));
}

Spectrum dft(const RealHrrVector& x) { return Spectrum(fft::forward(x.components())); }

RealHrrVector idft(const Spectrum& s) { return RealHrrVector(fft::inverse_real(s.bins())); }

RealHrrVector sample_gaussian(std::size_t d, Rng& rng) {
  if (d == 0) throw DimensionError("sample_gaussian: dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> v(d);
  for (double& c : v) c = normal(rng);
  return RealHrrVector(std::move(v));
}

RealHrrVector project(const RealHrrVector& x) {
  std::vector<Complex> bins = fft::forward(x.components());
  for (Complex& b : bins) {
    const double mag = std::abs(b);
    b = mag < kProjectFloor ? Complex(1.0, 0.0) : b / mag;
  }
  return from_bins(bins);
}

RealHrrVector bind(const RealHrrVector& a, const RealHrrVector& b) {
  require_same_dim(a, b, "bind");
  std::vector<Complex> fa = fft::forward(a.components());
  const std::vector<Complex> fb = fft::forward(b.components());
  for (std::size_t j = 0; j < fa.size(); ++j) fa[j] *= fb[j];
  return from_bins(fa);
}

RealHrrVector invert(const RealHrrVector& a) {
  std::vector<Complex> bins = fft::forward(a.components());
  for (std::size_t j = 0; j < bins.size(); ++j) {
    const double mag = std::abs(bins[j]);
    if (mag < kInvertFloor) throw SingularSpectrumError(j, mag);
    bins[j] = 1.0 / bins[j];
  }
  return from_bins(bins);
}

RealHrrVector unbind(const RealHrrVector& m, const RealHrrVector& cue) { return bind(m, invert(cue)); }

double dot(const RealHrrVector& a, const RealHrrVector& b) {
  require_same_dim(a, b, "dot");
  const auto x = a.components();
  const auto y = b.components();
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

double similarity(const RealHrrVector& a, const RealHrrVector& b) {
  require_same_dim(a, b, "similarity");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("similarity: zero-norm vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

RealHrrVector superpose(const RealHrrVector& a, const RealHrrVector& b) {
  require_same_dim(a, b, "superpose");
  std::vector<double> v(a.components().begin(), a.components().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
  return RealHrrVector(std::move(v));
}

RealHrrVector superpose_many(std::span<const RealHrrVector> vs) {
  if (vs.empty()) throw InvalidArgument("superpose_many: empty list");
  std::vector<double> v(vs.front().components().begin(), vs.front().components().end());
  for (const auto& x : vs.subspan(1)) {
    require_same_dim(vs.front(), x, "superpose_many");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += x[i];
  }
  return RealHrrVector(std::move(v));
}

RealHrrVector scale(const RealHrrVector& a, double factor) {
  std::vector<double> v(a.components().begin(), a.components().end());
  for (double& c : v) c *= factor;
  return RealHrrVector(std::move(v));
}

}  // namespace vsaxmc::hrr
