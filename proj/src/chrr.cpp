#include "vsaxmc/chrr.hpp"

#include <algorithm>
#include <cmath>

#include "vsaxmc/error.hpp"

namespace vsaxmc::chrr {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

void require_same_dim(const CircularVector& a, const CircularVector& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

double phasor_angle(double re, double im) {
  if (std::hypot(re, im) < kDegenerateSum) return 0.0;
  return canonicalize(std::atan2(im, re));
}

}  // namespace

double canonicalize(double angle) {
  if (!std::isfinite(angle)) throw InvalidArgument("canonicalize: non-finite angle");
  // remainder() is exact and lands in [-pi, pi]; only the lower end needs folding.
  double r = std::remainder(angle, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r = kPi;
  return r;
}

double angular_difference(double a, double b) { return canonicalize(a - b); }

CircularVector::CircularVector(std::vector<double> angles) : angles_(std::move(angles)) {
  if (angles_.empty()) throw DimensionError("circular vector: dimension must be >= 1");
  for (double& a : angles_) a = canonicalize(a);
}

CircularVector CircularVector::zero(std::size_t d) { return CircularVector(std::vector<double>(d, 0.0)); }

CircularVector sample_uniform(std::size_t d, Rng& rng) {
  if (d == 0) throw DimensionError("sample_uniform: dimension must be >= 1");
  std::uniform_real_distribution<double> uniform(-kPi, kPi);
  std::vector<double> v(d);
  for (double& a : v) a = uniform(rng);
  return CircularVector(std::move(v));
}

CircularVector bind(const CircularVector& phi, const CircularVector& theta) {
  require_same_dim(phi, theta, "bind");
  std::vector<double> v(phi.dim());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = phi[j] + theta[j];
  return CircularVector(std::move(v));
}

CircularVector invert(const CircularVector& theta) {
  std::vector<double> v(theta.dim());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = -theta[j];
  return CircularVector(std::move(v));
}

CircularVector unbind(const CircularVector& m, const CircularVector& cue) {
  require_same_dim(m, cue, "unbind");
  std::vector<double> v(m.dim());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = m[j] - cue[j];
  return CircularVector(std::move(v));
}

double similarity(const CircularVector& phi, const CircularVector& theta) {
  require_same_dim(phi, theta, "similarity");
  double sum = 0.0;
  for (std::size_t j = 0; j < phi.dim(); ++j) sum += std::cos(phi[j] - theta[j]);
  return sum / static_cast<double>(phi.dim());
}

CircularVector superpose(const CircularVector& phi, const CircularVector& theta) {
  require_same_dim(phi, theta, "superpose");
  std::vector<double> v(phi.dim());
  for (std::size_t j = 0; j < v.size(); ++j) {
    // Sum the two terms in a fixed order so the result is commutative bitwise.
    const double c0 = std::cos(phi[j]), c1 = std::cos(theta[j]);
    const double s0 = std::sin(phi[j]), s1 = std::sin(theta[j]);
    v[j] = phasor_angle(std::min(c0, c1) + std::max(c0, c1), std::min(s0, s1) + std::max(s0, s1));
  }
  return CircularVector(std::move(v));
}

CircularVector superpose_many(std::span<const CircularVector> vs) {
  if (vs.empty()) throw InvalidArgument("superpose_many: empty list");
  const std::size_t d = vs.front().dim();
  for (const auto& v : vs) require_same_dim(vs.front(), v, "superpose_many");
  if (vs.size() == 1) return vs.front();
  std::vector<double> out(d);
  std::vector<double> re(vs.size()), im(vs.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      re[i] = std::cos(vs[i][j]);
      im[i] = std::sin(vs[i][j]);
    }
    std::sort(re.begin(), re.end());
    std::sort(im.begin(), im.end());
    double sr = 0.0, si = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      sr += re[i];
      si += im[i];
    }
    out[j] = phasor_angle(sr, si);
  }
  return CircularVector(std::move(out));
}

}  // namespace vsaxmc::chrr
