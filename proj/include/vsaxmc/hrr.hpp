#pragma once

// Real-valued Holographic Reduced Representations.
//
// Vectors are plain real arrays of dimension d. Binding is circular
// convolution computed in the frequency domain, unbinding multiplies by the
// spectral reciprocal of the cue, and superposition is vector addition.
//
// DFT convention: forward unnormalized, inverse scaled by 1/d. Under this
// convention a vector whose spectrum has unit magnitude in every bin has
// Euclidean norm exactly 1 (Parseval), and the delta vector [1, 0, ..., 0]
// has the all-ones spectrum.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "vsaxmc/random.hpp"

namespace vsaxmc::hrr {

using Complex = std::complex<double>;

class RealHrrVector {
 public:
  // Throws DimensionError when empty, InvalidArgument on non-finite entries.
  explicit RealHrrVector(std::vector<double> components);

  static RealHrrVector zero(std::size_t d);
  // Identity of binding: [1, 0, ..., 0].
  static RealHrrVector delta(std::size_t d);

  std::size_t dim() const noexcept { return components_.size(); }
  std::span<const double> components() const noexcept { return components_; }
  double operator[](std::size_t i) const { return components_[i]; }

  double norm() const noexcept;

  friend bool operator==(const RealHrrVector&, const RealHrrVector&) = default;

 private:
  std::vector<double> components_;
};

// Frequency-domain view of a vector. Only obtainable from dft().
class Spectrum {
 public:
  std::size_t size() const noexcept { return bins_.size(); }
  std::span<const Complex> bins() const noexcept { return bins_; }
  const Complex& operator[](std::size_t j) const { return bins_[j]; }

 private:
  explicit Spectrum(std::vector<Complex> bins) : bins_(std::move(bins)) {}
  friend Spectrum dft(const RealHrrVector& x);

  std::vector<Complex> bins_;
};

Spectrum dft(const RealHrrVector& x);
RealHrrVector idft(const Spectrum& s);

// Components i.i.d. N(0, 1/d).
RealHrrVector sample_gaussian(std::size_t d, Rng& rng);

// Rescales every spectral bin to unit magnitude. Bins with magnitude below
// kProjectFloor are replaced by 1+0i so the operation is total.
inline constexpr double kProjectFloor = 1e-15;
RealHrrVector project(const RealHrrVector& x);

// Circular convolution.
RealHrrVector bind(const RealHrrVector& a, const RealHrrVector& b);

// Spectral reciprocal. Throws SingularSpectrumError naming the first bin
// whose magnitude is below kInvertFloor.
inline constexpr double kInvertFloor = 1e-12;
RealHrrVector invert(const RealHrrVector& a);

// bind(m, invert(cue)).
RealHrrVector unbind(const RealHrrVector& m, const RealHrrVector& cue);

double dot(const RealHrrVector& a, const RealHrrVector& b);

// Cosine similarity. Throws InvalidArgument if either vector has zero norm.
double similarity(const RealHrrVector& a, const RealHrrVector& b);

RealHrrVector superpose(const RealHrrVector& a, const RealHrrVector& b);

// Componentwise sum of all vectors, accumulated in the given order.
RealHrrVector superpose_many(std::span<const RealHrrVector> vs);

RealHrrVector scale(const RealHrrVector& a, double factor);

}  // namespace vsaxmc::hrr
