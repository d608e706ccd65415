#pragma once

// Circular HRR: every slot of a vector is an angle on the unit circle.
//
// Binding adds angles modulo 2 pi, the inverse negates them, similarity is the
// mean cosine of slot differences and superposition keeps only the angle of
// the phasor sum. Vectors are stored as raw angles, one double per slot;
// unit phasors only exist transiently inside operations.

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "vsaxmc/random.hpp"

namespace vsaxmc::chrr {

inline constexpr double kPi = std::numbers::pi;

// Maps a finite angle into (-pi, pi]. Both pi and -pi map to pi.
// Throws InvalidArgument for non-finite input.
double canonicalize(double angle);

// Signed distance between two angles on the circle, in (-pi, pi].
double angular_difference(double a, double b);

class CircularVector {
 public:
  // Canonicalizes every angle. Throws DimensionError when empty and
  // InvalidArgument on non-finite angles.
  explicit CircularVector(std::vector<double> angles);

  static CircularVector zero(std::size_t d);

  std::size_t dim() const noexcept { return angles_.size(); }
  std::span<const double> angles() const noexcept { return angles_; }
  double operator[](std::size_t i) const { return angles_[i]; }

  friend bool operator==(const CircularVector&, const CircularVector&) = default;

 private:
  std::vector<double> angles_;
};

// Angles i.i.d. uniform on (-pi, pi].
CircularVector sample_uniform(std::size_t d, Rng& rng);

CircularVector bind(const CircularVector& phi, const CircularVector& theta);
CircularVector invert(const CircularVector& theta);
// bind(m, invert(cue)).
CircularVector unbind(const CircularVector& m, const CircularVector& cue);

// (1/d) sum_j cos(phi_j - theta_j).
double similarity(const CircularVector& phi, const CircularVector& theta);

// Angle of the sum of two unit phasors. Commutative but not associative, so
// combining more than two vectors should go through superpose_many.
CircularVector superpose(const CircularVector& phi, const CircularVector& theta);

// Angle of the sum of all unit phasors, in one pass. Per slot the phasor
// components are summed in sorted order, which makes the result bitwise
// independent of the order of `vs`. A sum with magnitude below
// kDegenerateSum yields angle 0. A single vector is returned unchanged.
inline constexpr double kDegenerateSum = 1e-12;
CircularVector superpose_many(std::span<const CircularVector> vs);

}  // namespace vsaxmc::chrr
