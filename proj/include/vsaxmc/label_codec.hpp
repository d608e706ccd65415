#pragma once

// Label-set encoding on top of either algebra.
//
// A codebook assigns a random symbol vector c_l to every label id and keeps
// one extra concept vector p. A label set S is stored as the superposition of
// p (x) c_l over l in S; decoding binds the memory with the inverse of p and
// labels are ranked by similarity of the decoded vector to each c_l.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "vsaxmc/chrr.hpp"
#include "vsaxmc/hrr.hpp"
#include "vsaxmc/random.hpp"

namespace vsaxmc {

using LabelId = std::uint32_t;

enum class Algebra : std::uint8_t { hrr = 0, chrr = 1 };

std::string_view to_string(Algebra a);
Algebra parse_algebra(std::string_view name);

struct HrrAlgebra {
  using vector_type = hrr::RealHrrVector;
  static constexpr Algebra id = Algebra::hrr;

  // Gaussian N(0, 1/d), projected to a unit spectrum unless `projected` is false.
  static vector_type sample(std::size_t d, Rng& rng, bool projected) {
    auto v = hrr::sample_gaussian(d, rng);
    return projected ? hrr::project(v) : v;
  }
  static vector_type bind(const vector_type& a, const vector_type& b) { return hrr::bind(a, b); }
  static vector_type unbind(const vector_type& m, const vector_type& cue) { return hrr::unbind(m, cue); }
  static double similarity(const vector_type& a, const vector_type& b) { return hrr::similarity(a, b); }
  static vector_type superpose_many(std::span<const vector_type> vs) { return hrr::superpose_many(vs); }
  static std::span<const double> values(const vector_type& v) { return v.components(); }
  static vector_type from_values(std::vector<double> v) { return vector_type(std::move(v)); }
};

struct ChrrAlgebra {
  using vector_type = chrr::CircularVector;
  static constexpr Algebra id = Algebra::chrr;

  static vector_type sample(std::size_t d, Rng& rng, bool /*projected*/) { return chrr::sample_uniform(d, rng); }
  static vector_type bind(const vector_type& a, const vector_type& b) { return chrr::bind(a, b); }
  static vector_type unbind(const vector_type& m, const vector_type& cue) { return chrr::unbind(m, cue); }
  static double similarity(const vector_type& a, const vector_type& b) { return chrr::similarity(a, b); }
  static vector_type superpose_many(std::span<const vector_type> vs) { return chrr::superpose_many(vs); }
  static std::span<const double> values(const vector_type& v) { return v.angles(); }
  static vector_type from_values(std::vector<double> v) { return vector_type(std::move(v)); }
};

template <class A>
class Codebook {
 public:
  using algebra = A;
  using vector_type = typename A::vector_type;

  // Draws the concept vector first, then label vectors in id order, all from
  // one generator seeded with `seed`. `projected` only affects HRR.
  static Codebook generate(std::size_t d, std::size_t num_labels, std::uint64_t seed, bool projected = true);

  // Assembles a codebook from explicit vectors (fixtures, file loading).
  // Throws DimensionError if the vectors disagree on d.
  Codebook(vector_type concept_vector, std::vector<vector_type> labels, std::uint64_t seed = 0,
           bool projected = true);

  std::size_t dim() const noexcept { return concept_.dim(); }
  std::size_t size() const noexcept { return labels_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  bool projected() const noexcept { return projected_; }
  const vector_type& concept_vector() const noexcept { return concept_; }
  const vector_type& label(LabelId id) const { return labels_.at(id); }
  std::span<const vector_type> labels() const noexcept { return labels_; }

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  vector_type concept_;
  std::vector<vector_type> labels_;
  std::uint64_t seed_ = 0;
  bool projected_ = true;
};

using HrrCodebook = Codebook<HrrAlgebra>;
using ChrrCodebook = Codebook<ChrrAlgebra>;
using AnyCodebook = std::variant<HrrCodebook, ChrrCodebook>;

template <class A>
using MemoryVector = typename A::vector_type;

struct RankedLabel {
  LabelId id;
  double similarity;
  friend bool operator==(const RankedLabel&, const RankedLabel&) = default;
};

// Superposition of bind(p, c_l) over the label set taken in ascending id
// order. Throws InvalidArgument on an empty set, duplicates or ids >= N.
template <class A>
MemoryVector<A> encode(const Codebook<A>& codebook, std::span<const LabelId> labels);

// bind(m, invert(p)).
template <class A>
typename A::vector_type decode(const Codebook<A>& codebook, const MemoryVector<A>& memory);

// Exhaustive ranking of every label by similarity to `decoded`. Sorted by
// similarity descending, ties broken by ascending id. 1 <= top_k <= N.
template <class A>
std::vector<RankedLabel> rank_labels(const Codebook<A>& codebook, const typename A::vector_type& decoded,
                                     std::size_t top_k);

// Fraction of `labels` found in the top-|labels| ranking of decode(encode(labels)).
template <class A>
double retrieval_accuracy(const Codebook<A>& codebook, std::span<const LabelId> labels);

// k distinct ids drawn uniformly from [0, n), returned sorted.
std::vector<LabelId> sample_label_set(std::size_t n, std::size_t k, Rng& rng);

// Codebook file: "VSAC", u16 version, u8 algebra tag, u32 d, u32 N, u64 seed,
// then (N + 1) * d little-endian f64 values, concept vector first.
// The algebra tag is 0 for projected HRR, 1 for CHRR and 2 for HRR without
// projection.
inline constexpr std::uint16_t kCodebookVersion = 1;
void save_codebook(const AnyCodebook& codebook, std::ostream& out);
void save_codebook(const AnyCodebook& codebook, const std::filesystem::path& path);
AnyCodebook load_codebook(std::istream& in);
AnyCodebook load_codebook(const std::filesystem::path& path);

extern template class Codebook<HrrAlgebra>;
extern template class Codebook<ChrrAlgebra>;

}  // namespace vsaxmc
