#include "vsaxmc/label_codec.hpp"

#include <algorithm>
#include <fstream>

#include "vsaxmc/binary_io.hpp"
#include "vsaxmc/error.hpp"

namespace vsaxmc {

std::string_view to_string(Algebra a) { return a == Algebra::hrr ? "hrr" : "chrr"; }

Algebra parse_algebra(std::string_view name) {
  if (name == "hrr") return Algebra::hrr;
  if (name == "chrr") return Algebra::chrr;
  throw InvalidArgument("unknown algebra \"" + std::string(name) + "\"");
}

template <class A>
Codebook<A> Codebook<A>::generate(std::size_t d, std::size_t num_labels, std::uint64_t seed, bool projected) {
  if (num_labels == 0) throw InvalidArgument("codebook: need at least one label");
  Rng rng(seed);
  vector_type concept_vector = A::sample(d, rng, projected);
  std::vector<vector_type> labels;
  labels.reserve(num_labels);
  for (std::size_t i = 0; i < num_labels; ++i) labels.push_back(A::sample(d, rng, projected));
  return Codebook(std::move(concept_vector), std::move(labels), seed, projected);
}

template <class A>
Codebook<A>::Codebook(vector_type concept_vector, std::vector<vector_type> labels, std::uint64_t seed,
                      bool projected)
    : concept_(std::move(concept_vector)), labels_(std::move(labels)), seed_(seed), projected_(projected) {
  if (labels_.empty()) throw InvalidArgument("codebook: need at least one label");
  for (const auto& v : labels_) {
    if (v.dim() != concept_.dim()) throw DimensionError("codebook: label vectors disagree on dimension");
  }
}

template class Codebook<HrrAlgebra>;
template class Codebook<ChrrAlgebra>;

namespace {

std::vector<LabelId> checked_sorted(std::span<const LabelId> labels, std::size_t n) {
  if (labels.empty()) throw InvalidArgument("encode: empty label set");
  std::vector<LabelId> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("encode: duplicate label id");
  }
  if (sorted.back() >= n) {
    throw InvalidArgument("encode: label id " + std::to_string(sorted.back()) + " out of range (N=" +
                          std::to_string(n) + ")");
  }
  return sorted;
}

bool ranks_before(const RankedLabel& a, const RankedLabel& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

}  // namespace

template <class A>
MemoryVector<A> encode(const Codebook<A>& codebook, std::span<const LabelId> labels) {
  const std::vector<LabelId> sorted = checked_sorted(labels, codebook.size());
  std::vector<typename A::vector_type> bound;
  bound.reserve(sorted.size());
  for (LabelId id : sorted) bound.push_back(A::bind(codebook.concept_vector(), codebook.label(id)));
  return A::superpose_many(bound);
}

template <class A>
typename A::vector_type decode(const Codebook<A>& codebook, const MemoryVector<A>& memory) {
  if (memory.dim() != codebook.dim()) throw DimensionError("decode: memory dimension differs from codebook");
  return A::unbind(memory, codebook.concept_vector());
}

template <class A>
std::vector<RankedLabel> rank_labels(const Codebook<A>& codebook, const typename A::vector_type& decoded,
                                     std::size_t top_k) {
  if (top_k == 0 || top_k > codebook.size()) {
    throw InvalidArgument("rank_labels: top_k must be in [1, " + std::to_string(codebook.size()) + "]");
  }
  std::vector<RankedLabel> all(codebook.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto id = static_cast<LabelId>(i);
    all[i] = {id, A::similarity(decoded, codebook.label(id))};
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(top_k), all.end(), ranks_before);
  all.resize(top_k);
  return all;
}

template <class A>
double retrieval_accuracy(const Codebook<A>& codebook, std::span<const LabelId> labels) {
  const auto memory = encode(codebook, labels);
  const auto ranking = rank_labels(codebook, decode(codebook, memory), labels.size());
  std::size_t hits = 0;
  for (const auto& r : ranking) {
    if (std::find(labels.begin(), labels.end(), r.id) != labels.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

#define VSAXMC_INSTANTIATE(A)                                                                              \
  template MemoryVector<A> encode<A>(const Codebook<A>&, std::span<const LabelId>);                        \
  template A::vector_type decode<A>(const Codebook<A>&, const MemoryVector<A>&);                           \
  template std::vector<RankedLabel> rank_labels<A>(const Codebook<A>&, const A::vector_type&, std::size_t); \
  template double retrieval_accuracy<A>(const Codebook<A>&, std::span<const LabelId>);

VSAXMC_INSTANTIATE(HrrAlgebra)
VSAXMC_INSTANTIATE(ChrrAlgebra)
#undef VSAXMC_INSTANTIATE

std::vector<LabelId> sample_label_set(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw InvalidArgument("sample_label_set: k exceeds N");
  // Partial Fisher-Yates over the id range.
  std::vector<LabelId> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<LabelId>(i);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

namespace {

constexpr std::string_view kCodebookMagic = "VSAC";
constexpr std::uint8_t kTagHrrProjected = 0;
constexpr std::uint8_t kTagChrr = 1;
constexpr std::uint8_t kTagHrrPlain = 2;

template <class A>
void write_vector(std::ostream& out, const typename A::vector_type& v) {
  for (double x : A::values(v)) binary::write_f64(out, x);
}

template <class A>
typename A::vector_type read_vector(std::istream& in, std::size_t d) {
  std::vector<double> v(d);
  for (double& x : v) x = binary::read_f64(in);
  return A::from_values(std::move(v));
}

template <class A>
Codebook<A> read_body(std::istream& in, std::size_t d, std::size_t n, std::uint64_t seed, bool projected) {
  auto concept_vector = read_vector<A>(in, d);
  std::vector<typename A::vector_type> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(read_vector<A>(in, d));
  return Codebook<A>(std::move(concept_vector), std::move(labels), seed, projected);
}

}  // namespace

void save_codebook(const AnyCodebook& codebook, std::ostream& out) {
  std::visit(
      [&out](const auto& cb) {
        using A = typename std::decay_t<decltype(cb)>::algebra;
        std::uint8_t tag = kTagChrr;
        if constexpr (A::id == Algebra::hrr) tag = cb.projected() ? kTagHrrProjected : kTagHrrPlain;
        binary::write_magic(out, kCodebookMagic);
        binary::write_uint<std::uint16_t>(out, kCodebookVersion);
        binary::write_uint<std::uint8_t>(out, tag);
        binary::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(cb.dim()));
        binary::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(cb.size()));
        binary::write_uint<std::uint64_t>(out, cb.seed());
        write_vector<A>(out, cb.concept_vector());
        for (const auto& v : cb.labels()) write_vector<A>(out, v);
      },
      codebook);
  if (!out) throw Error("save_codebook: write failed");
}

void save_codebook(const AnyCodebook& codebook, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_codebook(codebook, out);
}

AnyCodebook load_codebook(std::istream& in) {
  binary::expect_magic(in, kCodebookMagic);
  const auto version = binary::read_uint<std::uint16_t>(in);
  if (version != kCodebookVersion) throw FormatError("codebook: unsupported version " + std::to_string(version));
  const auto tag = binary::read_uint<std::uint8_t>(in);
  const auto d = binary::read_uint<std::uint32_t>(in);
  const auto n = binary::read_uint<std::uint32_t>(in);
  const auto seed = binary::read_uint<std::uint64_t>(in);
  if (d == 0 || n == 0) throw FormatError("codebook: zero dimension or label count");
  switch (tag) {
    case kTagHrrProjected:
      return read_body<HrrAlgebra>(in, d, n, seed, true);
    case kTagHrrPlain:
      return read_body<HrrAlgebra>(in, d, n, seed, false);
    case kTagChrr:
      return read_body<ChrrAlgebra>(in, d, n, seed, true);
    default:
      throw FormatError("codebook: unknown algebra tag " + std::to_string(tag));
  }
}

AnyCodebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load_codebook(in);
}

}  // namespace vsaxmc
