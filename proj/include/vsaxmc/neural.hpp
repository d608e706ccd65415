#pragma once

// Feed-forward multi-label classifier: F sparse inputs, two ReLU hidden
// layers of width h and one of six output heads.
//
//   fc         h -> L logits, per-label sigmoid + binary cross-entropy
//   hrr        h -> d reals, decoded with the HRR concept inverse
//   chrr       h -> 2d reals read as d (x, y) pairs, angle = atan2(y, x)
//   chrr_half  two disjoint blocks h/2 -> d: the first half of the second
//              hidden layer produces every x, the second half every y
//   chrr_sin   h -> d reals, angle = pi * sin(raw)
//   chrr_tanh  h -> d reals, angle = pi * tanh(raw)
//
// Vector-symbolic heads are trained with
//   loss = sum_{p in labels} (1 - sim(S_hat (x) concept^-1, c_p))
// using cosine similarity for HRR and mean slot cosine for the circular
// heads. Batch loss is the mean of per-example losses.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vsaxmc/dataset.hpp"
#include "vsaxmc/label_codec.hpp"

namespace vsaxmc::neural {

enum class HeadKind : std::uint8_t { fc = 0, hrr = 1, chrr = 2, chrr_half = 3, chrr_sin = 4, chrr_tanh = 5 };

std::string_view to_string(HeadKind h);
HeadKind parse_head(std::string_view name);
bool is_circular(HeadKind h);

// atan2 origin guard: pairs are normalized by sqrt(x^2 + y^2 + eps^2).
inline constexpr double kAngleEpsilon = 1e-12;
// Norm guard for the HRR cosine inside the training loss.
inline constexpr double kNormEpsilon = 1e-12;

struct ModelShape {
  HeadKind head = HeadKind::chrr;
  std::size_t num_features = 0;  // F
  std::size_t hidden = 0;        // h, even for chrr_half
  std::size_t dim = 0;           // d, ignored by fc
  std::size_t num_labels = 0;    // L

  // Throws InvalidArgument on zero sizes or an odd h with chrr_half.
  void validate() const;
  // Rows produced by the head: L, d, 2d, 2d, d, d.
  std::size_t head_outputs() const;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // outputs x inputs
  Eigen::VectorXd bias;
  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight == b.weight && a.bias == b.bias;
  }
};

class MlpModel {
 public:
  // Weights and biases uniform in +-1/sqrt(fan_in) from `seed`; the label
  // codebook of vector-symbolic heads is generated from (algebra, d, L, seed).
  static MlpModel create(const ModelShape& shape, std::uint64_t seed, bool normalize_inputs = false);

  const ModelShape& shape() const noexcept { return shape_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool normalize_inputs() const noexcept { return normalize_inputs_; }

  // [0] first hidden, [1] second hidden, [2..] head blocks (two for chrr_half).
  std::span<const DenseLayer> layers() const noexcept { return layers_; }
  std::span<DenseLayer> layers() noexcept { return layers_; }

  // Head weight count excluding biases: L*h, d*h, 2d*h, d*h, d*h, d*h.
  std::size_t head_weight_count() const;
  std::size_t head_bias_count() const;
  std::size_t parameter_count() const;

  // Null for the fc head.
  const HrrCodebook* hrr_codebook() const noexcept { return hrr_codebook_ ? &*hrr_codebook_ : nullptr; }
  const ChrrCodebook* chrr_codebook() const noexcept { return chrr_codebook_ ? &*chrr_codebook_ : nullptr; }
  // Spectrum of the inverted concept vector (hrr head only).
  std::span<const std::complex<double>> hrr_unbind_spectrum() const noexcept { return unbind_spectrum_; }

  friend bool operator==(const MlpModel& a, const MlpModel& b) {
    return a.shape_.head == b.shape_.head && a.seed_ == b.seed_ && a.normalize_inputs_ == b.normalize_inputs_ &&
           a.layers_ == b.layers_;
  }

 private:
  friend MlpModel load_model(std::istream& in);
  MlpModel(const ModelShape& shape, std::uint64_t seed, bool normalize_inputs);

  ModelShape shape_;
  std::uint64_t seed_ = 0;
  bool normalize_inputs_ = false;
  std::vector<DenseLayer> layers_;
  std::optional<HrrCodebook> hrr_codebook_;
  std::optional<ChrrCodebook> chrr_codebook_;
  std::vector<std::complex<double>> unbind_spectrum_;
};

using SparseInput = std::span<const data::Feature>;

// Head output for one example: logits (fc), reals (hrr) or canonical angles.
struct HeadOutput {
  HeadKind head;
  std::vector<double> values;
};

// Throws InvalidArgument when a feature index is >= F.
HeadOutput forward(const MlpModel& model, SparseInput x);

// d angles from 2d raw values read as (raw[2i], raw[2i+1]) = (x_i, y_i).
// The origin maps to 0. Throws InvalidArgument for an odd length.
std::vector<double> cartesian_to_angles(std::span<const double> raw);

// Per-example losses. Both throw InvalidArgument on an empty label set.
double chrr_loss(const chrr::CircularVector& predicted, std::span<const LabelId> labels, const ChrrCodebook& codebook);
double hrr_loss(const hrr::RealHrrVector& predicted, std::span<const LabelId> labels, const HrrCodebook& codebook);

// Gradients shaped like MlpModel::layers().
struct Gradients {
  std::vector<DenseLayer> layers;
  double loss = 0.0;  // mean per-example loss of the batch
};

// Exact gradients of the mean batch loss. Examples with no labels add zero
// loss on the vector-symbolic heads. Throws NumericError naming the layer
// when an activation is non-finite.
Gradients backward(const MlpModel& model, std::span<const data::Example> batch);

// Mean batch loss without gradients.
double batch_loss(const MlpModel& model, std::span<const data::Example> batch);

struct TrainConfig {
  double learning_rate = 1.0;
  std::size_t batch_size = 64;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainLog {
  std::vector<double> epoch_loss;  // mean per-example loss of each epoch
};

// Mini-batch SGD, examples reshuffled every epoch from `cfg.seed`.
// Throws NumericError with the epoch and batch index on divergence.
TrainLog train(MlpModel& model, const data::SparseDataset& train_set, const TrainConfig& cfg,
               const std::function<void(std::size_t epoch, double loss)>& on_epoch = {});

// Top-k label ids. fc ranks by logit, vector-symbolic heads decode with the
// concept inverse and rank by similarity to the codebook. Ties by id.
// Throws InvalidArgument when top_k is 0 or exceeds L.
std::vector<LabelId> predict_ranking(const MlpModel& model, SparseInput x, std::size_t top_k);

// Model file: "VSAM", u16 version, u8 head, u8 flags, u32 F, u32 h, u32 d,
// u32 L, u64 seed, then every layer's weights (row-major) followed by its
// bias, little-endian f64, in layer order.
inline constexpr std::uint16_t kModelVersion = 1;
void save_model(const MlpModel& model, std::ostream& out);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(std::istream& in);
MlpModel load_model(const std::filesystem::path& path);

// CSV "epoch,mean_loss"; `header` becomes a leading "# " line.
void write_loss_log(const TrainLog& log, std::ostream& out, std::string_view header = {});

}  // namespace vsaxmc::neural
