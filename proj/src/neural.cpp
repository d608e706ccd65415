#include "vsaxmc/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include "vsaxmc/binary_io.hpp"
#include "vsaxmc/error.hpp"
#include "vsaxmc/fft.hpp"
#include "vsaxmc/random.hpp"
#include "vsaxmc/text_format.hpp"

namespace vsaxmc::neural {
namespace {

constexpr double kPi = std::numbers::pi;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using ExampleRefs = std::vector<const data::Example*>;

struct Activations {
  MatrixXd z1, h1, z2, h2, raw;  // one column per example
};

void require_finite(const MatrixXd& m, const char* layer) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite activations in layer ") + layer);
}

double input_scale(const MlpModel& model, SparseInput x) {
  if (!model.normalize_inputs()) return 1.0;
  double ss = 0.0;
  for (const auto& f : x) ss += f.value * f.value;
  return ss > 0.0 ? 1.0 / std::sqrt(ss) : 1.0;
}

void check_input(const MlpModel& model, SparseInput x) {
  for (const auto& f : x) {
    if (f.index >= model.shape().num_features) {
      throw InvalidArgument("feature index " + std::to_string(f.index) + " >= F=" +
                            std::to_string(model.shape().num_features));
    }
  }
}

Activations run_forward(const MlpModel& model, const std::vector<SparseInput>& inputs) {
  const auto& L = model.layers();
  const auto batch = static_cast<Eigen::Index>(inputs.size());
  Activations a;
  a.z1 = L[0].bias.replicate(1, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto x = inputs[static_cast<std::size_t>(b)];
    check_input(model, x);
    const double scale = input_scale(model, x);
    for (const auto& f : x) a.z1.col(b) += L[0].weight.col(f.index) * (f.value * scale);
  }
  require_finite(a.z1, "hidden1");
  a.h1 = a.z1.cwiseMax(0.0);
  a.z2 = (L[1].weight * a.h1).colwise() + L[1].bias;
  require_finite(a.z2, "hidden2");
  a.h2 = a.z2.cwiseMax(0.0);

  const auto& shape = model.shape();
  if (shape.head == HeadKind::chrr_half) {
    const auto half = static_cast<Eigen::Index>(shape.hidden / 2);
    const MatrixXd xs = (L[2].weight * a.h2.topRows(half)).colwise() + L[2].bias;
    const MatrixXd ys = (L[3].weight * a.h2.bottomRows(half)).colwise() + L[3].bias;
    a.raw.resize(2 * xs.rows(), batch);
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      a.raw.row(2 * i) = xs.row(i);
      a.raw.row(2 * i + 1) = ys.row(i);
    }
  } else {
    a.raw = (L[2].weight * a.h2).colwise() + L[2].bias;
  }
  require_finite(a.raw, "head");
  return a;
}

// Angles of the circular heads and the derivative of each angle with
// respect to the raw values it depends on.
struct AngleMap {
  std::vector<double> theta;
  std::vector<double> dx, dy;  // pair heads: d theta / d x, d theta / d y; elementwise heads use dx
};

AngleMap map_angles(HeadKind head, const Eigen::Ref<const VectorXd>& raw) {
  AngleMap m;
  if (head == HeadKind::chrr || head == HeadKind::chrr_half) {
    const auto d = static_cast<std::size_t>(raw.size() / 2);
    m.theta.resize(d);
    m.dx.resize(d);
    m.dy.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double x = raw(static_cast<Eigen::Index>(2 * i));
      const double y = raw(static_cast<Eigen::Index>(2 * i + 1));
      const double r2 = x * x + y * y + kAngleEpsilon * kAngleEpsilon;
      const double r = std::sqrt(r2);
      m.theta[i] = std::atan2(y / r, x / r);
      m.dx[i] = -y / r2;
      m.dy[i] = x / r2;
    }
    return m;
  }
  const auto d = static_cast<std::size_t>(raw.size());
  m.theta.resize(d);
  m.dx.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double r = raw(static_cast<Eigen::Index>(i));
    if (head == HeadKind::chrr_sin) {
      m.theta[i] = kPi * std::sin(r);
      m.dx[i] = kPi * std::cos(r);
    } else {
      const double t = std::tanh(r);
      m.theta[i] = kPi * t;
      m.dx[i] = kPi * (1.0 - t * t);
    }
  }
  return m;
}

bool has_label(std::span<const LabelId> labels, LabelId l) {
  return std::find(labels.begin(), labels.end(), l) != labels.end();
}

double fc_loss(const Eigen::Ref<const VectorXd>& logits, std::span<const LabelId> labels, VectorXd* grad) {
  double loss = 0.0;
  for (Eigen::Index l = 0; l < logits.size(); ++l) {
    const double z = logits(l);
    const double y = has_label(labels, static_cast<LabelId>(l)) ? 1.0 : 0.0;
    loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    if (grad) (*grad)(l) = 1.0 / (1.0 + std::exp(-z)) - y;
  }
  return loss;
}

std::vector<double> correlate_with(std::span<const double> v, std::span<const std::complex<double>> spectrum,
                                   bool conjugate) {
  auto bins = fft::forward(v);
  for (std::size_t j = 0; j < bins.size(); ++j) bins[j] *= conjugate ? std::conj(spectrum[j]) : spectrum[j];
  return fft::inverse_real(bins);
}

double hrr_head_loss(const MlpModel& model, const Eigen::Ref<const VectorXd>& raw, std::span<const LabelId> labels,
                     VectorXd* grad) {
  const auto& cb = *model.hrr_codebook();
  const std::span<const double> s(raw.data(), static_cast<std::size_t>(raw.size()));
  const auto u = correlate_with(s, model.hrr_unbind_spectrum(), false);
  const std::size_t d = u.size();
  double uu = 0.0;
  for (double x : u) uu += x * x;
  const double nu = std::sqrt(uu + kNormEpsilon * kNormEpsilon);

  double loss = 0.0;
  std::vector<double> g(d, 0.0);
  for (LabelId l : labels) {
    const auto c = cb.label(l).components();
    double uc = 0.0, cc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      uc += u[i] * c[i];
      cc += c[i] * c[i];
    }
    const double nc = std::sqrt(cc);
    loss += 1.0 - uc / (nu * nc);
    if (grad) {
      const double a = 1.0 / (nu * nc);
      const double b = uc / (nu * nu * nu * nc);
      for (std::size_t i = 0; i < d; ++i) g[i] -= a * c[i] - b * u[i];
    }
  }
  if (grad) {
    // u = S (*) q is linear in S; its adjoint correlates with q.
    const auto gs = correlate_with(g, model.hrr_unbind_spectrum(), true);
    for (std::size_t i = 0; i < d; ++i) (*grad)(static_cast<Eigen::Index>(i)) = gs[i];
  }
  return loss;
}

double circular_head_loss(const MlpModel& model, const Eigen::Ref<const VectorXd>& raw,
                          std::span<const LabelId> labels, VectorXd* grad) {
  const auto& cb = *model.chrr_codebook();
  const HeadKind head = model.shape().head;
  const AngleMap m = map_angles(head, raw);
  const std::size_t d = m.theta.size();
  const auto p = cb.concept_vector().angles();
  const double inv_d = 1.0 / static_cast<double>(d);

  double loss = 0.0;
  std::vector<double> g(d, 0.0);
  for (LabelId l : labels) {
    const auto c = cb.label(l).angles();
    double sim = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = m.theta[j] - p[j] - c[j];
      sim += std::cos(delta);
      g[j] += std::sin(delta) * inv_d;
    }
    loss += 1.0 - sim * inv_d;
  }
  if (grad) {
    if (head == HeadKind::chrr || head == HeadKind::chrr_half) {
      for (std::size_t i = 0; i < d; ++i) {
        (*grad)(static_cast<Eigen::Index>(2 * i)) = g[i] * m.dx[i];
        (*grad)(static_cast<Eigen::Index>(2 * i + 1)) = g[i] * m.dy[i];
      }
    } else {
      for (std::size_t i = 0; i < d; ++i) (*grad)(static_cast<Eigen::Index>(i)) = g[i] * m.dx[i];
    }
  }
  return loss;
}

double example_loss(const MlpModel& model, const Eigen::Ref<const VectorXd>& raw, std::span<const LabelId> labels,
                    VectorXd* grad) {
  if (grad) grad->setZero(raw.size());
  switch (model.shape().head) {
    case HeadKind::fc:
      return fc_loss(raw, labels, grad);
    case HeadKind::hrr:
      return labels.empty() ? 0.0 : hrr_head_loss(model, raw, labels, grad);
    default:
      return labels.empty() ? 0.0 : circular_head_loss(model, raw, labels, grad);
  }
}

std::vector<SparseInput> inputs_of(const ExampleRefs& batch) {
  std::vector<SparseInput> inputs;
  inputs.reserve(batch.size());
  for (const auto* ex : batch) inputs.emplace_back(ex->features);
  return inputs;
}

// Fills `out` with gradients of the mean batch loss. The first layer's weight
// gradient is only written on the columns of features present in the batch;
// the caller guarantees the other columns are zero.
double backward_into(const MlpModel& model, const ExampleRefs& batch, Gradients& out) {
  const auto inputs = inputs_of(batch);
  const Activations a = run_forward(model, inputs);
  const auto B = static_cast<Eigen::Index>(batch.size());
  const double inv_b = 1.0 / static_cast<double>(B);

  MatrixXd draw(a.raw.rows(), B);
  double total = 0.0;
  VectorXd g;
  for (Eigen::Index b = 0; b < B; ++b) {
    total += example_loss(model, a.raw.col(b), batch[static_cast<std::size_t>(b)]->labels, &g);
    draw.col(b) = g * inv_b;
  }

  const auto& L = model.layers();
  auto& G = out.layers;
  MatrixXd dh2(a.h2.rows(), B);
  if (model.shape().head == HeadKind::chrr_half) {
    const auto half = static_cast<Eigen::Index>(model.shape().hidden / 2);
    const Eigen::Index d = draw.rows() / 2;
    MatrixXd dx(d, B), dy(d, B);
    for (Eigen::Index i = 0; i < d; ++i) {
      dx.row(i) = draw.row(2 * i);
      dy.row(i) = draw.row(2 * i + 1);
    }
    G[2].weight.noalias() = dx * a.h2.topRows(half).transpose();
    G[2].bias = dx.rowwise().sum();
    G[3].weight.noalias() = dy * a.h2.bottomRows(half).transpose();
    G[3].bias = dy.rowwise().sum();
    dh2.topRows(half).noalias() = L[2].weight.transpose() * dx;
    dh2.bottomRows(half).noalias() = L[3].weight.transpose() * dy;
  } else {
    G[2].weight.noalias() = draw * a.h2.transpose();
    G[2].bias = draw.rowwise().sum();
    dh2.noalias() = L[2].weight.transpose() * draw;
  }
  const MatrixXd dz2 = dh2.cwiseProduct((a.z2.array() > 0.0).cast<double>().matrix());
  G[1].weight.noalias() = dz2 * a.h1.transpose();
  G[1].bias = dz2.rowwise().sum();
  const MatrixXd dz1 =
      (L[1].weight.transpose() * dz2).cwiseProduct((a.z1.array() > 0.0).cast<double>().matrix());
  G[0].bias = dz1.rowwise().sum();
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto x = inputs[static_cast<std::size_t>(b)];
    const double scale = input_scale(model, x);
    for (const auto& f : x) G[0].weight.col(f.index) += dz1.col(b) * (f.value * scale);
  }
  out.loss = total * inv_b;
  return out.loss;
}

Gradients zero_gradients(const MlpModel& model) {
  Gradients g;
  for (const auto& layer : model.layers()) {
    g.layers.push_back({MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()), VectorXd::Zero(layer.bias.size())});
  }
  return g;
}

ExampleRefs refs_of(std::span<const data::Example> batch) {
  ExampleRefs refs;
  refs.reserve(batch.size());
  for (const auto& ex : batch) refs.push_back(&ex);
  return refs;
}

std::vector<LabelId> top_by_score(const std::vector<double>& scores, std::size_t k) {
  std::vector<LabelId> ids(scores.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<LabelId>(i);
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), [&](LabelId a, LabelId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  ids.resize(k);
  return ids;
}

std::vector<LabelId> ids_of(const std::vector<RankedLabel>& ranked) {
  std::vector<LabelId> ids;
  ids.reserve(ranked.size());
  for (const auto& r : ranked) ids.push_back(r.id);
  return ids;
}

}  // namespace

std::string_view to_string(HeadKind h) {
  switch (h) {
    case HeadKind::fc:
      return "fc";
    case HeadKind::hrr:
      return "hrr";
    case HeadKind::chrr:
      return "chrr";
    case HeadKind::chrr_half:
      return "chrr-half";
    case HeadKind::chrr_sin:
      return "chrr-sin";
    case HeadKind::chrr_tanh:
      return "chrr-tanh";
  }
  return "?";
}

HeadKind parse_head(std::string_view name) {
  for (auto h : {HeadKind::fc, HeadKind::hrr, HeadKind::chrr, HeadKind::chrr_half, HeadKind::chrr_sin,
                 HeadKind::chrr_tanh}) {
    if (name == to_string(h)) return h;
  }
  throw InvalidArgument("unknown head \"" + std::string(name) + "\"");
}

bool is_circular(HeadKind h) { return h != HeadKind::fc && h != HeadKind::hrr; }

void ModelShape::validate() const {
  if (num_features == 0 || hidden == 0 || num_labels == 0) throw InvalidArgument("model: F, h and L must be positive");
  if (head != HeadKind::fc && dim == 0) throw InvalidArgument("model: d must be positive");
  if (head == HeadKind::chrr_half && hidden % 2 != 0) {
    throw InvalidArgument("model: chrr-half needs an even hidden width, got " + std::to_string(hidden));
  }
}

std::size_t ModelShape::head_outputs() const {
  switch (head) {
    case HeadKind::fc:
      return num_labels;
    case HeadKind::chrr:
    case HeadKind::chrr_half:
      return 2 * dim;
    default:
      return dim;
  }
}

MlpModel::MlpModel(const ModelShape& shape, std::uint64_t seed, bool normalize_inputs)
    : shape_(shape), seed_(seed), normalize_inputs_(normalize_inputs) {
  shape_.validate();
  const auto F = static_cast<Eigen::Index>(shape_.num_features);
  const auto h = static_cast<Eigen::Index>(shape_.hidden);
  layers_.push_back({MatrixXd::Zero(h, F), VectorXd::Zero(h)});
  layers_.push_back({MatrixXd::Zero(h, h), VectorXd::Zero(h)});
  if (shape_.head == HeadKind::chrr_half) {
    const auto d = static_cast<Eigen::Index>(shape_.dim);
    layers_.push_back({MatrixXd::Zero(d, h / 2), VectorXd::Zero(d)});
    layers_.push_back({MatrixXd::Zero(d, h / 2), VectorXd::Zero(d)});
  } else {
    const auto out = static_cast<Eigen::Index>(shape_.head_outputs());
    layers_.push_back({MatrixXd::Zero(out, h), VectorXd::Zero(out)});
  }
  if (shape_.head == HeadKind::hrr) {
    hrr_codebook_ = HrrCodebook::generate(shape_.dim, shape_.num_labels, seed_);
    const auto inverse = hrr::invert(hrr_codebook_->concept_vector());
    unbind_spectrum_ = fft::forward(inverse.components());
  } else if (is_circular(shape_.head)) {
    chrr_codebook_ = ChrrCodebook::generate(shape_.dim, shape_.num_labels, seed_);
  }
}

MlpModel MlpModel::create(const ModelShape& shape, std::uint64_t seed, bool normalize_inputs) {
  MlpModel m(shape, seed, normalize_inputs);
  Rng rng(derive_seed(seed, {0x77656967ULL}));
  for (auto& layer : m.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> init(-bound, bound);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = init(rng);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = init(rng);
  }
  return m;
}

std::size_t MlpModel::head_weight_count() const {
  std::size_t n = 0;
  for (std::size_t i = 2; i < layers_.size(); ++i) n += static_cast<std::size_t>(layers_[i].weight.size());
  return n;
}

std::size_t MlpModel::head_bias_count() const {
  std::size_t n = 0;
  for (std::size_t i = 2; i < layers_.size(); ++i) n += static_cast<std::size_t>(layers_[i].bias.size());
  return n;
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> cartesian_to_angles(std::span<const double> raw) {
  if (raw.size() % 2 != 0) throw InvalidArgument("cartesian_to_angles: odd number of values");
  const Eigen::Map<const VectorXd> v(raw.data(), static_cast<Eigen::Index>(raw.size()));
  auto theta = map_angles(HeadKind::chrr, v).theta;
  for (double& t : theta) t = chrr::canonicalize(t);
  return theta;
}

HeadOutput forward(const MlpModel& model, SparseInput x) {
  const Activations a = run_forward(model, {x});
  const VectorXd raw = a.raw.col(0);
  HeadOutput out{model.shape().head, {}};
  if (is_circular(out.head)) {
    out.values = map_angles(out.head, raw).theta;
    for (double& t : out.values) t = chrr::canonicalize(t);
  } else {
    out.values.assign(raw.data(), raw.data() + raw.size());
  }
  return out;
}

double chrr_loss(const chrr::CircularVector& predicted, std::span<const LabelId> labels, const ChrrCodebook& codebook) {
  if (labels.empty()) throw InvalidArgument("chrr_loss: empty label set");
  const auto decoded = decode(codebook, predicted);
  double loss = 0.0;
  for (LabelId l : labels) loss += 1.0 - chrr::similarity(decoded, codebook.label(l));
  return loss;
}

double hrr_loss(const hrr::RealHrrVector& predicted, std::span<const LabelId> labels, const HrrCodebook& codebook) {
  if (labels.empty()) throw InvalidArgument("hrr_loss: empty label set");
  const auto decoded = decode(codebook, predicted);
  double loss = 0.0;
  for (LabelId l : labels) loss += 1.0 - hrr::similarity(decoded, codebook.label(l));
  return loss;
}

Gradients backward(const MlpModel& model, std::span<const data::Example> batch) {
  if (batch.empty()) throw InvalidArgument("backward: empty batch");
  Gradients g = zero_gradients(model);
  backward_into(model, refs_of(batch), g);
  return g;
}

double batch_loss(const MlpModel& model, std::span<const data::Example> batch) {
  if (batch.empty()) throw InvalidArgument("batch_loss: empty batch");
  const auto refs = refs_of(batch);
  const Activations a = run_forward(model, inputs_of(refs));
  double total = 0.0;
  for (Eigen::Index b = 0; b < a.raw.cols(); ++b) {
    total += example_loss(model, a.raw.col(b), refs[static_cast<std::size_t>(b)]->labels, nullptr);
  }
  return total / static_cast<double>(a.raw.cols());
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("train: learning rate must be finite and non-negative");
  }
  if (batch_size == 0 || epochs == 0) throw InvalidArgument("train: batch size and epochs must be positive");
}

TrainLog train(MlpModel& model, const data::SparseDataset& train_set, const TrainConfig& cfg,
               const std::function<void(std::size_t, double)>& on_epoch) {
  cfg.validate();
  if (train_set.size() == 0) throw InvalidArgument("train: empty dataset");
  if (train_set.num_features != model.shape().num_features || train_set.num_labels != model.shape().num_labels) {
    throw InvalidArgument("train: dataset F/L (" + std::to_string(train_set.num_features) + "/" +
                          std::to_string(train_set.num_labels) + ") differ from the model");
  }
  TrainLog log;
  Gradients grad = zero_gradients(model);
  std::vector<std::size_t> order(train_set.size());
  std::vector<data::FeatureId> touched;
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, {epoch}));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0, batch_index = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      ExampleRefs batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set.examples[order[i]]);

      for (auto f : touched) grad.layers[0].weight.col(f).setZero();
      touched.clear();
      for (const auto* ex : batch)
        for (const auto& f : ex->features) touched.push_back(f.index);
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

      double loss = 0.0;
      try {
        loss = backward_into(model, batch, grad);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": " + e.what());
      }
      if (!std::isfinite(loss)) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": non-finite loss");
      }
      total += loss * static_cast<double>(batch.size());

      auto layers = model.layers();
      for (auto f : touched) layers[0].weight.col(f) -= cfg.learning_rate * grad.layers[0].weight.col(f);
      layers[0].bias -= cfg.learning_rate * grad.layers[0].bias;
      for (std::size_t i = 1; i < layers.size(); ++i) {
        layers[i].weight -= cfg.learning_rate * grad.layers[i].weight;
        layers[i].bias -= cfg.learning_rate * grad.layers[i].bias;
      }
    }
    log.epoch_loss.push_back(total / static_cast<double>(train_set.size()));
    if (on_epoch) on_epoch(epoch, log.epoch_loss.back());
  }
  return log;
}

std::vector<LabelId> predict_ranking(const MlpModel& model, SparseInput x, std::size_t top_k) {
  const std::size_t L = model.shape().num_labels;
  if (top_k == 0 || top_k > L) {
    throw InvalidArgument("predict_ranking: top_k must be in [1, " + std::to_string(L) + "]");
  }
  const HeadOutput out = forward(model, x);
  if (out.head == HeadKind::fc) return top_by_score(out.values, top_k);
  if (out.head == HeadKind::hrr) {
    const auto& cb = *model.hrr_codebook();
    return ids_of(rank_labels(cb, decode(cb, hrr::RealHrrVector(out.values)), top_k));
  }
  const auto& cb = *model.chrr_codebook();
  return ids_of(rank_labels(cb, decode(cb, chrr::CircularVector(out.values)), top_k));
}

namespace {
constexpr std::string_view kModelMagic = "VSAM";
}

void save_model(const MlpModel& model, std::ostream& out) {
  const auto& s = model.shape();
  binary::write_magic(out, kModelMagic);
  binary::write_uint<std::uint16_t>(out, kModelVersion);
  binary::write_uint<std::uint8_t>(out, static_cast<std::uint8_t>(s.head));
  binary::write_uint<std::uint8_t>(out, model.normalize_inputs() ? 1 : 0);
  binary::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(s.num_features));
  binary::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(s.hidden));
  binary::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(s.head == HeadKind::fc ? 0 : s.dim));
  binary::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(s.num_labels));
  binary::write_uint<std::uint64_t>(out, model.seed());
  for (const auto& layer : model.layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) binary::write_f64(out, layer.weight(r, c));
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) binary::write_f64(out, layer.bias(r));
  }
  if (!out) throw Error("save_model: write failed");
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_model(model, out);
}

MlpModel load_model(std::istream& in) {
  binary::expect_magic(in, kModelMagic);
  const auto version = binary::read_uint<std::uint16_t>(in);
  if (version != kModelVersion) throw FormatError("model: unsupported version " + std::to_string(version));
  const auto head = binary::read_uint<std::uint8_t>(in);
  if (head > static_cast<std::uint8_t>(HeadKind::chrr_tanh)) {
    throw FormatError("model: unknown head " + std::to_string(head));
  }
  const auto flags = binary::read_uint<std::uint8_t>(in);
  ModelShape shape;
  shape.head = static_cast<HeadKind>(head);
  shape.num_features = binary::read_uint<std::uint32_t>(in);
  shape.hidden = binary::read_uint<std::uint32_t>(in);
  shape.dim = binary::read_uint<std::uint32_t>(in);
  shape.num_labels = binary::read_uint<std::uint32_t>(in);
  const auto seed = binary::read_uint<std::uint64_t>(in);
  try {
    shape.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
  MlpModel model(shape, seed, (flags & 1) != 0);
  for (auto& layer : model.layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = binary::read_f64(in);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = binary::read_f64(in);
  }
  return model;
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load_model(in);
}

void write_loss_log(const TrainLog& log, std::ostream& out, std::string_view header) {
  if (!header.empty()) out << "# " << header << '\n';
  out << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) out << e + 1 << ',' << format_double(log.epoch_loss[e]) << '\n';
}

}  // namespace vsaxmc::neural
