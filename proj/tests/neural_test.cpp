#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "vsaxmc/error.hpp"
#include "vsaxmc/neural.hpp"
#include "vsaxmc/random.hpp"

using namespace vsaxmc;
using namespace vsaxmc::neural;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr HeadKind kAllHeads[] = {HeadKind::fc,        HeadKind::hrr,      HeadKind::chrr,
                                  HeadKind::chrr_half, HeadKind::chrr_sin, HeadKind::chrr_tanh};

ModelShape small_shape(HeadKind head) { return {head, 32, 16, 8, 20}; }

std::vector<data::Example> random_batch(std::size_t n, std::size_t F, std::size_t L, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> value(0.5, 2.0);
  std::vector<data::Example> batch(n);
  for (auto& ex : batch) {
    ex.labels = sample_label_set(L, 1 + rng() % 3, rng);
    for (data::FeatureId f = 0; f < F; ++f) {
      if (rng() % 4 == 0) ex.features.push_back({f, value(rng)});
    }
  }
  return batch;
}

// Largest |analytic - central difference| / max(1, |analytic|) over every parameter.
double max_gradient_error(MlpModel& model, const std::vector<data::Example>& batch, double step = 1e-4) {
  const Gradients g = backward(model, batch);
  double worst = 0.0;
  auto layers = model.layers();
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + step;
    const double up = batch_loss(model, batch);
    param = saved - step;
    const double down = batch_loss(model, batch);
    param = saved;
    const double numeric = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic)));
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (Eigen::Index r = 0; r < layers[i].weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layers[i].weight.cols(); ++c) probe(layers[i].weight(r, c), g.layers[i].weight(r, c));
      probe(layers[i].bias(r), g.layers[i].bias(r));
    }
  }
  return worst;
}

MlpModel zeroed(const ModelShape& shape) {
  auto m = MlpModel::create(shape, 0);
  for (auto& l : m.layers()) {
    l.weight.setZero();
    l.bias.setZero();
  }
  return m;
}

}  // namespace

TEST_CASE("head names round trip") {
  for (auto h : kAllHeads) CHECK(parse_head(to_string(h)) == h);
  CHECK_THROWS_AS(parse_head("mlp"), InvalidArgument);
  CHECK_FALSE(is_circular(HeadKind::fc));
  CHECK_FALSE(is_circular(HeadKind::hrr));
  CHECK(is_circular(HeadKind::chrr_half));
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(MlpModel::create({HeadKind::chrr_half, 32, 15, 8, 20}, 0), InvalidArgument);
  CHECK_THROWS_AS(MlpModel::create({HeadKind::chrr, 0, 16, 8, 20}, 0), InvalidArgument);
  CHECK_THROWS_AS(MlpModel::create({HeadKind::hrr, 32, 16, 0, 20}, 0), InvalidArgument);
  CHECK_NOTHROW(MlpModel::create({HeadKind::fc, 32, 16, 0, 20}, 0));
}

TEST_CASE("layer shapes and head parameter counts") {
  const std::size_t F = 32, h = 16, d = 8, L = 20;
  for (auto head : kAllHeads) {
    const auto m = MlpModel::create({head, F, h, d, L}, 1);
    const auto layers = m.layers();
    CHECK(layers[0].weight.rows() == 16);
    CHECK(layers[0].weight.cols() == 32);
    CHECK(layers[1].weight.rows() == 16);
    CHECK(layers[1].weight.cols() == 16);
  }
  CHECK(MlpModel::create({HeadKind::fc, F, h, d, L}, 1).head_weight_count() == L * h);
  CHECK(MlpModel::create({HeadKind::chrr, F, h, d, L}, 1).head_weight_count() == 2 * d * h);
  const auto half = MlpModel::create({HeadKind::chrr_half, F, h, d, L}, 1);
  const auto hrr = MlpModel::create({HeadKind::hrr, F, h, d, L}, 1);
  CHECK(half.head_weight_count() == d * h);
  CHECK(half.head_weight_count() == hrr.head_weight_count());
  CHECK(half.layers().size() == 4);
  CHECK(half.layers()[2].weight.cols() == static_cast<Eigen::Index>(h / 2));
  CHECK(half.layers()[3].weight.cols() == static_cast<Eigen::Index>(h / 2));
  CHECK(MlpModel::create({HeadKind::chrr_sin, F, h, d, L}, 1).head_weight_count() == d * h);
}

TEST_CASE("initialisation is seeded and bounded") {
  const auto a = MlpModel::create(small_shape(HeadKind::chrr), 7);
  const auto b = MlpModel::create(small_shape(HeadKind::chrr), 7);
  const auto c = MlpModel::create(small_shape(HeadKind::chrr), 8);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.layers()[0].weight.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(32.0));
  CHECK(a.layers()[1].weight.cwiseAbs().maxCoeff() <= 0.25);
}

TEST_CASE("cartesian_to_angles examples") {
  const std::vector<double> raw{1, 0, 0, 1, -1, 0, 0, 0, 3, -4};
  const auto t = cartesian_to_angles(raw);
  REQUIRE(t.size() == 5);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == doctest::Approx(kPi / 2));
  CHECK(t[2] == doctest::Approx(kPi));
  CHECK(t[3] == 0.0);
  CHECK(t[4] == doctest::Approx(std::atan2(-4.0, 3.0)));
  Rng rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    const double x = n(rng), y = n(rng);
    const std::vector<double> small{x, y}, big{10 * x, 10 * y};
    CHECK(std::abs(cartesian_to_angles(small)[0] - cartesian_to_angles(big)[0]) < 1e-9);
    const double theta = cartesian_to_angles(small)[0];
    CHECK(theta > -kPi);
    CHECK(theta <= kPi);
  }
  CHECK_THROWS_AS(cartesian_to_angles(std::vector<double>{1, 2, 3}), InvalidArgument);
}

TEST_CASE("forward on zero weights") {
  const std::vector<data::Feature> x{{0, 1.0}, {5, 2.0}};
  const auto fc = forward(zeroed(small_shape(HeadKind::fc)), x);
  CHECK(fc.values == std::vector<double>(20, 0.0));
  const auto c = forward(zeroed(small_shape(HeadKind::chrr)), x);
  CHECK(c.values == std::vector<double>(8, 0.0));
  CHECK(forward(zeroed(small_shape(HeadKind::chrr_half)), x).values == std::vector<double>(8, 0.0));
  CHECK_THROWS_AS(forward(zeroed(small_shape(HeadKind::fc)), std::vector<data::Feature>{{32, 1.0}}), InvalidArgument);
}

TEST_CASE("tanh and sin heads map into (-pi, pi]") {
  auto m = zeroed(small_shape(HeadKind::chrr_tanh));
  auto bias = m.layers()[2].bias;
  for (Eigen::Index i = 0; i < bias.size(); ++i) bias(i) = -4.0 + static_cast<double>(i);
  m.layers()[2].bias = bias;
  const auto out = forward(m, {});
  for (Eigen::Index i = 0; i < bias.size(); ++i) {
    CHECK(out.values[static_cast<std::size_t>(i)] == doctest::Approx(kPi * std::tanh(bias(i))));
    CHECK(std::abs(out.values[static_cast<std::size_t>(i)]) < kPi);
  }
}

TEST_CASE("chrr_loss examples") {
  const auto cb = ChrrCodebook::generate(64, 10, 2);
  const std::vector<LabelId> one{4};
  CHECK(chrr_loss(encode(cb, one), one, cb) == doctest::Approx(0.0).epsilon(1e-9));

  const auto p = cb.concept_vector().angles();
  const auto c = cb.label(4).angles();
  std::vector<double> off(64);
  for (std::size_t i = 0; i < off.size(); ++i) off[i] = p[i] + c[i] + kPi;
  CHECK(chrr_loss(chrr::CircularVector(off), one, cb) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(chrr_loss(encode(cb, one), std::vector<LabelId>{}, cb), InvalidArgument);

  const std::vector<LabelId> three{1, 5, 8};
  const auto s = encode(cb, three);
  const double loss = chrr_loss(s, three, cb);
  CHECK(loss >= 0.0);
  CHECK(loss <= 6.0);
}

TEST_CASE("random prediction scores about 1 per label at d=1024") {
  const auto cb = ChrrCodebook::generate(1024, 5, 9);
  Rng rng(10);
  int within = 0;
  for (int t = 0; t < 200; ++t) {
    const double loss = chrr_loss(chrr::sample_uniform(1024, rng), std::vector<LabelId>{2}, cb);
    if (std::abs(loss - 1.0) < 0.15) ++within;
  }
  CHECK(within >= 198);
}

TEST_CASE("hrr_loss examples") {
  const auto cb = HrrCodebook::generate(256, 10, 2);
  const std::vector<LabelId> one{3};
  CHECK(hrr_loss(encode(cb, one), one, cb) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(hrr_loss(hrr::scale(encode(cb, one), -1.0), one, cb) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(hrr_loss(encode(cb, one), std::vector<LabelId>{}, cb), InvalidArgument);
}

TEST_CASE("analytic gradients match central differences for every head") {
  for (auto head : kAllHeads) {
    for (bool normalize : {false, true}) {
      CAPTURE(to_string(head));
      CAPTURE(normalize);
      auto model = MlpModel::create(small_shape(head), 11, normalize);
      const auto batch = random_batch(6, 32, 20, 12);
      CHECK(max_gradient_error(model, batch) < 1e-4);
    }
  }
}

TEST_CASE("examples without labels add nothing on vector-symbolic heads") {
  auto batch = random_batch(4, 32, 20, 3);
  for (auto& ex : batch) ex.labels.clear();
  for (auto head : {HeadKind::hrr, HeadKind::chrr, HeadKind::chrr_sin}) {
    const auto g = backward(MlpModel::create(small_shape(head), 1), batch);
    CHECK(g.loss == 0.0);
    for (const auto& l : g.layers) CHECK(l.weight.norm() == 0.0);
  }
  CHECK(backward(MlpModel::create(small_shape(HeadKind::fc), 1), batch).loss > 0.0);
}

TEST_CASE("a perfect prediction has zero gradient") {
  const std::vector<LabelId> label{6};
  std::vector<data::Example> batch{{label, {{1, 1.0}, {9, 2.0}}}};

  auto chrr_model = zeroed(small_shape(HeadKind::chrr));
  const auto target_vec = encode(*chrr_model.chrr_codebook(), label);
  const auto target = target_vec.angles();
  for (std::size_t i = 0; i < target.size(); ++i) {
    chrr_model.layers()[2].bias(static_cast<Eigen::Index>(2 * i)) = std::cos(target[i]);
    chrr_model.layers()[2].bias(static_cast<Eigen::Index>(2 * i + 1)) = std::sin(target[i]);
  }
  // keep the hidden units active so the gradient reaches every layer
  chrr_model.layers()[0].bias.setConstant(0.1);
  chrr_model.layers()[1].bias.setConstant(0.1);
  auto g = backward(chrr_model, batch);
  CHECK(g.loss < 1e-12);
  for (const auto& l : g.layers) CHECK(l.weight.norm() + l.bias.norm() < 1e-8);

  auto sin_model = zeroed(small_shape(HeadKind::chrr_sin));
  const auto sin_vec = encode(*sin_model.chrr_codebook(), label);
  const auto sin_target = sin_vec.angles();
  for (std::size_t i = 0; i < sin_target.size(); ++i) {
    sin_model.layers()[2].bias(static_cast<Eigen::Index>(i)) = std::asin(sin_target[i] / kPi);
  }
  g = backward(sin_model, batch);
  CHECK(g.loss < 1e-12);
  for (const auto& l : g.layers) CHECK(l.weight.norm() + l.bias.norm() < 1e-8);
}

TEST_CASE("chrr-half blocks are wired disjointly") {
  auto m = MlpModel::create(small_shape(HeadKind::chrr_half), 4);
  const std::vector<data::Feature> x{{2, 1.0}, {7, 1.5}, {30, 0.5}};
  const auto before = forward(m, x).values;
  // with the y block silenced every pair lies on the x axis
  m.layers()[3].weight.setZero();
  m.layers()[3].bias.setZero();
  for (double t : forward(m, x).values) CHECK((t == 0.0 || t == kPi));
  CHECK(before != forward(m, x).values);

  const auto batch = random_batch(5, 32, 20, 6);
  const auto g = backward(MlpModel::create(small_shape(HeadKind::chrr_half), 4), batch);
  CHECK(g.layers[2].weight.rows() == 8);
  CHECK(g.layers[2].weight.cols() == 8);
  CHECK(g.layers[3].weight.cols() == 8);
}

TEST_CASE("non-finite activations name the layer") {
  auto m = MlpModel::create(small_shape(HeadKind::chrr), 1);
  m.layers()[1].weight(0, 0) = std::numeric_limits<double>::infinity();
  m.layers()[0].bias.setConstant(1.0);
  try {
    forward(m, {});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("hidden2") != std::string::npos);
  }
}

namespace {

data::SparseDataset synthetic_fixture() {
  data::SyntheticSpec spec;
  spec.num_examples = 400;
  spec.num_features = 100;
  spec.num_labels = 10;
  spec.labels_per_example = 2;
  spec.noise = 0.05;
  spec.seed = 0;
  return data::generate_synthetic(spec);
}

}  // namespace

TEST_CASE("learning rate zero leaves parameters untouched") {
  const auto ds = synthetic_fixture();
  auto m = MlpModel::create({HeadKind::chrr, 100, 32, 16, 10}, 3);
  const auto original = m;
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 2;
  train(m, ds, cfg);
  CHECK(m == original);
}

TEST_CASE("training is deterministic and reduces the loss") {
  const auto ds = synthetic_fixture();
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.seed = 5;
  for (auto head : kAllHeads) {
    CAPTURE(to_string(head));
    auto a = MlpModel::create({head, 100, 32, 16, 10}, 3);
    auto b = MlpModel::create({head, 100, 32, 16, 10}, 3);
    std::size_t calls = 0;
    const auto log_a = train(a, ds, cfg, [&](std::size_t, double) { ++calls; });
    const auto log_b = train(b, ds, cfg);
    CHECK(calls == 6);
    CHECK(log_a.epoch_loss == log_b.epoch_loss);
    CHECK(a == b);
    CHECK(log_a.epoch_loss.back() < log_a.epoch_loss.front());
  }
}

TEST_CASE("train rejects mismatched shapes and bad configs") {
  const auto ds = synthetic_fixture();
  auto m = MlpModel::create({HeadKind::chrr, 99, 32, 16, 10}, 3);
  CHECK_THROWS_AS(train(m, ds, TrainConfig{}), InvalidArgument);
  auto ok = MlpModel::create({HeadKind::chrr, 100, 32, 16, 10}, 3);
  TrainConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(train(ok, ds, cfg), InvalidArgument);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  CHECK_THROWS_AS(train(ok, ds, cfg), InvalidArgument);
}

TEST_CASE("divergence reports epoch and batch") {
  const auto ds = synthetic_fixture();
  auto m = MlpModel::create({HeadKind::fc, 100, 32, 0, 10}, 3);
  TrainConfig cfg;
  cfg.learning_rate = 1e200;
  cfg.epochs = 3;
  try {
    train(m, ds, cfg);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string what = e.what();
    CHECK(what.find("epoch 0") != std::string::npos);
    CHECK(what.find("batch") != std::string::npos);
  }
}

TEST_CASE("predict_ranking examples") {
  auto fc = zeroed({HeadKind::fc, 4, 2, 0, 3});
  fc.layers()[2].bias = Eigen::Vector3d(0.1, 0.9, 0.5);
  CHECK(predict_ranking(fc, {}, 2) == std::vector<LabelId>{1, 2});
  CHECK(predict_ranking(fc, {}, 3) == std::vector<LabelId>{1, 2, 0});
  CHECK_THROWS_AS(predict_ranking(fc, {}, 4), InvalidArgument);
  CHECK_THROWS_AS(predict_ranking(fc, {}, 0), InvalidArgument);

  auto tie = zeroed({HeadKind::fc, 4, 2, 0, 3});
  CHECK(predict_ranking(tie, {}, 3) == std::vector<LabelId>{0, 1, 2});

  auto c = zeroed({HeadKind::chrr, 4, 2, 256, 12});
  const auto memory = encode(*c.chrr_codebook(), std::vector<LabelId>{3, 7});
  const auto target = memory.angles();
  for (std::size_t i = 0; i < target.size(); ++i) {
    c.layers()[2].bias(static_cast<Eigen::Index>(2 * i)) = std::cos(target[i]);
    c.layers()[2].bias(static_cast<Eigen::Index>(2 * i + 1)) = std::sin(target[i]);
  }
  auto top = predict_ranking(c, {}, 2);
  std::sort(top.begin(), top.end());
  CHECK(top == std::vector<LabelId>{3, 7});

  auto h = zeroed({HeadKind::hrr, 4, 2, 256, 12});
  const auto hrr_memory = encode(*h.hrr_codebook(), std::vector<LabelId>{5});
  const auto s = hrr_memory.components();
  for (std::size_t i = 0; i < s.size(); ++i) h.layers()[2].bias(static_cast<Eigen::Index>(i)) = s[i];
  CHECK(predict_ranking(h, {}, 1) == std::vector<LabelId>{5});
}

TEST_CASE("model files round trip byte for byte") {
  const auto ds = synthetic_fixture();
  for (auto head : kAllHeads) {
    CAPTURE(to_string(head));
    auto m = MlpModel::create({head, 100, 16, 8, 10}, 21, head == HeadKind::chrr);
    TrainConfig cfg;
    cfg.epochs = 1;
    train(m, ds, cfg);
    std::stringstream first;
    save_model(m, first);
    const auto loaded = load_model(first);
    CHECK(loaded == m);
    CHECK(loaded.shape().num_labels == 10);
    std::stringstream second;
    save_model(loaded, second);
    CHECK(first.str() == second.str());
    const std::vector<data::Feature> x{{3, 1.0}, {40, 1.0}};
    CHECK(predict_ranking(loaded, x, 5) == predict_ranking(m, x, 5));
  }
}

TEST_CASE("model loading rejects damaged files") {
  std::stringstream bad("VSAX");
  CHECK_THROWS_AS(load_model(bad), FormatError);
  std::stringstream buf;
  save_model(MlpModel::create(small_shape(HeadKind::hrr), 1), buf);
  const std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_model(truncated), FormatError);
  std::string wrong_head = bytes;
  wrong_head[6] = 9;
  std::stringstream bad_head(wrong_head);
  CHECK_THROWS_AS(load_model(bad_head), FormatError);
}

TEST_CASE("loss log csv") {
  std::ostringstream out;
  write_loss_log(TrainLog{{0.5, 0.25}}, out, "vsaxmc test");
  CHECK(out.str() == "# vsaxmc test\nepoch,mean_loss\n1,0.5\n2,0.25\n");
}
