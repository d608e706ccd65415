#include "vsaxmc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "vsaxmc/dataset.hpp"
#include "vsaxmc/error.hpp"
#include "vsaxmc/experiments.hpp"
#include "vsaxmc/label_codec.hpp"
#include "vsaxmc/metrics.hpp"
#include "vsaxmc/neural.hpp"
#include "vsaxmc/parallel.hpp"
#include "vsaxmc/text_format.hpp"
#include "vsaxmc/version.hpp"

namespace vsaxmc::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "1,5,10" or "1..50" or a mix such as "1,5..8".
std::vector<std::size_t> parse_list(std::string_view text, std::string_view flag) {
  std::vector<std::size_t> out;
  auto bad = [&] { return UsageError(std::string(flag) + ": cannot parse list \"" + std::string(text) + "\""); };
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) throw bad();
    return v;
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = text.substr(start, comma - start);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const std::size_t lo = number(item.substr(0, dots));
      const std::size_t hi = number(item.substr(dots + 2));
      if (lo > hi) throw bad();
      for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(number(item));
    }
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::size_t>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
  return s;
}

std::string header(std::string_view command, std::uint64_t seed) {
  return "vsaxmc " + std::string(kVersion) + " " + std::string(command) + " seed=" + std::to_string(seed);
}

void log_config(std::string_view command, const Json& resolved) {
  std::cerr << "vsaxmc " << command << ": " << resolved.dump() << '\n';
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

// Writes through `fn` to `path`, or to stdout when `path` is empty.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_output(path);
  fn(out);
  if (!out) throw Error("write to " + path + " failed");
}

CLI::App* leaf_subcommand(CLI::App& app) {
  CLI::App* cur = &app;
  while (true) {
    const auto subs = cur->get_subcommands();
    if (subs.empty()) return cur;
    cur = subs.front();
  }
}

std::string config_value(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + config_value(v[i], key);
    return s;
  }
  throw UsageError("config key \"" + key + "\" has an unsupported value type");
}

// Fills options absent from the command line with values from a JSON object
// whose keys are long flag names. Flags given on the command line win.
void apply_config(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
  CLI::App* leaf = leaf_subcommand(app);
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") throw UsageError("config files cannot nest");
    CLI::Option* opt = leaf->get_option_no_throw("--" + key);
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) throw UsageError("unknown config key \"" + key + "\" for " + leaf->get_name());
    if (opt->count() > 0) continue;
    opt->add_result(config_value(value, key));
    opt->run_callback();
  }
}

// ---- codebook gen

struct CodebookOptions {
  std::string algebra;
  std::size_t dim = 0;
  std::size_t labels = 0;
  std::uint64_t seed = 0;
  std::string out;
  bool no_project = false;
};

void run_codebook_gen(const CodebookOptions& o) {
  const Algebra algebra = parse_algebra(o.algebra);
  if (o.no_project && algebra != Algebra::hrr) throw UsageError("--no-project only applies to --algebra hrr");
  if (o.dim == 0 || o.labels == 0) throw UsageError("--dim and --labels must be positive");
  log_config("codebook gen", Json{{"algebra", o.algebra}, {"dim", o.dim}, {"labels", o.labels}, {"seed", o.seed},
                                  {"projected", !o.no_project}, {"out", o.out}});
  AnyCodebook cb = algebra == Algebra::hrr ? AnyCodebook(HrrCodebook::generate(o.dim, o.labels, o.seed, !o.no_project))
                                           : AnyCodebook(ChrrCodebook::generate(o.dim, o.labels, o.seed));
  auto out = open_output(o.out);
  save_codebook(cb, out);
}

// ---- exp retrieval / exp variance

struct SweepOptions {
  std::string dims;
  std::string ks;
  std::string variants;
  std::size_t labels = 1000;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

std::vector<experiments::Variant> parse_variants(const std::string& text) {
  std::vector<experiments::Variant> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(experiments::parse_variant(item));
    } catch (const InvalidArgument& e) {
      throw UsageError(std::string("--variants: ") + e.what());
    }
  }
  if (out.empty()) throw UsageError("--variants: empty list");
  return out;
}

experiments::SweepConfig sweep_config(const SweepOptions& o, std::size_t threads) {
  experiments::SweepConfig cfg;
  cfg.variants = parse_variants(o.variants);
  cfg.dims = parse_list(o.dims, "--dims");
  cfg.ks = parse_list(o.ks, "--ks");
  cfg.num_labels = o.labels;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.threads = threads;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

Json sweep_json(const experiments::SweepConfig& cfg, const std::string& out_dir) {
  Json variants = Json::array();
  for (auto v : cfg.variants) variants.push_back(std::string(experiments::to_string(v)));
  return Json{{"variants", variants}, {"dims", cfg.dims},   {"ks", cfg.ks},           {"labels", cfg.num_labels},
              {"trials", cfg.trials}, {"seed", cfg.seed},   {"threads", cfg.threads}, {"out-dir", out_dir}};
}

void run_retrieval(const SweepOptions& o, std::size_t threads) {
  const auto cfg = sweep_config(o, threads);
  log_config("exp retrieval", sweep_json(cfg, o.out_dir));
  const auto result = experiments::run_retrieval_sweep(cfg);
  experiments::emit_heatmap(result, o.out_dir, "retrieval", header("exp retrieval", cfg.seed));
}

void run_variance(const SweepOptions& o, std::size_t threads) {
  auto cfg = sweep_config(o, threads);
  if (cfg.dims.size() != 1) throw UsageError("--dim takes a single dimension");
  log_config("exp variance", sweep_json(cfg, o.out_dir));
  const auto result = experiments::run_variance_sweep(cfg);
  emit((fs::path(o.out_dir) / "variance.csv").string(),
       [&](std::ostream& out) { experiments::write_variance_csv(result, out, header("exp variance", cfg.seed)); });
}

// ---- train

struct TrainOptions {
  std::string head;
  std::string data;
  std::size_t dim = 400;
  std::size_t hidden = 512;
  double lr = 1.0;
  std::size_t batch = 64;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  bool normalize = false;
  std::string out;
  std::string loss_log;
};

void run_train(const TrainOptions& o, std::size_t threads) {
  neural::ModelShape shape{neural::parse_head(o.head), 1, o.hidden, o.dim, 1};
  neural::TrainConfig cfg{o.lr, o.batch, o.epochs, o.seed};
  try {
    shape.validate();
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  log_config("train", Json{{"head", o.head}, {"data", o.data}, {"dim", o.dim}, {"hidden", o.hidden}, {"lr", o.lr},
                           {"batch", o.batch}, {"epochs", o.epochs}, {"seed", o.seed}, {"normalize", o.normalize},
                           {"threads", threads}, {"out", o.out}, {"loss-log", o.loss_log}});

  const auto ds = data::parse_xmc(fs::path(o.data));
  shape.num_features = ds.num_features;
  shape.num_labels = ds.num_labels;
  auto model = neural::MlpModel::create(shape, o.seed, o.normalize);
  const auto log = neural::train(model, ds, cfg, [&](std::size_t epoch, double loss) {
    std::cerr << "epoch " << epoch + 1 << "/" << cfg.epochs << " loss " << format_double(loss) << '\n';
  });
  {
    auto out = open_output(o.out);
    neural::save_model(model, out);
  }
  if (!o.loss_log.empty()) {
    emit(o.loss_log, [&](std::ostream& out) { neural::write_loss_log(log, out, header("train", o.seed)); });
  }
}

// ---- eval

struct EvalOptions {
  std::string model;
  std::string data;
  std::string ks = "1,5,10,20";
  bool psp = false;
  std::string train;
  std::string out;
  std::string format;
};

void run_eval(const EvalOptions& o, std::size_t threads) {
  const auto ks = parse_list(o.ks, "--ks");
  if (ks.empty() || std::find(ks.begin(), ks.end(), 0) != ks.end()) throw UsageError("--ks: values must be positive");
  std::string format = o.format;
  if (format.empty()) format = fs::path(o.out).extension() == ".json" ? "json" : "csv";
  log_config("eval", Json{{"model", o.model}, {"data", o.data}, {"ks", ks}, {"psp", o.psp}, {"train", o.train},
                          {"threads", threads}, {"out", o.out}, {"format", format}});

  const auto model = neural::load_model(fs::path(o.model));
  const auto ds = data::parse_xmc(fs::path(o.data));
  const auto& shape = model.shape();
  if (ds.num_features != shape.num_features || ds.num_labels != shape.num_labels) {
    throw Error("dataset F/L (" + std::to_string(ds.num_features) + "/" + std::to_string(ds.num_labels) +
                ") differ from the model (" + std::to_string(shape.num_features) + "/" +
                std::to_string(shape.num_labels) + ")");
  }
  if (ds.size() == 0) throw Error("evaluation set is empty");
  const std::size_t top = *std::max_element(ks.begin(), ks.end());
  if (top > shape.num_labels) throw Error("--ks exceeds the number of labels");

  std::vector<std::vector<LabelId>> rankings(ds.size());
  parallel_for(ds.size(), threads,
               [&](std::size_t i) { rankings[i] = neural::predict_ranking(model, ds.examples[i].features, top); });

  std::optional<metrics::PropensityTable> props;
  if (o.psp) props = metrics::build_propensities(o.train.empty() ? ds : data::parse_xmc(fs::path(o.train)));

  std::vector<metrics::EvalRow> rows;
  const auto n = static_cast<double>(ds.size());
  for (auto k : ks) {
    double sum = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) sum += metrics::precision_at_k(rankings[i], ds.examples[i].labels, k);
    rows.push_back({"P", k, sum / n});
  }
  if (props) {
    for (auto k : ks) {
      double sum = 0.0;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        sum += metrics::psp_at_k(rankings[i], ds.examples[i].labels, k, *props);
      }
      rows.push_back({"PSP", k, sum / n});
    }
  }
  const auto head = header("eval", model.seed());
  emit(o.out, [&](std::ostream& out) {
    if (format == "json") {
      metrics::write_report_json(rows, out, head);
    } else {
      metrics::write_report_csv(rows, out, head);
    }
  });
}

// ---- data stats / data synth

void run_stats(const std::string& data_path, const std::string& out_path) {
  log_config("data stats", Json{{"data", data_path}, {"out", out_path}});
  const auto s = data::dataset_stats(data::parse_xmc(fs::path(data_path)));
  emit(out_path, [&](std::ostream& out) {
    out << "# " << header("data stats", 0) << '\n'
        << "stat,value\n"
        << "examples," << s.num_examples << '\n'
        << "features," << s.num_features << '\n'
        << "labels," << s.num_labels << '\n'
        << "label_occurrences," << s.label_occurrences << '\n'
        << "avg_samples_per_label," << format_double(s.avg_samples_per_label) << '\n'
        << "avg_labels_per_example," << format_double(s.avg_labels_per_example) << '\n'
        << "avg_features_per_example," << format_double(s.avg_features_per_example) << '\n';
  });
}

struct SynthOptions {
  data::SyntheticSpec spec{2500, 500, 50, 3, 0.05, 0};
  std::string out;
  std::size_t split = 0;
  std::string test_out;
};

void run_synth(const SynthOptions& o) {
  if (o.split > 0 && o.test_out.empty()) throw UsageError("--split needs --test-out");
  if (o.split == 0 && !o.test_out.empty()) throw UsageError("--test-out needs --split");
  if (o.split > o.spec.num_examples) throw UsageError("--split exceeds --examples");
  const auto& s = o.spec;
  log_config("data synth", Json{{"examples", s.num_examples}, {"features", s.num_features}, {"labels", s.num_labels},
                                {"per-example", s.labels_per_example}, {"noise", s.noise}, {"seed", s.seed},
                                {"out", o.out}, {"split", o.split}, {"test-out", o.test_out}});
  data::SparseDataset ds;
  try {
    ds = data::generate_synthetic(s);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (o.split == 0) {
    data::emit_xmc(ds, fs::path(o.out));
    return;
  }
  const auto [train, test] = data::split_at(ds, o.split);
  data::emit_xmc(train, fs::path(o.out));
  data::emit_xmc(test, fs::path(o.test_out));
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Vector-symbolic label encodings for extreme multi-label classification.", "vsaxmc"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::size_t threads = 1;
  app.add_option("--config", config_path, "JSON file whose keys mirror the long flags; flags win");
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // codebook
  auto* codebook = app.add_subcommand("codebook", "Label codebooks")->require_subcommand(1);
  CodebookOptions cb;
  auto* gen = codebook->add_subcommand("gen", "Generate and save a label codebook");
  gen->add_option("--algebra", cb.algebra)->required()->check(CLI::IsMember({"hrr", "chrr"}));
  gen->add_option("--dim", cb.dim)->required();
  gen->add_option("--labels", cb.labels)->required();
  gen->add_option("--seed", cb.seed)->capture_default_str();
  gen->add_option("--out", cb.out)->required();
  gen->add_flag("--no-project", cb.no_project, "Keep raw Gaussian HRR vectors");

  // exp
  auto* exp = app.add_subcommand("exp", "Synthetic experiments")->require_subcommand(1);
  const auto defaults = experiments::default_retrieval_config();
  SweepOptions ret{join(defaults.dims), join(defaults.ks), "hrr_proj,chrr"};
  auto* retrieval = exp->add_subcommand("retrieval", "Label-set retrieval accuracy over a (d, k) grid");
  retrieval->add_option("--dims", ret.dims, "Dimensions, e.g. 16,64 or 1..8")->capture_default_str();
  retrieval->add_option("--ks", ret.ks, "Label-set sizes")->capture_default_str();
  retrieval->add_option("--variants", ret.variants, "Any of hrr, hrr_proj, chrr")->capture_default_str();
  retrieval->add_option("--labels", ret.labels, "Codebook size N")->capture_default_str();
  retrieval->add_option("--trials", ret.trials)->capture_default_str();
  retrieval->add_option("--seed", ret.seed)->capture_default_str();
  retrieval->add_option("--out-dir", ret.out_dir)->capture_default_str();

  SweepOptions var{"400", "1..50", "hrr,hrr_proj,chrr", 1000, 200};
  auto* variance = exp->add_subcommand("variance", "Similarity mean and variance of encoded labels");
  variance->add_option("--dim", var.dims)->capture_default_str();
  variance->add_option("--ks", var.ks)->capture_default_str();
  variance->add_option("--variants", var.variants)->capture_default_str();
  variance->add_option("--trials", var.trials)->capture_default_str();
  variance->add_option("--seed", var.seed)->capture_default_str();
  variance->add_option("--out-dir", var.out_dir)->capture_default_str();

  // train
  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train a classifier on an XMC dataset");
  train->add_option("--head", tr.head)
      ->required()
      ->check(CLI::IsMember({"fc", "hrr", "chrr", "chrr-half", "chrr-sin", "chrr-tanh"}));
  train->add_option("--data", tr.data)->required()->check(CLI::ExistingFile);
  train->add_option("--dim", tr.dim)->capture_default_str();
  train->add_option("--hidden", tr.hidden)->capture_default_str();
  train->add_option("--lr", tr.lr)->capture_default_str();
  train->add_option("--batch", tr.batch)->capture_default_str();
  train->add_option("--epochs", tr.epochs)->capture_default_str();
  train->add_option("--seed", tr.seed)->capture_default_str();
  train->add_flag("--normalize", tr.normalize, "L2-normalize each input row");
  train->add_option("--out", tr.out, "Model file")->required();
  train->add_option("--loss-log", tr.loss_log, "CSV of the mean loss per epoch");

  // eval
  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Score a trained model with P@k and PSP@k");
  eval->add_option("--model", ev.model)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", ev.data)->required()->check(CLI::ExistingFile);
  eval->add_option("--ks", ev.ks)->capture_default_str();
  eval->add_flag("--psp", ev.psp, "Also report propensity-scored precision");
  eval->add_option("--train", ev.train, "Training set for propensities (default: the evaluation set)")
      ->check(CLI::ExistingFile);
  eval->add_option("--out", ev.out, "Report path (stdout when omitted)");
  eval->add_option("--format", ev.format, "csv or json (default from the --out extension)")
      ->check(CLI::IsMember({"csv", "json"}));

  // data
  auto* data_cmd = app.add_subcommand("data", "Dataset tools")->require_subcommand(1);
  std::string stats_data, stats_out;
  auto* stats = data_cmd->add_subcommand("stats", "Summary statistics of an XMC file");
  stats->add_option("--data", stats_data)->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stats_out, "Output path (stdout when omitted)");

  SynthOptions sy;
  auto* synth = data_cmd->add_subcommand("synth", "Generate a synthetic XMC dataset");
  synth->add_option("--examples", sy.spec.num_examples)->capture_default_str();
  synth->add_option("--features", sy.spec.num_features)->capture_default_str();
  synth->add_option("--labels", sy.spec.num_labels)->capture_default_str();
  synth->add_option("--per-example", sy.spec.labels_per_example)->capture_default_str();
  synth->add_option("--noise", sy.spec.noise)->capture_default_str();
  synth->add_option("--seed", sy.spec.seed)->capture_default_str();
  synth->add_option("--out", sy.out)->required();
  synth->add_option("--split", sy.split, "Write the first N examples to --out and the rest to --test-out");
  synth->add_option("--test-out", sy.test_out);

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) apply_config(app, config_path);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (gen->parsed()) {
      run_codebook_gen(cb);
    } else if (retrieval->parsed()) {
      run_retrieval(ret, threads);
    } else if (variance->parsed()) {
      run_variance(var, threads);
    } else if (train->parsed()) {
      run_train(tr, threads);
    } else if (eval->parsed()) {
      run_eval(ev, threads);
    } else if (stats->parsed()) {
      run_stats(stats_data, stats_out);
    } else if (synth->parsed()) {
      run_synth(sy);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace vsaxmc::cli
