// hpod: generate synthetic ink, extract features, train and evaluate SVM
// models, check invariance and serve predictions over HTTP.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpod/invariance.hpp"
#include "hpod/ink_io.hpp"
#include "hpod/model_io.hpp"
#include "hpod/pipeline.hpp"
#include "hpod/service_http.hpp"
#include "hpod/synthetic.hpp"

namespace {

using namespace hpod;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

PipelineConfig make_pipeline(FeatureKind kind, const std::string& config_path) {
  if (config_path.empty()) return default_pipeline(kind);
  return load_pipeline_config(config_path, kind);
}

FeatureKind kind_or_config(const std::string& feature, const std::string& config_path) {
  if (!feature.empty()) return parse_feature_kind(feature);
  if (!config_path.empty()) return load_pipeline_config(config_path).kind;
  throw UsageError("--feature is required");
}

std::string format_accuracy(double fraction) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << fraction * 100.0;
  return ss.str();
}

void write_confusion(const SvmModel& m, const EvaluationReport& r, const std::string& path) {
  std::ostringstream ss;
  ss << "true\\predicted";
  for (const auto& l : m.labels) ss << ',' << l;
  ss << '\n';
  for (std::size_t i = 0; i < r.confusion.size(); ++i) {
    ss << m.labels[i];
    for (std::size_t v : r.confusion[i]) ss << ',' << v;
    ss << '\n';
  }
  detail::write_file(path, ss.str());
}

std::pair<std::string, std::uint16_t> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == bind.size()) {
    throw UsageError("--bind expects addr:port, got '" + bind + "'");
  }
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(bind.substr(colon + 1), &used);
    if (used != bind.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("--bind port is not a number: '" + bind + "'");
  }
  if (port < 0 || port > 65535) throw UsageError("--bind port out of range");
  return {bind.substr(0, colon), static_cast<std::uint16_t>(port)};
}

std::vector<InkCharacter> load_ink_allow_empty(const std::string& path) {
  const std::string text = detail::read_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  return parse_ink_document(text, path).characters;
}

struct Options {
  std::string feature;
  std::string config;
  std::uint64_t seed = 0;
  int top_k = 1;
  std::string bind = "127.0.0.1:8080";
  std::string input;
  std::string input2;
  std::string output;
  std::string output2;
  int classes = 96;
  int per_class = 25;
  double fraction = 0.8;
  bool no_stratify = false;
  int trials = 3;
  std::optional<double> width;
  std::optional<double> penalty;
};

int run_generate(const Options& o) {
  const auto chars = generate_synthetic(o.classes, o.per_class, o.seed);
  save_ink(chars, o.output,
           {{"generator", "synthetic"},
            {"classes", std::to_string(o.classes)},
            {"per_class", std::to_string(o.per_class)},
            {"seed", std::to_string(o.seed)}});
  std::cout << "wrote " << chars.size() << " characters to " << o.output << '\n';
  return 0;
}

int run_split(const Options& o) {
  const auto r = split(load_ink(o.input), {o.fraction, o.seed, !o.no_stratify});
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  save_ink(r.train, o.output);
  save_ink(r.test, o.output2);
  std::cout << "train " << r.train.size() << ", test " << r.test.size() << '\n';
  return 0;
}

int run_extract(const Options& o) {
  const FeatureKind kind = kind_or_config(o.feature, o.config);
  const auto cfg = make_pipeline(kind, o.config);
  const auto chars = load_ink(o.input);
  FeatureTable t;
  t.kind = kind;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    try {
      t.rows.push_back(extract(chars[i], cfg));
    } catch (const Error& e) {
      throw StructuralError("character " + std::to_string(i) + ": " + e.what());
    }
    t.labels.push_back(chars[i].label.value_or(""));
  }
  save_feature_table(t, o.output);
  std::cout << "wrote " << t.rows.size() << " x " << expected_dim(kind) << ' ' << to_string(kind)
            << " features to " << o.output << '\n';
  return 0;
}

int run_train(const Options& o) {
  const auto t = load_feature_table(o.input);
  for (std::size_t i = 0; i < t.labels.size(); ++i) {
    if (t.labels[i].empty()) throw TrainingError("row " + std::to_string(i) + " has no label");
  }
  KernelConfig k = make_pipeline(t.kind, o.config).kernel;
  if (o.width) k.width = *o.width;
  if (o.penalty) k.penalty = *o.penalty;
  const auto model = train_multiclass(t.rows, t.labels, k);
  save_model(model, o.output);
  const auto unconverged = std::count_if(model.machines.begin(), model.machines.end(),
                                         [](const PairwiseMachine& m) { return !m.converged; });
  if (unconverged > 0) {
    std::cerr << "warning: " << unconverged << " pairwise machines hit the iteration limit\n";
  }
  std::cout << "trained " << model.n_classes() << " classes, " << model.machines.size()
            << " machines, " << model.vectors.size() << " support vectors\n";
  return 0;
}

int run_eval(const Options& o) {
  const auto model = load_model(o.input);
  const auto t = load_feature_table(o.input2);
  if (t.kind != model.kind) {
    throw UsageError("features are " + std::string(to_string(t.kind)) + " but the model expects " +
                     std::string(to_string(model.kind)));
  }
  const auto r = evaluate_accuracy(model, t.rows, t.labels);
  if (!o.output.empty()) write_confusion(model, r, o.output);
  std::cout << "accuracy " << format_accuracy(r.accuracy) << " (" << r.correct << '/' << r.total
            << ")\n";
  return 0;
}

int run_predict(const Options& o) {
  const auto model = load_model(o.input);
  const PredictionService service(model, make_pipeline(model.kind, o.config));
  const auto chars = load_ink_allow_empty(o.input2);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const nlohmann::json body{{"strokes", strokes_to_json(chars[i].strokes)}, {"top_k", o.top_k}};
    const auto r = service.predict(body.dump());
    if (r.status != 200) {
      throw StructuralError("character " + std::to_string(i) + ": " +
                            r.body.value("error", std::string("prediction failed")));
    }
    std::string line;
    for (const auto& p : r.body["predictions"]) {
      if (!line.empty()) line += ' ';
      line += p["label"].get<std::string>();
    }
    std::cout << line << '\n';
  }
  return 0;
}

int run_invariance(const Options& o) {
  const FeatureKind kind = kind_or_config(o.feature, o.config);
  const auto chars = load_ink(o.input);
  if (chars.empty()) throw StructuralError(o.input + ": no characters");
  const auto r = check_invariance(chars, make_pipeline(kind, o.config), o.trials, o.seed);
  for (const auto& n : r.notes) std::cout << "note: " << n << '\n';
  for (const auto& c : r.cases) {
    if (!c.pass) {
      std::cout << "fail: character " << c.character << ' ' << c.perturbation << " linf "
                << c.dev.linf << " l2 " << c.dev.l2 << '\n';
    }
  }
  std::cout << to_string(kind) << (is_order_invariant(kind) ? " invariant" : " order-sensitive")
            << ": " << r.cases.size() << " cases, max linf " << std::setprecision(3)
            << r.max_linf << ", min l2 " << r.min_l2 << " -> " << (r.passed ? "PASS" : "FAIL")
            << '\n';
  return r.passed ? 0 : kExitData;
}

int run_serve(const Options& o) {
  const auto model = load_model(o.input);
  const PredictionService service(model, make_pipeline(model.kind, o.config));
  const auto [host, port] = parse_bind(o.bind);
  httplib::Server server;
  install_routes(server, service);
  std::cout << "serving " << to_string(model.kind) << " model (" << model.n_classes()
            << " classes) on " << host << ':' << port << std::endl;
  if (!server.listen(host, port)) throw IoError("cannot listen on " + o.bind);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online handwriting features and SVM recognition"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Write a synthetic ink data set");
  gen->add_option("--classes", o.classes, "Number of classes")->check(CLI::Range(2, 100000));
  gen->add_option("--per-class", o.per_class, "Samples per class")->check(CLI::Range(1, 100000));
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("-o,--output", o.output, "Output ink file")->required();

  auto* spl = app.add_subcommand("split", "Split an ink file into train and test sets");
  spl->add_option("input", o.input, "Input ink file")->required();
  spl->add_option("--fraction", o.fraction, "Training fraction")->check(CLI::Range(0.0, 1.0));
  spl->add_option("--seed", o.seed, "Random seed");
  spl->add_flag("--no-stratify", o.no_stratify, "Split without per-class stratification");
  spl->add_option("--train", o.output, "Training ink output")->required();
  spl->add_option("--test", o.output2, "Test ink output")->required();

  auto* ext = app.add_subcommand("extract", "Extract features from an ink file");
  ext->add_option("input", o.input, "Input ink file")->required();
  ext->add_option("--feature", o.feature, "st|dft|dct|dwt|sp|hog|hpod");
  ext->add_option("--config", o.config, "Pipeline config JSON");
  ext->add_option("-o,--output", o.output, "Output feature file")->required();

  auto* trn = app.add_subcommand("train", "Train a multiclass SVM on a feature file");
  trn->add_option("features", o.input, "Feature file")->required();
  trn->add_option("--config", o.config, "Pipeline config JSON (kernel section)");
  trn->add_option("--width", o.width, "RBF width override");
  trn->add_option("--penalty", o.penalty, "Penalty override");
  trn->add_option("-o,--output", o.output, "Output model file")->required();

  auto* evl = app.add_subcommand("eval", "Report test accuracy of a model");
  evl->add_option("model", o.input, "Model file")->required();
  evl->add_option("features", o.input2, "Feature file")->required();
  evl->add_option("--confusion", o.output, "Write the confusion matrix as CSV");

  auto* prd = app.add_subcommand("predict", "Print predicted labels for an ink file");
  prd->add_option("model", o.input, "Model file")->required();
  prd->add_option("ink", o.input2, "Ink file")->required();
  prd->add_option("--config", o.config, "Pipeline config JSON");
  prd->add_option("--top-k", o.top_k, "Labels per character")->check(CLI::PositiveNumber);

  auto* inv = app.add_subcommand("invariance", "Check stroke order and direction invariance");
  inv->add_option("ink", o.input, "Ink file")->required();
  inv->add_option("--feature", o.feature, "st|dft|dct|dwt|sp|hog|hpod");
  inv->add_option("--config", o.config, "Pipeline config JSON");
  inv->add_option("--trials", o.trials, "Permutation trials per character")
      ->check(CLI::PositiveNumber);
  inv->add_option("--seed", o.seed, "Random seed");

  auto* srv = app.add_subcommand("serve", "Serve predictions over HTTP");
  srv->add_option("model", o.input, "Model file")->required();
  srv->add_option("--config", o.config, "Pipeline config JSON");
  srv->add_option("--bind", o.bind, "addr:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return run_generate(o);
    if (*spl) return run_split(o);
    if (*ext) return run_extract(o);
    if (*trn) return run_train(o);
    if (*evl) return run_eval(o);
    if (*prd) return run_predict(o);
    if (*inv) return run_invariance(o);
    if (*srv) return run_serve(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::Usage: return kExitUsage;
      case ErrorCategory::Data: return kExitData;
      case ErrorCategory::Internal: return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
