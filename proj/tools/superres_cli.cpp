// superres: dataset generation, predictor training, prediction, frequency
// estimation and benchmark sweeps.
//
// Exit codes: 0 success, 1 I/O or format error, 2 usage/parameter error,
// 3 training divergence, 4 estimator under-resolution.

#include <omp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "superres/bench_runner.hpp"
#include "superres/binary_io.hpp"
#include "superres/datagen.hpp"
#include "superres/error.hpp"
#include "superres/experiments.hpp"
#include "superres/hrse.hpp"
#include "superres/nn/train.hpp"
#include "superres/nn/weights_io.hpp"
#include "superres/rng.hpp"

namespace fs = std::filesystem;
using namespace superres;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter:
    case ErrorKind::Config:
    case ErrorKind::Shape:
    case ErrorKind::Cardinality:
      return 2;
    case ErrorKind::Divergence:
      return 3;
    case ErrorKind::UnderResolution:
    case ErrorKind::NumericalDegeneracy:
      return 4;
    default:
      return 1;
  }
}

void print_config(const std::string& cmd, const nlohmann::json& cfg) {
  std::cerr << "# " << cmd << " config: " << cfg.dump() << '\n';
}

std::vector<double> read_samples_file(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    require(end == tok.c_str() + tok.size(), ErrorKind::Format,
            path.string() + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
    out.push_back(v);
  }
  require(!out.empty(), ErrorKind::Format, path.string() + ": no samples");
  return out;
}

void write_samples_file(const fs::path& path, const SampleWindow& w) {
  std::string text = "# " + std::string(to_string(w.provenance)) + " samples, n = " + std::to_string(w.start_index) +
                     " .. " + std::to_string(w.end_index() - 1) + "\n";
  char buf[40];
  for (double v : w.samples) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    text += buf;
  }
  io::write_text(path, text);
}

struct InputOptions {
  std::string input;
  long record = -1;
  std::string part;
};

/// Loads a samples file, or one record of a dataset file when --record is set.
SampleWindow load_input(const InputOptions& opt, const std::string& default_part) {
  if (opt.record < 0) return SampleWindow{read_samples_file(opt.input), 1, Provenance::True};
  const auto ds = datagen::read_dataset(opt.input);
  require(static_cast<std::size_t>(opt.record) < ds.size(), ErrorKind::Parameter,
          "record " + std::to_string(opt.record) + " out of range (dataset has " + std::to_string(ds.size()) + ")");
  const auto& ex = ds.examples[static_cast<std::size_t>(opt.record)];
  const std::string part = opt.part.empty() ? default_part : opt.part;
  const SampleWindow a{ex.x_a, 1, Provenance::True};
  const SampleWindow m{ex.x_m, a.end_index(), Provenance::True};
  if (part == "a") return a;
  if (part == "m") return m;
  require(part == "full", ErrorKind::Parameter, "--part must be a, m or full");
  return concat(a, m);
}

void add_input_options(CLI::App* cmd, InputOptions& opt) {
  cmd->add_option("--input", opt.input, "Samples file (one value per line, # comments) or dataset file")
      ->required();
  cmd->add_option("--record", opt.record, "Read record i of a dataset file instead of a samples file");
  cmd->add_option("--part", opt.part, "Dataset record part: a (first M), m (last N-M), full");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned-predictor-assisted high-resolution frequency estimation"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  // gen-data
  datagen::DatasetRecipe recipe;
  std::string recipe_name = "grid-l2";
  std::string data_out;
  auto* gen = app.add_subcommand("gen-data", "Generate a training/testing dataset");
  gen->add_option("--recipe", recipe_name, "grid-l2, grid-l4, set1 .. set6")->capture_default_str();
  gen->add_option("--n", recipe.n, "Total samples N")->capture_default_str();
  gen->add_option("--m", recipe.m, "Observed samples M")->capture_default_str();
  gen->add_option("--snr", recipe.snr_db, "SNR in dB")->capture_default_str();
  gen->add_option("--instances", recipe.noise_instances, "Noise realizations per signal")->capture_default_str();
  gen->add_option("--set-size", recipe.set_size, "Signals for randomized sets")->capture_default_str();
  gen->add_option("--seed", recipe.seed, "Master seed")->capture_default_str();
  gen->add_option("--out", data_out, "Dataset file to write")->required();

  // train
  std::string train_data, arch_text = "default", weights_out, history_out;
  nn::TrainConfig tcfg;
  std::uint64_t train_seed = 0;
  std::size_t max_examples = 0;
  auto* tr = app.add_subcommand("train", "Train the sample predictor");
  tr->add_option("--data", train_data, "Dataset file")->required();
  tr->add_option("--arch", arch_text, "default, full, or e.g. conv:32:5,conv:64:7,flatten,dense:100:linear")
      ->capture_default_str();
  tr->add_option("--epochs", tcfg.epochs, "Epochs")->capture_default_str();
  tr->add_option("--batch", tcfg.batch_size, "Mini-batch size")->capture_default_str();
  tr->add_option("--lr", tcfg.learning_rate, "Adam learning rate")->capture_default_str();
  tr->add_option("--seed", train_seed, "Init and shuffle seed")->capture_default_str();
  tr->add_option("--max-examples", max_examples, "Train on a seeded random subset of k examples (0 = all)")->capture_default_str();
  tr->add_option("--out", weights_out, "Weight file to write")->required();
  tr->add_option("--history", history_out, "Loss history CSV (default <out>.history.csv)");

  // predict
  InputOptions pin;
  std::string pweights, pout;
  bool pconcat = false;
  auto* pr = app.add_subcommand("predict", "Extrapolate N-M samples from M observed ones");
  add_input_options(pr, pin);
  pr->add_option("--weights", pweights, "Weight file")->required();
  pr->add_option("--out", pout, "Samples file to write")->required();
  pr->add_flag("--concat", pconcat, "Write observed + predicted samples");

  // estimate
  InputOptions ein;
  std::string method = "esprit", eweights;
  std::size_t l = 2;
  auto* es = app.add_subcommand("estimate", "Estimate sinusoid frequencies from samples");
  add_input_options(es, ein);
  es->add_option("--method", method, "esprit, prony or periodogram")->capture_default_str();
  es->add_option("--l", l, "Number of sinusoids")->capture_default_str()->check(CLI::PositiveNumber);
  es->add_option("--weights", eweights, "Predict the missing samples first (Method-3)");

  // bench
  std::string config_path;
  auto* be = app.add_subcommand("bench", "Run a Monte Carlo benchmark from a config file");
  be->add_option("--config", config_path, "Bench config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (gen->parsed()) {
      recipe.id = datagen::recipe_from_string(recipe_name);
      auto cfg = datagen::to_json(recipe);
      cfg["out"] = data_out;
      cfg["threads"] = threads;
      print_config("gen-data", cfg);
      recipe.validate();
      const auto ds = datagen::generate(recipe);
      datagen::write_dataset(ds, data_out);
      io::write_text(data_out + ".manifest.json", datagen::manifest(ds).dump(2) + "\n");
      std::cout << "signals " << recipe.signal_count() << "\nexamples " << ds.size() << '\n';
    } else if (tr->parsed()) {
      tcfg.init_seed = tcfg.shuffle_seed = train_seed;
      if (history_out.empty()) history_out = weights_out + ".history.csv";
      print_config("train", {{"data", train_data},
                             {"arch", arch_text},
                             {"epochs", tcfg.epochs},
                             {"batch", tcfg.batch_size},
                             {"lr", tcfg.learning_rate},
                             {"adam_beta1", tcfg.adam_beta1},
                             {"adam_beta2", tcfg.adam_beta2},
                             {"adam_eps", tcfg.adam_eps},
                             {"seed", train_seed},
                             {"max_examples", max_examples},
                             {"standardize_input", tcfg.preprocessing.standardize_input},
                             {"rescale_output", tcfg.preprocessing.rescale_output},
                             {"out", weights_out},
                             {"history", history_out},
                             {"threads", threads}});
      tcfg.validate();
      auto ds = datagen::read_dataset(train_data);
      ds = datagen::subsample(std::move(ds), max_examples, derive_seed(train_seed, {0x5B5E7}));
      const auto arch = nn::ArchitectureSpec::parse(arch_text, ds.m(), ds.n() - ds.m());
      std::cerr << "# " << arch.describe() << ", " << arch.parameter_count() << " parameters, " << ds.size()
                << " examples\n";
      const auto result = nn::train(ds, arch, tcfg, [](std::size_t epoch, double loss) {
        std::cerr << "# epoch " << epoch << " loss " << loss << '\n';
      });
      std::string hist = "epoch,mean_loss\n";
      char buf[64];
      for (std::size_t i = 0; i < result.history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, result.history[i]);
        hist += buf;
      }
      io::write_text(history_out, hist);
      if (result.diverged) {
        const std::string ckpt = weights_out + ".checkpoint";
        nn::save_params(result.params, ckpt);
        std::cerr << "error: training diverged: " << result.message << "; last good checkpoint " << ckpt << '\n';
        return 3;
      }
      nn::save_params(result.params, weights_out);
      std::cout << "epochs " << result.history.size() << "\nfinal_loss "
                << (result.history.empty() ? 0.0 : result.history.back()) << '\n';
    } else if (pr->parsed()) {
      print_config("predict", {{"input", pin.input},
                               {"record", pin.record},
                               {"part", pin.part.empty() ? "a" : pin.part},
                               {"weights", pweights},
                               {"out", pout},
                               {"concat", pconcat}});
      const auto params = nn::load_params(pweights);
      const auto observed = load_input(pin, "a");
      const auto predicted = nn::predict_window(params, observed);
      write_samples_file(pout, pconcat ? concat(observed, predicted) : predicted);
      std::cout << "samples " << (pconcat ? observed.size() + predicted.size() : predicted.size()) << '\n';
    } else if (es->parsed()) {
      print_config("estimate", {{"input", ein.input},
                                {"record", ein.record},
                                {"part", ein.part.empty() ? (eweights.empty() ? "full" : "a") : ein.part},
                                {"method", method},
                                {"l", l},
                                {"weights", eweights}});
      const auto estimator = hrse::estimator_from_string(method);
      SampleWindow window = load_input(ein, eweights.empty() ? "full" : "a");
      if (!eweights.empty()) {
        const auto params = nn::load_params(eweights);
        require(params.components == 0 || params.components == l, ErrorKind::Parameter,
                "--l " + std::to_string(l) + " does not match the predictor's " + std::to_string(params.components) +
                    " components");
        window = concat(window, nn::predict_window(params, window));
      }
      const auto est = hrse::estimate(estimator, window, l);
      char buf[40];
      for (std::size_t i = 0; i < est.frequencies.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", est.frequencies[i]);
        std::cout << (i ? " " : "") << buf;
      }
      std::cout << '\n';
    } else if (be->parsed()) {
      const auto cfg = experiments::load_bench_config(config_path);
      auto resolved = cfg.to_json();
      resolved["threads"] = threads;
      print_config("bench", resolved);
      const fs::path base = fs::path(config_path).parent_path();
      const auto result = experiments::run_bench(cfg, base, std::cerr);
      std::cout << experiments::aggregates_csv(result);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
