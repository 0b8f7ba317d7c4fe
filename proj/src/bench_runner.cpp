#include "superres/bench_runner.hpp"

#include <algorithm>

#include "superres/error.hpp"
#include "superres/nn/weights_io.hpp"
#include "superres/rng.hpp"

namespace superres::experiments {

PredictorTraining PredictorTraining::from_json(const nlohmann::json& j, const Scenario& sc) {
  PredictorTraining p;
  try {
    p.recipe.id = datagen::recipe_from_string(j.value("recipe", std::string("set3")));
    p.recipe.n = sc.n;
    p.recipe.m = sc.m;
    p.recipe.snr_db = j.value("snr_db", 15.0);
    p.recipe.noise_instances = j.value("instances", std::size_t{1});
    p.recipe.set_size = j.value("set_size", p.recipe.set_size);
    p.recipe.seed = j.value("seed", std::uint64_t{0});
    p.max_examples = j.value("max_examples", std::size_t{0});
    p.train.epochs = j.value("epochs", p.train.epochs);
    p.train.batch_size = j.value("batch", p.train.batch_size);
    p.train.learning_rate = j.value("lr", p.train.learning_rate);
    p.train.init_seed = p.recipe.seed;
    p.train.shuffle_seed = p.recipe.seed;
    p.arch = j.value("arch", p.arch);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad predictor_training: ") + e.what());
  }
  p.recipe.validate();
  p.train.validate();
  return p;
}

datagen::Dataset training_subset(const PredictorTraining& spec) {
  return datagen::subsample(datagen::generate(spec.recipe), spec.max_examples, derive_seed(spec.recipe.seed, {0x5B5E7}));
}

ExperimentResult run_bench(const BenchConfig& cfg, const std::filesystem::path& base_dir, std::ostream& log) {
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  const auto estimator = hrse::estimator_from_string(cfg.estimator);
  std::vector<MethodId> ids;
  for (const auto& m : cfg.methods) ids.push_back(method_from_string(m));

  std::optional<nn::PredictorParams> predictor;
  if (std::find(ids.begin(), ids.end(), MethodId::M3_PredictThenEstimate) != ids.end()) {
    require(!cfg.predictor.empty(), ErrorKind::Config, "M3 requested but no predictor path configured");
    const auto path = resolve(cfg.predictor);
    if (std::filesystem::exists(path)) {
      predictor = nn::load_params(path);
      log << "# loaded predictor " << path.string() << '\n';
    } else {
      require(cfg.predictor_training.has_value(), ErrorKind::Io,
              "predictor " + path.string() + " not found and no predictor_training section");
      const auto spec = PredictorTraining::from_json(*cfg.predictor_training, cfg.scenario);
      const auto ds = training_subset(spec);
      const auto arch = nn::ArchitectureSpec::parse(spec.arch, cfg.scenario.m, cfg.scenario.n - cfg.scenario.m);
      log << "# training predictor on " << ds.size() << " examples (" << datagen::to_string(spec.recipe.id)
          << "), arch " << arch.describe() << '\n';
      auto result = nn::train(ds, arch, spec.train, [&](std::size_t epoch, double loss) {
        log << "# epoch " << epoch << " loss " << loss << '\n';
      });
      require(!result.diverged, ErrorKind::Divergence, result.message);
      std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
      nn::save_params(result.params, path);
      predictor = std::move(result.params);
    }
  }

  std::vector<MethodSpec> methods;
  for (auto id : ids) methods.push_back({id, estimator, id == MethodId::M3_PredictThenEstimate ? &*predictor : nullptr});

  ExperimentResult result;
  if (cfg.experiment == "snr_sweep") {
    const FrequencySampler sampler{sampler_from_string(cfg.sampler), cfg.min_separation};
    result = snr_sweep(methods, cfg.snr_list, cfg.trials, sampler, cfg.seed, cfg.scenario);
  } else if (cfg.experiment == "resolution_sweep") {
    result = resolution_sweep(methods, cfg.deltas, cfg.snr_db, cfg.trials, cfg.seed, cfg.scenario);
  } else {
    result = grid_experiment_l4(methods, cfg.snr_list, cfg.on_grid, cfg.trials, cfg.seed, cfg.scenario);
  }
  emit(result, resolve(cfg.out));
  return result;
}

}  // namespace superres::experiments
