#pragma once

#include <filesystem>
#include <ostream>

#include "superres/datagen.hpp"
#include "superres/experiments.hpp"
#include "superres/nn/train.hpp"

namespace superres::experiments {

/// Settings for training the M3 predictor from within a bench config:
/// {"recipe", "snr_db", "instances", "set_size", "max_examples", "epochs",
///  "batch", "lr", "seed", "arch"}.
struct PredictorTraining {
  datagen::DatasetRecipe recipe;
  std::size_t max_examples = 0;  // 0 keeps every example
  nn::TrainConfig train;
  std::string arch = "default";

  static PredictorTraining from_json(const nlohmann::json& j, const Scenario& sc);
};

/// Generates the recipe's dataset and keeps a seeded random subset of
/// max_examples (original order preserved).
datagen::Dataset training_subset(const PredictorTraining& spec);

/// Resolves paths relative to `base_dir`, loads or trains the predictor when
/// M3 is requested, runs the configured experiment and emits its artifacts.
ExperimentResult run_bench(const BenchConfig& cfg, const std::filesystem::path& base_dir, std::ostream& log);

}  // namespace superres::experiments
