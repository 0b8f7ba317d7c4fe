#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "superres/signal.hpp"

namespace superres::datagen {

enum class RecipeId : std::uint8_t { GridL2 = 0, GridL4, Set1, Set2, Set3, Set4, Set5, Set6 };

const char* to_string(RecipeId id);
RecipeId recipe_from_string(const std::string& s);

struct DatasetRecipe {
  RecipeId id = RecipeId::GridL2;
  std::size_t n = 150;
  std::size_t m = 50;
  double snr_db = 15.0;
  std::size_t noise_instances = 1;
  std::uint64_t seed = 0;
  /// Signals drawn by the randomized sets (1, 2, 4, 5, 6). Grid recipes and
  /// Set-3 enumerate their grids and ignore it.
  std::size_t set_size = 20000;
  /// Amplitudes drawn from 1 +- jitter; 0 keeps unit amplitudes.
  double amplitude_jitter = 0.0;

  double delta_f() const noexcept { return 1.0 / static_cast<double>(n); }
  void validate() const;

  /// Distinct frequency sets before noise replication.
  std::size_t signal_count() const;
  std::size_t example_count() const { return signal_count() * noise_instances; }

  bool operator==(const DatasetRecipe&) const = default;
};

nlohmann::json to_json(const DatasetRecipe& r);
DatasetRecipe recipe_from_json(const nlohmann::json& j);

struct ExampleMeta {
  RecipeId recipe = RecipeId::GridL2;
  std::uint64_t noise_seed = 0;

  bool operator==(const ExampleMeta&) const = default;
};

struct Example {
  std::vector<double> x_a;
  std::vector<double> x_m;
  SinusoidSpec truth;
  ExampleMeta meta;
};

struct Dataset {
  std::vector<Example> examples;
  /// One entry per source recipe; more than one after merge().
  std::vector<DatasetRecipe> recipes;

  std::size_t size() const noexcept { return examples.size(); }
  std::size_t n() const { return recipes.empty() ? 0 : recipes.front().n; }
  std::size_t m() const { return recipes.empty() ? 0 : recipes.front().m; }
};

/// Frequencies of signal `index` of the recipe (deterministic per seed).
std::vector<double> signal_frequencies(const DatasetRecipe& recipe, std::size_t index);

Dataset generate(const DatasetRecipe& recipe);

/// Concatenates datasets with identical (N, M), keeping per-example meta.
Dataset merge(std::vector<Dataset> parts);

/// Seeded random subset of k examples in original order; k = 0 or k >= size
/// returns the dataset unchanged.
Dataset subsample(Dataset ds, std::size_t k, std::uint64_t seed);

/// Stratified by recipe; sides keep the original example order.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double ratio, std::uint64_t seed);

void write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// Human-readable sidecar: counts and seeds per recipe.
nlohmann::json manifest(const Dataset& ds);

}  // namespace superres::datagen
