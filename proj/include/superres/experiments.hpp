#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "superres/hrse.hpp"
#include "superres/nn/network.hpp"
#include "superres/rng.hpp"

namespace superres::experiments {

enum class MethodId { M1_TrueM, M2_TrueN, M3_PredictThenEstimate };

const char* to_string(MethodId id);
MethodId method_from_string(const std::string& s);

struct MethodSpec {
  MethodId id = MethodId::M1_TrueM;
  hrse::Estimator estimator = hrse::Estimator::Esprit;
  /// Predictor for M3; must match the scenario's (M, N).
  const nn::PredictorParams* predictor = nullptr;

  /// "M1", or "M1:prony" for non-ESPRIT estimators.
  std::string label() const;
};

struct Scenario {
  std::size_t n = 150;
  std::size_t m = 50;
  std::size_t l = 2;
};

/// Estimates frequencies of one noisy realization: M1 uses the first M noisy
/// samples, M2 all N, M3 the first M plus N-M predicted. Estimator failures
/// propagate as superres::Error.
FrequencyEstimate run_method(const MethodSpec& method, const SinusoidSpec& truth, const Scenario& sc, double snr_db,
                             std::uint64_t noise_seed);

enum class SamplerKind {
  Uniform,     // off-grid, uniform with a minimum pairwise separation
  FineGrid,    // distinct points k/N, 1 <= k < N/2
  CoarseGrid,  // distinct points of {0.1, 0.2, 0.3, 0.4}
};

const char* to_string(SamplerKind k);
SamplerKind sampler_from_string(const std::string& s);

struct FrequencySampler {
  SamplerKind kind = SamplerKind::Uniform;
  /// Pairwise separation floor and distance kept from 0 and 0.5 for
  /// Uniform; defaults to 1/N when unset.
  std::optional<double> min_separation;

  std::vector<double> draw(Rng& rng, const Scenario& sc) const;
};

struct TrialRow {
  std::string method;
  std::string sweep_var;
  double value = 0.0;
  std::size_t trial = 0;
  std::optional<double> nmse;  // empty when the estimator failed
  std::string status;          // "ok" or the failure kind
};

struct AggregateRow {
  std::string method;
  std::string sweep_var;
  double value = 0.0;
  double mean_nmse_db = 0.0;  // over successful trials; -inf floor, nan if none
  std::size_t trials = 0;
  std::size_t failures = 0;
};

struct ExperimentResult {
  std::string name;
  std::vector<TrialRow> trials;
  std::vector<AggregateRow> aggregates;

  /// Mean dB for (method label, sweep value); throws if absent.
  double mean_db(const std::string& method, double value) const;
};

/// Rebuilds aggregate rows from trial rows, grouped in first-seen order.
std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& trials);

/// Trial seeds depend only on (seed, trial): every method and every sweep
/// value sees the same frequencies and the same unit-variance noise draw.
ExperimentResult snr_sweep(const std::vector<MethodSpec>& methods, const std::vector<double>& snr_list,
                           std::size_t trials, const FrequencySampler& sampler, std::uint64_t seed,
                           const Scenario& sc);

/// f2 = f1 + delta, f1 resampled until the pair fits below 0.5.
ExperimentResult resolution_sweep(const std::vector<MethodSpec>& methods, const std::vector<double>& deltas,
                                  double snr_db, std::size_t trials, std::uint64_t seed, const Scenario& sc);

/// L = 4: on-grid draws from the 0.1 grid, off-grid uniform with 1/N guard.
ExperimentResult grid_experiment_l4(const std::vector<MethodSpec>& methods, const std::vector<double>& snr_list,
                                    bool on_grid, std::size_t trials, std::uint64_t seed, const Scenario& sc);

/// Writes trials.csv, aggregates.csv and, for non-empty results, plot.svg.
void emit(const ExperimentResult& result, const std::filesystem::path& out_dir);

std::string trials_csv(const ExperimentResult& result);
std::string aggregates_csv(const ExperimentResult& result);
std::string plot_svg(const ExperimentResult& result);

/// Parsed bench configuration file (JSON text).
struct BenchConfig {
  std::string experiment = "snr_sweep";  // snr_sweep | resolution_sweep | grid_l4
  Scenario scenario;
  std::vector<std::string> methods{"M1", "M2", "M3"};
  std::string estimator = "esprit";
  std::string predictor;  // weight file for M3
  std::vector<double> snr_list{0, 5, 10, 15, 20, 25};
  std::vector<double> deltas;
  double snr_db = 20.0;
  bool on_grid = true;
  std::string sampler = "uniform";
  std::optional<double> min_separation;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::string out = "bench_out";
  /// When set and the predictor file is missing, train one first.
  std::optional<nlohmann::json> predictor_training;

  static BenchConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

BenchConfig load_bench_config(const std::filesystem::path& path);

}  // namespace superres::experiments
