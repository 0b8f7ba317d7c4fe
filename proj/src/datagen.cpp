#include "superres/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "superres/binary_io.hpp"
#include "superres/error.hpp"
#include "superres/rng.hpp"

namespace superres::datagen {

namespace {

constexpr std::string_view kMagic = "SRLPDSET";
constexpr std::uint32_t kVersion = 1;
constexpr double kCoarseGrid[5] = {0.1, 0.2, 0.3, 0.4, 0.5};

/// Grid points k/N for k = 1 .. floor(N/2).
std::size_t fine_grid_size(std::size_t n) { return n / 2; }

double fine_grid(std::size_t k, std::size_t n) { return static_cast<double>(k) / static_cast<double>(n); }

/// Uniform on (0, hi].
double draw_open(Rng& rng, double hi) { return hi * rng.uniform_open0(); }

std::vector<double> draw_random_pair(RecipeId id, double df, Rng& rng) {
  switch (id) {
    case RecipeId::Set1: {
      const double f1 = draw_open(rng, 0.5 - df);
      return {f1, f1 + 0.5 * df};
    }
    case RecipeId::Set2: {
      const double f1 = draw_open(rng, 0.5 - df);
      for (;;) {
        const double eps = rng.uniform(-(f1 + df), 0.5 - f1 - df);
        const double f2 = f1 + df + eps;
        if (f2 > 0.0 && f2 <= 0.5 && std::abs(f2 - f1) >= df) return {f1, f2};
      }
    }
    case RecipeId::Set4: {
      const double f1 = draw_open(rng, 0.5 - df);
      const auto lo = static_cast<std::int64_t>(std::ceil(-f1 / df));
      const auto hi = static_cast<std::int64_t>(std::floor((0.5 - f1) / df));
      for (;;) {
        const std::int64_t k = rng.uniform_int(lo, hi);
        const double f2 = f1 + static_cast<double>(k) * df;
        if (f2 > 0.0 && f2 <= 0.5) return {f1, f2};
      }
    }
    case RecipeId::Set5:
      return {draw_open(rng, 0.5), draw_open(rng, 0.5)};
    case RecipeId::Set6: {
      double f1;
      do {
        f1 = rng.normal(0.25, 0.25);
      } while (!(f1 > 0.0 && f1 <= 0.5));
      return {f1, draw_open(rng, 0.5)};
    }
    default:
      break;
  }
  throw Error(ErrorKind::Parameter, "not a randomized recipe");
}

/// Noise level for the requested SNR; windows whose clean part is
/// numerically zero (every frequency at 0.5) fall back to the nominal power
/// of the mixture, sum a_l^2 / 2.
double noise_sigma(const SampleWindow& clean, const SinusoidSpec& truth, double snr_db) {
  if (clean.energy() > 1e-12 * static_cast<double>(clean.size())) return sigma_for_snr(clean, snr_db);
  double power = 0.0;
  for (double a : truth.amplitudes) power += 0.5 * a * a;
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

}  // namespace

const char* to_string(RecipeId id) {
  switch (id) {
    case RecipeId::GridL2: return "grid-l2";
    case RecipeId::GridL4: return "grid-l4";
    case RecipeId::Set1: return "set1";
    case RecipeId::Set2: return "set2";
    case RecipeId::Set3: return "set3";
    case RecipeId::Set4: return "set4";
    case RecipeId::Set5: return "set5";
    case RecipeId::Set6: return "set6";
  }
  return "?";
}

RecipeId recipe_from_string(const std::string& s) {
  for (std::uint8_t i = 0; i <= static_cast<std::uint8_t>(RecipeId::Set6); ++i) {
    const auto id = static_cast<RecipeId>(i);
    if (s == to_string(id)) return id;
  }
  throw Error(ErrorKind::Parameter, "unknown recipe '" + s + "'");
}

void DatasetRecipe::validate() const {
  require(m >= 1 && n > m, ErrorKind::Parameter, "recipe needs N > M >= 1");
  require(std::isfinite(snr_db), ErrorKind::Parameter, "snr_db must be finite");
  require(noise_instances >= 1, ErrorKind::Parameter, "noise_instances must be >= 1");
  require(n >= 4, ErrorKind::Parameter, "N must be >= 4");
  require(amplitude_jitter >= 0.0 && amplitude_jitter < 1.0, ErrorKind::Parameter, "amplitude_jitter in [0, 1)");
  const bool randomized = id != RecipeId::GridL2 && id != RecipeId::GridL4 && id != RecipeId::Set3;
  require(!randomized || set_size >= 1, ErrorKind::Parameter, "set_size must be >= 1");
}

std::size_t DatasetRecipe::signal_count() const {
  switch (id) {
    case RecipeId::GridL2: return 5 * fine_grid_size(n);
    case RecipeId::GridL4: return 625;
    case RecipeId::Set3: return fine_grid_size(n) * fine_grid_size(n);
    default: return set_size;
  }
}

nlohmann::json to_json(const DatasetRecipe& r) {
  return {{"recipe", to_string(r.id)},
          {"n", r.n},
          {"m", r.m},
          {"snr_db", r.snr_db},
          {"noise_instances", r.noise_instances},
          {"seed", r.seed},
          {"set_size", r.set_size},
          {"amplitude_jitter", r.amplitude_jitter}};
}

DatasetRecipe recipe_from_json(const nlohmann::json& j) {
  try {
    DatasetRecipe r;
    r.id = recipe_from_string(j.at("recipe").get<std::string>());
    r.n = j.at("n").get<std::size_t>();
    r.m = j.at("m").get<std::size_t>();
    r.snr_db = j.at("snr_db").get<double>();
    r.noise_instances = j.at("noise_instances").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.set_size = j.at("set_size").get<std::size_t>();
    r.amplitude_jitter = j.at("amplitude_jitter").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("bad recipe: ") + e.what());
  }
}

std::vector<double> signal_frequencies(const DatasetRecipe& recipe, std::size_t index) {
  const std::size_t grid = fine_grid_size(recipe.n);
  switch (recipe.id) {
    case RecipeId::GridL2:
      return {kCoarseGrid[index / grid], fine_grid(index % grid + 1, recipe.n)};
    case RecipeId::GridL4: {
      std::vector<double> f(4);
      std::size_t rest = index;
      for (std::size_t i = 4; i-- > 0;) {
        f[i] = kCoarseGrid[rest % 5];
        rest /= 5;
      }
      return f;
    }
    case RecipeId::Set3:
      return {fine_grid(index / grid + 1, recipe.n), fine_grid(index % grid + 1, recipe.n)};
    default: {
      Rng rng(derive_seed(recipe.seed, {static_cast<std::uint64_t>(recipe.id), index, 0xF4E9}));
      return draw_random_pair(recipe.id, recipe.delta_f(), rng);
    }
  }
}

Dataset generate(const DatasetRecipe& recipe) {
  recipe.validate();
  const std::size_t signals = recipe.signal_count();
  const std::size_t instances = recipe.noise_instances;
  Dataset ds;
  ds.recipes = {recipe};
  ds.examples.resize(signals * instances);

  const auto total = static_cast<std::int64_t>(signals);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t si = 0; si < total; ++si) {
    const auto s = static_cast<std::size_t>(si);
    SinusoidSpec truth = SinusoidSpec::unit_amplitudes(signal_frequencies(recipe, s));
    if (recipe.amplitude_jitter > 0.0) {
      Rng rng(derive_seed(recipe.seed, {static_cast<std::uint64_t>(recipe.id), s, 0xA3D1}));
      for (double& a : truth.amplitudes) a = 1.0 + recipe.amplitude_jitter * rng.uniform(-1.0, 1.0);
    }
    const SampleWindow clean = synthesize(truth, recipe.n);
    const double sigma = noise_sigma(clean, truth, recipe.snr_db);
    for (std::size_t i = 0; i < instances; ++i) {
      const std::uint64_t noise_seed = derive_seed(recipe.seed, {static_cast<std::uint64_t>(recipe.id), s, i, 0x501E});
      const auto noisy = add_noise(clean, NoiseSpec::with_sigma(sigma, noise_seed));
      auto [head, tail] = split(noisy.window, recipe.m);
      Example& ex = ds.examples[s * instances + i];
      ex.x_a = std::move(head.samples);
      ex.x_m = std::move(tail.samples);
      ex.truth = truth;
      ex.meta = {recipe.id, noise_seed};
    }
  }
  return ds;
}

Dataset merge(std::vector<Dataset> parts) {
  Dataset out;
  for (auto& p : parts) {
    if (!out.recipes.empty() && !p.recipes.empty()) {
      require(p.n() == out.n() && p.m() == out.m(), ErrorKind::Parameter, "cannot merge datasets with different N/M");
    }
    out.recipes.insert(out.recipes.end(), p.recipes.begin(), p.recipes.end());
    for (auto& ex : p.examples) out.examples.push_back(std::move(ex));
  }
  return out;
}

Dataset subsample(Dataset ds, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k >= ds.size()) return ds;
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(idx.size()) - 1));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  Dataset out;
  out.recipes = ds.recipes;
  out.examples.reserve(k);
  for (auto i : idx) out.examples.push_back(std::move(ds.examples[i]));
  return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double ratio, std::uint64_t seed) {
  require(!ds.examples.empty(), ErrorKind::Parameter, "cannot split an empty dataset");
  require(ratio > 0.0 && ratio < 1.0, ErrorKind::Parameter, "split ratio must lie in (0, 1)");
  std::map<std::uint8_t, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < ds.examples.size(); ++i)
    strata[static_cast<std::uint8_t>(ds.examples[i].meta.recipe)].push_back(i);

  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (auto& [rid, idx] : strata) {
    Rng rng(derive_seed(seed, {rid}));
    for (std::size_t i = idx.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(idx[i - 1], idx[j]);
    }
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(idx.size())));
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  require(!train_idx.empty() && !test_idx.empty(), ErrorKind::Parameter,
          "ratio " + std::to_string(ratio) + " leaves one side of the split empty");
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  auto take = [&](const std::vector<std::size_t>& idx) {
    Dataset out;
    out.recipes = ds.recipes;
    out.examples.reserve(idx.size());
    for (auto i : idx) out.examples.push_back(ds.examples[i]);
    return out;
  };
  return {take(train_idx), take(test_idx)};
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  require(!ds.recipes.empty(), ErrorKind::Parameter, "dataset has no recipe");
  nlohmann::json header;
  header["format_version"] = kVersion;
  header["n"] = ds.n();
  header["m"] = ds.m();
  header["count"] = ds.examples.size();
  header["recipes"] = nlohmann::json::array();
  for (const auto& r : ds.recipes) header["recipes"].push_back(to_json(r));

  io::ByteWriter w;
  io::write_container_header(w, kMagic, kVersion, header);
  for (const auto& ex : ds.examples) {
    require(ex.x_a.size() == ds.m() && ex.x_a.size() + ex.x_m.size() == ds.n(), ErrorKind::Shape,
            "example lengths disagree with dataset N/M");
    w.u8(static_cast<std::uint8_t>(ex.meta.recipe));
    w.u64(ex.meta.noise_seed);
    w.u32(static_cast<std::uint32_t>(ex.truth.count()));
    w.f64s(ex.truth.amplitudes);
    w.f64s(ex.truth.frequencies);
    w.f64s(ex.x_a);
    w.f64s(ex.x_m);
  }
  io::write_file(path, w.data());
}

Dataset read_dataset(const std::filesystem::path& path) {
  io::ByteReader r(io::read_file(path));
  const auto header = io::read_container_header(r, kMagic, kVersion);
  Dataset ds;
  std::size_t count = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  try {
    n = header.at("n").get<std::size_t>();
    m = header.at("m").get<std::size_t>();
    count = header.at("count").get<std::size_t>();
    for (const auto& rj : header.at("recipes")) ds.recipes.push_back(recipe_from_json(rj));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("bad dataset header: ") + e.what());
  }
  require(!ds.recipes.empty() && n > m && m >= 1, ErrorKind::Format, "dataset header has inconsistent N/M");
  for (const auto& rec : ds.recipes)
    require(rec.n == n && rec.m == m, ErrorKind::Format, "recipe N/M disagree with dataset header");
  ds.examples.resize(count);
  for (auto& ex : ds.examples) {
    const std::uint8_t rid = r.u8();
    require(rid <= static_cast<std::uint8_t>(RecipeId::Set6), ErrorKind::Format, "bad recipe id in record");
    ex.meta.recipe = static_cast<RecipeId>(rid);
    ex.meta.noise_seed = r.u64();
    const std::uint32_t l = r.u32();
    require(l >= 1 && l <= 64, ErrorKind::Format, "implausible component count " + std::to_string(l));
    ex.truth.amplitudes = r.f64s(l);
    ex.truth.frequencies = r.f64s(l);
    ex.x_a = r.f64s(m);
    ex.x_m = r.f64s(n - m);
  }
  require(r.remaining() == 0, ErrorKind::Format, "trailing bytes after last record");
  return ds;
}

nlohmann::json manifest(const Dataset& ds) {
  nlohmann::json j;
  j["n"] = ds.n();
  j["m"] = ds.m();
  j["examples"] = ds.examples.size();
  j["recipes"] = nlohmann::json::array();
  for (const auto& r : ds.recipes) {
    auto rj = to_json(r);
    rj["signals"] = r.signal_count();
    rj["examples"] = r.example_count();
    j["recipes"].push_back(rj);
  }
  return j;
}

}  // namespace superres::datagen
