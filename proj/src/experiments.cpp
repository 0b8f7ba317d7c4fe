#include "superres/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "superres/binary_io.hpp"
#include "superres/error.hpp"
#include "superres/metrics.hpp"

namespace superres::experiments {

const char* to_string(MethodId id) {
  switch (id) {
    case MethodId::M1_TrueM: return "M1";
    case MethodId::M2_TrueN: return "M2";
    case MethodId::M3_PredictThenEstimate: return "M3";
  }
  return "?";
}

MethodId method_from_string(const std::string& s) {
  if (s == "M1") return MethodId::M1_TrueM;
  if (s == "M2") return MethodId::M2_TrueN;
  if (s == "M3") return MethodId::M3_PredictThenEstimate;
  throw Error(ErrorKind::Parameter, "unknown method '" + s + "' (expected M1, M2 or M3)");
}

std::string MethodSpec::label() const {
  std::string s = to_string(id);
  if (estimator != hrse::Estimator::Esprit) s += std::string(":") + hrse::to_string(estimator);
  return s;
}

FrequencyEstimate run_method(const MethodSpec& method, const SinusoidSpec& truth, const Scenario& sc, double snr_db,
                             std::uint64_t noise_seed) {
  require(sc.n > sc.m && sc.m >= 1 && sc.l >= 1, ErrorKind::Parameter, "scenario needs N > M >= 1 and L >= 1");
  const SampleWindow clean = synthesize(truth, sc.n);
  // +inf SNR means a noiseless run.
  const NoiseSpec noise = std::isinf(snr_db) && snr_db > 0 ? NoiseSpec::with_sigma(0.0, noise_seed)
                                                            : NoiseSpec::at_snr(snr_db, noise_seed);
  const SampleWindow noisy = add_noise(clean, noise).window;
  switch (method.id) {
    case MethodId::M1_TrueM:
      return hrse::estimate(method.estimator, split(noisy, sc.m).first, sc.l);
    case MethodId::M2_TrueN:
      return hrse::estimate(method.estimator, noisy, sc.l);
    case MethodId::M3_PredictThenEstimate: {
      require(method.predictor != nullptr, ErrorKind::Config, "M3 needs a predictor");
      const auto& p = *method.predictor;
      require(p.input_len() == sc.m && p.input_len() + p.output_len() == sc.n, ErrorKind::Config,
              "predictor dimensions (M=" + std::to_string(p.input_len()) +
                  ", N=" + std::to_string(p.input_len() + p.output_len()) + ") do not match the scenario");
      const SampleWindow head = split(noisy, sc.m).first;
      return hrse::estimate(method.estimator, concat(head, nn::predict_window(p, head)), sc.l);
    }
  }
  throw Error(ErrorKind::Parameter, "unknown method");
}

const char* to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::FineGrid: return "fine-grid";
    case SamplerKind::CoarseGrid: return "coarse-grid";
  }
  return "?";
}

SamplerKind sampler_from_string(const std::string& s) {
  if (s == "uniform") return SamplerKind::Uniform;
  if (s == "fine-grid") return SamplerKind::FineGrid;
  if (s == "coarse-grid") return SamplerKind::CoarseGrid;
  throw Error(ErrorKind::Parameter, "unknown sampler '" + s + "'");
}

namespace {

std::vector<double> distinct_from_grid(Rng& rng, const std::vector<double>& grid, std::size_t l) {
  require(grid.size() >= l, ErrorKind::Parameter, "grid too small for " + std::to_string(l) + " distinct frequencies");
  std::vector<double> pool = grid;
  std::vector<double> out;
  for (std::size_t i = 0; i < l; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
    out.push_back(pool[j]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> FrequencySampler::draw(Rng& rng, const Scenario& sc) const {
  switch (kind) {
    case SamplerKind::FineGrid: {
      // k/N for 1 <= k < N/2; the point 0.5 is excluded because sin(pi n)
      // vanishes on the integer grid.
      std::vector<double> grid;
      for (std::size_t k = 1; 2 * k < sc.n; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(sc.n));
      return distinct_from_grid(rng, grid, sc.l);
    }
    case SamplerKind::CoarseGrid:
      return distinct_from_grid(rng, {0.1, 0.2, 0.3, 0.4}, sc.l);
    case SamplerKind::Uniform: {
      const double sep = min_separation.value_or(1.0 / static_cast<double>(sc.n));
      require(sep > 0.0 && static_cast<double>(sc.l + 1) * sep < 0.5, ErrorKind::Parameter,
              "min separation too large for " + std::to_string(sc.l) + " frequencies");
      for (;;) {
        std::vector<double> f(sc.l);
        for (double& v : f) v = rng.uniform(sep, 0.5 - sep);
        std::sort(f.begin(), f.end());
        bool ok = true;
        for (std::size_t i = 1; i < f.size(); ++i) ok = ok && (f[i] - f[i - 1] >= sep);
        if (ok) return f;
      }
    }
  }
  throw Error(ErrorKind::Parameter, "unknown sampler");
}

double ExperimentResult::mean_db(const std::string& method, double value) const {
  for (const auto& a : aggregates)
    if (a.method == method && a.value == value) return a.mean_nmse_db;
  throw Error(ErrorKind::Parameter, "no aggregate for " + method + " at " + std::to_string(value));
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& trials) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<double>> values;
  std::map<std::pair<std::string, double>, std::size_t> index;
  for (const auto& t : trials) {
    const auto key = std::make_pair(t.method, t.value);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({t.method, t.sweep_var, t.value, 0.0, 0, 0});
      values.emplace_back();
    }
    auto& row = out[it->second];
    ++row.trials;
    if (t.nmse) {
      values[it->second].push_back(*t.nmse);
    } else {
      ++row.failures;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_nmse_db =
        values[i].empty() ? std::numeric_limits<double>::quiet_NaN() : metrics::nmse_db(values[i]);
  }
  return out;
}

namespace {

struct TrialPlan {
  std::vector<double> truth;
  std::uint64_t noise_seed = 0;
};

/// Runs every (trial, sweep value, method) cell; rows come back in
/// (sweep value, method, trial) order regardless of thread count.
ExperimentResult run_grid(const std::string& name, const std::string& sweep_var, const std::vector<MethodSpec>& methods,
                          const std::vector<double>& sweep, std::size_t trials, const Scenario& base,
                          const std::function<TrialPlan(std::size_t trial, std::size_t sweep_idx)>& plan,
                          const std::function<double(std::size_t sweep_idx)>& snr_at) {
  require(trials >= 1, ErrorKind::Parameter, "trials must be >= 1");
  require(!methods.empty() && !sweep.empty(), ErrorKind::Parameter, "empty method or sweep list");
  const std::size_t cells = sweep.size() * methods.size();
  std::vector<TrialRow> rows(cells * trials);
  // Exceptions must not cross the parallel region; setup errors are
  // collected per trial and rethrown afterwards.
  std::vector<std::exception_ptr> fatal(trials);

  const auto run_trial = [&](std::size_t t) {
    for (std::size_t s = 0; s < sweep.size(); ++s) {
      const TrialPlan p = plan(t, s);
      Scenario sc = base;
      sc.l = p.truth.size();
      const SinusoidSpec truth = SinusoidSpec::unit_amplitudes(p.truth);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        TrialRow& row = rows[(s * methods.size() + mi) * trials + t];
        row.method = methods[mi].label();
        row.sweep_var = sweep_var;
        row.value = sweep[s];
        row.trial = t;
        try {
          const auto est = run_method(methods[mi], truth, sc, snr_at(s), p.noise_seed);
          row.nmse = metrics::nmse(p.truth, est.frequencies);
          row.status = "ok";
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Parameter) throw;
          row.status = to_string(e.kind());
        }
      }
    }
  };

  const auto total = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t ti = 0; ti < total; ++ti) {
    try {
      run_trial(static_cast<std::size_t>(ti));
    } catch (...) {
      fatal[static_cast<std::size_t>(ti)] = std::current_exception();
    }
  }
  for (const auto& e : fatal)
    if (e) std::rethrow_exception(e);
  ExperimentResult result;
  result.name = name;
  result.trials = std::move(rows);
  result.aggregates = aggregate(result.trials);
  return result;
}

std::uint64_t freq_seed(std::uint64_t seed, std::size_t trial) { return derive_seed(seed, {trial, 0xF0}); }
std::uint64_t noise_seed(std::uint64_t seed, std::size_t trial) { return derive_seed(seed, {trial, 0x0A}); }

}  // namespace

ExperimentResult snr_sweep(const std::vector<MethodSpec>& methods, const std::vector<double>& snr_list,
                           std::size_t trials, const FrequencySampler& sampler, std::uint64_t seed,
                           const Scenario& sc) {
  auto plan = [&](std::size_t t, std::size_t) {
    Rng rng(freq_seed(seed, t));
    return TrialPlan{sampler.draw(rng, sc), noise_seed(seed, t)};
  };
  return run_grid("snr_sweep", "snr_db", methods, snr_list, trials, sc, plan,
                  [&](std::size_t s) { return snr_list[s]; });
}

ExperimentResult resolution_sweep(const std::vector<MethodSpec>& methods, const std::vector<double>& deltas,
                                  double snr_db, std::size_t trials, std::uint64_t seed, const Scenario& sc) {
  const double margin = 1.0 / static_cast<double>(sc.n);
  for (double d : deltas)
    require(d > 0.0 && d + 3.0 * margin < 0.5, ErrorKind::Parameter, "delta must lie in (0, 0.5 - 3/N)");
  auto plan = [&](std::size_t t, std::size_t s) {
    Rng rng(freq_seed(seed, t));
    double f1;
    do {
      f1 = rng.uniform(margin, 0.5 - margin);
    } while (f1 + deltas[s] > 0.5 - margin);
    return TrialPlan{{f1, f1 + deltas[s]}, noise_seed(seed, t)};
  };
  Scenario two = sc;
  two.l = 2;
  return run_grid("resolution_sweep", "delta", methods, deltas, trials, two, plan, [&](std::size_t) { return snr_db; });
}

ExperimentResult grid_experiment_l4(const std::vector<MethodSpec>& methods, const std::vector<double>& snr_list,
                                    bool on_grid, std::size_t trials, std::uint64_t seed, const Scenario& sc) {
  Scenario four = sc;
  four.l = 4;
  const FrequencySampler sampler{on_grid ? SamplerKind::CoarseGrid : SamplerKind::Uniform, std::nullopt};
  auto plan = [&](std::size_t t, std::size_t) {
    Rng rng(freq_seed(seed, t));
    return TrialPlan{sampler.draw(rng, four), noise_seed(seed, t)};
  };
  return run_grid(on_grid ? "grid_l4_on" : "grid_l4_off", "snr_db", methods, snr_list, trials, four, plan,
                  [&](std::size_t s) { return snr_list[s]; });
}

namespace {

std::string fmt(const char* spec, double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string trials_csv(const ExperimentResult& result) {
  std::string s = "method,sweep_var,value,trial,nmse_linear,status\n";
  for (const auto& t : result.trials) {
    s += t.method + ',' + t.sweep_var + ',' + fmt("%.10g", t.value) + ',' + std::to_string(t.trial) + ',' +
         (t.nmse ? fmt("%.17g", *t.nmse) : std::string()) + ',' + t.status + '\n';
  }
  return s;
}

std::string aggregates_csv(const ExperimentResult& result) {
  std::string s = "method,sweep_var,value,mean_nmse_db,trials,failures\n";
  for (const auto& a : result.aggregates) {
    s += a.method + ',' + a.sweep_var + ',' + fmt("%.10g", a.value) + ',' + fmt("%.17g", a.mean_nmse_db) + ',' +
         std::to_string(a.trials) + ',' + std::to_string(a.failures) + '\n';
  }
  return s;
}

std::string plot_svg(const ExperimentResult& result) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 130, kTop = 30, kBottom = 60;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  std::string sweep_var;
  for (const auto& a : result.aggregates) {
    sweep_var = a.sweep_var;
    if (!series.count(a.method)) order.push_back(a.method);
    auto& pts = series[a.method];
    if (!std::isfinite(a.mean_nmse_db)) continue;
    pts.emplace_back(a.value, a.mean_nmse_db);
    x_lo = std::min(x_lo, a.value);
    x_hi = std::max(x_hi, a.value);
    y_lo = std::min(y_lo, a.mean_nmse_db);
    y_hi = std::max(y_hi, a.mean_nmse_db);
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = -1, y_hi = 0;
  if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
  y_lo = std::floor(y_lo / 10.0) * 10.0;
  y_hi = std::ceil(y_hi / 10.0) * 10.0;
  if (y_hi == y_lo) y_hi += 10.0;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"18\" text-anchor=\"middle\">" << result.name << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    o << "<text x=\"" << fmt("%.2f", px(xv)) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
      << fmt("%.4g", xv) << "</text>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt("%.2f", py(yv) + 4) << "\" text-anchor=\"end\">"
      << fmt("%.4g", yv) << "</text>\n";
  }
  const std::string xlabel = sweep_var == "delta" ? "Δ (cycles/sample)" : "SNR (dB)";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 18 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  o << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">NMSE (dB)</text>\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& pts = series[order[i]];
    const char* c = colors[i % 6];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) o << fmt("%.2f", px(x)) << ',' << fmt("%.2f", py(y)) << ' ';
    o << "\"/>\n";
    for (const auto& [x, y] : pts)
      o << "<circle cx=\"" << fmt("%.2f", px(x)) << "\" cy=\"" << fmt("%.2f", py(y)) << "\" r=\"3\" fill=\"" << c
        << "\"/>\n";
    const double ly = kTop + 16 + 18.0 * static_cast<double>(i);
    o << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kW - kRight + 36 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kW - kRight + 42 << "\" y=\"" << ly << "\">" << order[i] << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  io::write_text(out_dir / "trials.csv", trials_csv(result));
  io::write_text(out_dir / "aggregates.csv", aggregates_csv(result));
  if (!result.aggregates.empty()) io::write_text(out_dir / "plot.svg", plot_svg(result));
}

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"experiment", "n",       "m",       "l",     "methods",
                                              "estimator",  "predictor", "snr_list", "deltas", "snr_db",
                                              "on_grid",    "sampler", "min_separation", "trials", "seed",
                                              "out",        "predictor_training"};
  require(j.is_object(), ErrorKind::Config, "config must be a JSON object");
  for (const auto& [key, _] : j.items())
    require(std::find(known.begin(), known.end(), key) != known.end(), ErrorKind::Config, "unknown config key '" + key + "'");
  BenchConfig c;
  try {
    c.experiment = j.value("experiment", c.experiment);
    c.scenario.n = j.value("n", c.scenario.n);
    c.scenario.m = j.value("m", c.scenario.m);
    c.scenario.l = j.value("l", c.scenario.l);
    c.methods = j.value("methods", c.methods);
    c.estimator = j.value("estimator", c.estimator);
    c.predictor = j.value("predictor", c.predictor);
    c.snr_list = j.value("snr_list", c.snr_list);
    c.deltas = j.value("deltas", c.deltas);
    c.snr_db = j.value("snr_db", c.snr_db);
    c.on_grid = j.value("on_grid", c.on_grid);
    c.sampler = j.value("sampler", c.sampler);
    if (j.contains("min_separation")) c.min_separation = j.at("min_separation").get<double>();
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.out = j.value("out", c.out);
    if (j.contains("predictor_training")) c.predictor_training = j.at("predictor_training");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad config value: ") + e.what());
  }
  require(c.experiment == "snr_sweep" || c.experiment == "resolution_sweep" || c.experiment == "grid_l4",
          ErrorKind::Config, "unknown experiment '" + c.experiment + "'");
  require(c.trials >= 1, ErrorKind::Config, "trials must be >= 1");
  require(c.scenario.n > c.scenario.m && c.scenario.m >= 1, ErrorKind::Config, "need n > m >= 1");
  return c;
}

nlohmann::json BenchConfig::to_json() const {
  nlohmann::json j{{"experiment", experiment}, {"n", scenario.n},     {"m", scenario.m},
                   {"l", scenario.l},          {"methods", methods},  {"estimator", estimator},
                   {"predictor", predictor},   {"snr_list", snr_list}, {"deltas", deltas},
                   {"snr_db", snr_db},         {"on_grid", on_grid},  {"sampler", sampler},
                   {"trials", trials},         {"seed", seed},        {"out", out}};
  if (min_separation) j["min_separation"] = *min_separation;
  if (predictor_training) j["predictor_training"] = *predictor_training;
  return j;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return BenchConfig::from_json(j);
}

}  // namespace superres::experiments
