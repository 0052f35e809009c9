// Command-line front end: generate benchmark data, preprocess measured
// acceleration, identify models (energy method or sparse regression),
// simulate, score against ground truth, and emit diagnostics.
//
// Exit codes: 0 ok, 2 usage, 3 data, 4 numerical.

#include <algorithm>
#include <array>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eddi/basis.hpp"
#include "eddi/csv.hpp"
#include "eddi/damping.hpp"
#include "eddi/diagnostics.hpp"
#include "eddi/dynamics.hpp"
#include "eddi/errors.hpp"
#include "eddi/filter.hpp"
#include "eddi/model.hpp"
#include "eddi/model_io.hpp"
#include "eddi/response.hpp"
#include "eddi/sindy.hpp"
#include "eddi/stiffness.hpp"
#include "eddi/time_series.hpp"
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;
using eddi::BasisLibrary;
using eddi::Error;
using eddi::errc;
using eddi::TimeSeries;
using ordered_json = nlohmann::ordered_json;

int exit_code_for(errc code) {
  switch (code) {
    case errc::invalid_argument:
    case errc::invalid_cutoff:
    case errc::duplicate_term:
    case errc::frequency_above_nyquist:
      return 2;  // bad request
    case errc::csv_format:
    case errc::io_error:
    case errc::parse_error:
    case errc::series_too_short:
    case errc::grid_mismatch:
    case errc::out_of_range:
      return 3;  // bad data
    default:
      return 4;  // numerical failure (crossings, masking, thresholding, solver)
  }
}

// Re-labels errors with the pipeline stage they escaped from, so a failure
// deep in an identify run names its module of origin.
template <typename F>
auto stage(const char* label, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(label) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Config file handling. Precedence: command-line flag > config value >
// default. A command declares the keys it understands; anything else in the
// file is a usage error (it is almost certainly a typo).

class ConfigSource {
 public:
  ConfigSource() : doc_(ordered_json::object()) {}

  void load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(errc::io_error, "cannot open " + path.string() + " for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      doc_ = ordered_json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
      throw Error(errc::invalid_argument,
                  "config " + path.string() + ": invalid JSON: " + e.what());
    }
    if (!doc_.is_object()) {
      throw Error(errc::invalid_argument, "config " + path.string() + ": must be a JSON object");
    }
  }

  void allow_only(const std::vector<std::string>& keys) const {
    for (const auto& [key, value] : doc_.items()) {
      (void)value;
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw Error(errc::invalid_argument, "config: unknown key '" + key + "'");
      }
    }
  }

  bool has(const char* key) const { return doc_.contains(key); }

  double number(const char* key, double fallback) const {
    if (!doc_.contains(key)) return fallback;
    if (!doc_[key].is_number()) {
      throw Error(errc::invalid_argument, std::string("config: '") + key + "' must be a number");
    }
    return doc_[key].get<double>();
  }

  long long integer(const char* key, long long fallback) const {
    if (!doc_.contains(key)) return fallback;
    if (!doc_[key].is_number_integer()) {
      throw Error(errc::invalid_argument, std::string("config: '") + key + "' must be an integer");
    }
    return doc_[key].get<long long>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!doc_.contains(key)) return fallback;
    if (!doc_[key].is_boolean()) {
      throw Error(errc::invalid_argument, std::string("config: '") + key + "' must be a boolean");
    }
    return doc_[key].get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!doc_.contains(key)) return fallback;
    if (!doc_[key].is_string()) {
      throw Error(errc::invalid_argument, std::string("config: '") + key + "' must be a string");
    }
    return doc_[key].get<std::string>();
  }

 private:
  ordered_json doc_;
};

// One knob with the three-way precedence baked in.
template <typename T, typename Getter>
T effective(const CLI::Option* opt, const T& flag_value, Getter&& from_config) {
  return (opt != nullptr && opt->count() > 0) ? flag_value : from_config();
}

BasisLibrary parse_terms(const std::string& text, const char* what) {
  try {
    return BasisLibrary::parse(text);
  } catch (const Error& e) {
    // A malformed term expression is a bad invocation, not bad data.
    throw Error(errc::invalid_argument, std::string(what) + ": " + e.what());
  }
}

eddi::Response load_response(const fs::path& path, double inertia) {
  const eddi::CsvTable table = eddi::read_timeseries_csv(path);
  for (const char* col : {"q", "qd"}) {
    if (!table.has(col)) {
      throw Error(errc::csv_format,
                  path.string() + ": missing required column '" + std::string(col) + "'");
    }
  }
  std::optional<TimeSeries> qdd;
  if (table.has("qdd")) qdd = table.series("qdd");
  return eddi::Response(table.series("q"), table.series("qd"), std::move(qdd), inertia);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void echo_residuals(const std::vector<std::pair<std::string, double>>& residuals) {
  for (const auto& [name, value] : residuals) {
    std::cout << "residual_rms " << name << " = " << eddi::format_double(value) << "\n";
  }
}

void note_written(const fs::path& path) { std::cout << "wrote " << path.string() << "\n"; }

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string benchmark;
  std::string out_dir = ".";
  std::string prefix;  // defaults to the benchmark name
};

int run_generate(const GenerateArgs& args) {
  const bool duffing = args.benchmark == "duffing";
  auto [response, truth] = duffing ? eddi::gen_duffing() : eddi::gen_pendulum();

  const std::string prefix = args.prefix.empty() ? args.benchmark : args.prefix;
  const fs::path dir(args.out_dir);
  const fs::path csv_path = dir / (prefix + "_response.csv");
  const fs::path model_path = dir / (prefix + "_truth.json");

  eddi::write_timeseries_csv(csv_path, {"q", "qd", "qdd"},
                             {&response.q, &response.qd, &*response.qdd});

  // The truth file echoes the pinned benchmark settings so downstream scoring
  // can re-simulate without being told the initial conditions again.
  ordered_json config;
  config["benchmark"] = args.benchmark;
  config["ic"] = duffing ? ordered_json{0.0, 10.0} : ordered_json{std::numbers::pi / 2.0, 0.0};
  config["sample_rate_hz"] = duffing ? 1e4 : 100.0;
  config["t_span"] = duffing ? 1.0 : 100.0;
  config["rtol"] = 1e-12;
  config["atol"] = 1e-16;

  eddi::ModelProvenance prov;
  prov.method = "truth";
  prov.input_digest = eddi::file_digest(csv_path);
  prov.config_json = config.dump();
  eddi::write_model(model_path, eddi::ModelRecord{1, std::move(truth), std::move(prov)});

  note_written(csv_path);
  note_written(model_path);
  return 0;
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string input;
  std::string accel_col = "a";
  double cutoff_hz = 2.0;
  double trim_s = 0.25;
  std::string out;
};

TimeSeries trim_series(const TimeSeries& s, double trim_s) {
  if (trim_s == 0.0) return s;
  const auto cut = std::size_t(std::ceil(trim_s / s.dt() - 1e-9));
  if (2 * cut + 2 > s.size()) {
    throw Error(errc::invalid_argument, "trim: removing " + eddi::format_double(trim_s) +
                                            " s per side leaves fewer than two samples");
  }
  const std::vector<double> kept(s.values().begin() + long(cut), s.values().end() - long(cut));
  return TimeSeries(s.time(cut), s.dt(), kept);
}

int run_preprocess(const PreprocessArgs& args) {
  const eddi::CsvTable table = eddi::read_timeseries_csv(args.input);
  std::string col = args.accel_col;
  if (!table.has(col) && table.names.size() == 1) col = table.names.front();
  const TimeSeries accel = table.series(col);

  const eddi::HighpassSpec spec{args.cutoff_hz, 1.0 / accel.dt(), 3};
  auto [q, qd] = stage("preprocess", [&] { return eddi::accel_to_state(accel, spec); });
  // The acceleration itself goes through the same zero-phase high-pass so all
  // three channels share one passband.
  const TimeSeries qdd =
      stage("preprocess", [&] { return eddi::filtfilt(eddi::butterworth_highpass(spec), accel); });

  const TimeSeries qt = trim_series(q, args.trim_s);
  const TimeSeries qdt = trim_series(qd, args.trim_s);
  const TimeSeries qddt = trim_series(qdd, args.trim_s);
  eddi::write_timeseries_csv(args.out, {"q", "qd", "qdd"}, {&qt, &qdt, &qddt});
  note_written(args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// identify

struct IdentifyArgs {
  std::string method;
  std::string input;
  std::string out_dir = ".";
  std::string prefix;  // defaults to the method name
  double inertia = 0.0;
  std::string damping_terms;
  std::string stiffness_terms;
  double eps_dq = 1e-3;
  long long smooth_window = 100;
  long long max_crossings = 0;  // 0 = use every crossing
  double min_t_fraction = 1e-4;
  double lambda = 0.05;
  bool normalize = true;
  bool timestamp = false;
};

struct IdentifyOutput {
  eddi::IdentifiedSystem system;
  std::vector<std::pair<std::string, double>> residuals;
  TimeSeries trace_t, trace_d, trace_e;
  std::vector<double> restoring_q, restoring_force, restoring_fitted;

  IdentifyOutput(eddi::IdentifiedSystem sys, TimeSeries t, TimeSeries d, TimeSeries e)
      : system(std::move(sys)), trace_t(std::move(t)), trace_d(std::move(d)),
        trace_e(std::move(e)) {}
};

IdentifyOutput identify_eddi(const eddi::Response& r, const BasisLibrary& dlib,
                             const BasisLibrary& slib, const IdentifyArgs& args) {
  eddi::ZeroCrossingSet zc =
      stage("phase1", [&] { return eddi::find_zero_crossings(r, args.min_t_fraction); });
  if (args.max_crossings > 0 && zc.size() > std::size_t(args.max_crossings)) {
    zc.gammas.resize(std::size_t(args.max_crossings));
    zc.T_at_gamma.resize(std::size_t(args.max_crossings));
  }
  const auto assembled = stage("phase1", [&] { return eddi::assemble_system(r, dlib, zc); });
  const auto solution =
      stage("phase1", [&] { return eddi::solve_damping(assembled.first, assembled.second); });
  eddi::DampingModel damping(dlib, solution.coeffs);

  const eddi::EnergyTrace trace =
      stage("phase1", [&] { return eddi::make_energy_trace(r, damping, zc); });
  const TimeSeries lagr = stage("phase2", [&] { return eddi::lagrangian(trace.T, trace.E); });
  const eddi::ConservativeForceSamples cf = stage("phase2", [&] {
    return eddi::conservative_force(lagr, r, args.eps_dq, std::size_t(args.smooth_window));
  });
  const eddi::StiffnessFit fit = stage("phase2", [&] { return eddi::fit_stiffness(cf, slib); });

  IdentifyOutput out(eddi::IdentifiedSystem(r.inertia, std::move(damping), fit.model), trace.T,
                     trace.D, trace.E);
  out.residuals = {{"damping", solution.residual_rms}, {"stiffness", fit.residual_rms}};
  for (std::size_t i = 0; i < cf.size(); ++i) {
    if (!cf.mask[i]) continue;
    out.restoring_q.push_back(cf.q_samples[i]);
    out.restoring_force.push_back(-cf.force_samples[i]);
    out.restoring_fitted.push_back(out.system.stiffness.evaluate(cf.q_samples[i]));
  }
  return out;
}

IdentifyOutput identify_sindy(const eddi::Response& r, const BasisLibrary& dlib,
                              const BasisLibrary& slib, const IdentifyArgs& args) {
  const eddi::StlsqSpec spec{args.lambda, 20, args.normalize};
  eddi::IdentifiedSystem sys =
      stage("sindy", [&] { return eddi::sindy_identify(r, dlib, slib, spec); });

  // Mirror the regression's own acceleration choice when reporting fit error.
  const TimeSeries qdd = r.qdd ? *r.qdd : eddi::central_diff(r.qd);
  const std::size_t n = r.size();
  std::vector<double> kinetic(n), energy(n);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = r.q[i], v = r.qd[i];
    const double misfit = r.inertia * qdd[i] + sys.damping.evaluate(q, v) +
                          sys.stiffness.evaluate(q);
    sum_sq += misfit * misfit;
    kinetic[i] = 0.5 * r.inertia * v * v;
    energy[i] = kinetic[i] + sys.stiffness.potential(q);
  }
  const TimeSeries kinetic_ts(r.q.t0(), r.q.dt(), kinetic);
  const TimeSeries dissipated =
      stage("sindy", [&] { return eddi::dissipated_energy(r, sys.damping, r.q.t0()); });
  const TimeSeries energy_ts(r.q.t0(), r.q.dt(), energy);

  IdentifyOutput out(std::move(sys), kinetic_ts, dissipated, energy_ts);
  out.residuals = {{"force", std::sqrt(sum_sq / double(n))}};
  out.restoring_q.assign(r.q.values().begin(), r.q.values().end());
  out.restoring_force.resize(n);
  out.restoring_fitted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // What the equation of motion leaves for the conservative term.
    out.restoring_force[i] =
        -(r.inertia * qdd[i] + out.system.damping.evaluate(r.q[i], r.qd[i]));
    out.restoring_fitted[i] = out.system.stiffness.evaluate(r.q[i]);
  }
  return out;
}

int run_identify(const IdentifyArgs& args) {
  if (args.inertia <= 0.0 || !std::isfinite(args.inertia)) {
    throw Error(errc::invalid_argument,
                "identify: inertia must be positive (--inertia or config \"inertia\")");
  }
  if (args.damping_terms.empty() || args.stiffness_terms.empty()) {
    throw Error(errc::invalid_argument,
                "identify: both --damping-terms and --stiffness-terms are required");
  }
  const BasisLibrary dlib = parse_terms(args.damping_terms, "damping terms");
  const BasisLibrary slib = parse_terms(args.stiffness_terms, "stiffness terms");
  if (args.smooth_window < 1) {
    throw Error(errc::invalid_argument, "identify: smoothing window must be >= 1");
  }

  const eddi::Response r = load_response(args.input, args.inertia);
  const bool is_eddi = args.method == "eddi";
  IdentifyOutput out =
      is_eddi ? identify_eddi(r, dlib, slib, args) : identify_sindy(r, dlib, slib, args);

  ordered_json config;
  config["input"] = args.input;
  config["inertia"] = args.inertia;
  config["damping_terms"] = dlib.render();
  config["stiffness_terms"] = slib.render();
  if (is_eddi) {
    config["eps_dq"] = args.eps_dq;
    config["smooth_window"] = args.smooth_window;
    config["max_crossings"] = args.max_crossings;
    config["min_t_fraction"] = args.min_t_fraction;
  } else {
    config["lambda"] = args.lambda;
    config["normalize"] = args.normalize;
  }

  eddi::ModelProvenance prov;
  prov.method = args.method;
  prov.input_digest = eddi::file_digest(args.input);
  prov.config_json = config.dump();
  prov.residuals = out.residuals;
  if (args.timestamp) prov.timestamp = utc_timestamp();

  const std::string prefix = args.prefix.empty() ? args.method : args.prefix;
  const fs::path dir(args.out_dir);
  const fs::path model_path = dir / (prefix + "_model.json");
  const fs::path trace_path = dir / (prefix + "_trace.csv");
  const fs::path restoring_path = dir / (prefix + "_restoring.csv");

  eddi::write_model(model_path, eddi::ModelRecord{1, out.system, std::move(prov)});
  eddi::write_timeseries_csv(trace_path, {"T", "D", "E"},
                             {&out.trace_t, &out.trace_d, &out.trace_e});
  eddi::write_csv(restoring_path, {"q", "force", "fitted_force"},
                  {&out.restoring_q, &out.restoring_force, &out.restoring_fitted});

  echo_residuals(out.residuals);
  note_written(model_path);
  note_written(trace_path);
  note_written(restoring_path);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string model;
  double ic_q = 0.0;
  double ic_qd = 0.0;
  std::string force_csv;
  std::string force_col = "force";
  double t_span = 0.0;
  double rate_hz = 0.0;
  double rtol = 1e-12;
  double atol = 1e-16;
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  const eddi::ModelRecord rec = eddi::read_model(args.model);

  std::optional<eddi::ForceSignal> force;
  if (!args.force_csv.empty()) {
    const eddi::CsvTable table = eddi::read_timeseries_csv(args.force_csv);
    std::string col = args.force_col;
    if (!table.has(col) && table.names.size() == 1) col = table.names.front();
    force.emplace(table.series(col));
  }

  eddi::SolverSpec spec;
  spec.rtol = args.rtol;
  spec.atol = args.atol;
  spec.sample_rate_hz = args.rate_hz;
  spec.t_span = args.t_span;
  if (force) {
    // A forced run defaults onto the force record's own grid and span.
    const TimeSeries& f = force->samples();
    if (spec.sample_rate_hz == 0.0) spec.sample_rate_hz = 1.0 / f.dt();
    if (spec.t_span == 0.0) spec.t_span = f.t_end() - f.t0();
  }
  if (spec.sample_rate_hz <= 0.0 || spec.t_span <= 0.0) {
    throw Error(errc::invalid_argument,
                "simulate: --t-span and --rate are required without a force record");
  }

  const eddi::Response r = stage("simulate", [&] {
    return eddi::integrate_rk45(rec.system, {args.ic_q, args.ic_qd}, spec,
                                force ? &*force : nullptr);
  });
  eddi::write_timeseries_csv(args.out, {"q", "qd", "qdd"}, {&r.q, &r.qd, &*r.qdd});
  note_written(args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string model;
  std::string truth;
  double ic_q = 0.0;
  double ic_qd = 0.0;
  double t_span = 0.0;
  double rate_hz = 0.0;
  bool no_resim = false;
  const CLI::Option* ic_q_opt = nullptr;
  const CLI::Option* ic_qd_opt = nullptr;
};

struct AlignedTerm {
  eddi::BasisTerm term;
  double truth = 0.0;
  double candidate = 0.0;
  bool in_truth = false;
  bool in_candidate = false;
};

std::vector<AlignedTerm> align_terms(const BasisLibrary& truth_lib,
                                     const std::vector<double>& truth_coeffs,
                                     const BasisLibrary& cand_lib,
                                     const std::vector<double>& cand_coeffs) {
  std::vector<AlignedTerm> aligned;
  auto slot = [&aligned](const eddi::BasisTerm& term) -> AlignedTerm& {
    for (AlignedTerm& a : aligned) {
      if (a.term == term) return a;
    }
    aligned.push_back({term, 0.0, 0.0, false, false});
    return aligned.back();
  };
  for (std::size_t i = 0; i < truth_lib.size(); ++i) {
    AlignedTerm& a = slot(truth_lib[i]);
    a.truth = truth_coeffs[i];
    a.in_truth = true;
  }
  for (std::size_t i = 0; i < cand_lib.size(); ++i) {
    AlignedTerm& a = slot(cand_lib[i]);
    a.candidate = cand_coeffs[i];
    a.in_candidate = true;
  }
  return aligned;
}

void report_terms(const char* group, const std::vector<AlignedTerm>& aligned) {
  for (const AlignedTerm& a : aligned) {
    std::cout << group << " " << eddi::render_term(a.term) << ": truth="
              << eddi::format_double(a.truth);
    if (!a.in_candidate) {
      // Convention: a truth term the candidate cannot express scores 100%.
      std::cout << " est=absent";
      if (a.truth != 0.0) std::cout << " err_pct=100 missing";
      std::cout << "\n";
      continue;
    }
    std::cout << " est=" << eddi::format_double(a.candidate);
    if (a.truth != 0.0) {
      const double pct = std::abs(a.candidate - a.truth) / std::abs(a.truth) * 100.0;
      std::cout << " err_pct=" << eddi::format_double(pct);
    } else {
      // No percentage exists against a zero truth coefficient; report the
      // absolute magnitude and flag anything nonzero as spurious.
      std::cout << " abs=" << eddi::format_double(std::abs(a.candidate));
      if (a.candidate != 0.0) std::cout << " spurious";
    }
    std::cout << "\n";
  }
}

int run_score(const ScoreArgs& args) {
  const eddi::ModelRecord cand = eddi::read_model(args.model);
  const eddi::ModelRecord truth = eddi::read_model(args.truth);

  std::cout << "inertia: truth=" << eddi::format_double(truth.system.inertia)
            << " est=" << eddi::format_double(cand.system.inertia) << " err_pct="
            << eddi::format_double(std::abs(cand.system.inertia - truth.system.inertia) /
                                   std::abs(truth.system.inertia) * 100.0)
            << "\n";
  report_terms("damping", align_terms(truth.system.damping.library(),
                                      truth.system.damping.coeffs(),
                                      cand.system.damping.library(),
                                      cand.system.damping.coeffs()));
  report_terms("stiffness", align_terms(truth.system.stiffness.library(),
                                        truth.system.stiffness.coeffs(),
                                        cand.system.stiffness.library(),
                                        cand.system.stiffness.coeffs()));

  if (args.no_resim) return 0;

  // Re-simulation settings come from flags first, then the truth file's
  // provenance echo (generate stores its benchmark settings there).
  double ic_q = args.ic_q, ic_qd = args.ic_qd;
  double t_span = args.t_span, rate = args.rate_hz;
  bool have_ic = (args.ic_q_opt && args.ic_q_opt->count() > 0) ||
                 (args.ic_qd_opt && args.ic_qd_opt->count() > 0);
  try {
    const ordered_json cfg = ordered_json::parse(truth.provenance.config_json);
    if (!have_ic && cfg.contains("ic") && cfg["ic"].is_array() && cfg["ic"].size() == 2) {
      ic_q = cfg["ic"][0].get<double>();
      ic_qd = cfg["ic"][1].get<double>();
      have_ic = true;
    }
    if (t_span == 0.0 && cfg.contains("t_span")) t_span = cfg["t_span"].get<double>();
    if (rate == 0.0 && cfg.contains("sample_rate_hz")) rate = cfg["sample_rate_hz"].get<double>();
  } catch (const nlohmann::json::exception&) {
    // No usable echo; flags must carry the settings instead.
  }
  if (!have_ic || t_span <= 0.0 || rate <= 0.0) {
    std::cout << "relative_l2 q = skipped (need initial conditions, t-span, and rate)\n";
    return 0;
  }

  eddi::SolverSpec spec;
  spec.sample_rate_hz = rate;
  spec.t_span = t_span;
  const eddi::Response ref = stage("score", [&] {
    return eddi::integrate_rk45(truth.system, {ic_q, ic_qd}, spec);
  });
  const eddi::Response est = stage("score", [&] {
    return eddi::integrate_rk45(cand.system, {ic_q, ic_qd}, spec);
  });
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = est.q[i] - ref.q[i];
    num += d * d;
    den += ref.q[i] * ref.q[i];
  }
  const double rel = den > 0.0 ? std::sqrt(num / den) : 0.0;
  std::cout << "relative_l2 q = " << eddi::format_double(rel) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseArgs {
  std::string input;
  std::string signal = "q";
  std::string out_dir = ".";
  std::string prefix;  // defaults to the signal name
  double fmin = 1.0;
  double fmax = 0.0;  // 0 = just below Nyquist
  long long n_freqs = 64;
  double omega0 = 6.0;
};

int run_diagnose(const DiagnoseArgs& args) {
  const eddi::CsvTable table = eddi::read_timeseries_csv(args.input);
  const TimeSeries s = table.series(args.signal);
  const double nyquist = 0.5 / s.dt();

  const double fmax = args.fmax > 0.0 ? args.fmax : 0.9 * nyquist;
  if (args.n_freqs < 2 || args.fmin <= 0.0 || fmax <= args.fmin) {
    throw Error(errc::invalid_argument,
                "diagnose: need n-freqs >= 2 and 0 < fmin < fmax");
  }
  std::vector<double> freqs(std::size_t(args.n_freqs));
  const double ratio = fmax / args.fmin;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    freqs[i] = args.fmin * std::pow(ratio, double(i) / double(freqs.size() - 1));
  }

  const eddi::Spectrum spectrum = stage("diagnostics", [&] { return eddi::fft_magnitude(s); });
  const eddi::Scalogram scalogram =
      stage("diagnostics", [&] { return eddi::cwt_morlet(s, freqs, args.omega0); });

  const std::string prefix = args.prefix.empty() ? args.signal : args.prefix;
  const fs::path dir(args.out_dir);
  const fs::path spectrum_path = dir / (prefix + "_spectrum.csv");
  const fs::path scalogram_path = dir / (prefix + "_scalogram.csv");

  eddi::write_csv(spectrum_path, {"freq_hz", "magnitude"},
                  {&spectrum.freqs_hz, &spectrum.magnitudes});

  std::vector<std::string> names{"t"};
  std::vector<const std::vector<double>*> cols{&scalogram.times};
  for (std::size_t f = 0; f < scalogram.freqs_hz.size(); ++f) {
    names.push_back(eddi::format_double(scalogram.freqs_hz[f]));
    cols.push_back(&scalogram.magnitudes[f]);
  }
  names.push_back("coi_hz");
  cols.push_back(&scalogram.coi_hz);
  eddi::write_csv(scalogram_path, names, cols);

  note_written(spectrum_path);
  note_written(scalogram_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-based identification of single-degree-of-freedom dynamics"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* cgen = app.add_subcommand("generate", "Simulate a benchmark and write data + truth");
  cgen->add_option("--benchmark", gen.benchmark, "duffing or pendulum")
      ->required()
      ->check(CLI::IsMember({"duffing", "pendulum"}));
  cgen->add_option("--out-dir", gen.out_dir, "Output directory");
  cgen->add_option("--prefix", gen.prefix, "Output filename prefix (default: benchmark name)");

  PreprocessArgs pre;
  std::string pre_config;
  CLI::App* cpre = app.add_subcommand("preprocess", "Acceleration CSV -> q, qd, qdd response");
  cpre->add_option("--input", pre.input, "Acceleration CSV")->required();
  cpre->add_option("--config", pre_config, "JSON config file");
  const CLI::Option* pre_col = cpre->add_option("--accel-col", pre.accel_col,
                                                "Acceleration column name");
  const CLI::Option* pre_fc = cpre->add_option("--cutoff-hz", pre.cutoff_hz,
                                               "High-pass cutoff in Hz");
  const CLI::Option* pre_trim = cpre->add_option("--trim", pre.trim_s,
                                                 "Seconds discarded per edge");
  cpre->add_option("--out", pre.out, "Output response CSV")->required();

  IdentifyArgs ident;
  std::string ident_config;
  CLI::App* cid = app.add_subcommand("identify", "Fit a model to a recorded response");
  cid->add_option("--method", ident.method, "eddi or sindy")
      ->required()
      ->check(CLI::IsMember({"eddi", "sindy"}));
  cid->add_option("--input", ident.input, "Response CSV with q, qd[, qdd]")->required();
  cid->add_option("--config", ident_config, "JSON config file");
  cid->add_option("--out-dir", ident.out_dir, "Output directory");
  cid->add_option("--prefix", ident.prefix, "Output filename prefix (default: method)");
  const CLI::Option* id_inertia = cid->add_option("--inertia", ident.inertia,
                                                  "Generalized inertia");
  const CLI::Option* id_dterms = cid->add_option("--damping-terms", ident.damping_terms,
                                                 "Dissipative term list, e.g. \"qd, qd^3\"");
  const CLI::Option* id_sterms = cid->add_option("--stiffness-terms", ident.stiffness_terms,
                                                 "Conservative term list, e.g. \"q, q^3\"");
  const CLI::Option* id_eps = cid->add_option("--eps-dq", ident.eps_dq,
                                              "Increment-mask floor as a fraction of max |dq|");
  const CLI::Option* id_win = cid->add_option("--smooth-window", ident.smooth_window,
                                              "Moving-average window for force samples (1 = off)");
  const CLI::Option* id_maxc = cid->add_option("--max-crossings", ident.max_crossings,
                                               "Keep at most this many crossings (0 = all)");
  const CLI::Option* id_minT = cid->add_option("--min-t-fraction", ident.min_t_fraction,
                                               "Discard crossings below this fraction of T0");
  const CLI::Option* id_lambda = cid->add_option("--lambda", ident.lambda,
                                                 "Sparse-regression threshold");
  const CLI::Option* id_norm = cid->add_flag("--normalize,!--no-normalize", ident.normalize,
                                             "Column normalization in sparse regression");
  cid->add_flag("--timestamp", ident.timestamp, "Record a wall-clock timestamp in provenance");

  SimulateArgs sim;
  CLI::App* csim = app.add_subcommand("simulate", "Integrate a stored model");
  csim->add_option("--model", sim.model, "Model JSON")->required();
  csim->add_option("--ic-q", sim.ic_q, "Initial displacement");
  csim->add_option("--ic-qd", sim.ic_qd, "Initial velocity");
  csim->add_option("--force", sim.force_csv, "External force CSV (zero outside its window)");
  csim->add_option("--force-col", sim.force_col, "Force column name");
  csim->add_option("--t-span", sim.t_span, "Duration in seconds");
  csim->add_option("--rate", sim.rate_hz, "Output sample rate in Hz");
  csim->add_option("--rtol", sim.rtol, "Relative tolerance");
  csim->add_option("--atol", sim.atol, "Absolute tolerance");
  csim->add_option("--out", sim.out, "Output response CSV")->required();

  ScoreArgs score;
  CLI::App* csc = app.add_subcommand("score", "Compare an identified model against truth");
  csc->add_option("--model", score.model, "Identified model JSON")->required();
  csc->add_option("--truth", score.truth, "Ground-truth model JSON")->required();
  score.ic_q_opt = csc->add_option("--ic-q", score.ic_q, "Re-simulation initial displacement");
  score.ic_qd_opt = csc->add_option("--ic-qd", score.ic_qd, "Re-simulation initial velocity");
  csc->add_option("--t-span", score.t_span, "Re-simulation duration in seconds");
  csc->add_option("--rate", score.rate_hz, "Re-simulation sample rate in Hz");
  csc->add_flag("--no-resim", score.no_resim, "Skip the response comparison");

  DiagnoseArgs diag;
  CLI::App* cdia = app.add_subcommand("diagnose", "Spectrum and scalogram of a recorded signal");
  cdia->add_option("--input", diag.input, "Response CSV")->required();
  cdia->add_option("--signal", diag.signal, "Column to analyze");
  cdia->add_option("--out-dir", diag.out_dir, "Output directory");
  cdia->add_option("--prefix", diag.prefix, "Output filename prefix (default: signal name)");
  cdia->add_option("--fmin", diag.fmin, "Lowest analysis frequency in Hz");
  cdia->add_option("--fmax", diag.fmax, "Highest analysis frequency in Hz (default: 0.9 Nyquist)");
  cdia->add_option("--n-freqs", diag.n_freqs, "Number of log-spaced frequencies");
  cdia->add_option("--omega0", diag.omega0, "Wavelet center frequency parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (cgen->parsed()) return run_generate(gen);
    if (cpre->parsed()) {
      ConfigSource cfg;
      if (!pre_config.empty()) cfg.load(pre_config);
      cfg.allow_only({"accel_col", "cutoff_hz", "trim_s"});
      pre.accel_col = effective(pre_col, pre.accel_col,
                                [&] { return cfg.text("accel_col", pre.accel_col); });
      pre.cutoff_hz = effective(pre_fc, pre.cutoff_hz,
                                [&] { return cfg.number("cutoff_hz", pre.cutoff_hz); });
      pre.trim_s = effective(pre_trim, pre.trim_s,
                             [&] { return cfg.number("trim_s", pre.trim_s); });
      if (pre.trim_s < 0.0) {
        throw Error(errc::invalid_argument, "preprocess: trim must be >= 0");
      }
      return run_preprocess(pre);
    }
    if (cid->parsed()) {
      ConfigSource cfg;
      if (!ident_config.empty()) cfg.load(ident_config);
      cfg.allow_only({"inertia", "damping_terms", "stiffness_terms", "eps_dq", "smooth_window",
                      "max_crossings", "min_t_fraction", "lambda", "normalize"});
      ident.inertia = effective(id_inertia, ident.inertia,
                                [&] { return cfg.number("inertia", ident.inertia); });
      ident.damping_terms = effective(id_dterms, ident.damping_terms, [&] {
        return cfg.text("damping_terms", ident.damping_terms);
      });
      ident.stiffness_terms = effective(id_sterms, ident.stiffness_terms, [&] {
        return cfg.text("stiffness_terms", ident.stiffness_terms);
      });
      ident.eps_dq = effective(id_eps, ident.eps_dq,
                               [&] { return cfg.number("eps_dq", ident.eps_dq); });
      ident.smooth_window = effective(id_win, ident.smooth_window, [&] {
        return cfg.integer("smooth_window", ident.smooth_window);
      });
      ident.max_crossings = effective(id_maxc, ident.max_crossings, [&] {
        return cfg.integer("max_crossings", ident.max_crossings);
      });
      ident.min_t_fraction = effective(id_minT, ident.min_t_fraction, [&] {
        return cfg.number("min_t_fraction", ident.min_t_fraction);
      });
      ident.lambda = effective(id_lambda, ident.lambda,
                               [&] { return cfg.number("lambda", ident.lambda); });
      ident.normalize = effective(id_norm, ident.normalize,
                                  [&] { return cfg.boolean("normalize", ident.normalize); });
      return run_identify(ident);
    }
    if (csim->parsed()) return run_simulate(sim);
    if (csc->parsed()) return run_score(score);
    if (cdia->parsed()) return run_diagnose(diag);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
