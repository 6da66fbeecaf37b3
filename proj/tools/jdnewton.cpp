// jdnewton: command-line front end.
//
// Exit codes: 0 success, 1 numerical failure (singular Hessian, rank
// deficiency, singular covariance, breakdown), 2 input error (bad flags,
// unreadable or malformed files, asymmetric matrices), 3 a self-check failed.

#include "jdnewton/diagnostics.hpp"
#include "jdnewton/experiments.hpp"
#include "jdnewton/ica.hpp"
#include "jdnewton/io.hpp"
#include "jdnewton/trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jdn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitInput = 2;
constexpr int kExitCheckFailed = 3;

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::RankDeficient:
    case ErrorCode::NumericalBreakdown:
    case ErrorCode::SingularHessian:
    case ErrorCode::SingularCovariance:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

struct Common {
  std::string metric = "induced";
  int max_iters = 50;
  std::optional<double> grad_tol;
  std::uint64_t seed = 1;
  int trials = 50;
  std::string out;
  std::string format = "json";
  bool serial = false;
  bool timing = false;
};

void add_common(CLI::App* app, Common& c, bool with_trials) {
  app->add_option("--metric", c.metric, "Riemannian metric")
      ->check(CLI::IsMember({"induced", "canonical"}));
  app->add_option("--max-iters", c.max_iters, "Newton iteration cap")->check(CLI::PositiveNumber);
  app->add_option("--grad-tol", c.grad_tol, "Stop when ||grad f|| <= this (default scales with the data)");
  app->add_option("--seed", c.seed, "Random seed");
  if (with_trials) app->add_option("--trials", c.trials, "Number of trials")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Directory for output files");
  app->add_option("--format", c.format, "Format of the table on stdout")
      ->check(CLI::IsMember({"json", "csv"}));
  app->add_flag("--serial", c.serial, "Run trials one after another (always the case in this build)");
  app->add_flag("--timing", c.timing, "Record wall time in traces (breaks byte-identical output)");
}

NewtonConfig newton_config(const Common& c) {
  NewtonConfig cfg;
  cfg.metric = metric_from_string(c.metric);
  cfg.max_iters = c.max_iters;
  cfg.grad_tol = c.grad_tol;
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  os << text;
  if (!os) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  return fs::path(dir);
}

bool has_pgm_extension(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".pgm";
}

std::string records_csv(const std::vector<IterationRecord>& recs) {
  std::ostringstream os;
  os << "k,f,grad_norm,step_norm,orth_defect\n";
  for (const auto& r : recs) {
    os << r.k << ',' << format_double(r.f) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.step_norm) << ',' << format_double(r.orth_defect) << '\n';
  }
  return os.str();
}

std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- jd

struct JdArgs {
  std::vector<std::string> inputs;
  Index p = 0;
  std::string y0;
  bool jacobi = false;
};

int cmd_jd(const JdArgs& a, const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Matrix> mats;
  for (const auto& path : a.inputs) mats.push_back(read_matrix_csv(path));
  if (mats.empty()) throw Error(ErrorCode::InvalidArgument, "no input matrices");
  const SymmetricSet A(std::move(mats));
  const Index n = A.n();
  const Index p = a.p > 0 ? a.p : n;
  if (p > n) throw Error(ErrorCode::InvalidArgument, "--p exceeds the matrix size");
  const NewtonConfig cfg = newton_config(c);

  json config = {{"command", "jd"}, {"n", n}, {"p", p}, {"N", A.size()},
                 {"metric", c.metric}, {"max_iters", cfg.max_iters},
                 {"grad_tol", cfg.resolved_grad_tol(A)}};
  json summary = json::object();

  std::optional<StiefelPoint> Y0;
  if (!a.y0.empty()) {
    const Matrix Y = read_matrix_csv(a.y0);
    if (Y.rows() != n || Y.cols() != p) throw Error(ErrorCode::ShapeMismatch, "--y0 must be n x p");
    Y0.emplace(Y);
    config["start"] = "file";
  }
  if (a.jacobi || (!Y0 && p == n)) {
    const JacobiResult jac = jacobi_diagonalize(A);
    Y0.emplace(p == n ? jac.Y : truncate_columns(A, jac.Y, p));
    config["start"] = "jacobi";
    summary["jacobi_sweeps"] = jac.sweeps;
    summary["f_jacobi"] = objective(A, *Y0);
    summary["grad_jacobi"] = gradient_norm(A, *Y0);
  }
  if (!Y0) {
    Y0.emplace(StiefelPoint::identity(n, p));
    config["start"] = "identity";
  }

  const JDResult res = (p == n && cfg.metric == Metric::Induced) ? solve_orthogonal(A, *Y0, cfg)
                                                                  : solve(A, *Y0, cfg);
  summary["termination"] = to_string(res.trace.termination);
  summary["iterations"] = res.trace.iterations();
  summary["f_final"] = res.trace.records.back().f;
  summary["grad_final"] = res.trace.records.back().grad_norm;
  summary["off_norm_sq"] = off_norm_sq(A, res.Y.matrix());

  TraceFile trace = make_trace(res.trace, config, summary);
  if (c.timing) trace.wall_time_s = seconds_since(t0);
  if (!c.out.empty()) {
    const fs::path dir = ensure_dir(c.out);
    write_matrix_csv((dir / "Y_final.csv").string(), res.Y.matrix());
    write_text(dir / "trace.json", serialize(trace));
  }
  std::cout << (c.format == "csv" ? records_csv(trace.records) : serialize(trace));

  if (res.trace.termination == Termination::SingularHessian) {
    std::cerr << "jdnewton: Newton stopped on a singular Hessian\n";
    return kExitNumerical;
  }
  if (res.trace.termination == Termination::MaxIters) {
    std::cerr << "jdnewton: iteration cap reached before the gradient tolerance\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string family = "perturbed-optimum";
  Index n = 50, p = 30, N = 10;
  double scale = 0.01;
  double sweep_tol = 1e-8;
  int max_sweeps = 100;
};

json aggregate(const ExperimentSpec& spec, const std::vector<json>& metrics) {
  json agg = {{"trials", metrics.size()}};
  if (spec.family == Family::JacobiThenNewton) {
    int f_neg = 0, grad_small = 0, orth_neg = 0;
    for (const auto& m : metrics) {
      f_neg += m["f_diff"].get<double>() < 0;
      grad_small += m["grad_diff"].get<double>() <= 1e-6;
      orth_neg += m["orth_diff"].get<double>() < 0;
    }
    agg["f_diff_negative"] = f_neg;
    agg["grad_diff_at_most_1e-6"] = grad_small;
    agg["orth_diff_negative"] = orth_neg;
  } else {
    int converged = 0, within5 = 0;
    double worst_order = std::numeric_limits<double>::infinity();
    for (const auto& m : metrics) {
      const bool conv = m["termination"] == to_string(Termination::Converged);
      converged += conv;
      within5 += conv && m["iterations"].get<int>() <= 5;
      if (m["convergence_order"].is_number()) {
        worst_order = std::min(worst_order, m["convergence_order"].get<double>());
      }
    }
    agg["converged"] = converged;
    agg["converged_within_5"] = within5;
    if (std::isfinite(worst_order)) agg["min_convergence_order"] = worst_order;
  }
  return agg;
}

std::string bench_csv(const ExperimentSpec& spec, const std::vector<TrialOutcome>& out) {
  std::ostringstream os;
  if (spec.family == Family::JacobiThenNewton) {
    os << "trial,f_diff,grad_diff,orth_diff,grad_jacobi,grad_newton\n";
    for (const auto& t : out) {
      const auto& m = t.metrics;
      os << m["trial"].get<int>() << ',' << format_double(m["f_diff"]) << ','
         << format_double(m["grad_diff"]) << ',' << format_double(m["orth_diff"]) << ','
         << format_double(m["grad_jacobi"]) << ',' << format_double(m["grad_newton"]) << '\n';
    }
    return os.str();
  }
  const bool gap = spec.family == Family::PerturbedOptimum;
  os << "trial,k," << (gap ? "f_gap" : "f") << ",grad_norm,orth_defect\n";
  for (const auto& t : out) {
    const int trial = t.metrics["trial"].get<int>();
    for (std::size_t k = 0; k < t.trace.records.size(); ++k) {
      const auto& r = t.trace.records[k];
      const double f = gap ? t.metrics["f_gap"][k].get<double>() : r.f;
      os << trial << ',' << r.k << ',' << format_double(f) << ',' << format_double(r.grad_norm) << ','
         << format_double(r.orth_defect) << '\n';
    }
  }
  return os.str();
}

int cmd_bench(const BenchArgs& a, const Common& c) {
  ExperimentSpec spec;
  spec.family = family_from_string(a.family);
  spec.n = a.n;
  spec.p = a.p;
  spec.N = a.N;
  spec.seed = c.seed;
  spec.trials = c.trials;
  spec.perturbation_scale = a.scale;
  spec.validate();
  const NewtonConfig cfg = newton_config(c);
  JacobiConfig jcfg;
  jcfg.sweep_tol = a.sweep_tol;
  jcfg.max_sweeps = a.max_sweeps;
  jcfg.validate();

  std::optional<fs::path> dir;
  if (!c.out.empty()) dir = ensure_dir(c.out);

  std::vector<TrialOutcome> outcomes;
  std::vector<json> metrics;
  bool singular = false;
  for (int trial = 0; trial < spec.trials; ++trial) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialOutcome o = run_trial(spec, trial, cfg, jcfg);
    if (c.timing) o.trace.wall_time_s = seconds_since(t0);
    singular = singular || o.trace.termination == to_string(Termination::SingularHessian);
    if (dir) {
      char name[32];
      std::snprintf(name, sizeof name, "trial_%04d.json", trial);
      write_text(*dir / name, serialize(o.trace));
    }
    metrics.push_back(o.metrics);
    outcomes.push_back(std::move(o));
  }

  const json summary = {{"spec", spec.to_json()}, {"aggregate", aggregate(spec, metrics)},
                        {"trials", metrics}};
  if (dir) write_text(*dir / "summary.json", summary.dump(2) + "\n");
  std::cout << (c.format == "csv" ? bench_csv(spec, outcomes) : summary.dump(2) + "\n");
  if (singular) {
    std::cerr << "jdnewton: at least one trial stopped on a singular Hessian\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- ica

struct IcaArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> sources;
  std::string mixing = "image";
  Index synthetic = 0;
  Index channels = 3;
  bool gaussian = false;
  double sweep_tol = 1e-8;
  int max_sweeps = 100;
};

Matrix load_channels(const std::vector<std::string>& paths, std::vector<std::pair<int, int>>& shapes) {
  if (paths.size() == 1 && !has_pgm_extension(paths[0])) return read_matrix_csv(paths[0]);
  std::vector<Matrix> rows;
  for (const auto& path : paths) {
    if (!has_pgm_extension(path)) {
      throw Error(ErrorCode::InvalidArgument, "several inputs must all be PGM images: " + path);
    }
    const GrayImage img = read_pgm(path);
    shapes.emplace_back(static_cast<int>(img.pixels.rows()), static_cast<int>(img.pixels.cols()));
    if (shapes.back() != shapes.front()) throw Error(ErrorCode::ShapeMismatch, "images differ in size");
    rows.push_back(img.pixels.reshaped());  // vec(I), column-major
  }
  Matrix X(static_cast<Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) X.row(static_cast<Index>(i)) = rows[i].transpose();
  return X;
}

int cmd_ica(const IcaArgs& a, const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::pair<int, int>> shapes;
  Matrix X;
  std::optional<Matrix> truth;
  const int modes = !a.inputs.empty() + !a.sources.empty() + (a.synthetic > 0);
  if (modes != 1) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --input, --sources, --synthetic");
  }
  if (!a.inputs.empty()) {
    X = load_channels(a.inputs, shapes);
  } else {
    Matrix S;
    if (!a.sources.empty()) {
      S = load_channels(a.sources, shapes);
    } else {
      Rng rng(c.seed);
      S = synthetic_sources(a.channels, a.synthetic, rng, a.gaussian);
    }
    Matrix M;
    if (a.mixing == "image") {
      M = image_mixing_matrix();
    } else if (a.mixing == "random") {
      Rng rng(derive_seed(c.seed, 1));
      M = rng.gaussian(S.rows(), S.rows());
    } else {
      M = read_matrix_csv(a.mixing);
    }
    if (M.rows() != S.rows() || M.cols() != S.rows()) {
      throw Error(ErrorCode::ShapeMismatch, "mixing matrix must be channels x channels");
    }
    X = M * S;
    truth = std::move(S);
  }
  if (X.rows() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two channels");

  SeparationConfig cfg;
  cfg.newton = newton_config(c);
  cfg.newton.max_iters = std::min(cfg.newton.max_iters, 20);
  cfg.jacobi.sweep_tol = a.sweep_tol;
  cfg.jacobi.max_sweeps = a.max_sweeps;
  const SeparationResult r = separate(X, cfg);
  for (const auto& w : r.warnings) std::cerr << "jdnewton: warning: " << w << '\n';

  json summary = {{"channels", X.rows()},
                  {"samples", X.cols()},
                  {"jacobi_sweeps", r.jacobi_sweeps},
                  {"f_jacobi", r.f_jacobi},
                  {"f_newton", r.f_newton},
                  {"grad_jacobi", r.grad_jacobi},
                  {"grad_newton", r.grad_newton},
                  {"fell_back_to_jacobi", r.fell_back_to_jacobi},
                  {"warnings", r.warnings},
                  {"kurtosis", to_vector(excess_kurtosis(r.Z))}};
  std::optional<Alignment> al;
  if (truth) {
    al = align(r.Z, *truth);
    summary["alignment"] = {
        {"permutation", al->permutation},
        {"scales", to_vector(al->scales)},
        {"correlations", to_vector(al->correlations)}};
  }
  json config = {{"command", "ica"}, {"channels", X.rows()}, {"samples", X.cols()},
                 {"metric", c.metric}, {"max_iters", cfg.newton.max_iters}};
  TraceFile trace = make_trace(r.newton_trace, config, summary);
  if (c.timing) trace.wall_time_s = seconds_since(t0);

  if (!c.out.empty()) {
    const fs::path dir = ensure_dir(c.out);
    write_text(dir / "trace.json", serialize(trace));
    if (al) write_text(dir / "alignment.json", summary["alignment"].dump(2) + "\n");
    if (!shapes.empty()) {
      // Channels are written in source order when the truth is known (sign
      // and scale matched), otherwise min-max normalized in recovered order.
      for (Index i = 0; i < r.Z.rows(); ++i) {
        Eigen::RowVectorXd ch;
        if (al) {
          ch = al->scales(i) * r.Z.row(al->permutation[static_cast<std::size_t>(i)]);
        } else {
          ch = r.Z.row(i);
          const double lo = ch.minCoeff(), hi = ch.maxCoeff();
          ch = (ch.array() - lo) / std::max(hi - lo, 1e-300);
        }
        const auto [h, w] = shapes.front();
        const Matrix img = ch.reshaped(h, w);
        write_pgm((dir / ("separated_" + std::to_string(i) + ".pgm")).string(), img);
      }
    } else {
      write_matrix_csv((dir / "separated.csv").string(), r.Z);
    }
  }

  if (c.format == "csv") {
    std::cout << "quantity,jacobi,newton\n"
              << "f," << format_double(r.f_jacobi) << ',' << format_double(r.f_newton) << '\n'
              << "grad_norm," << format_double(r.grad_jacobi) << ',' << format_double(r.grad_newton)
              << '\n';
  } else {
    std::cout << serialize(trace);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  Index n = 6, p = 3, N = 2;
};

int cmd_check(const CheckArgs& a, const Common& c) {
  const std::vector<CheckResult> results = run_checks(a.n, a.p, a.N, c.seed);
  bool ok = true;
  if (c.format == "csv") {
    std::cout << "check,error,tolerance,passed\n";
    for (const auto& r : results) {
      std::cout << '"' << r.name << "\"," << format_double(r.error) << ',' << format_double(r.tolerance)
                << ',' << (r.passed ? "true" : "false") << '\n';
      ok = ok && r.passed;
    }
  } else {
    json arr = json::array();
    for (const auto& r : results) {
      arr.push_back({{"check", r.name}, {"error", r.error}, {"tolerance", r.tolerance}, {"passed", r.passed}});
      ok = ok && r.passed;
    }
    std::cout << json{{"n", a.n}, {"p", a.p}, {"N", a.N}, {"seed", c.seed}, {"checks", arr}, {"passed", ok}}
                     .dump(2)
              << '\n';
  }
  for (const auto& r : results) {
    if (!r.passed) std::cerr << "jdnewton: FAILED " << r.name << " (error " << r.error << ")\n";
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian Newton joint diagonalization"};
  app.require_subcommand(1);

  Common common;
  JdArgs jd;
  auto* jd_cmd = app.add_subcommand("jd", "Jointly diagonalize symmetric matrices read from CSV files");
  jd_cmd->add_option("inputs", jd.inputs, "CSV matrix files")->required()->check(CLI::ExistingFile);
  jd_cmd->add_option("--p", jd.p, "Number of columns of Y (default n)")->check(CLI::PositiveNumber);
  jd_cmd->add_option("--y0", jd.y0, "Starting point (n x p CSV)")->check(CLI::ExistingFile);
  jd_cmd->add_flag("--jacobi", jd.jacobi, "Warm start with Jacobi sweeps");
  add_common(jd_cmd, common, false);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark family");
  bench_cmd->add_option("--family", bench.family, "Instance family")
      ->check(CLI::IsMember({"random-symmetric", "commuting", "perturbed-optimum", "jacobi-newton"}));
  bench_cmd->add_option("--n", bench.n, "Matrix size")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--p", bench.p, "Columns of Y")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--N", bench.N, "Number of matrices")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--scale", bench.scale, "Perturbation bound for perturbed-optimum");
  bench_cmd->add_option("--sweep-tol", bench.sweep_tol, "Jacobi stopping threshold on |sin theta|");
  bench_cmd->add_option("--max-sweeps", bench.max_sweeps, "Jacobi sweep cap")->check(CLI::PositiveNumber);
  add_common(bench_cmd, common, true);

  IcaArgs ica;
  auto* ica_cmd = app.add_subcommand("ica", "Blind source separation of mixtures");
  ica_cmd->add_option("--input", ica.inputs, "Observed mixtures: PGM images or one channels x T CSV")
      ->check(CLI::ExistingFile);
  ica_cmd->add_option("--sources", ica.sources, "Sources to mix (PGM images or CSV); used as ground truth")
      ->check(CLI::ExistingFile);
  ica_cmd->add_option("--synthetic", ica.synthetic, "Generate this many samples of synthetic sources")
      ->check(CLI::PositiveNumber);
  ica_cmd->add_option("--channels", ica.channels, "Synthetic source count")->check(CLI::Range(2, 64));
  ica_cmd->add_flag("--gaussian", ica.gaussian, "Synthetic sources are Gaussian");
  ica_cmd->add_option("--mixing", ica.mixing, "Mixing matrix: 'image', 'random', or a CSV file");
  ica_cmd->add_option("--sweep-tol", ica.sweep_tol, "Jacobi stopping threshold on |sin theta|");
  ica_cmd->add_option("--max-sweeps", ica.max_sweeps, "Jacobi sweep cap")->check(CLI::PositiveNumber);
  add_common(ica_cmd, common, false);

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Run derivative and structure self-checks");
  check_cmd->add_option("--n", check.n, "Matrix size (at most 12)")->check(CLI::Range(1, 12));
  check_cmd->add_option("--p", check.p, "Columns of Y")->check(CLI::PositiveNumber);
  check_cmd->add_option("--N", check.N, "Number of matrices")->check(CLI::PositiveNumber);
  add_common(check_cmd, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (jd_cmd->parsed()) return cmd_jd(jd, common);
    if (bench_cmd->parsed()) return cmd_bench(bench, common);
    if (ica_cmd->parsed()) return cmd_ica(ica, common);
    if (check_cmd->parsed()) return cmd_check(check, common);
  } catch (const Error& e) {
    std::cerr << "jdnewton: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "jdnewton: json: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
