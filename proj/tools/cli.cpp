#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "mifo/mifo.hpp"
#include "mifo/util.hpp"

namespace mifo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flag combination detected after parsing; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 42;
  std::string na_token{kDefaultNaToken};
  std::size_t threads = hardware_threads();
  int verbosity = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  app->add_option("--na-token", c.na_token, "Token marking a missing CSV field")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_flag("-v,--verbose", c.verbosity, "Progress messages on stderr");
}

void add_synthetic(CLI::App* app, SyntheticSpec& s) {
  app->add_option("--rows", s.n_rows, "Observations")->capture_default_str();
  app->add_option("--cols", s.n_cols, "Columns")->capture_default_str();
  app->add_option("--rank", s.latent_rank, "Latent rank")->capture_default_str();
  app->add_option("--noise", s.noise_sigma, "Noise standard deviation")->capture_default_str();
}

/// Method-specific flags, each tagged with the method that owns it.
struct MethodFlags {
  MethodParams params;
  std::vector<std::pair<CLI::Option*, Method>> owned;

  void add(CLI::App* app) {
    auto& mf = params.mifo;
    auto& b = params.baseline;
    auto tag = [&](CLI::Option* o, Method m) { owned.emplace_back(o->capture_default_str(), m); };
    tag(app->add_option("--ntree", mf.forest.ntree, "mifo: trees per forest")->check(CLI::PositiveNumber),
        Method::mifo);
    tag(app->add_option("--mtry", mtry_, "mifo: predictors tried per split (default floor(sqrt(p-1)))")
            ->check(CLI::PositiveNumber),
        Method::mifo);
    tag(app->add_option("--min-node-size", mf.forest.min_node_size, "mifo: leaf size bound")
            ->check(CLI::PositiveNumber),
        Method::mifo);
    tag(app->add_option("--max-iter", mf.max_iter, "mifo: sweep limit")->check(CLI::PositiveNumber),
        Method::mifo);
    tag(app->add_option("--knn-k", b.knn_k, "knn: neighbours")->check(CLI::PositiveNumber), Method::knn);
    tag(app->add_option("--svd-rank", b.svd_rank, "svd: rank")->check(CLI::PositiveNumber), Method::svd);
    tag(app->add_option("--svd-max-iter", b.svd_max_iter, "svd: iteration limit")->check(CLI::PositiveNumber),
        Method::svd);
    tag(app->add_option("--svd-tol", b.svd_tol, "svd: relative change tolerance")->check(CLI::PositiveNumber),
        Method::svd);
    tag(app->add_option("--svt-tau", svt_tau_, "svt: threshold (default 5*sqrt(n*p))")
            ->check(CLI::PositiveNumber),
        Method::svt);
    tag(app->add_option("--svt-step", svt_step_, "svt: step size (default 1.2*n*p/observed)")
            ->check(CLI::PositiveNumber),
        Method::svt);
    tag(app->add_option("--svt-max-iter", b.svt_max_iter, "svt: iteration limit")->check(CLI::PositiveNumber),
        Method::svt);
    tag(app->add_option("--svt-tol", b.svt_tol, "svt: residual tolerance")->check(CLI::PositiveNumber),
        Method::svt);
    tag(app->add_option("--lls-k", b.lls_k, "lls: neighbours")->check(CLI::PositiveNumber), Method::lls);
  }

  /// Moves optional flags into params; rejects flags owned by other methods.
  void finalize(const std::vector<Method>& active) {
    for (const auto& [opt, owner] : owned) {
      if (opt->count() == 0) continue;
      if (std::find(active.begin(), active.end(), owner) == active.end()) {
        throw UsageError(opt->get_name() + " applies to method " + std::string(method_name(owner)) +
                         " only");
      }
    }
    if (mtry_) params.mifo.forest.mtry = *mtry_;
    if (svt_tau_) params.baseline.svt_tau = *svt_tau_;
    if (svt_step_) params.baseline.svt_step = *svt_step_;
  }

 private:
  std::optional<std::size_t> mtry_;
  std::optional<double> svt_tau_;
  std::optional<double> svt_step_;
};

bool same_file(const fs::path& a, const fs::path& b) {
  std::error_code ec;
  if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
  return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

void guard_outputs(const std::vector<fs::path>& inputs, const std::vector<std::pair<std::string, fs::path>>& outputs) {
  for (const auto& [flag, out] : outputs) {
    for (const auto& in : inputs) {
      if (same_file(in, out)) {
        throw UsageError(flag + " " + out.string() + " would overwrite input " + in.string());
      }
    }
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open " + path.string() + " for writing");
  return f;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw DataError("write to " + path.string() + " failed");
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> methods;
  for (const auto& name : names) {
    const auto m = parse_method(name);
    if (!m) throw UsageError("unknown method \"" + name + "\" (expected mifo, mean, knn, svd, svt or lls)");
    methods.push_back(*m);
  }
  return methods;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Missing-value imputation with iterative random forests and baselines", "mifoimpute"};
  app.require_subcommand(1);

  Common common;

  // generate
  SyntheticSpec gen_spec;
  fs::path gen_out;
  auto* gen = app.add_subcommand("generate", "Write a synthetic low-rank-plus-noise CSV");
  add_common(gen, common);
  add_synthetic(gen, gen_spec);
  gen->add_option("--out", gen_out, "Output CSV")->required();

  // inject
  fs::path inj_in, inj_out, inj_pos;
  double inj_rate = 0.1;
  auto* inj = app.add_subcommand("inject", "Mask a uniform random fraction of a complete CSV");
  add_common(inj, common);
  inj->add_option("--in", inj_in, "Complete input CSV")->required();
  inj->add_option("--out", inj_out, "Observed CSV with NA entries")->required();
  inj->add_option("--positions", inj_pos, "Masked positions CSV (row,col; 0-based)")->required();
  inj->add_option("--rate", inj_rate, "Fraction of entries to mask, in (0, 1)")->capture_default_str();

  // impute
  fs::path imp_in, imp_out, imp_diag;
  std::string imp_method;
  MethodFlags imp_flags;
  auto* imp = app.add_subcommand("impute", "Fill the missing entries of a CSV");
  add_common(imp, common);
  imp->add_option("--method", imp_method, "mifo, mean, knn, svd, svt or lls")->required();
  imp->add_option("--in", imp_in, "Input CSV with missing entries")->required();
  imp->add_option("--out", imp_out, "Imputed CSV")->required();
  auto* diag_opt = imp->add_option("--diagnostics", imp_diag,
                                   "JSON-lines diagnostics (mifo default: <out>.jsonl)");
  imp_flags.add(imp);

  // evaluate
  fs::path ev_truth, ev_imputed, ev_pos, ev_per_col;
  auto* ev = app.add_subcommand("evaluate", "Score an imputed CSV against the complete truth");
  add_common(ev, common);
  ev->add_option("--truth", ev_truth, "Complete CSV")->required();
  ev->add_option("--imputed", ev_imputed, "Imputed CSV")->required();
  ev->add_option("--positions", ev_pos, "Positions CSV written by inject")->required();
  ev->add_option("--per-column", ev_per_col, "Per-column NMAE CSV output");

  // benchmark
  fs::path bench_in, bench_dir;
  SyntheticSpec bench_spec;
  std::vector<std::string> bench_methods;
  for (auto m : kAllMethods) bench_methods.emplace_back(method_name(m));
  BenchmarkConfig bench_cfg;
  bool timing_strict = false;
  MethodFlags bench_flags;
  auto* bench = app.add_subcommand("benchmark", "Methods x missing rates x seeds grid");
  add_common(bench, common);
  bench->add_option("--in", bench_in, "Complete CSV (default: synthetic data from --rows/--cols/...)");
  add_synthetic(bench, bench_spec);
  bench->add_option("--methods", bench_methods, "Comma-separated methods")->delimiter(',')->capture_default_str();
  bench->add_option("--rates", bench_cfg.rates, "Comma-separated missing fractions")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--seeds", bench_cfg.seeds, "Comma-separated injection seeds")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--out-dir", bench_dir, "Directory for grid.csv and grid.md")->required();
  bench->add_flag("--timing-strict", timing_strict, "Run one imputation at a time");
  bench_flags.add(bench);

  // sweep
  fs::path sweep_in, sweep_dir;
  SyntheticSpec sweep_spec;
  SweepConfig sweep_cfg;
  auto* sw = app.add_subcommand("sweep", "ntree x mtry grid of mifo runs");
  add_common(sw, common);
  sw->add_option("--in", sweep_in, "Complete CSV (default: synthetic data from --rows/--cols/...)");
  add_synthetic(sw, sweep_spec);
  sw->add_option("--ntrees", sweep_cfg.ntree_values, "Comma-separated ntree values")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--mtrys", sweep_cfg.mtry_values, "Comma-separated mtry values")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--rate", sweep_cfg.rate, "Missing fraction")->capture_default_str();
  sw->add_option("--max-iter", sweep_cfg.mifo.max_iter, "Sweep limit per run")->capture_default_str();
  sw->add_option("--min-node-size", sweep_cfg.mifo.forest.min_node_size, "Leaf size bound")->capture_default_str();
  sw->add_option("--out-dir", sweep_dir, "Directory for sweep.csv and sweep.md")->required();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("mifoimpute");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  auto log = [&](const std::string& msg) {
    if (common.verbosity > 0) err << msg << '\n';
  };

  try {
    if (gen->parsed()) {
      gen_spec.seed = common.seed;
      const auto m = generate_synthetic(gen_spec);
      write_csv(m, gen_out, common.na_token);
      log("wrote " + gen_out.string());
      return kOk;
    }

    if (inj->parsed()) {
      guard_outputs({inj_in}, {{"--out", inj_out}, {"--positions", inj_pos}});
      if (same_file(inj_out, inj_pos)) throw UsageError("--out and --positions name the same file");
      const auto truth = load_csv(inj_in, common.na_token);
      const auto pair = inject_missing(truth, inj_rate, common.seed);
      write_csv(pair.observed, inj_out, common.na_token);
      write_positions(pair.injected, inj_pos);
      log("masked " + std::to_string(pair.injected.size()) + " entries");
      return kOk;
    }

    if (imp->parsed()) {
      const auto method = parse_method(imp_method);
      if (!method) throw UsageError("unknown --method \"" + imp_method + "\"");
      imp_flags.finalize({*method});
      if (diag_opt->count() == 0 && *method == Method::mifo) imp_diag = fs::path(imp_out.string() + ".jsonl");
      std::vector<std::pair<std::string, fs::path>> outputs{{"--out", imp_out}};
      if (!imp_diag.empty()) outputs.emplace_back("--diagnostics", imp_diag);
      guard_outputs({imp_in}, outputs);

      const auto data = load_csv(imp_in, common.na_token);
      auto params = imp_flags.params;
      params.mifo.forest.seed = common.seed;
      params.mifo.forest.threads = common.threads;

      json summary{{"type", "summary"}, {"method", imp_method}};
      std::vector<json> lines;
      std::optional<DataMatrix> imputed;
      if (*method == Method::mifo) {
        const auto result = mifo_impute(data, params.mifo);
        for (std::size_t i = 0; i < result.delta_trace.size(); ++i) {
          lines.push_back({{"type", "sweep"}, {"iteration", i + 1}, {"delta", result.delta_trace[i]}});
        }
        json per_col = json::array();
        for (const auto& v : result.per_column_oob_mse) per_col.push_back(optional_json(v));
        summary["iterations_run"] = result.iterations_run;
        summary["converged"] = result.converged;
        summary["delta_trace"] = result.delta_trace;
        summary["oob_nrmse_estimate"] = optional_json(result.oob_nrmse_estimate);
        summary["oob_nmae_estimate"] = optional_json(result.oob_nmae_estimate);
        summary["per_column_oob_mse"] = per_col;
        imputed = result.imputed;
      } else {
        auto outcome = run_method(*method, data, params);
        summary["iterations_run"] = outcome.iterations;
        summary["converged"] = outcome.converged;
        summary["notes"] = outcome.notes;
        imputed = std::move(outcome.imputed);
      }
      write_csv(*imputed, imp_out, common.na_token);
      if (!imp_diag.empty()) {
        auto f = open_out(imp_diag);
        for (const auto& l : lines) f << l.dump() << '\n';
        f << summary.dump() << '\n';
      }
      log("imputed " + std::to_string(data.total_missing()) + " entries with " + imp_method);
      return kOk;
    }

    if (ev->parsed()) {
      if (!ev_per_col.empty()) guard_outputs({ev_truth, ev_imputed, ev_pos}, {{"--per-column", ev_per_col}});
      const auto truth = load_csv(ev_truth, common.na_token);
      const auto imputed = load_csv(ev_imputed, common.na_token);
      const auto positions = load_positions(ev_pos);
      const auto report = evaluate(truth, imputed, positions);
      out << "nrmse=" << format_double(report.nrmse) << " nmae=" << format_double(report.nmae_overall) << '\n';
      if (!ev_per_col.empty()) {
        std::ostringstream csv;
        csv << "column,nmae\n";
        for (std::size_t c = 0; c < truth.cols(); ++c) {
          const auto& v = report.nmae_per_col[c];
          csv << truth.col_names()[c] << ',' << (v ? format_double(*v) : "NA") << '\n';
        }
        write_text(ev_per_col, csv.str());
      }
      return kOk;
    }

    if (bench->parsed()) {
      bench_cfg.methods = parse_methods(bench_methods);
      bench_flags.finalize(bench_cfg.methods);
      bench_cfg.threads = common.threads;
      bench_cfg.timing_strict = timing_strict;
      if (!bench_in.empty()) {
        guard_outputs({bench_in}, {{"--out-dir", bench_dir / "grid.csv"}, {"--out-dir", bench_dir / "grid.md"}});
      }
      bench_spec.seed = common.seed;
      const auto truth = bench_in.empty() ? generate_synthetic(bench_spec) : load_csv(bench_in, common.na_token);
      auto params = bench_flags.params;
      params.mifo.forest.seed = common.seed;
      const auto grid = run_benchmark(truth, bench_cfg, params);
      fs::create_directories(bench_dir);
      write_text(bench_dir / "grid.csv", render_report(grid, ReportFormat::csv));
      const auto md = render_report(grid, ReportFormat::markdown);
      write_text(bench_dir / "grid.md", md);
      out << md;
      return kOk;
    }

    if (sw->parsed()) {
      if (!sweep_in.empty()) {
        guard_outputs({sweep_in}, {{"--out-dir", sweep_dir / "sweep.csv"}, {"--out-dir", sweep_dir / "sweep.md"}});
      }
      sweep_spec.seed = common.seed;
      const auto truth = sweep_in.empty() ? generate_synthetic(sweep_spec) : load_csv(sweep_in, common.na_token);
      sweep_cfg.seed = common.seed;
      sweep_cfg.mifo.forest.seed = common.seed;
      sweep_cfg.mifo.forest.threads = common.threads;
      const auto grid = run_sweep(truth, sweep_cfg);
      fs::create_directories(sweep_dir);
      write_text(sweep_dir / "sweep.csv", render_report(grid, ReportFormat::csv));
      const auto md = render_report(grid, ReportFormat::markdown);
      write_text(sweep_dir / "sweep.md", md);
      out << md;
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace mifo::cli
