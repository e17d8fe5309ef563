#include "birgn/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "birgn/cli/svg.hpp"
#include "birgn/errors.hpp"
#include "birgn/field_csv.hpp"
#include "birgn/history_csv.hpp"
#include "birgn/noise.hpp"
#include "birgn/presets.hpp"
#include "birgn/verify.hpp"

namespace birgn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(StopReason reason) {
  switch (reason) {
    case StopReason::RuleSatisfied: return kRuleSatisfied;
    case StopReason::MaxOuter: return kMaxOuter;
    case StopReason::InnerFailure: return kInnerFailure;
  }
  return kInnerFailure;
}

RunResult execute(const RunConfig& config, const Experiment& experiment) {
  const PenaltyFunctional penalty = build_penalty(config, experiment);
  RunOptions options;
  options.residual_exponent = config.residual_exponent;
  options.inner = config.inner;
  return run(*experiment.op, penalty, experiment.data, config.delta, RegSchedule(config.alpha0, config.ratio),
             StoppingConfig{config.rule, config.tau, config.max_outer}, experiment.truth, options);
}

namespace {

json optional_index(const std::optional<int>& n) { return n ? json(*n) : json(nullptr); }

RunConfig with_absolute_paths(RunConfig c) {
  if (c.custom) {
    for (std::string* p : {&c.custom->source, &c.custom->boundary, &c.custom->truth, &c.custom->data}) {
      if (!p->empty()) *p = fs::absolute(*p).lexically_normal().string();
    }
  }
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
}

}  // namespace

json make_meta(const RunConfig& config, const Experiment& experiment, const RunResult& result) {
  json summary = {
      {"problem", experiment.name},
      {"stop_reason", std::string(to_string(result.stop_reason))},
      {"stop_index", optional_index(result.stop_index)},
      {"stopping_indices",
       {{"n1", optional_index(result.indices.n1)},
        {"n2", optional_index(result.indices.n2)},
        {"n3", optional_index(result.indices.n3)}}},
      {"outer_iterations", result.records.empty() ? 0 : result.records.back().n},
      {"final_residual", result.records.empty() ? json(nullptr) : json(result.records.back().residual_norm)},
      {"total_inner_iterations", result.total_inner_iterations()},
      {"inner_warnings", result.inner_warnings},
      {"delta", config.delta},
      {"seed", config.seed},
  };
  if (!result.records.empty() && result.records.back().error_to_truth) {
    summary["final_error"] = *result.records.back().error_to_truth;
  }
  if (!result.failure_message.empty()) summary["failure"] = result.failure_message;
  return {{"config", config_to_json(with_absolute_paths(config))}, {"result", summary}};
}

void write_run_artifacts(const std::string& dir, const RunConfig& config, const Experiment& experiment,
                         const RunResult& result) {
  const fs::path root(dir);
  fs::create_directories(root);
  write_history_csv((root / "history.csv").string(), result.records);
  write_field_csv((root / "reconstruction.csv").string(), result.final_iterate);
  write_text(root / "meta.json", make_meta(config, experiment, result).dump(2) + "\n");
  std::ostringstream svg;
  std::ostringstream title;
  title << experiment.name << ", " << to_string(config.penalty) << ", rule " << config.rule << ", stop "
        << (result.stop_index ? std::to_string(*result.stop_index) : std::string(to_string(result.stop_reason)));
  write_plot_svg(svg, result.final_iterate, experiment.truth, title.str());
  write_text(root / "plot.svg", svg.str());
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto violations = validate(config);
  if (!violations.empty()) {
    for (const auto& v : violations) err << "config error: " << v << '\n';
    return kConfigError;
  }
  Experiment experiment;
  std::optional<PenaltyFunctional> penalty;
  try {
    experiment = build_experiment(config);
    penalty.emplace(build_penalty(config, experiment));
    experiment.op->check_parameter(penalty->anchor());
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const ScalingReport scaling =
      scaling_check(*experiment.op, *penalty, RegSchedule(config.alpha0, config.ratio), config.residual_exponent);
  if (!scaling.satisfied) {
    err << "note: ||F'(x0)||^p = " << format_double(std::pow(scaling.norm_estimate, scaling.exponent))
        << " exceeds alpha0 = " << format_double(config.alpha0) << "; suggested alpha0 "
        << format_double(scaling.suggested_alpha0.value_or(config.alpha0)) << '\n';
  }

  const RunResult result = execute(config, experiment);
  write_run_artifacts(config.output, config, experiment, result);

  const auto& last = result.records.back();
  out << experiment.name << ": " << to_string(result.stop_reason);
  if (result.stop_index) out << " at n = " << *result.stop_index;
  out << ", residual " << format_double(last.residual_norm) << " (tau*delta = "
      << format_double(config.tau * config.delta) << ")";
  if (last.error_to_truth) out << ", error " << format_double(*last.error_to_truth);
  out << ", inner iterations " << result.total_inner_iterations() << '\n';
  if (!result.inner_warnings.empty()) {
    err << "warning: inner solver hit max_iter at outer step(s)";
    for (int n : result.inner_warnings) err << ' ' << n;
    err << '\n';
  }
  if (!result.failure_message.empty()) err << "inner failure: " << result.failure_message << '\n';
  out << "artifacts written to " << config.output << '\n';
  return exit_code_for(result.stop_reason);
}

int cmd_sweep(const RunConfig& config, const SweepOptions& options, std::ostream& out, std::ostream& err) {
  auto violations = validate(config);
  if (options.deltas.empty()) violations.push_back("sweep: --deltas is required");
  for (std::size_t k = 0; k < options.deltas.size(); ++k) {
    if (!(options.deltas[k] > 0.0)) violations.push_back("sweep: deltas must be positive");
    if (k > 0 && !(options.deltas[k] < options.deltas[k - 1])) {
      violations.push_back("sweep: deltas must be strictly decreasing");
    }
  }
  if (options.seeds < 1) violations.push_back("sweep: --seeds must be >= 1");
  if (options.jobs < 1) violations.push_back("sweep: --jobs must be >= 1");
  if (config.custom && !config.custom->data.empty()) {
    violations.push_back("sweep: needs synthetic data; remove problem.custom.data");
  }
  if (!violations.empty()) {
    for (const auto& v : violations) err << "config error: " << v << '\n';
    return kConfigError;
  }

  Experiment base;
  try {
    RunConfig exact = config;
    exact.delta = 0.0;
    base = build_experiment(exact);
    base.op->check_parameter(build_penalty(config, base).anchor());
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  struct Job {
    RunConfig config;
    std::string status;
    std::optional<RunResult> result;
  };
  std::vector<Job> jobs;
  for (double delta : options.deltas) {
    for (int s = 0; s < options.seeds; ++s) {
      Job job;
      job.config = config;
      job.config.delta = delta;
      job.config.seed = config.seed + static_cast<std::uint64_t>(s);
      job.config.output = (fs::path(config.output) / ("run_" + std::to_string(jobs.size()))).string();
      jobs.push_back(std::move(job));
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      Job& job = jobs[k];
      try {
        Experiment ex = base;
        ex.data = add_noise(base.data, job.config.delta, job.config.seed);
        RunResult res = execute(job.config, ex);
        write_run_artifacts(job.config.output, job.config, ex, res);
        job.status = std::string(to_string(res.stop_reason));
        job.result = std::move(res);
      } catch (const std::exception& e) {
        job.status = "error";
        std::lock_guard lock(log_mutex);
        err << "run " << k << " failed: " << e.what() << '\n';
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min<int>(options.jobs, static_cast<int>(jobs.size()));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  fs::create_directories(config.output);
  std::ofstream csv(fs::path(config.output) / "sweep.csv", std::ios::binary);
  if (!csv) {
    err << "cannot write sweep.csv\n";
    return kConfigError;
  }
  csv << "delta,seed,n1,n2,n3,error,stop_reason\n";
  int code = kRuleSatisfied;
  auto cell = [](const std::optional<int>& n) { return n ? std::to_string(*n) : std::string(); };
  for (const auto& job : jobs) {
    csv << format_double(job.config.delta) << ',' << job.config.seed << ',';
    if (job.result) {
      const auto& r = *job.result;
      csv << cell(r.indices.n1) << ',' << cell(r.indices.n2) << ',' << cell(r.indices.n3) << ',';
      if (r.records.back().error_to_truth) csv << format_double(*r.records.back().error_to_truth);
      code = std::max(code, exit_code_for(r.stop_reason));
    } else {
      csv << ",,,";
      code = std::max<int>(code, kInnerFailure);
    }
    csv << ',' << job.status << '\n';
  }
  out << "sweep: " << jobs.size() << " runs, results in " << (fs::path(config.output) / "sweep.csv").string()
      << '\n';
  return code;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  if (options.suite == "derivatives") {
    bool ok = true;
    for (const auto& name : preset_names()) {
      SuiteReport r = derivative_suite(name, DerivativeBase::Truth);
      r.print(out);
      ok = ok && r.passed();
      if (make_preset(name, 10).op->lower_bound() <= 0.0) {
        SuiteReport z = derivative_suite(name, DerivativeBase::Zero);
        z.print(out);
        ok = ok && z.passed();
      }
    }
    out << (ok ? "derivatives: all checks passed\n" : "derivatives: FAILED\n");
    return ok ? 0 : 1;
  }
  if (options.suite == "penalties") {
    const SuiteReport r = penalty_suite();
    r.print(out);
    out << (r.passed() ? "penalties: all checks passed\n" : "penalties: FAILED\n");
    return r.passed() ? 0 : 1;
  }
  if (options.suite == "rates") {
    RateTestSpec spec;
    spec.nu = options.nu;
    spec.rule = options.rule;
    spec.seeds = options.seeds;
    if (!options.deltas.empty()) spec.deltas = options.deltas;
    try {
      spec.validate();
    } catch (const std::exception& e) {
      err << "config error: " << e.what() << '\n';
      return 1;
    }
    const RateReport report = rate_test(spec);
    const auto [lo, hi] = rate_band(spec.nu);
    for (std::size_t k = 0; k < report.deltas.size(); ++k) {
      out << "delta " << format_double(report.deltas[k]) << "  median error "
          << format_double(report.median_errors[k]) << '\n';
    }
    const bool in_band = report.slope >= lo && report.slope <= hi;
    const bool decays = report.median_errors.front() >= report.median_errors.back();
    out << (in_band ? "PASS" : "FAIL") << " rates: slope " << format_double(report.slope) << " in [" << lo << ", "
        << hi << "], predicted " << format_double(report.predicted) << '\n';
    out << (decays ? "PASS" : "FAIL") << " rates: largest-delta median error >= smallest-delta median error\n";
    out << (report.complete ? "PASS" : "FAIL") << " rates: all runs stopped by the rule\n";
    if (!options.output.empty()) {
      fs::create_directories(options.output);
      std::ofstream csv(fs::path(options.output) / "rates.csv", std::ios::binary);
      write_rates_csv(csv, report);
    }
    return in_band && decays && report.complete ? 0 : 1;
  }
  err << "unknown verify suite '" << options.suite << "' (expected derivatives, penalties or rates)\n";
  return 1;
}

namespace {

struct RunFlags {
  std::string config_path;
  std::string preset;
  int subdivisions = 0;
  std::string penalty;
  double lambda = 0, eps = 0, p = 0, anchor = 0, delta = 0, tau = 0, alpha0 = 0, ratio = 0, residual_exponent = 0;
  int rule = 0, max_outer = 0;
  std::uint64_t seed = 0;
  std::string output;
  std::vector<std::string> inner;
  std::vector<CLI::Option*> opts;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config (or a meta.json to replay)");
    opts = {
        app->add_option("--preset", preset, "reaction1d-paper | reaction2d-paper | diffusion1d-paper"),
        app->add_option("--subdivisions", subdivisions, "grid subdivisions per axis (0 = preset default)"),
        app->add_option("--penalty", penalty, "l2 | elasticnet | tv | sobolev"),
        app->add_option("--lambda", lambda, "weight of the quadratic part (elasticnet, tv)"),
        app->add_option("--eps", eps, "smoothing parameter epsilon"),
        app->add_option("--p", p, "Sobolev penalty exponent"),
        app->add_option("--anchor", anchor, "constant anchor/initial guess x0"),
        app->add_option("--delta", delta, "noise level"),
        app->add_option("--tau", tau, "discrepancy factor tau > 1"),
        app->add_option("--rule", rule, "stopping rule 1, 2 or 3"),
        app->add_option("--max-outer", max_outer, "outer iteration cap"),
        app->add_option("--alpha0", alpha0, "alpha_0"),
        app->add_option("--ratio", ratio, "alpha_{n+1} / alpha_n"),
        app->add_option("--seed", seed, "noise seed"),
        app->add_option("--residual-exponent", residual_exponent, "power of the data misfit norm"),
        app->add_option("--out", output, "output directory"),
        app->add_option("--inner", inner, "inner-solver control KEY=VALUE (repeatable)"),
    };
  }

  bool given(std::size_t k) const { return opts[k]->count() > 0; }

  json patch(std::vector<std::string>& violations) const {
    json doc = json::object();
    if (given(0)) doc["problem"]["preset"] = preset;
    if (given(1)) doc["problem"]["subdivisions"] = subdivisions;
    if (given(2)) doc["penalty"]["kind"] = penalty;
    if (given(3)) doc["penalty"]["lambda"] = lambda;
    if (given(4)) doc["penalty"]["epsilon"] = eps;
    if (given(5)) doc["penalty"]["p_exponent"] = p;
    if (given(6)) doc["penalty"]["anchor"] = anchor;
    if (given(7)) doc["noise"]["delta"] = delta;
    if (given(8)) doc["stopping"]["tau"] = tau;
    if (given(9)) doc["stopping"]["rule"] = rule;
    if (given(10)) doc["stopping"]["max_outer"] = max_outer;
    if (given(11)) doc["schedule"]["alpha0"] = alpha0;
    if (given(12)) doc["schedule"]["ratio"] = ratio;
    if (given(13)) doc["noise"]["seed"] = seed;
    if (given(14)) doc["residual_exponent"] = residual_exponent;
    if (given(15)) doc["output"] = output;
    for (const auto& kv : inner) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        violations.push_back("--inner " + kv + ": expected KEY=VALUE");
        continue;
      }
      const std::string value = kv.substr(eq + 1);
      json parsed = json::parse(value, nullptr, false);
      doc["inner"][kv.substr(0, eq)] = parsed.is_discarded() ? json(value) : parsed;
    }
    return doc;
  }

  // Returns false (after printing) on any violation.
  bool resolve(RunConfig& config, std::ostream& err) const {
    std::vector<std::string> violations;
    json file_doc = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        err << "config error: cannot open '" << config_path << "'\n";
        return false;
      }
      try {
        file_doc = unwrap_config(json::parse(in));
      } catch (const std::exception& e) {
        err << "config error: " << config_path << ": " << e.what() << '\n';
        return false;
      }
    }
    const json flags = patch(violations);
    config = config_from_json(resolve_config(file_doc, flags), violations);
    const auto more = validate(config);
    violations.insert(violations.end(), more.begin(), more.end());
    for (const auto& v : violations) err << "config error: " << v << '\n';
    return violations.empty();
  }
};

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iteratively regularized Gauss-Newton for PDE parameter identification"};
  app.name("birgn");
  app.require_subcommand(1);

  RunFlags run_flags, sweep_flags;
  auto* run_cmd = app.add_subcommand("run", "one IRGN reconstruction");
  run_flags.attach(run_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "one run per (delta, seed), aggregated into sweep.csv");
  sweep_flags.attach(sweep_cmd);
  SweepOptions sweep_opts;
  sweep_cmd->add_option("--deltas", sweep_opts.deltas, "decreasing noise levels")->delimiter(',');
  sweep_cmd->add_option("--seeds", sweep_opts.seeds, "seeds per delta, counting up from --seed");
  sweep_cmd->add_option("--jobs", sweep_opts.jobs, "worker threads");

  auto* verify_cmd = app.add_subcommand("verify", "derivative, penalty and rate checks");
  VerifyOptions verify_opts;
  verify_cmd->add_option("suite", verify_opts.suite, "derivatives | penalties | rates")->required();
  verify_cmd->add_option("--nu", verify_opts.nu, "source-condition exponent (rates)");
  verify_cmd->add_option("--rule", verify_opts.rule, "stopping rule 2 or 3 (rates)");
  verify_cmd->add_option("--seeds", verify_opts.seeds, "seeds per delta (rates)");
  verify_cmd->add_option("--deltas", verify_opts.deltas, "decreasing noise levels (rates)")->delimiter(',');
  verify_cmd->add_option("--out", verify_opts.output, "directory for rates.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      RunConfig config;
      if (!run_flags.resolve(config, err)) return kConfigError;
      return cmd_run(config, out, err);
    }
    if (sweep_cmd->parsed()) {
      RunConfig config;
      if (!sweep_flags.resolve(config, err)) return kConfigError;
      return cmd_sweep(config, sweep_opts, out, err);
    }
    return cmd_verify(verify_opts, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInnerFailure;
  }
}

}  // namespace birgn::cli
