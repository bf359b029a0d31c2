#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <ostream>

#include "wigig/config.hpp"
#include "wigig/csv.hpp"
#include "wigig/eval_harness.hpp"
#include "wigig/picocell_sim.hpp"
#include "wigig/trace_io.hpp"

namespace wigig::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::vector<std::string> overrides;
  std::optional<int> trials;
  unsigned jobs = 1;
  std::string trace_path;
  int disruption_trials = 500;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON configuration file");
  sub->add_option("--seed", o.seed, "RNG seed (default 60)");
  sub->add_option("--out", o.out, "Output directory (default ./out)");
  sub->add_option("--set", o.overrides, "Config override key=value, dotted keys, repeatable")
      ->allow_extra_args(false);
}

AppConfig load(const Options& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config.empty()) doc = read_config_file(o.config);
  for (const auto& kv : o.overrides) apply_override(doc, kv);
  if (o.seed) doc["seed"] = *o.seed;
  return config_from_json(doc);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
}

int gen_trace(const Options& o, std::ostream& out) {
  const AppConfig cfg = load(o);
  Rng rng = make_rng(cfg.seed, 10, 0);
  const auto segments = build_segments(cfg.trace, cfg.link, cfg.distributions, rng);
  RenderOptions opts;
  opts.duration_ms = cfg.trace.duration_ms;
  opts.spike_rate_per_s = cfg.distributions.spike_rate_per_s;
  opts.spike_units = cfg.distributions.spike_units;
  const Trace trace = render_trace(segments, cfg.link, rng, opts);
  ensure_dir(o.out);
  const fs::path path = fs::path(o.out) / "trace.csv";
  write_file_atomic(path, trace_to_csv(trace));
  out << "wrote " << path.string() << " (" << trace.size() << " samples)\n";
  return kOk;
}

int simulate(const Options& o, std::ostream& out) {
  const AppConfig cfg = load(o);
  const SimLog log = run(cfg.scenario);
  write_sim_log(log, o.out);
  std::size_t handoffs = 0;
  for (const auto& s : log.stas) handoffs += s.handoffs.size();
  out << "simulated " << log.duration_ms << " ms, " << log.stas.size() << " STA(s), " << handoffs
      << " handoff(s); logs in " << o.out << "\n";
  return kOk;
}

int sweep(const Options& o, std::ostream& out) {
  AppConfig cfg = load(o);
  SweepConfig sc = cfg.sweep;
  if (o.trials) sc.trials_per_cell = *o.trials;
  sc.jobs = o.jobs;
  sc.validate();
  const AccuracyTable table = accuracy_sweep(sc);
  ensure_dir(o.out);
  write_file_atomic(fs::path(o.out) / "accuracy.csv", accuracy_to_csv(table));
  write_file_atomic(fs::path(o.out) / "accuracy.json", accuracy_to_json(table, sc));
  out << accuracy_to_csv(table);
  return kOk;
}

int replay_cmd(const Options& o, std::ostream& out) {
  const AppConfig cfg = load(o);
  const Trace trace = load_trace_csv(o.trace_path);
  const ReplaySummary summary = replay(trace, cfg.detector);
  ensure_dir(o.out);
  write_file_atomic(fs::path(o.out) / "events.csv", events_to_csv(summary.events));
  write_file_atomic(fs::path(o.out) / "replay.json", replay_to_json(summary));
  out << summary.events.size() << " event(s): " << summary.short_term << " short-term, "
      << summary.long_term << " long-term\n";
  return kOk;
}

int timing(const Options& o, std::ostream& out) {
  const AppConfig cfg = load(o);
  const int n = o.trials.value_or(10000);
  if (n < 1) throw ConfigError("--trials must be >= 1");
  if (o.disruption_trials < 1) throw ConfigError("--disruption-trials must be >= 1");
  const auto rows = timing_summary(n, cfg.seed, cfg.distributions);
  std::vector<DisruptionStats> dis;
  for (double d : {3.0, 7.0}) {
    dis.push_back(disruption_stats(o.disruption_trials, d, cfg.seed, cfg.distributions, o.jobs));
  }
  ensure_dir(o.out);
  write_file_atomic(fs::path(o.out) / "timing.csv", timing_to_csv(rows));
  write_file_atomic(fs::path(o.out) / "disruption.csv", disruption_to_csv(dis));
  out << timing_to_csv(rows);
  for (const auto& s : dis) {
    out << "disruption " << format_number(s.distance_m) << " m: mean " << format_number(s.mean_s, 3)
        << " s over " << s.durations_s.size() << " episode(s)\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"60 GHz picocell simulator with blockage-aware handoff"};
  app.name("wigig-sim");
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-trace", "Render a signal-quality trace to <out>/trace.csv");
  add_common(gen, o);

  auto* sim = app.add_subcommand("simulate", "Run a scenario and write its logs to <out>/");
  add_common(sim, o);

  auto* sw = app.add_subcommand("sweep", "Detection accuracy over the threshold grid");
  add_common(sw, o);
  sw->add_option("--trials", o.trials, "Trials per scenario and cell (default from config, 500)");
  sw->add_option("--jobs", o.jobs, "Worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber);

  auto* rp = app.add_subcommand("replay", "Run the detector over a trace CSV");
  rp->add_option("trace", o.trace_path, "Trace CSV (t_ms,q[,throughput_mbps])")->required();
  add_common(rp, o);

  auto* ts = app.add_subcommand("timing-summary",
                                "Monte-Carlo timing table and disruption CDFs");
  add_common(ts, o);
  ts->add_option("--trials", o.trials, "Episodes per scenario and distance (default 10000)");
  ts->add_option("--disruption-trials", o.disruption_trials,
                 "Transient episodes per distance for the disruption CDF (default 500)");
  ts->add_option("--jobs", o.jobs, "Worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber);

  if (args.empty()) {
    err << app.help();
    return kUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return kUsage;
  }

  try {
    if (gen->parsed()) return gen_trace(o, out);
    if (sim->parsed()) return simulate(o, out);
    if (sw->parsed()) return sweep(o, out);
    if (rp->parsed()) return replay_cmd(o, out);
    if (ts->parsed()) return timing(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  err << app.help();
  return kUsage;
}

}  // namespace wigig::cli
