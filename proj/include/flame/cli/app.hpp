#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flame/flame.hpp"

namespace flame::cli {

/// Process exit codes.
enum Exit : int {
  kOk = 0,
  kInvalidArgs = 2,
  kIoFailure = 3,
  kModelError = 4,
  kCheckFailed = 5,
};

namespace detail {

namespace fs = std::filesystem;

/// Overrides for ModelParams; only flags actually given are applied.
struct ParamFlags {
  double viewing = 0, eating = 0, run = 0, width = 0, height = 0;
  std::int64_t citizens = 0, sugars = 0, scenes = 0;
  std::vector<std::pair<CLI::Option*, std::function<void(sugarscape::ModelParams&)>>> given;

  void attach(CLI::App& app) {
    auto real = [&](const char* flag, double& slot, double sugarscape::ModelParams::*field, const char* help) {
      auto* o = app.add_option(flag, slot, help);
      given.emplace_back(o, [&slot, field](sugarscape::ModelParams& p) { p.*field = slot; });
    };
    auto count = [&](const char* flag, std::int64_t& slot, std::int64_t sugarscape::ModelParams::*field,
                     const char* help) {
      auto* o = app.add_option(flag, slot, help);
      given.emplace_back(o, [&slot, field](sugarscape::ModelParams& p) { p.*field = slot; });
    };
    real("--viewing", viewing, &sugarscape::ModelParams::viewing_distance, "Viewing distance");
    real("--eating", eating, &sugarscape::ModelParams::eating_distance, "Eating distance");
    real("--run-distance", run, &sugarscape::ModelParams::run_distance, "Moving (run) distance");
    real("--width", width, &sugarscape::ModelParams::landscape_width, "Landscape width");
    real("--height", height, &sugarscape::ModelParams::landscape_height, "Landscape height");
    count("--citizens", citizens, &sugarscape::ModelParams::citizens_per_scene, "Citizens per scene");
    count("--sugars", sugars, &sugarscape::ModelParams::sugars_per_scene, "Sugars per scene");
    count("--scenes", scenes, &sugarscape::ModelParams::n_scenes, "Number of scenes");
  }

  void apply(sugarscape::ModelParams& p) const {
    for (const auto& [opt, set] : given)
      if (opt->count() > 0) set(p);
  }
};

inline int exit_for(const Error& e, int parse_failure) {
  switch (e.code()) {
    case ErrorCode::IoFailure: return kIoFailure;
    case ErrorCode::InvalidArgument:
    case ErrorCode::ZeroPartitions:
    case ErrorCode::UnsupportedCount: return kInvalidArgs;
    default: return parse_failure;
  }
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::IoFailure, "cannot create directory " + dir.string());
}

inline void write_text(const fs::path& path, const std::string& text) { io::write_file_atomic(path, text); }

}  // namespace detail

/// Runs the `flame` command line. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  using namespace flame::sugarscape;

  CLI::App app{"FLAME-style agent simulation engine with the Sugarscape model", "flame"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write an initial state (0.xml) for a scenario");
  std::string gen_scenario_name, gen_out;
  std::uint64_t gen_seed = 0;
  detail::ParamFlags gen_params;
  gen->add_option("--scenario", gen_scenario_name, "random | separate | overlapping")->required();
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen_params.attach(*gen);

  // run
  auto* run = app.add_subcommand("run", "Run a simulation");
  std::string run_model_path, run_initial, run_scenario_name, run_strategy = "serial", run_out = ".";
  std::uint64_t run_seed = 0;
  std::int64_t run_iterations = 500, run_every = 0;
  std::uint32_t run_partitions = 1;
  detail::ParamFlags run_params;
  run->add_option("--model", run_model_path, "Model XML (default: built-in Sugarscape)");
  run->add_option("--initial", run_initial, "Initial state file");
  run->add_option("--scenario", run_scenario_name, "Generate the initial state instead");
  run->add_option("--seed", run_seed, "Master seed");
  run->add_option("--iterations", run_iterations, "Iterations to run");
  run->add_option("--strategy", run_strategy, "serial | geometric | round-robin");
  run->add_option("--partitions", run_partitions, "Number of partitions");
  run->add_option("--snapshot-every", run_every, "Write a snapshot every N iterations (0: final only)");
  run->add_option("--out", run_out, "Output directory");
  run_params.attach(*run);

  // stats
  auto* stats = app.add_subcommand("stats", "Wealth statistics of a snapshot");
  std::string stats_path, stats_model_path, stats_out = ".", stats_label = "snapshot";
  std::int64_t stats_bin = 10;
  double stats_fraction = 0.2;
  stats->add_option("snapshot", stats_path, "Snapshot file")->required();
  stats->add_option("--model", stats_model_path, "Model XML (default: built-in Sugarscape)");
  stats->add_option("--out", stats_out, "Output directory");
  stats->add_option("--scenario", stats_label, "Label used in file names and rows");
  stats->add_option("--bin-width", stats_bin, "Histogram bin width");
  stats->add_option("--top-fraction", stats_fraction, "Population fraction for the top-share measure");

  // bench
  auto* bench = app.add_subcommand("bench", "Scenario x partitioning matrix with ordering checks");
  std::vector<std::uint64_t> bench_seeds;
  std::optional<std::int64_t> bench_iterations;
  std::uint32_t bench_partitions = 4;
  std::string bench_out = ".";
  detail::ParamFlags bench_params;
  bench->add_option("--seed", bench_seeds, "Master seed (repeatable)")->required();
  bench->add_option("--iterations", bench_iterations, "Iterations per run (default 500)");
  bench->add_option("--partitions", bench_partitions, "Partitions for the parallel strategies");
  bench->add_option("--out", bench_out, "Output directory");
  bench_params.attach(*bench);

  std::vector<const char*> argv{"flame"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInvalidArgs;
  }

  if (*gen) {
    auto kind = parse_scenario(gen_scenario_name);
    if (!kind) {
      err << "error: unknown scenario '" << gen_scenario_name << "'\n" << gen->help();
      return kInvalidArgs;
    }
    ModelParams params;
    gen_params.apply(params);
    try {
      params.validate();
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kInvalidArgs;
    }
    try {
      const auto model = builtin_model(params);
      detail::ensure_dir(gen_out);
      auto doc = gen_scenario(*kind, params, gen_seed);
      auto path = io::write_snapshot(doc, model, gen_out);
      out << "wrote " << path.string() << " (" << doc.agents.size() << " agents)\n";
      return kOk;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return detail::exit_for(e, kModelError);
    }
  }

  if (*run) {
    auto strategy = parse_strategy(run_strategy);
    std::optional<ScenarioKind> kind;
    std::string problem;
    if (!strategy)
      problem = "unknown strategy '" + run_strategy + "'";
    else if (run_iterations < 1)
      problem = "--iterations must be >= 1";
    else if (run_partitions < 1)
      problem = "--partitions must be >= 1";
    else if (*strategy == Strategy::Serial && run_partitions != 1)
      problem = "serial runs use exactly one partition";
    else if (*strategy == Strategy::Geometric && !geometric_count_supported(run_partitions))
      problem = "geometric partitioning needs a perfect square or power of two";
    else if (run_every < 0)
      problem = "--snapshot-every must be >= 0";
    else if (run_initial.empty() == run_scenario_name.empty())
      problem = "give exactly one of --initial or --scenario";
    else if (!run_scenario_name.empty() && !(kind = parse_scenario(run_scenario_name)))
      problem = "unknown scenario '" + run_scenario_name + "'";
    if (!problem.empty()) {
      err << "error: " << problem << "\n";
      return kInvalidArgs;
    }

    ModelDef model;
    ModelParams params;
    try {
      model = run_model_path.empty() ? builtin_model() : io::load_model(run_model_path);
      params = ModelParams::from_model(model);
      run_params.apply(params);
      params.iterations = run_iterations;
      params.validate();
      params.apply_to(model);
      build_schedule(model);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return detail::exit_for(e, kModelError);
    }

    try {
      const auto behaviors = make_behaviors(model);
      auto initial_doc = kind ? gen_scenario(*kind, params, run_seed) : io::load_snapshot(run_initial, model);
      if (kind)  // e.g. no Averagers for a model without them
        std::erase_if(initial_doc.agents, [&](const io::SnapshotAgent& a) { return !model.agent_type_index(a.type); });
      detail::ensure_dir(run_out);

      RunOptions opts;
      opts.strategy = *strategy;
      opts.partitions = run_partitions;
      opts.iterations = run_iterations;
      opts.bounds = params.bounds();
      std::ostringstream stats_csv;
      write_stats_header(stats_csv, model);
      std::int64_t done = 0;
      opts.on_iteration = [&](const Simulation& sim, const IterationStats& s) {
        write_stats_row(stats_csv, s);
        ++done;
        if (run_every > 0 && done % run_every == 0 && done != run_iterations)
          io::write_snapshot(io::to_snapshot(sim.state(), model), model, run_out);
      };

      auto result = run_model(model, behaviors, io::to_state(initial_doc, model, run_seed), opts);
      const auto text = io::format_snapshot(io::to_snapshot(result.final_state, model), model);
      const auto final_path = io::snapshot_path(run_out, result.final_state.iteration);
      detail::write_text(final_path, text);
      std::ostringstream metrics_csv;
      write_metrics_csv(metrics_csv, result.metrics);
      detail::write_text(fs::path(run_out) / "metrics.csv", metrics_csv.str());
      detail::write_text(fs::path(run_out) / "stats.csv", stats_csv.str());

      out << "final " << final_path.string() << "\n";
      out << "sha256 " << sha256_hex(text) << "\n";
      out << "strategy " << to_string(*strategy) << " partitions " << run_partitions << "\n";
      out << "cross_partition_deliveries " << result.metrics.cross_partition_deliveries() << "\n";
      out << "wall_seconds " << result.wall_seconds << "\n";
      return kOk;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return detail::exit_for(e, kModelError);
    }
  }

  if (*stats) {
    if (stats_bin < 1 || !(stats_fraction > 0.0 && stats_fraction <= 1.0)) {
      err << "error: --bin-width must be >= 1 and --top-fraction in (0, 1]\n";
      return kInvalidArgs;
    }
    try {
      const auto model = stats_model_path.empty() ? builtin_model() : io::load_model(stats_model_path);
      const auto doc = io::load_snapshot(stats_path, model);
      const auto values = wealth_values(doc, model);
      detail::ensure_dir(stats_out);
      const fs::path dir(stats_out);
      const std::string suffix = stats_label + "_" + std::to_string(doc.iteration_number) + ".csv";

      std::ostringstream moments_csv;
      analytics::write_moments_header(moments_csv);
      double mean = 0.0;
      if (!values.empty()) {
        long double s = 0;
        for (auto v : values) s += v;
        mean = static_cast<double>(s / static_cast<long double>(values.size()));
      }
      std::optional<double> skew, kurt;
      try {
        auto m = analytics::moments(values);
        skew = m.skewness;
        kurt = m.excess_kurtosis;
      } catch (const Error& e) {
        out << "note: " << e.what() << "; skewness and kurtosis left empty\n";
      }
      analytics::write_moments_row(moments_csv, stats_label, doc.iteration_number, values.size(), mean, skew, kurt);
      detail::write_text(dir / "moments.csv", moments_csv.str());

      std::ostringstream hist_csv;
      analytics::write_histogram_csv(hist_csv, analytics::histogram(values, {stats_bin, true}));
      detail::write_text(dir / ("hist_" + suffix), hist_csv.str());

      std::ostringstream cdf_csv;
      analytics::write_cdf_csv(cdf_csv, values.empty() ? std::vector<analytics::CdfPoint>{}
                                                       : analytics::cumulative_distribution(values));
      detail::write_text(dir / ("cdf_" + suffix), cdf_csv.str());

      std::optional<double> share;
      try {
        share = analytics::top_share(values, stats_fraction);
      } catch (const Error&) {
      }
      std::ostringstream top_csv;
      top_csv << "scenario,iteration,fraction,share\n"
              << stats_label << ',' << doc.iteration_number << ',' << io::format_real(stats_fraction) << ','
              << (share ? io::format_real(*share) : "") << '\n';
      detail::write_text(dir / "top_share.csv", top_csv.str());

      out << "citizens " << values.size() << "\n";
      out << "mean " << mean << "\n";
      out << "skewness " << (skew ? io::format_real(*skew) : "") << "\n";
      out << "excess_kurtosis " << (kurt ? io::format_real(*kurt) : "") << "\n";
      out << "max " << (values.empty() ? 0 : *std::max_element(values.begin(), values.end())) << "\n";
      out << "top_share " << (share ? io::format_real(*share) : "") << "\n";
      return kOk;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return detail::exit_for(e, kInvalidArgs);
    }
  }

  // bench
  ModelParams params;
  bench_params.apply(params);
  if (bench_iterations) params.iterations = *bench_iterations;
  try {
    params.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidArgs;
  }
  if (bench_partitions < 1 || !geometric_count_supported(bench_partitions)) {
    err << "error: --partitions must be a perfect square or power of two\n";
    return kInvalidArgs;
  }

  try {
    detail::ensure_dir(bench_out);
    const std::vector<ScenarioKind> kinds{ScenarioKind::RandomMixed, ScenarioKind::SeparateAreas,
                                          ScenarioKind::OverlappingAreas};
    const std::vector<std::pair<Strategy, std::uint32_t>> strategies{
        {Strategy::Serial, 1}, {Strategy::Geometric, bench_partitions}, {Strategy::RoundRobin, bench_partitions}};

    struct Row {
      ScenarioKind kind;
      Strategy strategy;
      std::uint32_t partitions;
      std::uint64_t seed;
      sugarscape::ExperimentResult result;
    };
    std::vector<Row> rows;
    std::ostringstream csv;
    csv << "scenario,strategy,partitions,seed,iterations,wall_seconds,messages_posted,local_deliveries,"
           "cross_partition_deliveries,skewness,excess_kurtosis,capture_iterations,final_sha256\n";
    for (auto seed : bench_seeds)
      for (auto kind : kinds)
        for (auto [strategy, n] : strategies) {
          ExperimentConfig cfg;
          cfg.scenario = kind;
          cfg.params = params;
          cfg.seed = seed;
          cfg.strategy = strategy;
          cfg.partitions = n;
          cfg.iterations = params.iterations;
          auto r = run_experiment(cfg);
          const auto& m = r.run.metrics;
          csv << to_string(kind) << ',' << to_string(strategy) << ',' << n << ',' << seed << ',' << params.iterations
              << ',' << io::format_real(r.run.wall_seconds) << ',' << m.messages_posted() << ',' << m.local_deliveries()
              << ',' << m.cross_partition_deliveries() << ',' << (r.moments ? io::format_real(r.moments->skewness) : "")
              << ',' << (r.moments ? io::format_real(r.moments->excess_kurtosis) : "") << ','
              << io::format_real(r.capture_iterations) << ',' << r.sha256 << '\n';
          rows.push_back({kind, strategy, n, seed, std::move(r)});
        }
    detail::write_text(fs::path(bench_out) / "bench.csv", csv.str());

    auto find = [&](ScenarioKind k, Strategy s, std::uint64_t seed) -> const sugarscape::ExperimentResult& {
      for (const auto& r : rows)
        if (r.kind == k && r.strategy == s && r.seed == seed) return r.result;
      fail(ErrorCode::InvalidArgument, "missing bench row");
    };
    const auto n_seeds = static_cast<std::int64_t>(bench_seeds.size());
    const auto four_fifths = static_cast<std::int64_t>(std::ceil(0.8 * static_cast<double>(n_seeds) - 1e-9));

    bool all_ok = true;
    auto report = [&](bool ok, const std::string& name, const std::string& detail) {
      all_ok = all_ok && ok;
      out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    };

    std::int64_t transparent = 0, total = 0, serial_zero = 0, positive = 0, kurt_ok = 0, capture_ok = 0, comm_ok = 0;
    for (auto seed : bench_seeds) {
      for (auto k : kinds) {
        const auto& s = find(k, Strategy::Serial, seed);
        ++total;
        transparent += s.sha256 == find(k, Strategy::Geometric, seed).sha256 &&
                       s.sha256 == find(k, Strategy::RoundRobin, seed).sha256;
        serial_zero += s.run.metrics.cross_partition_deliveries() == 0;
        positive += s.moments && s.moments->skewness > 0.0;
      }
      const auto& rnd = find(ScenarioKind::RandomMixed, Strategy::Serial, seed);
      const auto& sep = find(ScenarioKind::SeparateAreas, Strategy::Serial, seed);
      const auto& ovl = find(ScenarioKind::OverlappingAreas, Strategy::Serial, seed);
      kurt_ok += sep.moments && rnd.moments && ovl.moments &&
                 sep.moments->excess_kurtosis > rnd.moments->excess_kurtosis &&
                 sep.moments->excess_kurtosis > ovl.moments->excess_kurtosis;
      capture_ok += rnd.capture_iterations < sep.capture_iterations;
      comm_ok += find(ScenarioKind::SeparateAreas, Strategy::Geometric, seed).run.metrics.cross_partition_deliveries() >
                 find(ScenarioKind::RandomMixed, Strategy::Geometric, seed).run.metrics.cross_partition_deliveries();
    }
    auto frac = [](std::int64_t a, std::int64_t b) { return std::to_string(a) + "/" + std::to_string(b); };
    report(transparent == total, "partition_transparency", frac(transparent, total) + " scenario/seed pairs identical");
    report(serial_zero == total, "serial_cross_zero", frac(serial_zero, total) + " serial runs with zero cross deliveries");
    report(positive == total, "skewness_positive", frac(positive, total) + " runs with skewness > 0");
    report(kurt_ok >= four_fifths, "kurtosis_separate_highest", frac(kurt_ok, n_seeds) + " seeds (need " + std::to_string(four_fifths) + ")");
    report(capture_ok >= four_fifths, "capture_random_faster", frac(capture_ok, n_seeds) + " seeds (need " + std::to_string(four_fifths) + ")");
    report(2 * comm_ok > n_seeds, "cross_deliveries_separate_above_random", frac(comm_ok, n_seeds) + " seeds (need a majority)");
    return all_ok ? kOk : kCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_for(e, kModelError);
  }
}

}  // namespace flame::cli
