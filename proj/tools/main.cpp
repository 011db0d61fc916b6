// polcount: design calculator and Monte Carlo simulator for a
// stopped-light photon counter (EIT storage + fluorescence readout).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <polcount/config.hpp>
#include <polcount/constants.hpp>
#include <polcount/pipeline.hpp>
#include <polcount/serialize.hpp>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<long long> trials;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

polcount::Scenario load_with_overrides(const CommonOptions& options,
                                       std::vector<std::string>* defaulted) {
  polcount::Scenario scenario =
      polcount::load_scenario_file(options.config_path, defaulted);
  if (options.trials) {
    scenario.trials = *options.trials;
  }
  if (options.seed) {
    scenario.seed = *options.seed;
  }
  return scenario;
}

void write_or_die(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    std::exit(kExitIo);
  }
  out << contents;
  out.flush();
  if (!out) {
    std::cerr << "error: failed writing output file '" << path << "'\n";
    std::exit(kExitIo);
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void print_row(const char* label, const std::string& value, const char* unit) {
  std::printf("  %-36s %-14s %s\n", label, value.c_str(), unit);
}

int cmd_analyze(const CommonOptions& options) {
  std::vector<std::string> defaulted;
  const polcount::Scenario scenario = load_with_overrides(options, &defaulted);
  const polcount::Analysis a = polcount::analyze_scenario(scenario);

  std::printf("derived quantities (%s)\n", options.config_path.c_str());
  std::printf("  %-36s %-14s %s\n", "quantity", "value", "unit");
  const double fit_ratio = a.storage.compressed_length / scenario.ensemble.length;
  print_row("optical depth alpha", fmt(a.storage.optical_depth), "-");
  print_row("mixing angle theta", fmt(a.storage.mixing_angle_initial), "rad");
  print_row("transparency bandwidth", fmt(a.storage.transparency_bandwidth),
            "rad/s");
  print_row("probe bandwidth", fmt(scenario.pulse.bandwidth), "rad/s");
  print_row("group velocity v_g", fmt(a.storage.group_velocity), "m/s");
  print_row("compressed pulse length", fmt(a.storage.compressed_length), "m");
  print_row("compression fit ratio", fmt(fit_ratio), "compressed/medium");
  print_row("adiabaticity margin", fmt(a.storage.adiabaticity_margin),
            ">= 1 is adiabatic");
  print_row("storage efficiency eta_store", fmt(a.storage.eta_storage), "-");
  print_row("  bandwidth factor", fmt(a.storage.eta_bandwidth), "-");
  print_row("  fit factor", fmt(a.storage.eta_fit), "-");
  print_row("  adiabatic factor", fmt(a.storage.eta_adiabatic), "-");
  print_row("eta_store in use", fmt(a.eta_store_used),
            scenario.eta_store_override ? "override" : "physics");
  print_row("counts per excitation mu1", fmt(a.channel.mu1), "counts");
  print_row("background counts in window", fmt(a.background_mean), "counts");
  print_row("max ground-state atoms N_max", fmt(a.max_ground_atoms), "atoms");
  print_row("countable n (exact)", fmt(a.n_max_exact), "photons");
  print_row("countable-n heuristic bound", fmt(a.n_max_heuristic), "= mu1");

  if (!a.warnings.empty()) {
    std::printf("warnings:\n");
    for (const polcount::Warning& w : a.warnings) {
      std::printf("  [%s] %s\n", w.code.c_str(), w.message.c_str());
    }
  }
  if (!defaulted.empty()) {
    const nlohmann::json materialized = polcount::scenario_to_json(scenario);
    std::printf("defaults applied:\n");
    for (const std::string& key : defaulted) {
      const nlohmann::json* node = &materialized;
      std::stringstream ss(key);
      std::string part;
      while (node != nullptr && std::getline(ss, part, '.')) {
        node = node->contains(part) ? &(*node)[part] : nullptr;
      }
      std::printf("  %s = %s\n", key.c_str(),
                  node != nullptr ? node->dump().c_str() : "?");
    }
  }
  return 0;
}

int cmd_simulate(const CommonOptions& options, const std::string& out_path,
                 const std::string& records_path) {
  std::vector<std::string> defaulted;
  const polcount::Scenario scenario = load_with_overrides(options, &defaulted);
  const polcount::ScenarioResult result =
      polcount::run_scenario(scenario, options.threads);
  const std::string doc =
      polcount::result_to_json(scenario, result, defaulted).dump(2) + "\n";
  if (out_path.empty()) {
    std::fputs(doc.c_str(), stdout);
  } else {
    write_or_die(out_path, doc);
  }

  if (!records_path.empty()) {
    const polcount::ReadoutScenario mc{scenario.pulse, result.eta_store_used,
                                       scenario.readout, result.off_ratio};
    const std::vector<polcount::CountRecord> records = polcount::run_trials(
        scenario.trials, mc, scenario.seed, options.threads);
    std::vector<int> classified;
    classified.reserve(records.size());
    for (const polcount::CountRecord& record : records) {
      classified.push_back(polcount::classify_with_thresholds(
          record.detected_counts, result.thresholds));
    }
    write_or_die(records_path, polcount::records_to_csv(records, classified));
  }
  return 0;
}

int cmd_classify(double mu1, double bg, int n_top,
                 const std::vector<long long>& counts) {
  if (n_top <= 0) {
    n_top = polcount::default_n_top(mu1, bg, 0.01);
  }
  const polcount::PoissonChannel channel{mu1, bg, n_top};
  const std::vector<long long> thresholds = polcount::decision_thresholds(channel);
  std::printf("thresholds (mu1=%s, bg=%s, n_top=%d):", fmt(mu1).c_str(),
              fmt(bg).c_str(), n_top);
  for (long long t : thresholds) {
    std::printf(" %lld", t);
  }
  std::printf("\n");
  for (long long k : counts) {
    std::printf("counts %lld -> n_hat %d\n", k,
                polcount::classify(k, channel));
  }
  return 0;
}

int cmd_sweep(const CommonOptions& options, const std::string& param,
              const std::vector<double>& values, const std::string& out_path) {
  std::vector<std::string> defaulted;
  const polcount::Scenario scenario = load_with_overrides(options, &defaulted);
  const std::vector<polcount::SweepPoint> points =
      polcount::sweep(scenario, param, values, options.threads);
  std::printf("sweep over %s (%zu points)\n", param.c_str(), points.size());
  std::printf("  %-14s %-12s %-12s %-12s %-8s %-12s %-12s\n", "value", "mu1",
              "eta_store", "background", "n_max", "eff_exact", "eff_mc");
  for (const polcount::SweepPoint& p : points) {
    std::printf("  %-14s %-12s %-12s %-12s %-8d %-12s %-12s\n",
                fmt(p.value).c_str(), fmt(p.mu1).c_str(),
                fmt(p.eta_store).c_str(), fmt(p.background_mean).c_str(),
                p.n_max_exact, fmt(p.efficiency_exact).c_str(),
                fmt(p.efficiency_mc).c_str());
  }
  if (!out_path.empty()) {
    write_or_die(out_path,
                 polcount::sweep_to_json(scenario, param, points).dump(2) + "\n");
  }
  return 0;
}

int cmd_report(std::uint64_t seed, bool as_json) {
  const std::vector<polcount::ReportRow> rows = polcount::reference_report(seed);
  if (as_json) {
    std::fputs((polcount::report_to_json(rows).dump(2) + "\n").c_str(), stdout);
  } else {
    std::fputs(polcount::render_report_table(rows).c_str(), stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stopped-light photon counter: design calculator and simulator"};
  app.require_subcommand(1);

  CommonOptions options;

  auto add_common = [&](CLI::App* cmd, bool with_trials) {
    cmd->add_option("--config", options.config_path, "scenario config file (JSON)")
        ->required();
    if (with_trials) {
      cmd->add_option("--trials", options.trials, "Monte Carlo trials")
          ->check(CLI::PositiveNumber);
      cmd->add_option("--seed", options.seed, "top-level random seed");
      cmd->add_option("--threads", options.threads,
                      "worker threads (never changes results)")
          ->check(CLI::Range(1, 256));
    }
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "print the derived design quantities for a config");
  add_common(analyze, false);

  std::string out_path;
  std::string records_path;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run the Monte Carlo scenario and emit a result document");
  add_common(simulate, true);
  simulate->add_option("--out", out_path, "result JSON path (default: stdout)");
  simulate->add_option("--records", records_path, "per-trial CSV path");

  double mu1 = 0.0;
  double bg = 0.0;
  int n_top = 0;
  std::vector<long long> counts;
  CLI::App* classify = app.add_subcommand(
      "classify", "maximum-likelihood photon number for given counts");
  classify->add_option("--mu1", mu1, "mean counts per excitation")
      ->required()
      ->check(CLI::PositiveNumber);
  classify->add_option("--bg", bg, "mean background counts")
      ->check(CLI::NonNegativeNumber);
  classify->add_option("--n-top", n_top, "top of the considered photon range");
  classify->add_option("--counts", counts, "detected counts to classify")
      ->required()
      ->check(CLI::NonNegativeNumber);

  std::string param;
  std::vector<double> values;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "evaluate the scenario across values of one numeric parameter");
  add_common(sweep, true);
  sweep->add_option("--param", param, "dotted config path of the parameter")
      ->required();
  sweep->add_option("--values", values, "parameter values (config-file units)")
      ->expected(0, -1);
  sweep->add_option("--out", out_path, "sweep JSON path");

  std::uint64_t report_seed = polcount::kDefaultReportSeed;
  bool report_json = false;
  CLI::App* report = app.add_subcommand(
      "report", "reference-claims report: quoted desk numbers vs computed");
  report->add_option("--seed", report_seed, "seed for the simulated column");
  report->add_flag("--json", report_json, "emit the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      return cmd_analyze(options);
    }
    if (simulate->parsed()) {
      return cmd_simulate(options, out_path, records_path);
    }
    if (classify->parsed()) {
      return cmd_classify(mu1, bg, n_top, counts);
    }
    if (sweep->parsed()) {
      return cmd_sweep(options, param, values, out_path);
    }
    if (report->parsed()) {
      return cmd_report(report_seed, report_json);
    }
  } catch (const polcount::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
