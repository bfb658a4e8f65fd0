// Command-line front end: run, sweep, verify-inequalities, certify-decay,
// resume.
#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "abq/experiment.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int report(const abq::RunOutcome& o) {
  if (!o.csv_path.empty()) std::cout << "series: " << o.csv_path.string() << "\n";
  if (!o.certificate_path.empty()) std::cout << "report: " << o.certificate_path.string() << "\n";
  if (!o.checkpoint_path.empty()) std::cout << "checkpoint: " << o.checkpoint_path.string() << "\n";
  if (o.certificate) {
    std::cout << "decay certificate (osc_h1^2): " << (o.certificate->verdict ? "PASS" : "FAIL")
              << "\n";
  }
  if (o.boundary_warning) std::cerr << "warning: field mass approaches the vertical boundary\n";
  if (!o.message.empty()) std::cerr << o.message << "\n";
  return o.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic Boussinesq perturbation simulator and diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "Simulate one configuration");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (default $BOUSSINESQ_OUT/<name>)");

  std::string axis;
  std::string values;
  int workers = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Independent runs along one parameter axis");
  sweep_cmd->add_option("--config", config_path, "Base config file")->required();
  sweep_cmd->add_option("--axis", axis, "nu, eta, g0, epsilon, dt or nx")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory");
  sweep_cmd->add_option("--workers", workers, "Concurrent child runs")->check(CLI::PositiveNumber);

  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::string resolutions = "64,128";
  std::string lab_config;
  auto* ineq_cmd = app.add_subcommand("verify-inequalities", "Randomized inequality checks");
  auto* trials_opt = ineq_cmd->add_option("--trials", trials, "Trials per check");
  auto* seed_opt = ineq_cmd->add_option("--seed", seed, "Base seed");
  auto* res_opt = ineq_cmd->add_option("--resolutions", resolutions, "Comma-separated grid sizes");
  auto* lab_opt = ineq_cmd->add_option("--config", lab_config, "Preset with lab.* keys");
  trials_opt->needs(seed_opt);
  seed_opt->needs(trials_opt);
  lab_opt->excludes(trials_opt)->excludes(seed_opt)->excludes(res_opt);

  std::string series;
  std::string column;
  auto* cert_cmd = app.add_subcommand("certify-decay", "Integrable/monotone decay certificate");
  cert_cmd->add_option("--series", series, "Series CSV")->required();
  cert_cmd->add_option("--column", column, "Column name; 'name^2' squares it")->required();

  std::string checkpoint;
  double t_end = 0.0;
  double dt = 1e-3;
  double cadence = 0.1;
  std::string scheme = "strang2";
  auto* resume_cmd = app.add_subcommand("resume", "Continue a run from a checkpoint");
  resume_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  resume_cmd->add_option("--t-end", t_end, "Absolute end time")->required();
  resume_cmd->add_option("--dt", dt, "Time step");
  resume_cmd->add_option("--cadence", cadence, "Observer cadence");
  resume_cmd->add_option("--scheme", scheme, "strang2 or lawson2");
  resume_cmd->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : abq::kExitConfigError;
  }

  try {
    if (*run_cmd) {
      const abq::RunConfig cfg = abq::load_config(config_path);
      const std::filesystem::path out =
          out_dir.empty() ? abq::default_output_root() / std::filesystem::path(config_path).stem()
                          : std::filesystem::path(out_dir);
      return report(abq::run(cfg, out));
    }
    if (*sweep_cmd) {
      const abq::RunConfig cfg = abq::load_config(config_path);
      const std::filesystem::path out =
          out_dir.empty() ? abq::default_output_root() / ("sweep-" + axis)
                          : std::filesystem::path(out_dir);
      const auto result = abq::sweep(cfg, axis, split_list(values), out, workers);
      std::cout << "summary: " << result.summary_path.string() << "\n";
      for (const auto& r : result.rows) {
        std::cout << axis << "=" << r.value << " exit=" << r.exit_code;
        if (!r.message.empty()) std::cout << " (" << r.message << ")";
        std::cout << "\n";
      }
      return abq::kExitOk;
    }
    if (*ineq_cmd) {
      abq::InequalityConfig lab;
      if (!lab_config.empty()) {
        lab = abq::load_inequality_config(lab_config);
      } else if (*trials_opt) {
        lab.trials = trials;
        lab.seed = seed;
        lab.resolutions.clear();
        for (const auto& v : split_list(resolutions)) lab.resolutions.push_back(std::stoi(v));
      } else {
        std::cerr << "verify-inequalities: give --trials and --seed, or --config\n";
        return abq::kExitConfigError;
      }
      const auto outcome = abq::verify_inequalities(lab.trials, lab.seed, lab.resolutions);
      abq::write_inequality_report(std::cout, outcome);
      return outcome.exit_code;
    }
    if (*cert_cmd) return abq::certify_decay_cli(series, column, std::cout);
    if (*resume_cmd) {
      const std::filesystem::path out =
          out_dir.empty() ? abq::default_output_root() / "resume" : std::filesystem::path(out_dir);
      return report(abq::resume(checkpoint, t_end, out, dt, cadence,
                                abq::scheme_from_string(scheme)));
    }
  } catch (const abq::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return abq::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return abq::kExitConfigError;
  }
  return abq::kExitOk;
}
