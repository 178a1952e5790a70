// Command-line front end: simulate, validate-params, metrics, batch.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "evsim/evsim.hpp"

namespace {

using evsim::detail::format;

int simulate(const std::filesystem::path& config_file, const std::filesystem::path& profile_file,
             const std::filesystem::path& out_dir, const std::string& strategy_spec, std::optional<double> dt,
             evsim::PlantCache* cache) {
  auto cfg = evsim::load_config(config_file, cache);
  if (dt) cfg.dt = *dt;
  const auto profile = evsim::read_profile_csv(profile_file);
  const auto strategy = evsim::make_strategy(strategy_spec);
  const auto result = evsim::run_scenario(cfg, profile, strategy);
  evsim::emit_report(result, std::nullopt, out_dir);
  return 0;
}

int validate_params(const std::filesystem::path& data_dir, bool dump, bool verbose) {
  const auto set = evsim::load_parameter_set(data_dir);
  if (dump) {
    const std::pair<const char*, const evsim::ParamGrid*> tables[] = {{"OCV", &set.ocv}, {"R_ser", &set.r_ser},
                                                                      {"R_1", &set.r1},   {"R_2", &set.r2},
                                                                      {"C_1", &set.c1},   {"C_2", &set.c2}};
    std::cout << "parameter,soc_pct,temp_c,value\n";
    for (const auto& [name, grid] : tables) {
      for (std::size_t r = 0; r < grid->rows(); ++r) {
        for (std::size_t c = 0; c < grid->cols(); ++c) {
          std::cout << name << ',' << format("%.10g", grid->row_keys[r] * 100.0) << ','
                    << format("%.10g", grid->col_keys[c]) << ',' << format("%.10g", grid->at(r, c)) << '\n';
        }
      }
    }
  }
  const auto report = evsim::validate_parameter_set(set);
  for (const auto& f : report.findings) {
    if (f.severity == evsim::Severity::Info && !verbose) continue;
    std::cerr << (f.severity == evsim::Severity::Error ? "error: " : "info: ") << f.parameter << ": " << f.message
              << '\n';
  }
  std::cerr << report.errors() << " error(s), " << report.findings.size() - report.errors() << " note(s)\n";
  return report.ok() ? 0 : 1;
}

int metrics(const std::filesystem::path& sim_file, const std::filesystem::path& ref_file) {
  const auto m = evsim::compute_metrics(evsim::read_trajectory_csv(sim_file), evsim::read_trajectory_csv(ref_file));
  evsim::write_metrics(std::cout, m);
  return 0;
}

struct Job {
  std::filesystem::path config, profile, out;
  std::string strategy = "profile";
};

// Manifest rows: config,profile,out[,strategy]; paths relative to the manifest,
// output directories relative to out_root when one is given.
std::vector<Job> read_manifest(const std::filesystem::path& file, const std::filesystem::path& out_root) {
  const auto lines = evsim::detail::read_lines(file);
  const auto base = file.parent_path();
  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_absolute() ? p : base / p;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& [number, text] = lines[i];
    const auto cells = evsim::detail::split_csv(text);
    if (i == 0 && !cells.empty() && cells[0] == "config") continue;
    if (cells.size() < 3 || cells.size() > 4) throw evsim::DataError(file.string(), number, "expected config,profile,out[,strategy]");
    std::filesystem::path out{std::string(cells[2])};
    if (!out_root.empty() && out.is_relative()) out = out_root / out;
    Job job{resolve(cells[0]), resolve(cells[1]), resolve(out.string())};
    if (cells.size() == 4 && !cells[3].empty()) job.strategy = std::string(cells[3]);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

int batch(const std::filesystem::path& manifest, const std::filesystem::path& out_root, unsigned jobs_wanted) {
  const auto jobs = read_manifest(manifest, out_root);
  evsim::PlantCache cache;
  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex log;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      try {
        simulate(job.config, job.profile, job.out, job.strategy, std::nullopt, &cache);
        std::lock_guard lock(log);
        std::cout << "ok   " << job.out.string() << '\n';
      } catch (const std::exception& e) {
        ++failures;
        std::lock_guard lock(log);
        std::cerr << "fail " << job.out.string() << ": " << e.what() << '\n';
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs_wanted, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV battery, charger and charge-control simulator"};
  app.require_subcommand(1);

  std::filesystem::path config, profile, out, data = evsim::default_data_dir(), sim, ref, manifest, out_root;
  std::string strategy = "profile";
  std::optional<double> dt;
  bool dump = false;
  bool verbose = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* sim_cmd = app.add_subcommand("simulate", "run one scenario");
  sim_cmd->add_option("--config", config, "scenario config file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--profile", profile, "profile file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", out, "output directory")->required();
  sim_cmd->add_option("--strategy", strategy, "profile | max | off | constant:W | soc-target:S[:W] | window:T0:T1[:W]");
  sim_cmd->add_option("--dt", dt, "step size in seconds")->check(CLI::PositiveNumber);

  auto* val_cmd = app.add_subcommand("validate-params", "check a cell parameter directory");
  val_cmd->add_option("--data", data, "directory with ocv.csv, r_ser.csv, ...")->check(CLI::ExistingDirectory);
  val_cmd->add_flag("--dump", dump, "print every grid node");
  val_cmd->add_flag("--verbose", verbose, "also list informational notes");

  auto* met_cmd = app.add_subcommand("metrics", "compare a trajectory with a reference");
  met_cmd->add_option("--sim", sim)->required()->check(CLI::ExistingFile);
  met_cmd->add_option("--ref", ref)->required()->check(CLI::ExistingFile);

  auto* batch_cmd = app.add_subcommand("batch", "run the scenarios listed in a manifest");
  batch_cmd->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  batch_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  batch_cmd->add_option("--out-root", out_root, "base for relative output directories");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim_cmd) return simulate(config, profile, out, strategy, dt, nullptr);
    if (*val_cmd) {
      // A directory holding cell/ is accepted as well as the cell/ directory itself.
      if (std::filesystem::exists(data / "cell" / "ocv.csv")) data /= "cell";
      return validate_params(data, dump, verbose);
    }
    if (*met_cmd) return metrics(sim, ref);
    if (*batch_cmd) return batch(manifest, out_root, jobs);
  } catch (const std::exception& e) {
    std::cerr << "evsim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
