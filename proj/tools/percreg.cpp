// percreg: command-line runner for the percolation experiments.
//
// Exit codes: 0 pass, 1 usage or configuration error, 2 failed audit,
// 3 capacity exceeded.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "percreg/errors.hpp"
#include "percreg/experiment.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kAudit = 2;
constexpr int kCapacity = 3;

int report(const percreg::RunOutcome& out, const std::string& dir) {
  for (const auto& f : out.files) std::cout << dir << "/" << f << "\n";
  if (!out.message.empty()) (out.status ? std::cerr : std::cout) << out.message << "\n";
  return out.status == 0 ? 0 : kAudit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supercritical bond percolation experiments"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::string out = "out";
    std::uint64_t seed = 0;
    int workers = 0;
  };
  std::vector<std::pair<CLI::App*, Common>> runs;
  runs.reserve(percreg::experiment_names().size());
  for (const std::string& name : percreg::experiment_names()) {
    runs.emplace_back(app.add_subcommand(name, "run the " + name + " experiment"), Common{});
    auto& [sub, c] = runs.back();
    sub->add_option("--config", c.config, "INI file with a [" + name + "] section")->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "master seed (overrides the config)");
    sub->add_option("--workers", c.workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "output directory");
  }

  std::string manifest;
  std::string replay_out = "replay";
  int replay_workers = 1;
  CLI::App* replay = app.add_subcommand("replay", "re-run a manifest and compare its outputs");
  replay->add_option("manifest", manifest, "manifest.json of a previous run")->required()->check(CLI::ExistingFile);
  replay->add_option("--workers", replay_workers, "worker threads")->check(CLI::PositiveNumber);
  replay->add_option("--out", replay_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (replay->parsed()) return report(percreg::replay_manifest(manifest, replay_out, replay_workers), replay_out);
    for (auto& [sub, c] : runs) {
      if (!sub->parsed()) continue;
      percreg::RunSpec spec = percreg::load_run_spec(sub->get_name(), c.config);
      if (sub->count("--seed")) spec.seed = c.seed;
      if (sub->count("--workers")) spec.workers = c.workers;
      return report(percreg::run_experiment(spec, c.out), c.out);
    }
  } catch (const percreg::CapacityError& e) {
    std::cerr << "capacity exceeded: " << e.what() << "\n";
    return kCapacity;
  } catch (const percreg::ConsistencyError& e) {
    std::cerr << "audit failed: " << e.what() << "\n";
    return kAudit;
  } catch (const percreg::EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kAudit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
