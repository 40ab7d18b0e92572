// Experiment runner: parameters, artifacts, manifests and replay.

#ifndef PERCREG_EXPERIMENT_HPP
#define PERCREG_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "percreg/lattice.hpp"

namespace percreg {

inline constexpr int kManifestFormat = 1;
inline constexpr const char* kToolVersion = "1.0.0";

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

const std::vector<std::string>& experiment_names();

// Key/value parameters of one experiment, every default spelled out.
class ParamSet {
 public:
  ParamSet() = default;
  static ParamSet defaults(const std::string& experiment);

  const std::string& experiment() const { return experiment_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  // ConfigError for keys the experiment does not know.
  void set(const std::string& key, const std::string& value, int line = 0);

  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<int> int_list(const std::string& key) const;
  std::vector<double> number_list(const std::string& key) const;
  // "1,0;1,1" -> {(1,0), (1,1)}
  std::vector<Vertex> vertex_list(const std::string& key) const;
  Vertex vertex_value(const std::string& key) const;

  void set_source(std::string path) { source_ = std::move(path); }

 private:
  [[noreturn]] void bad_value(const std::string& key, const std::string& expected) const;

  std::string experiment_;
  std::string source_ = "<defaults>";
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

// Reads section [experiment] (and optional [run] seed/workers) of an INI
// file on top of the defaults.
struct RunSpec {
  ParamSet params;
  std::uint64_t seed = 1;
  int workers = 1;
};
RunSpec load_run_spec(const std::string& experiment, const std::string& ini_path);

struct RunOutcome {
  int status = 0;  // 0 pass, 2 failed audit
  std::vector<std::string> files;
  std::string message;
};

// Writes the experiment's CSV/JSON artifacts and manifest.json into
// out_dir. Throws on invalid parameters.
RunOutcome run_experiment(const RunSpec& spec, const std::filesystem::path& out_dir);

// Re-runs a manifest into out_dir and compares every artifact fingerprint.
// ConfigError on a format or version mismatch. Status 2 when the manifest
// was edited after the run or any artifact differs.
RunOutcome replay_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
                           int workers);

}  // namespace percreg

#endif  // PERCREG_EXPERIMENT_HPP
