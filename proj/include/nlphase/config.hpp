// Plain-text experiment configs: key = value lines grouped into [sections],
// '#' comments. Typed accessors carry line information for diagnostics.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlphase/kernels.hpp"

namespace nlphase {

struct ConfigDiagnostic {
  std::string field;
  std::string message;
  int line = 0;
};

class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;
  int line_of(const std::string& section, const std::string& key) const;

  // canonical text form (sorted sections/keys) for manifests
  std::string canonical() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

// Commands understood by the runner.
enum class Command {
  KernelInfo,
  Energy,
  CellSweep,
  GammaLimsup,
  GammaLiminf,
  ModifyDemo,
  SliceCheck,
  SteinerCheck,
  SkeletonSweep,
};

const char* command_name(Command c);
std::optional<Command> parse_command(const std::string& name);

struct ExperimentConfig {
  Command command = Command::KernelInfo;
  ConfigFile file;

  static ExperimentConfig parse(const std::string& text,
                                std::vector<ConfigDiagnostic>* diags = nullptr);
  static ExperimentConfig load(const std::string& path,
                               std::vector<ConfigDiagnostic>* diags = nullptr);

  // Full schema and invariant report; empty means valid.
  std::vector<ConfigDiagnostic> validate() const;

  // Typed views used by the runner (throw std::invalid_argument with a field
  // path on malformed content).
  KernelSpec kernel_spec() const;
  std::string potential_name() const;
  std::vector<double> schedule_values() const;
  double cells_per_eps() const;
};

}  // namespace nlphase
