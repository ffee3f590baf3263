#include "nlphase/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nlphase/potentials.hpp"

namespace nlphase {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cf;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    cf.sections_[section][key] = {value, lineno};
  }
  return cf;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse(os.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second.value;
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  auto v = get(section, key);
  return v ? *v : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    return std::stod(*v);
  } catch (const std::exception&) {
    throw std::invalid_argument(section + "." + key + ": not a number: " + *v);
  }
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    return std::stoi(*v);
  } catch (const std::exception&) {
    throw std::invalid_argument(section + "." + key + ": not an integer: " + *v);
  }
}

std::vector<double> ConfigFile::get_list(const std::string& section,
                                         const std::string& key) const {
  std::vector<double> out;
  auto v = get(section, key);
  if (!v) return out;
  std::istringstream is(*v);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument(section + "." + key + ": not a number: " + item);
    }
  }
  return out;
}

int ConfigFile::line_of(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return 0;
  auto k = s->second.find(key);
  return k == s->second.end() ? 0 : k->second.line;
}

std::string ConfigFile::canonical() const {
  std::ostringstream os;
  for (const auto& [sec, entries] : sections_) {
    if (!sec.empty()) os << "[" << sec << "]\n";
    for (const auto& [key, e] : entries) os << key << " = " << e.value << "\n";
  }
  return os.str();
}

const char* command_name(Command c) {
  switch (c) {
    case Command::KernelInfo: return "kernel-info";
    case Command::Energy: return "energy";
    case Command::CellSweep: return "cell-sweep";
    case Command::GammaLimsup: return "gamma-limsup";
    case Command::GammaLiminf: return "gamma-liminf";
    case Command::ModifyDemo: return "modify-demo";
    case Command::SliceCheck: return "slice-check";
    case Command::SteinerCheck: return "steiner-check";
    case Command::SkeletonSweep: return "skeleton-sweep";
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::KernelInfo, Command::Energy, Command::CellSweep,
                    Command::GammaLimsup, Command::GammaLiminf, Command::ModifyDemo,
                    Command::SliceCheck, Command::SteinerCheck, Command::SkeletonSweep})
    if (name == command_name(c)) return c;
  return std::nullopt;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text,
                                         std::vector<ConfigDiagnostic>* diags) {
  ExperimentConfig cfg;
  cfg.file = ConfigFile::parse(text);
  auto cmd = cfg.file.get("", "command");
  if (!cmd) {
    if (diags) diags->push_back({"command", "missing top-level 'command' key", 0});
    return cfg;
  }
  auto parsed = parse_command(*cmd);
  if (!parsed) {
    if (diags) {
      std::string names;
      for (Command c : {Command::KernelInfo, Command::Energy, Command::CellSweep,
                        Command::GammaLimsup, Command::GammaLiminf,
                        Command::ModifyDemo, Command::SliceCheck,
                        Command::SteinerCheck, Command::SkeletonSweep})
        names += std::string(" ") + command_name(c);
      diags->push_back({"command", "unknown command '" + *cmd + "'; known:" + names,
                        cfg.file.line_of("", "command")});
    }
    return cfg;
  }
  cfg.command = *parsed;
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path,
                                        std::vector<ConfigDiagnostic>* diags) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse(os.str(), diags);
}

KernelSpec ExperimentConfig::kernel_spec() const {
  KernelSpec sp;
  std::string kind = file.get_or("kernel", "kind", "fractional");
  if (kind == "fractional") sp.kind = KernelKind::Fractional;
  else if (kind == "aniso-fractional") sp.kind = KernelKind::AnisoFractional;
  else if (kind == "indicator") sp.kind = KernelKind::Indicator;
  else throw std::invalid_argument("kernel.kind: unknown kind '" + kind + "'");
  sp.dim = file.get_int("kernel", "dim", 1);
  sp.s = file.get_double("kernel", "s", 0.75);
  sp.radius = file.get_double("kernel", "radius", 1.0);
  sp.rho = file.get_double("kernel", "rho", 0.0);
  if (sp.kind == KernelKind::AnisoFractional) {
    std::string ball = file.get_or("kernel", "ball", "ellipse:1:0.5");
    std::istringstream bs(ball);
    std::string tag;
    std::getline(bs, tag, ':');
    if (tag == "ellipse") {
      std::string a, b;
      std::getline(bs, a, ':');
      std::getline(bs, b, ':');
      sp.ball = NormBall::ellipse(std::stod(a), std::stod(b));
    } else if (tag == "disk") {
      std::string r;
      std::getline(bs, r, ':');
      sp.ball = NormBall::disk(std::stod(r));
    } else {
      throw std::invalid_argument("kernel.ball: unknown descriptor '" + ball + "'");
    }
  }
  return sp;
}

std::string ExperimentConfig::potential_name() const {
  return file.get_or("potential", "name", "quartic");
}

std::vector<double> ExperimentConfig::schedule_values() const {
  return file.get_list("schedule", "eps");
}

double ExperimentConfig::cells_per_eps() const {
  return file.get_double("schedule", "cells_per_eps", 8.0);
}

std::vector<ConfigDiagnostic> ExperimentConfig::validate() const {
  std::vector<ConfigDiagnostic> out;
  auto cmd = file.get("", "command");
  if (!cmd) {
    out.push_back({"command", "missing top-level 'command' key", 0});
    return out;
  }
  if (!parse_command(*cmd)) {
    std::string names;
    for (Command c : {Command::KernelInfo, Command::Energy, Command::CellSweep,
                      Command::GammaLimsup, Command::GammaLiminf,
                      Command::ModifyDemo, Command::SliceCheck,
                      Command::SteinerCheck, Command::SkeletonSweep}) {
      names += std::string(" ") + command_name(c);
    }
    out.push_back({"command", "unknown command '" + *cmd + "'; known:" + names,
                   file.line_of("", "command")});
    return out;
  }

  // kernel spec (all commands accept one; several require it)
  try {
    KernelSpec sp = kernel_spec();
    if (command == Command::KernelInfo) {
      make_kernel_unchecked(sp);  // diagnostics may target failing kernels
    } else {
      make_kernel(sp);
    }
  } catch (const std::exception& e) {
    out.push_back({"kernel", e.what(), file.line_of("kernel", "kind")});
  }

  // potential preset
  try {
    make_potential(potential_name());
  } catch (const std::exception& e) {
    out.push_back({"potential.name", e.what(), file.line_of("potential", "name")});
  }

  // schedules must decrease where present
  std::vector<double> eps = schedule_values();
  bool needs_schedule = command == Command::GammaLimsup ||
                        command == Command::GammaLiminf ||
                        command == Command::ModifyDemo;
  if (needs_schedule && eps.empty())
    out.push_back({"schedule.eps", "command requires a schedule", 0});
  for (std::size_t i = 0; i + 1 < eps.size(); ++i)
    if (!(eps[i + 1] < eps[i])) {
      out.push_back({"schedule.eps", "values must be strictly decreasing",
                     file.line_of("schedule", "eps")});
      break;
    }
  for (double e : eps)
    if (!(e > 0.0)) {
      out.push_back({"schedule.eps", "values must be positive",
                     file.line_of("schedule", "eps")});
      break;
    }
  if (cells_per_eps() < 1.0)
    out.push_back({"schedule.cells_per_eps", "must be >= 1",
                   file.line_of("schedule", "cells_per_eps")});

  if (command == Command::SkeletonSweep || command == Command::SteinerCheck) {
    std::vector<double> deltas = file.get_list("run", "deltas");
    if (deltas.empty())
      out.push_back({"run.deltas", "command requires a delta list", 0});
  }
  if (command == Command::GammaLimsup) {
    std::string iface = file.get_or("run", "interface", "flat");
    if (iface != "flat" && iface != "square" && iface != "octagon")
      out.push_back({"run.interface", "expect flat, square, or octagon",
                     file.line_of("run", "interface")});
  }
  return out;
}

}  // namespace nlphase
