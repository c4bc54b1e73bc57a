#include "cmawiz/wizard.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cmawiz/cma_engine.hpp"
#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"

namespace cmawiz {

namespace {

constexpr const char* kRegistryHeader = "# cmawizard registry v1";

bool known_name(const std::string& name) {
  return std::any_of(kConfigNames.begin(), kConfigNames.end(), [&](const char* n) { return name == n; });
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ProblemDescriptor ProblemDescriptor::from_instance(const InstanceSpec& instance) {
  return {instance.budget, instance.dimension, instance.num_workers, instance.fully_bounded()};
}

std::string slot_for_suite(const std::string& suite) {
  if (suite == "YABBOB") return "CMAstd";
  if (suite == "YASMALLBBOB") return "CMAsmall";
  if (suite == "YATUNINGBBOB") return "CMAtuning";
  if (suite == "YAPARABBOB") return "CMApara";
  if (suite == "YABOUNDEDBBOB") return "CMAbounded";
  throw Error(ErrorKind::UnknownName, "suite '" + suite + "' is not a training suite");
}

ConfigRegistry ConfigRegistry::defaults() {
  ConfigRegistry r;
  r.configs_ = {
      {"CMAstd", CmaConfig(0.3607, 3, false, false)},   {"CMAsmall", CmaConfig(0.4151, 9, false, false)},
      {"CMAtuning", CmaConfig(0.4847, 1, true, false)}, {"CMApara", CmaConfig(0.8905, 8, true, true)},
      {"CMAbounded", CmaConfig(1.5884, 1, true, true)},
  };
  return r;
}

const CmaConfig& ConfigRegistry::at(const std::string& name) const {
  const auto it = configs_.find(name);
  if (it == configs_.end()) throw Error(ErrorKind::UnknownName, "unknown configuration '" + name + "'");
  return it->second;
}

void ConfigRegistry::set(const std::string& name, const CmaConfig& config) {
  if (!known_name(name)) throw Error(ErrorKind::UnknownName, "unknown configuration '" + name + "'");
  configs_[name] = config;
}

std::string meta_cma_select(const ProblemDescriptor& p) {
  if (p.fully_bounded) return "CMAbounded";
  if (p.budget < 50) return p.dimension <= 15 ? "CMAtuning" : "CMAsmall";
  return p.num_workers > 20 ? "CMApara" : "CMAstd";
}

RunRecord wizard_run(const ProblemDescriptor& p, const InstanceSpec& instance, const ConfigRegistry& registry,
                     std::uint64_t seed) {
  if (p.budget != instance.budget || p.dimension != instance.dimension || p.num_workers != instance.num_workers ||
      p.fully_bounded != instance.fully_bounded())
    throw Error(ErrorKind::InvalidConfig, "problem descriptor does not match the instance");
  const std::string name = meta_cma_select(p);
  RunRecord record = run(registry.at(name), instance, seed);
  record.algorithm = "MetaCMA";
  record.variant = name;
  return record;
}

std::string serialize_registry(const ConfigRegistry& registry) {
  std::ostringstream os;
  os << kRegistryHeader << "\n";
  for (const char* name : kConfigNames) {
    const CmaConfig& c = registry.at(name);
    os << "\n[" << name << "]\n"
       << "scale = " << format_real(c.scale()) << "\n"
       << "popsize_factor = " << c.popsize_factor() << "\n"
       << "elitist = " << (c.elitist() ? "true" : "false") << "\n"
       << "diagonal = " << (c.diagonal() ? "true" : "false") << "\n";
  }
  return os.str();
}

ConfigRegistry parse_registry(const std::string& text, bool allow_partial) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kRegistryHeader)
    throw Error(ErrorKind::Parse, "registry: missing header '" + std::string(kRegistryHeader) + "'");

  ConfigRegistry registry = ConfigRegistry::defaults();
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string current;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::Parse, "registry line " + std::to_string(line_no) + ": bad section");
      current = line.substr(1, line.size() - 2);
      if (!known_name(current)) throw Error(ErrorKind::Parse, "registry: unknown configuration '" + current + "'");
      if (sections.count(current)) throw Error(ErrorKind::Parse, "registry: duplicate section '" + current + "'");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (current.empty() || eq == std::string::npos)
      throw Error(ErrorKind::Parse, "registry line " + std::to_string(line_no) + ": expected 'field = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key != "scale" && key != "popsize_factor" && key != "elitist" && key != "diagonal")
      throw Error(ErrorKind::Parse, "registry: unknown field '" + current + "." + key + "'");
    sections[current][key] = trim(line.substr(eq + 1));
  }

  for (const char* name : kConfigNames) {
    const auto it = sections.find(name);
    if (it == sections.end()) {
      if (!allow_partial) throw Error(ErrorKind::Parse, std::string("registry: missing section '") + name + "'");
      continue;
    }
    const auto& fields = it->second;
    const auto get = [&](const std::string& key) -> const std::string& {
      const auto f = fields.find(key);
      if (f == fields.end()) throw Error(ErrorKind::Parse, std::string("registry: missing field '") + name + "." + key + "'");
      return f->second;
    };
    const auto as_bool = [&](const std::string& key) {
      const std::string& v = get(key);
      if (v == "true") return true;
      if (v == "false") return false;
      throw Error(ErrorKind::Parse, std::string("registry: field '") + name + "." + key + "' must be true or false");
    };
    double scale = 0.0;
    int factor = 0;
    try {
      scale = parse_real(get("scale"));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Parse) throw;
      throw Error(ErrorKind::Parse, std::string("registry: field '") + name + ".scale' is not a real number");
    }
    const std::string& factor_text = get("popsize_factor");
    std::size_t used = 0;
    try {
      factor = std::stoi(factor_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != factor_text.size())
      throw Error(ErrorKind::Parse, std::string("registry: field '") + name + ".popsize_factor' is not an integer");
    const bool elitist = as_bool("elitist");
    const bool diagonal = as_bool("diagonal");
    if (!(scale > CmaConfig::kMinScale && scale < CmaConfig::kMaxScale))
      throw Error(ErrorKind::Parse, std::string("registry: field '") + name + ".scale' outside (0.1, 10)");
    if (factor < CmaConfig::kMinPopsizeFactor || factor > CmaConfig::kMaxPopsizeFactor)
      throw Error(ErrorKind::Parse, std::string("registry: field '") + name + ".popsize_factor' outside [1, 9]");
    registry.set(name, CmaConfig(scale, factor, elitist, diagonal));
  }
  return registry;
}

ConfigRegistry load_registry(const std::filesystem::path& path, bool allow_partial) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read registry " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_registry(buf.str(), allow_partial);
}

}  // namespace cmawiz
