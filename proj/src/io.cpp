#include "cmawiz/io.hpp"

#include <fstream>
#include <sstream>

#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"

namespace cmawiz::io {

Json real(double v) { return format_real(v); }

double real(const Json& j, const std::string& field) {
  if (!j.is_string()) throw Error(ErrorKind::Parse, "field '" + field + "' must be a decimal string");
  try {
    return parse_real(j.get<std::string>());
  } catch (const Error&) {
    throw Error(ErrorKind::Parse, "field '" + field + "' is not a real number");
  }
}

namespace {

const Json& field(const Json& j, const std::string& name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorKind::Parse, "missing field '" + name + "'");
  return j.at(name);
}

template <typename T>
T typed(const Json& j, const std::string& name) {
  const Json& v = field(j, name);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Parse, "field '" + name + "' has the wrong type");
  }
}

}  // namespace

Json to_json(const CmaConfig& config) {
  Json j;
  j["scale"] = real(config.scale());
  j["popsize_factor"] = config.popsize_factor();
  j["elitist"] = config.elitist();
  j["diagonal"] = config.diagonal();
  return j;
}

CmaConfig config_from_json(const Json& j) {
  return CmaConfig(real(field(j, "scale"), "scale"), typed<int>(j, "popsize_factor"), typed<bool>(j, "elitist"),
                   typed<bool>(j, "diagonal"));
}

Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(real(x));
  return arr;
}

Vector vector_from_json(const Json& j, const std::string& name) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "field '" + name + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = real(j[i], name);
  return v;
}

Json to_json(const InstanceSpec& spec) {
  Json j;
  j["function"] = describe(spec.function).name;
  j["dimension"] = spec.dimension;
  j["rotation_seed"] = spec.rotation_seed;
  j["budget"] = spec.budget;
  j["num_workers"] = spec.num_workers;
  if (spec.box) {
    j["box"] = Json{{"lower", to_json(spec.box->lower)}, {"upper", to_json(spec.box->upper)}};
  } else {
    j["box"] = nullptr;
  }
  return j;
}

InstanceSpec instance_from_json(const Json& j) {
  InstanceSpec spec;
  spec.function = function_from_name(typed<std::string>(j, "function"));
  spec.dimension = typed<int>(j, "dimension");
  spec.rotation_seed = typed<std::uint64_t>(j, "rotation_seed");
  spec.budget = typed<long>(j, "budget");
  spec.num_workers = typed<int>(j, "num_workers");
  const Json& box = field(j, "box");
  if (!box.is_null())
    spec.box = Box{vector_from_json(field(box, "lower"), "box.lower"), vector_from_json(field(box, "upper"), "box.upper")};
  validate_instance(spec);
  return spec;
}

std::string header_line(const std::string& schema, int version) {
  Json j;
  j["schema"] = schema;
  j["version"] = version;
  return j.dump();
}

void check_header(const std::string& line, const std::string& schema, const std::string& path) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Parse, path + ": missing schema header");
  }
  if (!j.is_object() || j.value("schema", "") != schema)
    throw Error(ErrorKind::Parse, path + ": expected schema '" + schema + "'");
  if (j.value("version", 0) != 1) throw Error(ErrorKind::Parse, path + ": unsupported schema version");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace cmawiz::io
