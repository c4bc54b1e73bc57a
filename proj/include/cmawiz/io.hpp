#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmawiz/benchmark.hpp"
#include "cmawiz/cma_config.hpp"

namespace cmawiz::io {

using Json = nlohmann::ordered_json;

// Reals travel as shortest round-trip decimal strings; integers and booleans
// as plain JSON values. Objects keep insertion order, so output is byte-stable.

Json real(double v);
double real(const Json& j, const std::string& field);

Json to_json(const CmaConfig& config);
CmaConfig config_from_json(const Json& j);

Json to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const Json& j);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& field);

/// First line of every file written by the toolkit.
std::string header_line(const std::string& schema, int version = 1);
/// Throws Parse unless `line` is the header for `schema`.
void check_header(const std::string& line, const std::string& schema, const std::string& path);

/// Writes via a temporary file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace cmawiz::io
