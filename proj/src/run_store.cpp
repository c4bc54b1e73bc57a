#include "cmawiz/run_store.hpp"

#include <fstream>
#include <sstream>

#include "cmawiz/error.hpp"
#include "cmawiz/io.hpp"

namespace cmawiz {

namespace {
constexpr const char* kSchema = "cmawizard.runs";
}

StoreKey key_of(const RunRecord& record) {
  return {record.algorithm, record.suite, instance_hash(record.instance), record.seed};
}

RunStore::RunStore(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) {
    io::write_file_atomic(path_, io::header_line(kSchema) + "\n");
    return;
  }
  std::string content;
  {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path_.string());
    std::stringstream buf;
    buf << in.rdbuf();
    content = buf.str();
  }
  const auto last_newline = content.find_last_of('\n');
  const std::size_t complete = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (complete != content.size()) {
    content.resize(complete);
    if (content.empty()) content = io::header_line(kSchema) + "\n";
    io::write_file_atomic(path_, content);
  }

  std::istringstream in(content);
  std::string line;
  std::getline(in, line);
  io::check_header(line, kSchema, path_.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RunRecord r = parse_record(line);
    index_.insert(key_of(r));
    records_.push_back(std::move(r));
  }
}

bool RunStore::append(const RunRecord& record) {
  const StoreKey key = key_of(record);
  if (index_.count(key)) return false;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorKind::Io, "cannot append to " + path_.string());
  out << serialize_record(record) << "\n";
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "append failed for " + path_.string());
  index_.insert(key);
  records_.push_back(record);
  return true;
}

}  // namespace cmawiz
