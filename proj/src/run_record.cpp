#include "cmawiz/run_record.hpp"

#include <limits>

#include "cmawiz/error.hpp"
#include "cmawiz/io.hpp"

namespace cmawiz {

bool RunRecord::operator==(const RunRecord& o) const {
  return algorithm == o.algorithm && variant == o.variant && suite == o.suite && config == o.config &&
         instance == o.instance && seed == o.seed && history == o.history && recommendation == o.recommendation &&
         final_loss == o.final_loss;
}

double best_loss_at(const std::vector<HistoryPoint>& history, long evaluations) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : history) {
    if (h.evaluations > evaluations) break;
    best = h.best_loss;
  }
  return best;
}

std::string serialize_record(const RunRecord& record) {
  io::Json j;
  j["algorithm"] = record.algorithm;
  j["variant"] = record.variant;
  j["suite"] = record.suite;
  j["config"] = record.config ? io::to_json(*record.config) : io::Json(nullptr);
  j["instance"] = io::to_json(record.instance);
  j["seed"] = record.seed;
  io::Json history = io::Json::array();
  for (const auto& h : record.history) history.push_back(io::Json::array({h.evaluations, io::real(h.best_loss)}));
  j["history"] = std::move(history);
  j["recommendation"] = io::to_json(record.recommendation);
  j["final_loss"] = io::real(record.final_loss);
  return j.dump();
}

RunRecord parse_record(const std::string& line) {
  io::Json j;
  try {
    j = io::Json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed run record: ") + e.what());
  }
  try {
    RunRecord r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.variant = j.at("variant").get<std::string>();
    r.suite = j.at("suite").get<std::string>();
    if (!j.at("config").is_null()) r.config = io::config_from_json(j.at("config"));
    r.instance = io::instance_from_json(j.at("instance"));
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& h : j.at("history")) r.history.push_back({h.at(0).get<long>(), io::real(h.at(1), "history")});
    r.recommendation = io::vector_from_json(j.at("recommendation"), "recommendation");
    r.final_loss = io::real(j.at("final_loss"), "final_loss");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed run record: ") + e.what());
  }
}

}  // namespace cmawiz
