#include "mdr/pool.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mdr {

void save_candidate_pools(const std::vector<CandidatePool>& pools,
                          const std::string& path, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pool file: " + path);
  if (!header.empty()) out << header << '\n';
  for (const auto& pool : pools) {
    nlohmann::json obj;
    obj["qid"] = pool.concept_set_id;
    auto& ids = obj["ids"] = nlohmann::json::array();
    auto& scores = obj["scores"] = nlohmann::json::array();
    for (const auto& [id, score] : pool.entries) {
      ids.push_back(id);
      scores.push_back(score);
    }
    out << obj.dump() << '\n';
  }
}

std::vector<CandidatePool> load_candidate_pools(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pool file: " + path);
  std::vector<CandidatePool> pools;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line);
    if (!obj.contains("qid")) continue;  // header line
    CandidatePool pool;
    pool.concept_set_id = obj["qid"].get<std::int64_t>();
    const auto& ids = obj["ids"];
    const auto& scores = obj["scores"];
    for (std::size_t i = 0; i < ids.size(); ++i) {
      pool.entries.emplace_back(ids[i].get<std::int64_t>(),
                                scores[i].get<double>());
    }
    pools.push_back(std::move(pool));
  }
  return pools;
}

}  // namespace mdr
