#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mdr {

// Ordered candidate list for one concept set. Plays the roles of the
// retrieved pool and the re-ranked pool.
struct CandidatePool {
  std::int64_t concept_set_id = 0;
  std::vector<std::pair<std::int64_t, double>> entries;  // (sentence id, score)
};

void save_candidate_pools(const std::vector<CandidatePool>& pools,
                          const std::string& path, const std::string& header);
std::vector<CandidatePool> load_candidate_pools(const std::string& path);

}  // namespace mdr
