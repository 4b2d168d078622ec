#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mdr/encoder.hpp"

namespace mdr {

struct SearchHit {
  std::int64_t id = 0;
  double score = 0.0;
};

// Exact inner-product index over a dense row matrix. Immutable after build.
class FlatIPIndex {
 public:
  static FlatIPIndex build(const Matrix& vectors,
                           const std::vector<std::int64_t>& ids);

  std::size_t size() const { return ids_.size(); }
  Eigen::Index dim() const { return vectors_.cols(); }

  // Top-min(K, n) by inner product, ties by ascending id, scores exact.
  std::vector<SearchHit> search(const Vector& query, std::size_t k) const;

  // Binary layout: int64 n, int64 d, then n*d little-endian float32 rows.
  // The id map goes to a JSONL sidecar.
  void save(const std::string& vectors_path,
            const std::string& idmap_path) const;
  static FlatIPIndex load(const std::string& vectors_path,
                          const std::string& idmap_path);

  const Matrix& vectors() const { return vectors_; }
  const std::vector<std::int64_t>& ids() const { return ids_; }

 private:
  Matrix vectors_;  // n x d
  std::vector<std::int64_t> ids_;
};

}  // namespace mdr
