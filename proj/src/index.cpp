#include "mdr/index.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace mdr {

FlatIPIndex FlatIPIndex::build(const Matrix& vectors,
                               const std::vector<std::int64_t>& ids) {
  if (vectors.rows() == 0) throw std::invalid_argument("empty index input");
  if (static_cast<std::size_t>(vectors.rows()) != ids.size()) {
    throw std::invalid_argument("vectors/ids size mismatch");
  }
  FlatIPIndex index;
  index.vectors_ = vectors;
  index.ids_ = ids;
  return index;
}

std::vector<SearchHit> FlatIPIndex::search(const Vector& query,
                                           std::size_t k) const {
  if (query.size() != vectors_.cols()) {
    throw std::invalid_argument("query dimension mismatch");
  }
  if (k == 0) throw std::invalid_argument("k must be >= 1");

  const Vector scores = vectors_ * query;
  const std::size_t n = ids_.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});

  const std::size_t take = std::min(k, n);
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids_[a] < ids_[b];
  };
  std::partial_sort(idx.begin(), idx.begin() + take, idx.end(), better);

  std::vector<SearchHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    hits.push_back({ids_[idx[i]], scores[idx[i]]});
  }
  return hits;
}

void FlatIPIndex::save(const std::string& vectors_path,
                       const std::string& idmap_path) const {
  std::ofstream out(vectors_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write index: " + vectors_path);
  const std::int64_t n = vectors_.rows();
  const std::int64_t d = vectors_.cols();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < d; ++j) {
      const float v = static_cast<float>(vectors_(i, j));
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }

  std::ofstream ids(idmap_path);
  if (!ids) throw std::runtime_error("cannot write id map: " + idmap_path);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    nlohmann::json obj;
    obj["row"] = i;
    obj["id"] = ids_[i];
    ids << obj.dump() << '\n';
  }
}

FlatIPIndex FlatIPIndex::load(const std::string& vectors_path,
                              const std::string& idmap_path) {
  std::ifstream in(vectors_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index: " + vectors_path);
  std::int64_t n = 0, d = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&d), sizeof(d));
  if (!in || n <= 0 || d <= 0) {
    throw std::runtime_error("malformed index header: " + vectors_path);
  }
  Matrix vectors(n, d);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < d; ++j) {
      float v = 0.f;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      vectors(i, j) = v;
    }
  }
  if (!in) throw std::runtime_error("truncated index file: " + vectors_path);

  std::ifstream ids_in(idmap_path);
  if (!ids_in) throw std::runtime_error("cannot open id map: " + idmap_path);
  std::vector<std::int64_t> ids(static_cast<std::size_t>(n), 0);
  std::string line;
  while (std::getline(ids_in, line)) {
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line);
    ids.at(obj["row"].get<std::size_t>()) = obj["id"].get<std::int64_t>();
  }
  return build(vectors, ids);
}

}  // namespace mdr
