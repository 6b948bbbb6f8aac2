#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace citegraph::embeddings {

// Dense paper vectors, one fixed dimension per set. Ids are stored sorted;
// row i belongs to ids()[i].
class EmbeddingSet {
  public:
    EmbeddingSet() = default;
    EmbeddingSet(std::string model_name, uint32_t dim, std::vector<std::string> ids,
                 std::vector<float> data);

    const std::string& model_name() const { return model_name_; }
    uint32_t dim() const { return dim_; }
    size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }

    bool contains(const std::string& id) const;
    // Throws std::out_of_range if absent.
    const float* vector_of(const std::string& id) const;
    const float* row(size_t i) const { return data_.data() + i * dim_; }
    int64_t row_index(const std::string& id) const;  // -1 if absent

    // L2-normalize every vector (double accumulation). Throws InputError
    // naming the id of any zero vector.
    EmbeddingSet normalized() const;

    // Max |norm - 1| over all vectors.
    double max_norm_deviation() const;

  private:
    std::string model_name_;
    uint32_t dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<float> data_;
};

// JSON-lines {"id": ..., "vector": [...]}; the canonical text format.
// expected_dim 0 means "infer from the first row". Errors name the
// offending id (dimension mismatch, duplicate, non-finite component).
EmbeddingSet load_vectors(const std::string& path, uint32_t expected_dim = 0,
                          const std::string& model_name = "");
void write_vectors_jsonl(const std::string& path, const EmbeddingSet& set);

// Packed little-endian float32 cache with a UTF-8 id table up front.
void write_vectors_binary(const std::string& path, const EmbeddingSet& set);
EmbeddingSet load_vectors_binary(const std::string& path);

struct Neighbor {
    uint32_t pool_index;  // index into NeighborTable::pool_ids
    double cosine;
};

struct NeighborTable {
    uint32_t k_max = 0;
    std::vector<std::string> pool_ids;   // sorted
    std::vector<Neighbor> flat;          // pool_ids.size() * k_max rows
    const Neighbor* row(size_t query_index) const { return flat.data() + query_index * k_max; }
    const std::string& neighbor_id(const Neighbor& n) const { return pool_ids[n.pool_index]; }
};

// Exact top-k cosines within the pool, self excluded, ties broken by
// ascending neighbor id. Dot products accumulate in double. Throws on
// k >= |pool| or on pool ids missing from the set.
NeighborTable topk_neighbors(const EmbeddingSet& set, const std::vector<std::string>& pool,
                             uint32_t k, int workers = 1);

// JSON-lines {"query_id": ..., "neighbors": [{"id": ..., "cos": ...}]}.
void write_neighbors_jsonl(const std::string& path, const NeighborTable& table);
NeighborTable read_neighbors_jsonl(const std::string& path);

}  // namespace citegraph::embeddings
