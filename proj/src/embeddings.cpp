#include "citegraph/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "citegraph/common/error.hpp"
#include "citegraph/common/io.hpp"
#include "citegraph/common/parallel.hpp"

using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "binary vector cache assumes a little-endian host");

namespace citegraph::embeddings {

EmbeddingSet::EmbeddingSet(std::string model_name, uint32_t dim, std::vector<std::string> ids,
                           std::vector<float> data)
    : model_name_(std::move(model_name)), dim_(dim), ids_(std::move(ids)),
      data_(std::move(data)) {
    if (ids_.size() * dim_ != data_.size())
        throw std::invalid_argument("embedding data size does not match ids * dim");
    std::vector<size_t> order(ids_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return ids_[a] < ids_[b]; });
    for (size_t i = 0; i + 1 < order.size(); ++i)
        if (ids_[order[i]] == ids_[order[i + 1]])
            throw InputError("duplicate embedding id: " + ids_[order[i]]);
    if (!std::is_sorted(ids_.begin(), ids_.end())) {
        std::vector<std::string> new_ids(ids_.size());
        std::vector<float> new_data(data_.size());
        for (size_t i = 0; i < order.size(); ++i) {
            new_ids[i] = std::move(ids_[order[i]]);
            std::memcpy(new_data.data() + i * dim_, data_.data() + order[i] * dim_,
                        dim_ * sizeof(float));
        }
        ids_ = std::move(new_ids);
        data_ = std::move(new_data);
    }
}

bool EmbeddingSet::contains(const std::string& id) const { return row_index(id) >= 0; }

int64_t EmbeddingSet::row_index(const std::string& id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return -1;
    return it - ids_.begin();
}

const float* EmbeddingSet::vector_of(const std::string& id) const {
    int64_t i = row_index(id);
    if (i < 0) throw std::out_of_range("no vector for id: " + id);
    return row(static_cast<size_t>(i));
}

EmbeddingSet EmbeddingSet::normalized() const {
    std::vector<float> data(data_.size());
    for (size_t i = 0; i < ids_.size(); ++i) {
        const float* src = row(i);
        double norm2 = 0;
        for (uint32_t d = 0; d < dim_; ++d) norm2 += static_cast<double>(src[d]) * src[d];
        if (norm2 == 0.0) throw InputError("zero vector cannot be normalized: " + ids_[i]);
        double inv = 1.0 / std::sqrt(norm2);
        for (uint32_t d = 0; d < dim_; ++d)
            data[i * dim_ + d] = static_cast<float>(src[d] * inv);
    }
    EmbeddingSet out;
    out.model_name_ = model_name_;
    out.dim_ = dim_;
    out.ids_ = ids_;
    out.data_ = std::move(data);
    return out;
}

double EmbeddingSet::max_norm_deviation() const {
    double worst = 0;
    for (size_t i = 0; i < ids_.size(); ++i) {
        const float* v = row(i);
        double norm2 = 0;
        for (uint32_t d = 0; d < dim_; ++d) norm2 += static_cast<double>(v[d]) * v[d];
        worst = std::max(worst, std::abs(std::sqrt(norm2) - 1.0));
    }
    return worst;
}

EmbeddingSet load_vectors(const std::string& path, uint32_t expected_dim,
                          const std::string& model_name) {
    std::vector<std::string> ids;
    std::vector<float> data;
    uint32_t dim = expected_dim;
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(n) + ": " + e.what());
        }
        if (!j.contains("id") || !j["id"].is_string())
            throw InputError(path + ":" + std::to_string(n) + ": missing id");
        std::string id = j["id"].get<std::string>();
        if (!j.contains("vector") || !j["vector"].is_array())
            throw InputError("missing vector for id " + id);
        const auto& vec = j["vector"];
        if (dim == 0) dim = static_cast<uint32_t>(vec.size());
        if (vec.size() != dim)
            throw InputError("dimension mismatch for id " + id + ": got " +
                             std::to_string(vec.size()) + ", expected " + std::to_string(dim));
        for (const auto& x : vec) {
            if (!x.is_number()) throw InputError("non-numeric component for id " + id);
            double v = x.get<double>();
            if (!std::isfinite(v)) throw InputError("non-finite component for id " + id);
            data.push_back(static_cast<float>(v));
        }
        ids.push_back(std::move(id));
    });
    if (dim == 0) throw InputError("empty vector file: " + path);
    std::string name = model_name;
    if (name.empty()) {
        size_t slash = path.find_last_of('/');
        name = slash == std::string::npos ? path : path.substr(slash + 1);
        size_t dot = name.find_last_of('.');
        if (dot != std::string::npos) name = name.substr(0, dot);
    }
    return EmbeddingSet(std::move(name), dim, std::move(ids), std::move(data));
}

void write_vectors_jsonl(const std::string& path, const EmbeddingSet& set) {
    io::atomic_write(path, [&](std::ostream& out) {
        for (size_t i = 0; i < set.size(); ++i) {
            out << "{\"id\":" << json(set.ids()[i]).dump() << ",\"vector\":[";
            const float* v = set.row(i);
            for (uint32_t d = 0; d < set.dim(); ++d) {
                if (d) out << ',';
                out << io::format_double(v[d]);
            }
            out << "]}\n";
        }
    });
}

namespace {
constexpr char kBinaryMagic[8] = {'C', 'G', 'E', 'M', 'B', '0', '1', '\n'};
}

void write_vectors_binary(const std::string& path, const EmbeddingSet& set) {
    io::atomic_write(path, [&](std::ostream& out) {
        out.write(kBinaryMagic, sizeof(kBinaryMagic));
        uint32_t dim = set.dim();
        uint64_t count = set.size();
        out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
        out.write(reinterpret_cast<const char*>(&count), sizeof(count));
        for (const auto& id : set.ids()) {
            uint32_t len = static_cast<uint32_t>(id.size());
            out.write(reinterpret_cast<const char*>(&len), sizeof(len));
            out.write(id.data(), len);
        }
        if (count > 0)
            out.write(reinterpret_cast<const char*>(set.row(0)),
                      static_cast<std::streamsize>(sizeof(float) * dim * count));
    });
}

EmbeddingSet load_vectors_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0)
        throw InputError("not a vector cache file: " + path);
    uint32_t dim = 0;
    uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in || dim == 0) throw InputError("corrupt vector cache header: " + path);
    std::vector<std::string> ids(count);
    for (auto& id : ids) {
        uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof(len));
        if (!in || len > (1u << 20)) throw InputError("corrupt id table: " + path);
        id.resize(len);
        in.read(id.data(), len);
    }
    std::vector<float> data(dim * count);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(sizeof(float) * data.size()));
    if (!in) throw InputError("truncated vector cache: " + path);
    size_t slash = path.find_last_of('/');
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    return EmbeddingSet(name, dim, std::move(ids), std::move(data));
}

NeighborTable topk_neighbors(const EmbeddingSet& set, const std::vector<std::string>& pool,
                             uint32_t k, int workers) {
    std::vector<std::string> pool_ids(pool);
    std::sort(pool_ids.begin(), pool_ids.end());
    pool_ids.erase(std::unique(pool_ids.begin(), pool_ids.end()), pool_ids.end());
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (static_cast<size_t>(k) >= pool_ids.size())
        throw std::invalid_argument("k (" + std::to_string(k) +
                                    ") must be smaller than the pool (" +
                                    std::to_string(pool_ids.size()) + ")");

    const uint32_t dim = set.dim();
    const size_t n = pool_ids.size();
    std::vector<float> matrix(n * dim);
    for (size_t i = 0; i < n; ++i) {
        int64_t r = set.row_index(pool_ids[i]);
        if (r < 0) throw InputError("pool id has no vector: " + pool_ids[i]);
        std::memcpy(matrix.data() + i * dim, set.row(static_cast<size_t>(r)),
                    dim * sizeof(float));
    }

    NeighborTable table;
    table.k_max = k;
    table.pool_ids = std::move(pool_ids);
    table.flat.resize(n * k);

    // (cosine desc, id asc) ordering; x better than y.
    auto better = [](const Neighbor& x, const Neighbor& y) {
        if (x.cosine != y.cosine) return x.cosine > y.cosine;
        return x.pool_index < y.pool_index;
    };
    parallel_chunks(n, workers, [&, better](size_t qb, size_t qe) {
        auto heap_cmp = [&](const Neighbor& x, const Neighbor& y) { return better(x, y); };
        std::vector<Neighbor> heap;
        heap.reserve(k + 1);
        for (size_t q = qb; q < qe; ++q) {
            const float* qv = matrix.data() + q * dim;
            heap.clear();
            for (size_t j = 0; j < n; ++j) {
                if (j == q) continue;
                const float* dv = matrix.data() + j * dim;
                double dot = 0;
                for (uint32_t d = 0; d < dim; ++d)
                    dot += static_cast<double>(qv[d]) * static_cast<double>(dv[d]);
                Neighbor cand{static_cast<uint32_t>(j), dot};
                if (heap.size() < k) {
                    heap.push_back(cand);
                    std::push_heap(heap.begin(), heap.end(), heap_cmp);
                } else if (better(cand, heap.front())) {
                    std::pop_heap(heap.begin(), heap.end(), heap_cmp);
                    heap.back() = cand;
                    std::push_heap(heap.begin(), heap.end(), heap_cmp);
                }
            }
            std::sort(heap.begin(), heap.end(), better);
            std::copy(heap.begin(), heap.end(), table.flat.begin() + q * k);
        }
    });
    return table;
}

void write_neighbors_jsonl(const std::string& path, const NeighborTable& table) {
    io::atomic_write(path, [&](std::ostream& out) {
        for (size_t q = 0; q < table.pool_ids.size(); ++q) {
            out << "{\"query_id\":" << json(table.pool_ids[q]).dump() << ",\"neighbors\":[";
            const Neighbor* row = table.row(q);
            for (uint32_t i = 0; i < table.k_max; ++i) {
                if (i) out << ',';
                out << "{\"id\":" << json(table.neighbor_id(row[i])).dump()
                    << ",\"cos\":" << io::format_double(row[i].cosine) << '}';
            }
            out << "]}\n";
        }
    });
}

NeighborTable read_neighbors_jsonl(const std::string& path) {
    std::vector<std::string> query_ids;
    std::vector<std::vector<std::pair<std::string, double>>> rows;
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(n) + ": " + e.what());
        }
        query_ids.push_back(j.at("query_id").get<std::string>());
        std::vector<std::pair<std::string, double>> row;
        for (const auto& nb : j.at("neighbors"))
            row.emplace_back(nb.at("id").get<std::string>(), nb.at("cos").get<double>());
        rows.push_back(std::move(row));
    });
    if (rows.empty()) throw InputError("empty neighbor file: " + path);
    size_t k = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != k) throw InputError("ragged neighbor rows in " + path);

    std::vector<size_t> order(query_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return query_ids[a] < query_ids[b]; });

    NeighborTable table;
    table.k_max = static_cast<uint32_t>(k);
    for (size_t i : order) table.pool_ids.push_back(query_ids[i]);
    auto index_of = [&](const std::string& id) -> uint32_t {
        auto it = std::lower_bound(table.pool_ids.begin(), table.pool_ids.end(), id);
        if (it == table.pool_ids.end() || *it != id)
            throw InputError("neighbor id outside the query pool: " + id);
        return static_cast<uint32_t>(it - table.pool_ids.begin());
    };
    table.flat.resize(table.pool_ids.size() * k);
    for (size_t out_row = 0; out_row < order.size(); ++out_row) {
        const auto& src = rows[order[out_row]];
        for (size_t i = 0; i < k; ++i)
            table.flat[out_row * k + i] = {index_of(src[i].first), src[i].second};
    }
    return table;
}

}  // namespace citegraph::embeddings
