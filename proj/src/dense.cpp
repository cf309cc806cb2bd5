#include "citepred/dense.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "citepred/text.hpp"

namespace citepred {

using nlohmann::json;

std::string_view to_string(SearchMode mode) {
  return mode == SearchMode::exact ? "exact" : "approximate";
}

SearchMode parse_search_mode(std::string_view text) {
  if (text == "exact") return SearchMode::exact;
  if (text == "approximate" || text == "approx" || text == "ann") return SearchMode::approximate;
  throw ValidationError("unknown search mode '" + std::string(text) + "'");
}

namespace {

constexpr char kVectorMagic[8] = {'C', 'P', 'V', 'E', 'C', 'S', '0', '1'};
constexpr char kIndexMagic[8] = {'C', 'P', 'D', 'I', 'D', 'X', '0', '1'};

template <typename T>
T byteswap_if_needed(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <typename T>
void write_le(std::ostream& out, T v) {
  v = byteswap_if_needed(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw LoadError("unexpected end of binary vector data");
  return byteswap_if_needed(v);
}

void write_payload(std::ostream& out, const std::vector<std::string>& ids,
                   const DenseRows<float>& rows) {
  write_le<std::uint64_t>(out, ids.size());
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rows.cols()));
  for (const auto& id : ids) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) write_le<float>(out, rows(r, c));
  }
}

std::vector<EmbeddingVector> read_payload(std::istream& in) {
  const auto count = read_le<std::uint64_t>(in);
  const auto dim = read_le<std::uint32_t>(in);
  if (count > (1ull << 32)) throw LoadError("implausible vector count");
  std::vector<EmbeddingVector> vectors(count);
  for (auto& v : vectors) {
    const auto len = read_le<std::uint32_t>(in);
    if (len > (1u << 20)) throw LoadError("implausible id length");
    v.id.resize(len);
    in.read(v.id.data(), len);
    if (!in) throw LoadError("unexpected end of id table");
  }
  for (auto& v : vectors) {
    v.values.resize(dim);
    for (std::uint32_t c = 0; c < dim; ++c) v.values[c] = read_le<float>(in);
  }
  return vectors;
}

void validate_or_throw(const std::vector<EmbeddingVector>& vectors) {
  try {
    validate_embeddings(vectors);
  } catch (const ValidationError& e) {
    throw LoadError(e.what());
  }
}

}  // namespace

std::vector<EmbeddingVector> load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (in && std::memcmp(magic, kVectorMagic, sizeof magic) == 0) {
    auto vectors = read_payload(in);
    validate_or_throw(vectors);
    return vectors;
  }
  in.clear();
  in.seekg(0);

  std::vector<EmbeddingVector> vectors;
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    EmbeddingVector v;
    try {
      const json j = json::parse(line);
      v.id = j.at("id").get<std::string>();
      const auto& arr = j.at("vector");
      if (!arr.is_array()) throw LoadError("'vector' must be an array", line_no);
      v.values.resize(static_cast<Eigen::Index>(arr.size()));
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
          throw LoadError("vector '" + v.id + "' has non-finite values", line_no);
        }
        v.values[static_cast<Eigen::Index>(i)] = arr[i].get<float>();
      }
    } catch (const json::exception& e) {
      throw LoadError(std::string("malformed vector record: ") + e.what(), line_no);
    }
    if (dim < 0) dim = v.values.size();
    if (v.values.size() != dim) {
      throw LoadError("vector '" + v.id + "' has dimension " + std::to_string(v.values.size()) +
                          ", expected " + std::to_string(dim),
                      line_no);
    }
    if (!v.values.allFinite()) {
      throw LoadError("vector '" + v.id + "' has non-finite values", line_no);
    }
    vectors.push_back(std::move(v));
  }
  validate_or_throw(vectors);
  return vectors;
}

void save_vectors_jsonl(const std::vector<EmbeddingVector>& vectors,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  for (const auto& v : vectors) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.values.size(); ++i) arr.push_back(v.values[i]);
    out << json{{"id", v.id}, {"vector", std::move(arr)}}.dump() << '\n';
  }
}

void save_vectors_binary(const std::vector<EmbeddingVector>& vectors,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(kVectorMagic, sizeof kVectorMagic);
  const Eigen::Index dim = vectors.empty() ? 0 : vectors.front().values.size();
  DenseRows<float> rows(static_cast<Eigen::Index>(vectors.size()), dim);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].values.size() != dim) {
      throw ValidationError("vector '" + vectors[i].id + "' has inconsistent dimension");
    }
    rows.row(static_cast<Eigen::Index>(i)) = vectors[i].values.transpose();
    ids.push_back(vectors[i].id);
  }
  write_payload(out, ids, rows);
}

void save_dense_index(const DenseIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(kIndexMagic, sizeof kIndexMagic);
  write_le<std::uint8_t>(out, static_cast<std::uint8_t>(index.level()));
  write_payload(out, index.ids(), index.rows());
}

DenseIndex load_dense_index(const std::filesystem::path& path, const IvfParams& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kIndexMagic, sizeof magic) != 0) {
    throw LoadError("'" + path.string() + "' is not a dense index file");
  }
  const auto level = read_le<std::uint8_t>(in);
  if (level < 1 || level > 3) throw LoadError("invalid corpus level in dense index");
  auto vectors = read_payload(in);
  validate_or_throw(vectors);
  return DenseIndex::build(vectors, static_cast<CorpusLevel>(level), params);
}

}  // namespace citepred
