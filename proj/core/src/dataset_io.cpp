// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/dataset_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "imbalgat/error.hpp"

namespace imbalgat {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  size_t i = 0, n = line.size();
  while (i < n) {
    while (i < n && (line[i] == '\t' || line[i] == ' ' || line[i] == '\r')) ++i;
    size_t j = i;
    while (j < n && line[j] != '\t' && line[j] != ' ' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

ContentData parse_content(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open content file: " + path);
  ContentData data;
  std::vector<double> feat;
  std::unordered_map<std::string, int32_t> class_index;
  std::string line;
  size_t m = 0, line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() < 3)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected id, features, class");
    size_t row_m = tok.size() - 2;
    if (m == 0)
      m = row_m;
    else if (row_m != m)
      throw DataError(path + ":" + std::to_string(line_no) + ": inconsistent feature count (" +
                      std::to_string(row_m) + " vs " + std::to_string(m) + ")");
    const std::string& id = tok.front();
    if (data.id_index.count(id))
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate node id " + id);
    data.id_index.emplace(id, static_cast<int32_t>(data.node_ids.size()));
    data.node_ids.push_back(id);
    for (size_t i = 1; i + 1 < tok.size(); ++i) {
      const std::string& f = tok[i];
      if (f == "0")
        feat.push_back(0.0);
      else if (f == "1")
        feat.push_back(1.0);
      else
        throw DataError(path + ":" + std::to_string(line_no) + ": feature values must be 0 or 1");
    }
    const std::string& cls = tok.back();
    auto it = class_index.find(cls);
    if (it == class_index.end()) {
      it = class_index.emplace(cls, static_cast<int32_t>(data.class_names.size())).first;
      data.class_names.push_back(cls);
    }
    data.labels.push_back(it->second);
  }
  if (data.node_ids.empty()) throw DataError("content file is empty: " + path);
  data.features = Tensor(data.node_ids.size(), m, std::move(feat));
  return data;
}

CitesData parse_cites(const std::string& path,
                      const std::unordered_map<std::string, int32_t>& id_index) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open cites file: " + path);
  CitesData out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    out.raw_lines++;
    if (tok.size() != 2)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected two ids per line");
    auto a = id_index.find(tok[0]);
    auto b = id_index.find(tok[1]);
    if (a == id_index.end() || b == id_index.end()) {
      out.skipped++;
      continue;
    }
    out.edges.emplace_back(a->second, b->second);
  }
  return out;
}

GraphDataset build_graph(ContentData content, const CitesData& cites, std::string name) {
  size_t v_count = content.node_ids.size();
  std::set<std::pair<int32_t, int32_t>> undirected;
  for (auto [u, v] : cites.edges) {
    if (u == v) continue;  // self-citations dropped; self-loops added below
    undirected.emplace(std::min(u, v), std::max(u, v));
  }

  std::vector<std::vector<int32_t>> adj(v_count);
  for (size_t v = 0; v < v_count; ++v) adj[v].push_back(static_cast<int32_t>(v));
  for (auto [u, v] : undirected) {
    adj[static_cast<size_t>(u)].push_back(v);
    adj[static_cast<size_t>(v)].push_back(u);
  }

  GraphDataset ds;
  ds.csr.row_offsets.reserve(v_count + 1);
  ds.csr.row_offsets.push_back(0);
  for (size_t v = 0; v < v_count; ++v) {
    std::sort(adj[v].begin(), adj[v].end());
    ds.csr.col_indices.insert(ds.csr.col_indices.end(), adj[v].begin(), adj[v].end());
    ds.csr.row_offsets.push_back(static_cast<int64_t>(ds.csr.col_indices.size()));
  }

  // row-normalize features; all-zero rows stay all-zero
  size_t m = content.features.cols();
  auto& f = content.features.data_mut();
  for (size_t v = 0; v < v_count; ++v) {
    double s = 0.0;
    for (size_t j = 0; j < m; ++j) s += f[v * m + j];
    if (s > 0.0)
      for (size_t j = 0; j < m; ++j) f[v * m + j] /= s;
  }

  ds.name = std::move(name);
  ds.num_nodes = v_count;
  ds.num_classes = content.class_names.size();
  ds.features = std::move(content.features);
  ds.labels = std::move(content.labels);
  ds.fp = csr_fingerprint(ds.csr);
  ds.raw_edge_count = undirected.size();
  ds.raw_cite_lines = cites.raw_lines;
  ds.skipped_cite_lines = cites.skipped;
  ds.node_order = std::move(content.node_ids);
  ds.class_names = std::move(content.class_names);
  return ds;
}

GraphDataset load_dataset_text(const std::string& dir, const std::string& name) {
  std::string content_path = dir + "/" + name + ".content";
  std::string cites_path = dir + "/" + name + ".cites";
  ContentData content = parse_content(content_path);
  CitesData cites = parse_cites(cites_path, content.id_index);
  return build_graph(std::move(content), cites, name);
}

uint64_t hash_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  uint64_t h = 1469598103934665603ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

namespace {

constexpr char kCacheMagic[5] = {'I', 'G', 'A', 'T', '1'};
constexpr uint32_t kCacheVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void put_vec(std::ofstream& out, const std::vector<T>& v) {
  put(out, static_cast<uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

void put_str(std::ofstream& out, const std::string& s) {
  put(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("truncated cache file");
  return v;
}

template <class T>
std::vector<T> get_vec(std::ifstream& in) {
  uint64_t n = get<uint64_t>(in);
  std::vector<T> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw DataError("truncated cache file");
  return v;
}

std::string get_str(std::ifstream& in) {
  uint32_t n = get<uint32_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw DataError("truncated cache file");
  return s;
}

}  // namespace

void save_cache(const std::string& path, const GraphDataset& ds, uint64_t source_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write cache file: " + path);
  out.write(kCacheMagic, sizeof(kCacheMagic));
  put(out, kCacheVersion);
  put(out, source_hash);
  put_str(out, ds.name);
  put(out, static_cast<uint64_t>(ds.num_nodes));
  put(out, static_cast<uint64_t>(ds.num_classes));
  put(out, static_cast<uint64_t>(ds.num_features()));
  put(out, static_cast<uint64_t>(ds.raw_edge_count));
  put(out, static_cast<uint64_t>(ds.raw_cite_lines));
  put(out, static_cast<uint64_t>(ds.skipped_cite_lines));
  put_vec(out, ds.labels);
  put_vec(out, ds.csr.row_offsets);
  put_vec(out, ds.csr.col_indices);
  put_vec(out, ds.features.data());
  put(out, static_cast<uint64_t>(ds.node_order.size()));
  for (const auto& s : ds.node_order) put_str(out, s);
  put(out, static_cast<uint64_t>(ds.class_names.size()));
  for (const auto& s : ds.class_names) put_str(out, s);
}

GraphDataset load_cache(const std::string& path, uint64_t expected_source_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open cache file: " + path);
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 5, kCacheMagic))
    throw DataError("bad cache magic: " + path);
  if (get<uint32_t>(in) != kCacheVersion) throw DataError("unsupported cache version");
  if (get<uint64_t>(in) != expected_source_hash)
    throw DataError("cache is stale (source files changed)");
  GraphDataset ds;
  ds.name = get_str(in);
  ds.num_nodes = get<uint64_t>(in);
  ds.num_classes = get<uint64_t>(in);
  uint64_t m = get<uint64_t>(in);
  ds.raw_edge_count = get<uint64_t>(in);
  ds.raw_cite_lines = get<uint64_t>(in);
  ds.skipped_cite_lines = get<uint64_t>(in);
  ds.labels = get_vec<int32_t>(in);
  ds.csr.row_offsets = get_vec<int64_t>(in);
  ds.csr.col_indices = get_vec<int32_t>(in);
  ds.features = Tensor(ds.num_nodes, m, get_vec<double>(in));
  uint64_t n_ids = get<uint64_t>(in);
  ds.node_order.reserve(n_ids);
  for (uint64_t i = 0; i < n_ids; ++i) ds.node_order.push_back(get_str(in));
  uint64_t n_cls = get<uint64_t>(in);
  for (uint64_t i = 0; i < n_cls; ++i) ds.class_names.push_back(get_str(in));
  ds.fp = csr_fingerprint(ds.csr);
  return ds;
}

GraphDataset load_dataset(const std::string& dir, const std::string& name,
                          bool use_cache, const std::string& cache_dir) {
  std::string content_path = dir + "/" + name + ".content";
  std::string cites_path = dir + "/" + name + ".cites";
  if (!std::filesystem::exists(content_path))
    throw DataError("missing dataset file: " + content_path);
  if (!std::filesystem::exists(cites_path))
    throw DataError("missing dataset file: " + cites_path);

  std::string cdir = cache_dir;
  if (cdir.empty()) {
    if (const char* env = std::getenv("IMBALGAT_CACHE_DIR")) cdir = env;
  }
  if (!use_cache || cdir.empty()) return load_dataset_text(dir, name);

  uint64_t source_hash = hash_file_bytes(content_path) ^ (hash_file_bytes(cites_path) << 1);
  std::filesystem::create_directories(cdir);
  std::string cache_path = cdir + "/" + name + ".igat";
  if (std::filesystem::exists(cache_path)) {
    try {
      return load_cache(cache_path, source_hash);
    } catch (const DataError&) {
      // stale or corrupt cache: rebuild from text
    }
  }
  GraphDataset ds = load_dataset_text(dir, name);
  save_cache(cache_path, ds, source_hash);
  return ds;
}

}  // namespace imbalgat
