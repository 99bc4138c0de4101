#include "star/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace star {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'C', 'P'};
constexpr uint32_t kFormatVersion = 1;
enum class Kind : uint8_t { Star = 0, Geo = 1, Alpha = 2 };

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
uint32_t read_u32(std::istream& is) {
  uint32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
uint64_t read_u64(std::istream& is) {
  uint64_t v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void write_tensor(std::ostream& os, const std::string& name, const ad::Matrix& m) {
  write_u32(os, static_cast<uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u64(os, static_cast<uint64_t>(m.rows()));
  write_u64(os, static_cast<uint64_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m.size())));
}

struct NamedTensor {
  std::string name;
  ad::Matrix m;
};

NamedTensor read_tensor(std::istream& is) {
  NamedTensor t;
  uint32_t len = read_u32(is);
  t.name.resize(len);
  is.read(t.name.data(), len);
  uint64_t rows = read_u64(is), cols = read_u64(is);
  t.m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  is.read(reinterpret_cast<char*>(t.m.data()),
          static_cast<std::streamsize>(sizeof(double) * rows * cols));
  return t;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, Kind expect,
                      nlohmann::json* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("bad checkpoint magic: " + path);
  uint32_t ver = read_u32(is);
  if (ver != kFormatVersion)
    throw std::runtime_error("unsupported checkpoint version in " + path);
  uint8_t kind;
  is.read(reinterpret_cast<char*>(&kind), 1);
  if (kind != static_cast<uint8_t>(expect))
    throw std::runtime_error("checkpoint kind mismatch: " + path);
  uint32_t hlen = read_u32(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), hlen);
  *header = nlohmann::json::parse(hs);
  return is;
}

void write_preamble(std::ostream& os, Kind kind, const nlohmann::ordered_json& header) {
  os.write(kMagic, 4);
  write_u32(os, kFormatVersion);
  uint8_t k = static_cast<uint8_t>(kind);
  os.write(reinterpret_cast<const char*>(&k), 1);
  std::string hs = header.dump();
  write_u32(os, static_cast<uint32_t>(hs.size()));
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));
}

void write_refs(std::ostream& os, const std::vector<ad::ParamRef>& refs) {
  write_u64(os, refs.size());
  for (const auto& r : refs) write_tensor(os, r.name, *r.tensor);
}

void read_refs(std::istream& is, const std::vector<ad::ParamRef>& refs,
               const std::string& path) {
  std::unordered_map<std::string, ad::Matrix*> by_name;
  for (const auto& r : refs) by_name[r.name] = r.tensor;
  uint64_t n = read_u64(is);
  if (n != refs.size())
    throw std::runtime_error("checkpoint tensor count mismatch: " + path);
  for (uint64_t i = 0; i < n; ++i) {
    NamedTensor t = read_tensor(is);
    auto it = by_name.find(t.name);
    if (it == by_name.end())
      throw std::runtime_error("unknown tensor '" + t.name + "' in " + path);
    if (it->second->rows() != t.m.rows() || it->second->cols() != t.m.cols())
      throw std::runtime_error("tensor shape mismatch for '" + t.name + "' in " + path);
    *it->second = t.m;
  }
}

}  // namespace

void save_star_model(const std::string& path, StarModel& m) {
  nlohmann::ordered_json h;
  h["d_h"] = m.cfg.d_h;
  h["n_layers"] = m.cfg.n_layers;
  h["n_heads"] = m.cfg.n_heads;
  h["d_ff"] = m.cfg.d_ff;
  h["max_len_hr"] = m.cfg.max_len_hr;
  h["max_len_t"] = m.cfg.max_len_t;
  h["vocab_size"] = m.cfg.vocab_size;
  h["dropout"] = m.cfg.dropout;
  h["seed"] = m.cfg.seed;
  h["params_version"] = m.version;
  // Reserved specials are implied by position; persist the rest.
  std::vector<std::string> toks(m.vocab.tokens().begin() + 4,
                                m.vocab.tokens().end());
  h["vocab"] = toks;

  std::ofstream os = open_out(path);
  write_preamble(os, Kind::Star, h);
  write_refs(os, m.refs());
}

StarModel load_star_model(const std::string& path) {
  nlohmann::json h;
  std::ifstream is = open_in(path, Kind::Star, &h);

  StarModel m;
  m.cfg.d_h = h.at("d_h");
  m.cfg.n_layers = h.at("n_layers");
  m.cfg.n_heads = h.at("n_heads");
  m.cfg.d_ff = h.at("d_ff");
  m.cfg.max_len_hr = h.at("max_len_hr");
  m.cfg.max_len_t = h.at("max_len_t");
  m.cfg.vocab_size = h.at("vocab_size");
  m.cfg.dropout = h.at("dropout");
  m.cfg.seed = h.at("seed");
  m.version = h.at("params_version");
  for (const auto& tok : h.at("vocab")) m.vocab.add(tok.get<std::string>());
  if (m.vocab.size() != m.cfg.vocab_size)
    throw std::runtime_error("vocabulary size mismatch in " + path);

  m.enc = EncoderParams::init(m.cfg);
  m.cls = ClassifierParams::init(m.cfg.d_h, 0);
  m.cross = CrossHeadParams::init(m.cfg.d_h, 0);
  m.bilinear_w = ad::Matrix::Identity(m.cfg.d_h, m.cfg.d_h);
  read_refs(is, m.refs(), path);
  return m;
}

void save_geo(const std::string& path, const GeoEmbeddings& g) {
  nlohmann::ordered_json h;
  h["kind"] = to_string(g.kind);
  h["p_norm"] = g.p_norm;
  h["params_version"] = g.version;
  std::ofstream os = open_out(path);
  write_preamble(os, Kind::Geo, h);
  write_u64(os, 2);
  write_tensor(os, "entities", g.entities);
  write_tensor(os, "relations", g.relations);
}

GeoEmbeddings load_geo(const std::string& path) {
  nlohmann::json h;
  std::ifstream is = open_in(path, Kind::Geo, &h);
  GeoEmbeddings g;
  g.kind = parse_geo_kind(h.at("kind").get<std::string>());
  g.p_norm = h.at("p_norm");
  g.version = h.at("params_version");
  uint64_t n = read_u64(is);
  if (n != 2) throw std::runtime_error("geo checkpoint tensor count mismatch");
  NamedTensor e = read_tensor(is), r = read_tensor(is);
  if (e.name != "entities" || r.name != "relations")
    throw std::runtime_error("geo checkpoint tensor names mismatch");
  g.entities = e.m;
  g.relations = r.m;
  return g;
}

void save_alpha(const std::string& path, AlphaParams& p, int hidden) {
  nlohmann::ordered_json h;
  h["d_h"] = p.d_h;
  h["k"] = p.k;
  h["hidden"] = hidden;
  h["feature_dim"] = p.feature_dim();
  std::ofstream os = open_out(path);
  write_preamble(os, Kind::Alpha, h);
  write_refs(os, p.refs());
}

AlphaParams load_alpha(const std::string& path) {
  nlohmann::json h;
  std::ifstream is = open_in(path, Kind::Alpha, &h);
  AlphaParams p = AlphaParams::init(h.at("d_h"), h.at("k"), h.at("hidden"), 0);
  read_refs(is, p.refs(), path);
  return p;
}

uint64_t params_checksum(const std::vector<ad::ParamRef>& refs) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const void* data, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& r : refs) {
    mix(r.name.data(), r.name.size());
    mix(r.tensor->data(), sizeof(double) * static_cast<size_t>(r.tensor->size()));
  }
  return h;
}

uint64_t geo_checksum(const GeoEmbeddings& g) {
  ad::Matrix e = g.entities, r = g.relations;
  std::vector<ad::ParamRef> refs = {{"entities", &e}, {"relations", &r}};
  return params_checksum(refs);
}

}  // namespace star
