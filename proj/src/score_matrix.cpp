#include "star/score_matrix.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace star {

namespace {
constexpr char kMagic[4] = {'S', 'K', 'S', 'M'};
constexpr uint32_t kFormatVersion = 1;

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
}  // namespace

void save_score_matrix(const std::string& path, const ScoreMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write score matrix: " + path);
  os.write(kMagic, 4);
  write_u32(os, kFormatVersion);
  write_u64(os, m.blocks.size());
  for (const ScoreBlock& b : m.blocks) {
    if (b.candidates.size() != b.scores.size())
      throw std::invalid_argument("score block candidate/score length mismatch");
    write_u32(os, static_cast<uint32_t>(b.query_index));
    write_u32(os, static_cast<uint32_t>(b.source.head));
    write_u32(os, static_cast<uint32_t>(b.source.rel));
    write_u32(os, static_cast<uint32_t>(b.source.tail));
    write_u32(os, b.dir == Direction::PredictTail ? 0u : 1u);
    write_u32(os, static_cast<uint32_t>(b.gold));
    write_u64(os, b.candidates.size());
    os.write(reinterpret_cast<const char*>(b.candidates.data()),
             static_cast<std::streamsize>(sizeof(EntityId) * b.candidates.size()));
    os.write(reinterpret_cast<const char*>(b.scores.data()),
             static_cast<std::streamsize>(sizeof(double) * b.scores.size()));
  }
}

ScoreMatrix load_score_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read score matrix: " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("bad score-matrix magic: " + path);
  if (read_u32(is) != kFormatVersion)
    throw std::runtime_error("unsupported score-matrix version in " + path);
  ScoreMatrix m;
  uint64_t n = read_u64(is);
  m.blocks.resize(n);
  for (ScoreBlock& b : m.blocks) {
    b.query_index = static_cast<int32_t>(read_u32(is));
    b.source.head = static_cast<EntityId>(read_u32(is));
    b.source.rel = static_cast<RelationId>(read_u32(is));
    b.source.tail = static_cast<EntityId>(read_u32(is));
    b.dir = read_u32(is) == 0 ? Direction::PredictTail : Direction::PredictHead;
    b.gold = static_cast<EntityId>(read_u32(is));
    uint64_t c = read_u64(is);
    b.candidates.resize(c);
    b.scores.resize(c);
    is.read(reinterpret_cast<char*>(b.candidates.data()),
            static_cast<std::streamsize>(sizeof(EntityId) * c));
    is.read(reinterpret_cast<char*>(b.scores.data()),
            static_cast<std::streamsize>(sizeof(double) * c));
  }
  if (!is) throw std::runtime_error("truncated score matrix: " + path);
  return m;
}

}  // namespace star
