#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace star {

using EntityId = int32_t;
using RelationId = int32_t;

struct Triple {
  EntityId head;
  RelationId rel;
  EntityId tail;

  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  size_t operator()(const Triple& t) const {
    uint64_t x = (static_cast<uint64_t>(static_cast<uint32_t>(t.head)) << 40) ^
                 (static_cast<uint64_t>(static_cast<uint32_t>(t.rel)) << 20) ^
                 static_cast<uint32_t>(t.tail);
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<size_t>(x);
  }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

enum class Direction { PredictTail, PredictHead };

struct TextCatalog {
  std::vector<std::string> entity_text;    // indexed by EntityId
  std::vector<std::string> relation_text;  // indexed by RelationId
};

// (fixed entity, relation, direction) -> set of completions across all splits.
class TruthIndex {
 public:
  void add(const Triple& t);
  const std::unordered_set<EntityId>* completions(EntityId fixed, RelationId r,
                                                  Direction dir) const;

 private:
  struct KeyHash {
    size_t operator()(const std::tuple<EntityId, RelationId, int>& k) const {
      auto [e, r, d] = k;
      return TripleHash{}({e, r, static_cast<EntityId>(d)});
    }
  };
  std::unordered_map<std::tuple<EntityId, RelationId, int>,
                     std::unordered_set<EntityId>, KeyHash>
      index_;
};

struct KnowledgeGraph {
  std::vector<std::string> entity_keys;    // surface key per EntityId
  std::vector<std::string> relation_keys;  // surface key per RelationId
  std::unordered_map<std::string, EntityId> entity_by_key;
  std::unordered_map<std::string, RelationId> relation_by_key;

  std::vector<Triple> train, dev, test;
  TripleSet train_set;
  TextCatalog texts;
  TruthIndex truth_index;

  std::vector<bool> entity_in_train;    // per EntityId
  std::vector<bool> relation_in_train;  // per RelationId

  int num_entities() const { return static_cast<int>(entity_keys.size()); }
  int num_relations() const { return static_cast<int>(relation_keys.size()); }

  bool entity_unseen_in_train(EntityId e) const { return !entity_in_train[static_cast<size_t>(e)]; }
  bool relation_unseen_in_train(RelationId r) const { return !relation_in_train[static_cast<size_t>(r)]; }
  // per-slot flags: {head unseen, relation unseen, tail unseen}
  std::array<bool, 3> unseen_in_train(const Triple& t) const;

  void rebuild_derived();  // train_set, truth_index, seen flags
};

struct LoadReport {
  int duplicate_triples = 0;
  int missing_entity_texts = 0;
  int missing_relation_texts = 0;
  int test_triples_with_unseen = 0;
  std::string to_json(const KnowledgeGraph& kg) const;
};

// Triple files: head<TAB>relation<TAB>tail, one per line.
// Text files: surface_key<TAB>text; either path may be empty.
KnowledgeGraph load_graph(const std::string& train_path,
                          const std::string& dev_path,
                          const std::string& test_path,
                          const std::string& entity_text_path,
                          const std::string& relation_text_path,
                          LoadReport* report = nullptr);

enum class ProbeKind { Probe1, Probe2, Probe3 };

struct ProbeSpec {
  ProbeKind kind = ProbeKind::Probe1;
  uint64_t seed = 0;
  int n_removed = 0;  // probe2 only
};

struct ProbeResult {
  KnowledgeGraph graph;
  std::vector<Triple> support;          // probe2 only
  std::vector<EntityId> removed;        // probe2 only
};

// probe1: train unchanged, test restricted to triples with >=1 unseen entity.
// probe2: remove n_removed sampled test-pool entities from train; support =
//         train triples touching exactly one removed entity.
// probe3: test restricted to triples fully seen in train.
ProbeResult build_probe(const KnowledgeGraph& kg, const ProbeSpec& spec);

}  // namespace star
