#include "star/kg.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace star {

void TruthIndex::add(const Triple& t) {
  index_[{t.head, t.rel, static_cast<int>(Direction::PredictTail)}].insert(t.tail);
  index_[{t.tail, t.rel, static_cast<int>(Direction::PredictHead)}].insert(t.head);
}

const std::unordered_set<EntityId>* TruthIndex::completions(
    EntityId fixed, RelationId r, Direction dir) const {
  auto it = index_.find({fixed, r, static_cast<int>(dir)});
  if (it == index_.end()) return nullptr;
  return &it->second;
}

std::array<bool, 3> KnowledgeGraph::unseen_in_train(const Triple& t) const {
  return {entity_unseen_in_train(t.head), relation_unseen_in_train(t.rel),
          entity_unseen_in_train(t.tail)};
}

void KnowledgeGraph::rebuild_derived() {
  train_set.clear();
  truth_index = TruthIndex{};
  entity_in_train.assign(entity_keys.size(), false);
  relation_in_train.assign(relation_keys.size(), false);
  for (const Triple& t : train) {
    train_set.insert(t);
    entity_in_train[static_cast<size_t>(t.head)] = true;
    entity_in_train[static_cast<size_t>(t.tail)] = true;
    relation_in_train[static_cast<size_t>(t.rel)] = true;
  }
  for (const std::vector<Triple>* split : {&train, &dev, &test})
    for (const Triple& t : *split) truth_index.add(t);
}

namespace {

EntityId intern_entity(KnowledgeGraph& kg, const std::string& key) {
  auto it = kg.entity_by_key.find(key);
  if (it != kg.entity_by_key.end()) return it->second;
  EntityId id = static_cast<EntityId>(kg.entity_keys.size());
  kg.entity_by_key.emplace(key, id);
  kg.entity_keys.push_back(key);
  return id;
}

RelationId intern_relation(KnowledgeGraph& kg, const std::string& key) {
  auto it = kg.relation_by_key.find(key);
  if (it != kg.relation_by_key.end()) return it->second;
  RelationId id = static_cast<RelationId>(kg.relation_keys.size());
  kg.relation_by_key.emplace(key, id);
  kg.relation_keys.push_back(key);
  return id;
}

void read_triples(KnowledgeGraph& kg, const std::string& path,
                  std::vector<Triple>& out, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open triple file: " + path);
  TripleSet seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t a = line.find('\t');
    size_t b = (a == std::string::npos) ? std::string::npos : line.find('\t', a + 1);
    if (a == std::string::npos || b == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected head<TAB>relation<TAB>tail");
    Triple t;
    t.head = intern_entity(kg, line.substr(0, a));
    t.rel = intern_relation(kg, line.substr(a + 1, b - a - 1));
    t.tail = intern_entity(kg, line.substr(b + 1));
    if (!seen.insert(t).second) {
      if (report) ++report->duplicate_triples;
      std::cerr << "warning: duplicate triple at " << path << ":" << lineno << "\n";
      continue;
    }
    out.push_back(t);
  }
}

std::unordered_map<std::string, std::string> read_text_file(const std::string& path) {
  std::unordered_map<std::string, std::string> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open text file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t a = line.find('\t');
    if (a == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key<TAB>text");
    out[line.substr(0, a)] = line.substr(a + 1);
  }
  return out;
}

}  // namespace

KnowledgeGraph load_graph(const std::string& train_path,
                          const std::string& dev_path,
                          const std::string& test_path,
                          const std::string& entity_text_path,
                          const std::string& relation_text_path,
                          LoadReport* report) {
  KnowledgeGraph kg;
  read_triples(kg, train_path, kg.train, report);
  if (!dev_path.empty()) read_triples(kg, dev_path, kg.dev, report);
  if (!test_path.empty()) read_triples(kg, test_path, kg.test, report);

  auto etext = read_text_file(entity_text_path);
  auto rtext = read_text_file(relation_text_path);

  kg.texts.entity_text.resize(kg.entity_keys.size());
  for (size_t i = 0; i < kg.entity_keys.size(); ++i) {
    auto it = etext.find(kg.entity_keys[i]);
    if (it != etext.end() && !it->second.empty()) {
      kg.texts.entity_text[i] = it->second;
    } else {
      // Fall back to the surface key so every id stays encodable.
      kg.texts.entity_text[i] = kg.entity_keys[i];
      if (report) ++report->missing_entity_texts;
    }
  }
  kg.texts.relation_text.resize(kg.relation_keys.size());
  for (size_t i = 0; i < kg.relation_keys.size(); ++i) {
    auto it = rtext.find(kg.relation_keys[i]);
    if (it != rtext.end() && !it->second.empty()) {
      kg.texts.relation_text[i] = it->second;
    } else {
      kg.texts.relation_text[i] = kg.relation_keys[i];
      if (report) ++report->missing_relation_texts;
    }
  }

  kg.rebuild_derived();
  if (report) {
    for (const Triple& t : kg.test) {
      auto u = kg.unseen_in_train(t);
      if (u[0] || u[1] || u[2]) ++report->test_triples_with_unseen;
    }
  }
  return kg;
}

std::string LoadReport::to_json(const KnowledgeGraph& kg) const {
  nlohmann::ordered_json j;
  j["entities"] = kg.num_entities();
  j["relations"] = kg.num_relations();
  j["train"] = kg.train.size();
  j["dev"] = kg.dev.size();
  j["test"] = kg.test.size();
  j["duplicate_triples"] = duplicate_triples;
  j["missing_entity_texts"] = missing_entity_texts;
  j["missing_relation_texts"] = missing_relation_texts;
  j["test_triples_with_unseen"] = test_triples_with_unseen;
  return j.dump();
}

ProbeResult build_probe(const KnowledgeGraph& kg, const ProbeSpec& spec) {
  ProbeResult res;
  res.graph = kg;
  KnowledgeGraph& g = res.graph;

  switch (spec.kind) {
    case ProbeKind::Probe1: {
      std::vector<Triple> probe_test;
      for (const Triple& t : kg.test)
        if (kg.entity_unseen_in_train(t.head) || kg.entity_unseen_in_train(t.tail))
          probe_test.push_back(t);
      g.test = std::move(probe_test);
      break;
    }
    case ProbeKind::Probe2: {
      // Entity pool: entities occurring in the test split.
      std::set<EntityId> pool_set;
      for (const Triple& t : kg.test) {
        pool_set.insert(t.head);
        pool_set.insert(t.tail);
      }
      std::vector<EntityId> pool(pool_set.begin(), pool_set.end());
      if (spec.n_removed >= kg.num_entities())
        throw std::invalid_argument("probe2: n_removed must be < |E|");
      if (spec.n_removed > static_cast<int>(pool.size()))
        throw std::invalid_argument("probe2: n_removed exceeds test-entity pool");
      std::mt19937_64 rng(spec.seed);
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(static_cast<size_t>(spec.n_removed));
      std::unordered_set<EntityId> removed(pool.begin(), pool.end());
      res.removed = pool;

      std::vector<Triple> new_train;
      for (const Triple& t : kg.train) {
        int hits = static_cast<int>(removed.count(t.head)) +
                   static_cast<int>(removed.count(t.tail));
        if (t.head == t.tail && removed.count(t.head)) hits = 2;
        if (hits == 0)
          new_train.push_back(t);
        else if (hits == 1)
          res.support.push_back(t);
        // triples touching >= 2 removed entities are discarded
      }
      std::vector<Triple> probe_test;
      for (const Triple& t : kg.test)
        if (removed.count(t.head) || removed.count(t.tail)) probe_test.push_back(t);
      g.train = std::move(new_train);
      g.test = std::move(probe_test);
      break;
    }
    case ProbeKind::Probe3: {
      std::vector<Triple> probe_test;
      for (const Triple& t : kg.test) {
        auto u = kg.unseen_in_train(t);
        if (!u[0] && !u[1] && !u[2]) probe_test.push_back(t);
      }
      g.test = std::move(probe_test);
      break;
    }
  }
  if (g.test.empty()) throw std::runtime_error("probe yields an empty test set");
  g.rebuild_derived();
  return res;
}

}  // namespace star
