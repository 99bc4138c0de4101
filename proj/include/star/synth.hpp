#pragma once

#include <cstdint>
#include <string>

#include "star/kg.hpp"

namespace star::synth {

// Typed random KG: entities carry a latent type, relations admit a few
// (head-type, tail-type) pairs, and the triple pool is a subsample of all
// admissible pairs. Entity text leaks the type through a shared token so
// text models can learn the admissibility structure.
struct SynthSpec {
  int n_entities = 135;
  int n_relations = 46;
  int n_types = 40;
  int n_train = 5216;
  int n_dev = 652;
  int n_test = 661;
  int min_pairs_per_relation = 19;
  int max_pairs_per_relation = 21;
  uint64_t seed = 13;
};

struct SynthFiles {
  std::string train, dev, test, entity_text, relation_text;
};

// In-memory generation (tests) and on-disk generation (CLI/data dir).
KnowledgeGraph generate(const SynthSpec& spec);
SynthFiles write_dataset(const SynthSpec& spec, const std::string& dir);

// Tiny uniformly-random graph for oracle-style tests; no type structure.
KnowledgeGraph random_graph(int n_entities, int n_relations, int n_train,
                            int n_dev, int n_test, uint64_t seed);

}  // namespace star::synth
