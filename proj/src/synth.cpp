#include "star/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace star::synth {

namespace {

const char* kTypeWords[] = {
    "enzyme",   "lipid",    "virus",    "organ",    "tissue",   "steroid",
    "hormone",  "bacteria", "fungus",   "vitamin",  "protein",  "receptor",
    "antigen",  "antibody", "neuron",   "plasma",   "membrane", "nucleus",
    "genome",   "pathogen", "toxin",    "serum",    "gland",    "vessel",
    "muscle",   "cartilage", "marrow",  "cortex",   "ganglion", "follicle",
    "alkaloid", "peptide",  "isotope",  "reagent",  "substrate", "catalyst",
    "polymer",  "crystal",  "solvent",  "compound",
};

const char* kVerbWords[] = {
    "affects",    "causes",     "treats",     "prevents",  "produces",
    "contains",   "regulates",  "inhibits",   "activates", "binds",
    "degrades",   "transports", "precedes",   "follows",   "surrounds",
    "penetrates", "mimics",     "blocks",     "signals",   "converts",
};

std::string entity_key(int type, int idx) {
  return std::string(kTypeWords[type]) + "_x" + std::to_string(idx);
}

}  // namespace

KnowledgeGraph generate(const SynthSpec& spec) {
  if (spec.n_types < 2 || spec.n_types > 40)
    throw std::invalid_argument("synth: n_types out of range");
  std::mt19937_64 rng(spec.seed);

  std::vector<int> type_of(static_cast<size_t>(spec.n_entities));
  for (int e = 0; e < spec.n_entities; ++e) type_of[static_cast<size_t>(e)] = e % spec.n_types;
  std::vector<std::vector<EntityId>> by_type(static_cast<size_t>(spec.n_types));
  for (int e = 0; e < spec.n_entities; ++e)
    by_type[static_cast<size_t>(type_of[static_cast<size_t>(e)])].push_back(e);

  // Types sit on a line; each relation is a fixed offset along it and admits
  // exactly the type pairs separated by that offset. Any linear embedding of
  // the line realizes every relation as a translation, so the admissibility
  // structure is learnable by translation models, not just by text. Offsets
  // are kept only when their pair count fits the spec bounds.
  std::vector<std::vector<std::pair<int, int>>> offset_pairs;
  for (int d = -(spec.n_types - 1); d < spec.n_types; ++d) {
    if (d == 0) continue;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < spec.n_types; ++a) {
      int b = a + d;
      if (b < 0 || b >= spec.n_types) continue;
      pairs.emplace_back(a, b);
    }
    int p = static_cast<int>(pairs.size());
    if (p >= spec.min_pairs_per_relation && p <= spec.max_pairs_per_relation)
      offset_pairs.push_back(std::move(pairs));
  }
  if (offset_pairs.empty())
    throw std::runtime_error("synth: no grid offset fits the pair bounds");
  std::uniform_int_distribution<size_t> anyoffset(0, offset_pairs.size() - 1);
  std::vector<std::vector<std::pair<int, int>>> rel_pairs(
      static_cast<size_t>(spec.n_relations));
  for (int r = 0; r < spec.n_relations; ++r)
    rel_pairs[static_cast<size_t>(r)] = offset_pairs[anyoffset(rng)];

  // Full admissible pool, then subsample.
  std::vector<Triple> pool;
  for (int r = 0; r < spec.n_relations; ++r)
    for (auto [ht, tt] : rel_pairs[static_cast<size_t>(r)])
      for (EntityId h : by_type[static_cast<size_t>(ht)])
        for (EntityId t : by_type[static_cast<size_t>(tt)])
          if (h != t) pool.push_back({h, r, t});
  size_t n_total = static_cast<size_t>(spec.n_train + spec.n_dev + spec.n_test);
  if (pool.size() < n_total)
    throw std::runtime_error("synth: admissible pool too small; raise n_types or pairs");
  std::shuffle(pool.begin(), pool.end(), rng);

  // Greedy covering pass keeps every entity and relation inside train.
  std::vector<bool> e_cov(static_cast<size_t>(spec.n_entities), false);
  std::vector<bool> r_cov(static_cast<size_t>(spec.n_relations), false);
  std::vector<Triple> forced, rest;
  for (const Triple& t : pool) {
    bool useful = !e_cov[static_cast<size_t>(t.head)] ||
                  !e_cov[static_cast<size_t>(t.tail)] ||
                  !r_cov[static_cast<size_t>(t.rel)];
    if (useful && forced.size() < static_cast<size_t>(spec.n_train)) {
      forced.push_back(t);
      e_cov[static_cast<size_t>(t.head)] = true;
      e_cov[static_cast<size_t>(t.tail)] = true;
      r_cov[static_cast<size_t>(t.rel)] = true;
    } else {
      rest.push_back(t);
    }
  }
  for (int e = 0; e < spec.n_entities; ++e)
    if (!e_cov[static_cast<size_t>(e)])
      throw std::runtime_error("synth: entity uncoverable; adjust spec");

  KnowledgeGraph kg;
  for (int e = 0; e < spec.n_entities; ++e) {
    std::string key = entity_key(type_of[static_cast<size_t>(e)], e);
    kg.entity_by_key.emplace(key, e);
    kg.entity_keys.push_back(std::move(key));
  }
  for (int r = 0; r < spec.n_relations; ++r) {
    std::string key = std::string(kVerbWords[r % 20]) + "_r" + std::to_string(r);
    kg.relation_by_key.emplace(key, r);
    kg.relation_keys.push_back(std::move(key));
  }
  kg.texts.entity_text.resize(static_cast<size_t>(spec.n_entities));
  for (int e = 0; e < spec.n_entities; ++e)
    kg.texts.entity_text[static_cast<size_t>(e)] =
        std::string(kTypeWords[type_of[static_cast<size_t>(e)]]) + " x" + std::to_string(e);
  kg.texts.relation_text.resize(static_cast<size_t>(spec.n_relations));
  for (int r = 0; r < spec.n_relations; ++r)
    kg.texts.relation_text[static_cast<size_t>(r)] =
        std::string(kVerbWords[r % 20]) + " r" + std::to_string(r);

  kg.train = forced;
  size_t need_train = static_cast<size_t>(spec.n_train) - forced.size();
  kg.train.insert(kg.train.end(), rest.begin(), rest.begin() + static_cast<long>(need_train));
  auto it = rest.begin() + static_cast<long>(need_train);
  kg.dev.assign(it, it + spec.n_dev);
  it += spec.n_dev;
  kg.test.assign(it, it + spec.n_test);
  kg.rebuild_derived();
  return kg;
}

SynthFiles write_dataset(const SynthSpec& spec, const std::string& dir) {
  KnowledgeGraph kg = generate(spec);
  std::filesystem::create_directories(dir);
  SynthFiles f;
  f.train = dir + "/train.tsv";
  f.dev = dir + "/dev.tsv";
  f.test = dir + "/test.tsv";
  f.entity_text = dir + "/entity2text.tsv";
  f.relation_text = dir + "/relation2text.tsv";

  auto dump = [&kg](const std::string& path, const std::vector<Triple>& ts) {
    std::ofstream out(path);
    for (const Triple& t : ts)
      out << kg.entity_keys[static_cast<size_t>(t.head)] << '\t'
          << kg.relation_keys[static_cast<size_t>(t.rel)] << '\t'
          << kg.entity_keys[static_cast<size_t>(t.tail)] << '\n';
  };
  dump(f.train, kg.train);
  dump(f.dev, kg.dev);
  dump(f.test, kg.test);

  std::ofstream et(f.entity_text);
  for (size_t e = 0; e < kg.entity_keys.size(); ++e)
    et << kg.entity_keys[e] << '\t' << kg.texts.entity_text[e] << '\n';
  std::ofstream rt(f.relation_text);
  for (size_t r = 0; r < kg.relation_keys.size(); ++r)
    rt << kg.relation_keys[r] << '\t' << kg.texts.relation_text[r] << '\n';
  return f;
}

KnowledgeGraph random_graph(int n_entities, int n_relations, int n_train,
                            int n_dev, int n_test, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ent(0, n_entities - 1);
  std::uniform_int_distribution<int> rel(0, n_relations - 1);
  KnowledgeGraph kg;
  for (int e = 0; e < n_entities; ++e) {
    std::string key = "e" + std::to_string(e);
    kg.entity_by_key.emplace(key, e);
    kg.entity_keys.push_back(key);
    kg.texts.entity_text.push_back("entity " + std::to_string(e));
  }
  for (int r = 0; r < n_relations; ++r) {
    std::string key = "r" + std::to_string(r);
    kg.relation_by_key.emplace(key, r);
    kg.relation_keys.push_back(key);
    kg.texts.relation_text.push_back("relation " + std::to_string(r));
  }
  TripleSet used;
  auto draw = [&](std::vector<Triple>& out, int n) {
    int guard = 0;
    while (static_cast<int>(out.size()) < n) {
      Triple t{ent(rng), rel(rng), ent(rng)};
      if (used.insert(t).second) out.push_back(t);
      if (++guard > 1000 * (n + 1))
        throw std::runtime_error("random_graph: cannot place distinct triples");
    }
  };
  draw(kg.train, n_train);
  draw(kg.dev, n_dev);
  draw(kg.test, n_test);
  kg.rebuild_derived();
  return kg;
}

}  // namespace star::synth
