#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "star/kg.hpp"

namespace star {

enum class GeoKind { TransE, RotatE };

GeoKind parse_geo_kind(const std::string& s);
std::string to_string(GeoKind k);

struct GeoConfig {
  GeoKind kind = GeoKind::TransE;
  int d_g = 64;          // real dimension; RotatE uses d_g/2 complex pairs
  double margin = 1.0;
  double learning_rate = 0.01;
  int epochs = 200;
  int n_negatives = 5;
  int p_norm = 2;        // TransE only; 1 or 2
  uint64_t seed = 42;
};

struct GeoEmbeddings {
  GeoKind kind = GeoKind::TransE;
  int p_norm = 2;
  // Columns indexed by id. For RotatE, relations holds d_g/2 phases.
  Eigen::MatrixXd entities;
  Eigen::MatrixXd relations;
  uint64_t version = 0;
};

double transe_score(const GeoEmbeddings& g, const Triple& t);
double rotate_score(const GeoEmbeddings& g, const Triple& t);
double geo_score(const GeoEmbeddings& g, const Triple& t);

GeoEmbeddings geo_init(const KnowledgeGraph& kg, const GeoConfig& cfg);

struct GeoEpochLog {
  int epoch = 0;
  double loss = 0.0;
};
using GeoEpochCallback = std::function<void(const GeoEpochLog&)>;

GeoEmbeddings train_geo(const KnowledgeGraph& kg, const GeoConfig& cfg,
                        GeoEpochCallback on_epoch = nullptr);

// Inserts embeddings for entities absent from g by averaging the translation
// identity over their support triples: h = t - r per tail occurrence,
// t = h + r per head occurrence (TransE); RotatE rotates by -/+ the phase.
// Entities with no support stay at the origin.
struct InductiveReport {
  int placed = 0;
  int unsupported = 0;
};
InductiveReport inductive_complete(GeoEmbeddings& g,
                                   const std::vector<Triple>& support,
                                   const std::vector<EntityId>& unseen);

}  // namespace star
