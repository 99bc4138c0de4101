#pragma once

#include "star/encoder.hpp"
#include "star/scoring.hpp"

namespace star {

struct RepPair {
  Eigen::VectorXd u;  // head+relation context
  Eigen::VectorXd v;  // tail context
};

// The Siamese encoder, its classifier head, the cross-encoder baseline head
// and the bilinear distance weight, checkpointed as one unit. A single
// parameter set serves both encoder branches.
struct StarModel {
  EncoderConfig cfg;
  Vocabulary vocab;
  EncoderParams enc;
  ClassifierParams cls;
  CrossHeadParams cross;
  ad::Matrix bilinear_w;
  uint64_t version = 0;

  static StarModel init(EncoderConfig cfg, const KnowledgeGraph& kg);
  std::vector<ad::ParamRef> refs();
};

TokenSequence hr_context(const StarModel& m, const KnowledgeGraph& kg,
                         EntityId h, RelationId r);
TokenSequence t_context(const StarModel& m, const KnowledgeGraph& kg, EntityId e);
TokenSequence full_context(const StarModel& m, const KnowledgeGraph& kg,
                           const Triple& t);

Eigen::VectorXd encode_hr_pooled(const StarModel& m, const KnowledgeGraph& kg,
                                 EntityId h, RelationId r,
                                 CostCounter* counter = nullptr);
Eigen::VectorXd encode_t_pooled(const StarModel& m, const KnowledgeGraph& kg,
                                EntityId e, CostCounter* counter = nullptr);
RepPair encode_pair(const StarModel& m, const KnowledgeGraph& kg,
                    const Triple& t, CostCounter* counter = nullptr);

// One tail encode per entity; no-op when the cache matches the params version.
void precompute_entity_reps(const StarModel& m, const KnowledgeGraph& kg,
                            EntityRepCache& cache, CostCounter* counter = nullptr);

double star_sc(const StarModel& m, const Eigen::VectorXd& u,
               const Eigen::VectorXd& v);
double star_sd(const StarModel& m, const Eigen::VectorXd& u,
               const Eigen::VectorXd& v, DistanceMetric metric);

// KG-BERT-style baseline: one full-triple encode per call.
double cross_encoder_score(const StarModel& m, const KnowledgeGraph& kg,
                           const Triple& t, CostCounter* counter = nullptr);

}  // namespace star
