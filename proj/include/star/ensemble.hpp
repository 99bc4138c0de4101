#pragma once

#include <random>
#include <vector>

#include "star/autodiff.hpp"
#include "star/kg.hpp"
#include "star/score_matrix.hpp"

namespace star {

enum class EnsembleMode { FixedAlpha, SelfAdaptive };

struct EnsembleConfig {
  int k = 50;  // top-k re-ranked; <=0 means all candidates
  EnsembleMode mode = EnsembleMode::SelfAdaptive;
  double fixed_alpha = 0.5;
  double margin = 0.60;
  double learning_rate = 1e-2;
  int epochs = 50;
  int n_negatives = 5;
  int m_sim = 100;
  int hidden = 32;
  uint64_t seed = 42;
};

// Blend-weight MLP; alpha = sigmoid(w2 * relu(w1 x + b1) + b2).
struct AlphaParams {
  ad::Matrix w1, b1, w2, b2;
  int d_h = 0, k = 0;

  int feature_dim() const { return d_h + 5 * k; }
  static AlphaParams init(int d_h, int k, int hidden, uint64_t seed);
  std::vector<ad::ParamRef> refs(const std::string& prefix = "alpha");
};

// Per-query min-max to [0,1]; all-equal degenerates to 0.5.
std::vector<double> rescale_scores(const std::vector<double>& raw);

// [per-dimension population std across the top-k reps; per-candidate mean of
// the m_sim largest cosine similarities against every entity rep].
Eigen::VectorXd ambiguity_degree(const std::vector<Eigen::VectorXd>& topk_reps,
                                 const std::vector<Eigen::VectorXd>& all_reps,
                                 int m_sim);

// [|s_tc - s_ge|; s_tc + s_ge; s_tc; s_ge], elementwise over k candidates.
Eigen::VectorXd score_consistency(const std::vector<double>& s_tc,
                                  const std::vector<double>& s_ge);

double adaptive_alpha(const Eigen::VectorXd& features, const AlphaParams& p,
                      bool unseen);
double blend(double alpha, double s_tc, double s_ge);

struct QueryFeatures {
  Eigen::VectorXd x;          // zero-padded to d_h + 5k
  bool unseen = false;
  std::vector<size_t> top_k;  // positions into the block's candidate list
  std::vector<double> s_tc, s_ge;  // full candidate lists, s_ge rescaled
};

QueryFeatures extract_features(const KnowledgeGraph& kg, const ScoreBlock& star,
                               const ScoreBlock& geo,
                               const std::vector<Eigen::VectorXd>& entity_reps,
                               const EnsembleConfig& cfg);

struct RerankResult {
  std::vector<EntityId> order;  // full candidate list, best first
  int gold_rank = 0;            // 1-based, RANDOM ties inside the blended block
  double alpha = 1.0;
};

// Blend inside the top-k block; candidates below keep their original
// ordering strictly after it. params may be null in FixedAlpha mode.
RerankResult ensemble_rerank(const KnowledgeGraph& kg, const ScoreBlock& star,
                             const ScoreBlock& geo, const AlphaParams* params,
                             const std::vector<Eigen::VectorXd>& entity_reps,
                             const EnsembleConfig& cfg, std::mt19937_64& rng);

struct EnsembleTrainReport {
  int used_queries = 0;
  int skipped_gold_outside_topk = 0;
  int skipped_unseen = 0;
  double final_loss = 0.0;
};

// Base models stay frozen: only score matrices and cached reps are consumed.
AlphaParams train_ensemble(const KnowledgeGraph& kg, const ScoreMatrix& star_dev,
                           const ScoreMatrix& geo_dev,
                           const std::vector<Eigen::VectorXd>& entity_reps,
                           const EnsembleConfig& cfg,
                           EnsembleTrainReport* report = nullptr);

}  // namespace star
