#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "star/geo.hpp"
#include "star/model.hpp"
#include "star/score_matrix.hpp"

namespace star {

struct RankingQuery {
  int query_index = 0;
  Triple source{0, 0, 0};
  Direction dir = Direction::PredictTail;
  EntityId gold = 0;
};

struct RankRecord {
  RankingQuery query;
  int rank = 0;  // 1-based
  double gold_score = 0.0;
  std::vector<std::pair<EntityId, double>> top_k;
};

struct MetricsCore {
  double mr = 0.0, mrr = 0.0, hits1 = 0.0, hits3 = 0.0, hits10 = 0.0;
  size_t n = 0;
};

struct MetricsReport {
  MetricsCore overall, predict_head, predict_tail;
  std::map<RelationId, MetricsCore> per_relation;
  CostCounter cost;
  std::string to_json(const KnowledgeGraph* kg = nullptr) const;
};

// All entities minus other known-true completions (gold retained); the
// self-loop filter additionally drops the query's fixed entity.
std::vector<EntityId> filtered_candidates(const KnowledgeGraph& kg,
                                          const RankingQuery& q,
                                          bool self_loop_filter);

// RANDOM protocol: uniform placement within the gold's tie block.
int rank_gold(const std::vector<double>& scores, size_t gold_pos,
              std::mt19937_64& rng);

MetricsCore metrics_from_ranks(const std::vector<int>& ranks);

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual void prepare(const KnowledgeGraph& kg, CostCounter& cost) {}
  virtual std::vector<double> score(const KnowledgeGraph& kg,
                                    const RankingQuery& q,
                                    const std::vector<EntityId>& candidates,
                                    CostCounter& cost) = 0;
  // Cached tail-branch representation, when the scorer has one (ensemble
  // feature extraction).
  virtual const Eigen::VectorXd* entity_rep(EntityId e) const { return nullptr; }
};

class StarScorer : public Scorer {
 public:
  StarScorer(StarModel& model, RankingBasis basis, DistanceMetric metric,
             bool use_cache = true)
      : model_(model), basis_(basis), metric_(metric), use_cache_(use_cache) {}

  void prepare(const KnowledgeGraph& kg, CostCounter& cost) override;
  std::vector<double> score(const KnowledgeGraph& kg, const RankingQuery& q,
                            const std::vector<EntityId>& candidates,
                            CostCounter& cost) override;
  const Eigen::VectorXd* entity_rep(EntityId e) const override;

 private:
  Eigen::VectorXd hr_rep(const KnowledgeGraph& kg, EntityId h, RelationId r,
                         CostCounter& cost);

  StarModel& model_;
  RankingBasis basis_;
  DistanceMetric metric_;
  bool use_cache_;
  EntityRepCache cache_;
  std::map<std::pair<EntityId, RelationId>, Eigen::VectorXd> hr_cache_;
  std::mutex mu_;
};

class CrossScorer : public Scorer {
 public:
  explicit CrossScorer(StarModel& model) : model_(model) {}
  std::vector<double> score(const KnowledgeGraph& kg, const RankingQuery& q,
                            const std::vector<EntityId>& candidates,
                            CostCounter& cost) override;

 private:
  StarModel& model_;
};

class GeoScorer : public Scorer {
 public:
  explicit GeoScorer(const GeoEmbeddings& g) : g_(g) {}
  std::vector<double> score(const KnowledgeGraph& kg, const RankingQuery& q,
                            const std::vector<EntityId>& candidates,
                            CostCounter& cost) override;

 private:
  const GeoEmbeddings& g_;
};

struct EvalOptions {
  bool self_loop_filter = true;
  bool use_cache = true;
  std::optional<Direction> direction;  // both when unset
  int top_k = 10;
  uint64_t seed = 42;
  int jobs = 1;
};

struct EvalResult {
  MetricsReport report;
  std::vector<RankRecord> records;
  ScoreMatrix matrix;
};

// Two queries per triple (or one under a direction filter), query_index in
// split order; deterministic given options.seed regardless of jobs.
EvalResult evaluate(Scorer& scorer, const KnowledgeGraph& kg,
                    const std::vector<Triple>& split, const EvalOptions& opts);

// Quadratic-attention cost model. Cross encodes every candidate at full
// length L; the Siamese path encodes each side at L/2 and amortizes the
// candidate cache across queries.
struct CostPrediction {
  double cross = 0.0;
  double siamese = 0.0;
  double ratio() const { return siamese > 0.0 ? cross / siamese : 0.0; }
};
CostPrediction predicted_cost(double L, double n_entities, double n_queries);
CostPrediction predicted_whole_graph_cost(double L, double n_entities,
                                          double n_relations);
double whole_graph_cost_ratio(double n_entities, double n_relations);

}  // namespace star
