#pragma once

#include <functional>
#include <random>

#include "star/model.hpp"

namespace star {

struct TrainConfig {
  int batch_size = 16;
  double learning_rate = 1e-3;
  int epochs = 20;
  int n_negatives = 5;      // |N(tp)|
  double margin = 1.0;      // lambda
  double gamma = 1.0;       // contrastive weight
  double dropout = 0.1;
  uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  DistanceMetric metric = DistanceMetric::NegL2;
};

struct PositiveWithNegatives {
  Triple pos;
  std::vector<Triple> negs;
};
using TrainBatch = std::vector<PositiveWithNegatives>;

// Each sample corrupts head or tail with a fair coin and rejection-samples
// against the filter set (train triples) and the positive itself.
std::vector<Triple> sample_negatives(const KnowledgeGraph& kg, const Triple& tp,
                                     int m, std::mt19937_64& rng);

// Closed-form loss values over already-computed scores.
double classification_loss(
    const std::vector<std::pair<double, std::vector<double>>>& sc_groups);
double contrastive_loss_one(double sd_pos, const std::vector<double>& sd_negs,
                            double margin);
double contrastive_loss(
    const std::vector<std::pair<double, std::vector<double>>>& sd_groups,
    double margin);
double total_loss(double loss_c, double loss_d, double gamma);

// Gradient accumulators aligned with StarModel::refs() order.
struct StarGrads {
  std::vector<ad::Matrix> enc, cls, cross;
  ad::Matrix bilinear;
  explicit StarGrads(StarModel& m);
  void zero();
  std::vector<ad::Matrix*> ptrs();  // matches refs() order
};

struct BatchLoss {
  ad::Var total, loss_c, loss_d;
};

// Builds the full differentiable loss graph for one batch; encoder calls
// are deduplicated per unique (h, r) context and tail within the batch.
BatchLoss star_batch_loss(ad::Tape& tape, StarModel& model,
                          const KnowledgeGraph& kg, const TrainBatch& batch,
                          const TrainConfig& cfg, StarGrads& grads,
                          bool train_mode, std::mt19937_64* dropout_rng);

struct EpochLog {
  int epoch = 0;
  double loss_c = 0.0;
  double loss_d = 0.0;
  double dev_hits10 = -1.0;
};

using EpochCallback = std::function<void(const EpochLog&, StarModel&)>;
// Pluggable dev metric (typically filtered Hits@10), kept out of the loop
// itself so the ranking layer can stay a client of this one.
using DevMetric = std::function<double(StarModel&)>;

// Full StAR optimization; deterministic given seed. Throws on NaN loss.
StarModel train_star(const KnowledgeGraph& kg, EncoderConfig enc_cfg,
                     const TrainConfig& cfg, EpochCallback on_epoch = nullptr,
                     DevMetric dev_metric = nullptr);

// Extra epochs on an existing model (ablation plumbing).
void train_star_epochs(StarModel& model, const KnowledgeGraph& kg,
                       const TrainConfig& cfg, EpochCallback on_epoch = nullptr,
                       DevMetric dev_metric = nullptr);

// Central finite differences over a random subsample of coordinates.
double gradient_check(StarModel& model, const KnowledgeGraph& kg,
                      const TrainBatch& batch, const TrainConfig& cfg,
                      int n_coords = 200, double eps = 1e-5,
                      uint64_t seed = 7);

}  // namespace star
