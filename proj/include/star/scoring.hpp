#pragma once

#include <optional>
#include <string>

#include "star/autodiff.hpp"

namespace star {

enum class DistanceMetric { NegL2, Bilinear, Cosine };
enum class RankingBasis { SC, SD, SUM, PROD };

DistanceMetric parse_distance_metric(const std::string& s);
RankingBasis parse_ranking_basis(const std::string& s);
std::string to_string(DistanceMetric m);
std::string to_string(RankingBasis b);

// Two-way MLP over the interactive concatenation [u; u*v; u-v; v].
struct ClassifierParams {
  ad::Matrix w1, b1, w2, b2;  // (d x 4d), (d x 1), (2 x d), (2 x 1)
  static ClassifierParams init(int d_h, uint64_t seed);
  std::vector<ad::ParamRef> refs(const std::string& prefix = "cls");
};

// KG-BERT-style head over the pooled full-triple encoding.
struct CrossHeadParams {
  ad::Matrix w1, b1, w2, b2;  // (d x d), (d x 1), (2 x d), (2 x 1)
  static CrossHeadParams init(int d_h, uint64_t seed);
  std::vector<ad::ParamRef> refs(const std::string& prefix = "xhead");
};

// ---- plain-value path (inference hot loop) ----

Eigen::VectorXd interactive_concat(const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& v);

struct ClassifyResult {
  Eigen::Vector2d p;
  double s_c;
};
ClassifyResult classify(const Eigen::VectorXd& c, const ClassifierParams& params);

double distance_score(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                      DistanceMetric metric,
                      const ad::Matrix* bilinear_w = nullptr);

// Per-query min/max of s_d over the candidate list, for SUM/PROD bases.
struct RescaleContext {
  double min_sd = 0.0;
  double max_sd = 0.0;
};
double rescale_unit(double x, const RescaleContext& ctx);  // degenerate -> 0.5
double combine_basis(double s_c, double s_d, RankingBasis basis,
                     const std::optional<RescaleContext>& ctx = std::nullopt);

// ---- tape path (training) ----

ad::Var interactive_concat(ad::Tape& t, ad::Var u, ad::Var v);
// returns s_c as a 1x1 var
ad::Var classify_sc(ad::Tape& t, ad::Var c, const ClassifierParams& params,
                    std::vector<ad::Matrix>* grads);
ad::Var distance_score(ad::Tape& t, ad::Var u, ad::Var v, DistanceMetric metric,
                       ad::Var bilinear_w);
ad::Var cross_head_sc(ad::Tape& t, ad::Var pooled, const CrossHeadParams& params,
                      std::vector<ad::Matrix>* grads);

}  // namespace star
