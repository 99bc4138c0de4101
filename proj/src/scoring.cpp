#include "star/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace star {

DistanceMetric parse_distance_metric(const std::string& s) {
  if (s == "negl2") return DistanceMetric::NegL2;
  if (s == "bilinear") return DistanceMetric::Bilinear;
  if (s == "cosine") return DistanceMetric::Cosine;
  throw std::invalid_argument("unknown distance metric: " + s);
}

RankingBasis parse_ranking_basis(const std::string& s) {
  if (s == "sc") return RankingBasis::SC;
  if (s == "sd") return RankingBasis::SD;
  if (s == "sum") return RankingBasis::SUM;
  if (s == "prod") return RankingBasis::PROD;
  throw std::invalid_argument("unknown ranking basis: " + s);
}

std::string to_string(DistanceMetric m) {
  switch (m) {
    case DistanceMetric::NegL2: return "negl2";
    case DistanceMetric::Bilinear: return "bilinear";
    case DistanceMetric::Cosine: return "cosine";
  }
  return "?";
}

std::string to_string(RankingBasis b) {
  switch (b) {
    case RankingBasis::SC: return "sc";
    case RankingBasis::SD: return "sd";
    case RankingBasis::SUM: return "sum";
    case RankingBasis::PROD: return "prod";
  }
  return "?";
}

namespace {
ad::Matrix randn(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double s) {
  std::normal_distribution<double> nd(0.0, s);
  ad::Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

double gelu_scalar(double x) {
  return 0.5 * x * (1.0 + std::erf(x * 0.7071067811865475244));
}
}  // namespace

ClassifierParams ClassifierParams::init(int d_h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  ClassifierParams p;
  p.w1 = randn(d_h, 4 * d_h, rng, 0.02);
  p.b1 = ad::Matrix::Zero(d_h, 1);
  p.w2 = randn(2, d_h, rng, 0.02);
  p.b2 = ad::Matrix::Zero(2, 1);
  return p;
}

std::vector<ad::ParamRef> ClassifierParams::refs(const std::string& prefix) {
  return {{prefix + ".w1", &w1}, {prefix + ".b1", &b1},
          {prefix + ".w2", &w2}, {prefix + ".b2", &b2}};
}

CrossHeadParams CrossHeadParams::init(int d_h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  CrossHeadParams p;
  p.w1 = randn(d_h, d_h, rng, 0.02);
  p.b1 = ad::Matrix::Zero(d_h, 1);
  p.w2 = randn(2, d_h, rng, 0.02);
  p.b2 = ad::Matrix::Zero(2, 1);
  return p;
}

std::vector<ad::ParamRef> CrossHeadParams::refs(const std::string& prefix) {
  return {{prefix + ".w1", &w1}, {prefix + ".b1", &b1},
          {prefix + ".w2", &w2}, {prefix + ".b2", &b2}};
}

Eigen::VectorXd interactive_concat(const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("interactive_concat: dimension mismatch");
  Eigen::VectorXd c(4 * u.size());
  c << u, u.cwiseProduct(v), u - v, v;
  return c;
}

ClassifyResult classify(const Eigen::VectorXd& c, const ClassifierParams& params) {
  Eigen::VectorXd h = (params.w1 * c + params.b1.col(0)).unaryExpr(&gelu_scalar);
  Eigen::Vector2d logits = params.w2 * h + params.b2.col(0);
  double mx = logits.maxCoeff();
  Eigen::Vector2d e = (logits.array() - mx).exp();
  Eigen::Vector2d p = e / e.sum();
  return {p, p(1)};
}

double distance_score(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                      DistanceMetric metric, const ad::Matrix* bilinear_w) {
  switch (metric) {
    case DistanceMetric::NegL2:
      return -(u - v).norm();
    case DistanceMetric::Bilinear: {
      if (!bilinear_w) throw std::invalid_argument("bilinear metric needs W");
      return u.dot(*bilinear_w * v);
    }
    case DistanceMetric::Cosine: {
      double nu = u.norm(), nv = v.norm();
      if (nu < 1e-30 || nv < 1e-30) return 0.0;
      return u.dot(v) / (nu * nv);
    }
  }
  return 0.0;
}

double rescale_unit(double x, const RescaleContext& ctx) {
  double range = ctx.max_sd - ctx.min_sd;
  if (range <= 0.0) return 0.5;
  return (x - ctx.min_sd) / range;
}

double combine_basis(double s_c, double s_d, RankingBasis basis,
                     const std::optional<RescaleContext>& ctx) {
  switch (basis) {
    case RankingBasis::SC: return s_c;
    case RankingBasis::SD: return s_d;
    case RankingBasis::SUM:
      if (!ctx) throw std::invalid_argument("SUM basis needs rescale context");
      return rescale_unit(s_d, *ctx) + s_c;
    case RankingBasis::PROD:
      if (!ctx) throw std::invalid_argument("PROD basis needs rescale context");
      return rescale_unit(s_d, *ctx) * s_c;
  }
  return s_c;
}

ad::Var interactive_concat(ad::Tape& t, ad::Var u, ad::Var v) {
  if (u.rows() != v.rows() || u.cols() != 1 || v.cols() != 1)
    throw std::invalid_argument("interactive_concat: expected equal-length column vectors");
  return t.vstack({u, t.hadamard(u, v), t.sub(u, v), v});
}

namespace {
ad::Var head_sc(ad::Tape& t, ad::Var x, const ad::Matrix& w1, const ad::Matrix& b1,
                const ad::Matrix& w2, const ad::Matrix& b2,
                std::vector<ad::Matrix>* grads) {
  auto sink = [&](size_t i) -> ad::Matrix* { return grads ? &(*grads)[i] : nullptr; };
  ad::Var vw1 = t.leaf(w1, sink(0)), vb1 = t.leaf(b1, sink(1));
  ad::Var vw2 = t.leaf(w2, sink(2)), vb2 = t.leaf(b2, sink(3));
  ad::Var h = t.gelu(t.add_bias(t.matmul(vw1, x), vb1));
  ad::Var logits = t.add_bias(t.matmul(vw2, h), vb2);
  ad::Var p = t.softmax_cols(logits);
  return t.rows(p, 1, 1);  // positive probability
}
}  // namespace

ad::Var classify_sc(ad::Tape& t, ad::Var c, const ClassifierParams& params,
                    std::vector<ad::Matrix>* grads) {
  return head_sc(t, c, params.w1, params.b1, params.w2, params.b2, grads);
}

ad::Var cross_head_sc(ad::Tape& t, ad::Var pooled, const CrossHeadParams& params,
                      std::vector<ad::Matrix>* grads) {
  return head_sc(t, pooled, params.w1, params.b1, params.w2, params.b2, grads);
}

ad::Var distance_score(ad::Tape& t, ad::Var u, ad::Var v, DistanceMetric metric,
                       ad::Var bilinear_w) {
  switch (metric) {
    case DistanceMetric::NegL2:
      return t.scale(t.l2_norm(t.sub(u, v)), -1.0);
    case DistanceMetric::Bilinear:
      return t.matmul(t.transpose(u), t.matmul(bilinear_w, v));
    case DistanceMetric::Cosine: {
      if (u.value().norm() < 1e-30 || v.value().norm() < 1e-30)
        return t.constant(ad::Matrix::Zero(1, 1));
      ad::Var dot = t.sum(t.hadamard(u, v));
      ad::Var denom = t.hadamard(t.l2_norm(u), t.l2_norm(v));
      return t.cdiv(dot, denom);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace star
