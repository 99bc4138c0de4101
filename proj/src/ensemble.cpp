#include "star/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace star {

namespace {
ad::Matrix randn(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double s) {
  std::normal_distribution<double> nd(0.0, s);
  ad::Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}
}  // namespace

AlphaParams AlphaParams::init(int d_h, int k, int hidden, uint64_t seed) {
  AlphaParams p;
  p.d_h = d_h;
  p.k = k;
  std::mt19937_64 rng(seed);
  p.w1 = randn(hidden, p.feature_dim(), rng, 0.02);
  p.b1 = ad::Matrix::Zero(hidden, 1);
  p.w2 = randn(1, hidden, rng, 0.02);
  p.b2 = ad::Matrix::Zero(1, 1);
  return p;
}

std::vector<ad::ParamRef> AlphaParams::refs(const std::string& prefix) {
  return {{prefix + ".w1", &w1}, {prefix + ".b1", &b1},
          {prefix + ".w2", &w2}, {prefix + ".b2", &b2}};
}

std::vector<double> rescale_scores(const std::vector<double>& raw) {
  if (raw.empty()) return {};
  auto [mn_it, mx_it] = std::minmax_element(raw.begin(), raw.end());
  double mn = *mn_it, range = *mx_it - *mn_it;
  std::vector<double> out(raw.size());
  for (size_t i = 0; i < raw.size(); ++i)
    out[i] = range > 0.0 ? (raw[i] - mn) / range : 0.5;
  return out;
}

Eigen::VectorXd ambiguity_degree(const std::vector<Eigen::VectorXd>& topk_reps,
                                 const std::vector<Eigen::VectorXd>& all_reps,
                                 int m_sim) {
  if (topk_reps.empty())
    throw std::invalid_argument("ambiguity_degree: empty top-k");
  const Eigen::Index d = topk_reps[0].size();
  Eigen::VectorXd out(d + static_cast<Eigen::Index>(topk_reps.size()));

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& r : topk_reps) mean += r;
  mean /= static_cast<double>(topk_reps.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const auto& r : topk_reps) var += (r - mean).cwiseAbs2();
  var /= static_cast<double>(topk_reps.size());
  out.head(d) = var.cwiseSqrt();

  for (size_t c = 0; c < topk_reps.size(); ++c) {
    const Eigen::VectorXd& u = topk_reps[c];
    double nu = u.norm();
    std::vector<double> sims;
    sims.reserve(all_reps.size());
    for (const auto& v : all_reps) {
      double nv = v.norm();
      sims.push_back(nu < 1e-30 || nv < 1e-30 ? 0.0 : u.dot(v) / (nu * nv));
    }
    size_t take = std::min<size_t>(static_cast<size_t>(m_sim), sims.size());
    std::partial_sort(sims.begin(), sims.begin() + static_cast<long>(take),
                      sims.end(), std::greater<double>());
    double acc = std::accumulate(sims.begin(), sims.begin() + static_cast<long>(take), 0.0);
    out(d + static_cast<Eigen::Index>(c)) = take ? acc / static_cast<double>(take) : 0.0;
  }
  return out;
}

Eigen::VectorXd score_consistency(const std::vector<double>& s_tc,
                                  const std::vector<double>& s_ge) {
  if (s_tc.size() != s_ge.size())
    throw std::invalid_argument("score_consistency: length mismatch");
  const Eigen::Index k = static_cast<Eigen::Index>(s_tc.size());
  Eigen::VectorXd out(4 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out(i) = std::abs(s_tc[i] - s_ge[i]);
    out(k + i) = s_tc[i] + s_ge[i];
    out(2 * k + i) = s_tc[i];
    out(3 * k + i) = s_ge[i];
  }
  return out;
}

namespace {
double alpha_mlp(const Eigen::VectorXd& x, const AlphaParams& p) {
  Eigen::VectorXd h = (p.w1 * x + p.b1.col(0)).cwiseMax(0.0);
  double z = (p.w2 * h)(0) + p.b2(0, 0);
  return 1.0 / (1.0 + std::exp(-z));
}
}  // namespace

double adaptive_alpha(const Eigen::VectorXd& features, const AlphaParams& p,
                      bool unseen) {
  if (unseen) return 1.0;
  if (features.size() != p.feature_dim())
    throw std::invalid_argument("adaptive_alpha: feature dimension mismatch");
  return alpha_mlp(features, p);
}

double blend(double alpha, double s_tc, double s_ge) {
  return alpha * s_tc + (1.0 - alpha) * s_ge;
}

QueryFeatures extract_features(const KnowledgeGraph& kg, const ScoreBlock& star,
                               const ScoreBlock& geo,
                               const std::vector<Eigen::VectorXd>& entity_reps,
                               const EnsembleConfig& cfg) {
  if (star.candidates != geo.candidates || star.source != geo.source ||
      star.dir != geo.dir)
    throw std::invalid_argument("extract_features: mismatched score blocks");

  QueryFeatures f;
  f.s_tc = star.scores;
  f.s_ge = rescale_scores(geo.scores);

  const size_t n = star.candidates.size();
  const size_t k_cfg = cfg.k <= 0 ? n : static_cast<size_t>(cfg.k);
  const size_t k = std::min(k_cfg, n);
  f.top_k.resize(n);
  std::iota(f.top_k.begin(), f.top_k.end(), 0);
  std::partial_sort(f.top_k.begin(), f.top_k.begin() + static_cast<long>(k),
                    f.top_k.end(), [&](size_t a, size_t b) {
                      if (f.s_tc[a] != f.s_tc[b]) return f.s_tc[a] > f.s_tc[b];
                      return star.candidates[a] < star.candidates[b];
                    });
  f.top_k.resize(k);

  EntityId fixed = star.dir == Direction::PredictTail ? star.source.head
                                                      : star.source.tail;
  f.unseen = kg.entity_unseen_in_train(fixed) ||
             kg.relation_unseen_in_train(star.source.rel);

  const int d_h = entity_reps.empty() ? 0 : static_cast<int>(entity_reps[0].size());
  const int kf = cfg.k <= 0 ? static_cast<int>(n) : cfg.k;
  f.x = Eigen::VectorXd::Zero(d_h + 5 * kf);

  std::vector<Eigen::VectorXd> reps;
  std::vector<double> tc_k, ge_k;
  for (size_t pos : f.top_k) {
    reps.push_back(entity_reps[static_cast<size_t>(star.candidates[pos])]);
    tc_k.push_back(f.s_tc[pos]);
    ge_k.push_back(f.s_ge[pos]);
  }
  if (!reps.empty()) {
    Eigen::VectorXd ad = ambiguity_degree(reps, entity_reps, cfg.m_sim);
    f.x.head(d_h) = ad.head(d_h);
    f.x.segment(d_h, static_cast<Eigen::Index>(k)) = ad.tail(ad.size() - d_h);
    Eigen::VectorXd sc = score_consistency(tc_k, ge_k);
    for (int b = 0; b < 4; ++b)
      f.x.segment(d_h + kf + b * kf, static_cast<Eigen::Index>(k)) =
          sc.segment(b * static_cast<Eigen::Index>(k),
                     static_cast<Eigen::Index>(k));
  }
  return f;
}

RerankResult ensemble_rerank(const KnowledgeGraph& kg, const ScoreBlock& star,
                             const ScoreBlock& geo, const AlphaParams* params,
                             const std::vector<Eigen::VectorXd>& entity_reps,
                             const EnsembleConfig& cfg, std::mt19937_64& rng) {
  QueryFeatures f = extract_features(kg, star, geo, entity_reps, cfg);
  double alpha;
  if (cfg.mode == EnsembleMode::FixedAlpha) {
    alpha = f.unseen ? 1.0 : cfg.fixed_alpha;
  } else {
    if (!params)
      throw std::invalid_argument("ensemble_rerank: self-adaptive mode needs params");
    alpha = adaptive_alpha(f.x, *params, f.unseen);
  }

  const size_t n = star.candidates.size();
  std::vector<double> blended(f.top_k.size());
  for (size_t i = 0; i < f.top_k.size(); ++i)
    blended[i] = blend(alpha, f.s_tc[f.top_k[i]], f.s_ge[f.top_k[i]]);

  // Re-rank the block; ties get a uniform random order (RANDOM protocol).
  std::vector<size_t> block(f.top_k.size());
  std::iota(block.begin(), block.end(), 0);
  std::vector<double> jitter(block.size());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (double& j : jitter) j = uni(rng);
  std::sort(block.begin(), block.end(), [&](size_t a, size_t b) {
    if (blended[a] != blended[b]) return blended[a] > blended[b];
    return jitter[a] < jitter[b];
  });

  std::vector<bool> in_block(n, false);
  for (size_t pos : f.top_k) in_block[pos] = true;

  RerankResult res;
  res.alpha = alpha;
  res.order.reserve(n);
  for (size_t b : block) res.order.push_back(star.candidates[f.top_k[b]]);
  // Remaining candidates keep the base model's ordering.
  std::vector<size_t> rest;
  for (size_t i = 0; i < n; ++i)
    if (!in_block[i]) rest.push_back(i);
  std::sort(rest.begin(), rest.end(), [&](size_t a, size_t b) {
    if (f.s_tc[a] != f.s_tc[b]) return f.s_tc[a] > f.s_tc[b];
    return star.candidates[a] < star.candidates[b];
  });
  for (size_t i : rest) res.order.push_back(star.candidates[i]);

  auto it = std::find(res.order.begin(), res.order.end(), star.gold);
  if (it == res.order.end())
    throw std::logic_error("ensemble_rerank: gold missing from candidates");
  res.gold_rank = static_cast<int>(it - res.order.begin()) + 1;
  return res;
}

AlphaParams train_ensemble(const KnowledgeGraph& kg, const ScoreMatrix& star_dev,
                           const ScoreMatrix& geo_dev,
                           const std::vector<Eigen::VectorXd>& entity_reps,
                           const EnsembleConfig& cfg,
                           EnsembleTrainReport* report) {
  if (star_dev.blocks.size() != geo_dev.blocks.size())
    throw std::invalid_argument("train_ensemble: score matrix size mismatch");
  const int d_h = entity_reps.empty() ? 0 : static_cast<int>(entity_reps[0].size());
  const int kf = cfg.k <= 0 ? (star_dev.blocks.empty()
                                   ? 0
                                   : static_cast<int>(star_dev.blocks[0].candidates.size()))
                            : cfg.k;
  AlphaParams params = AlphaParams::init(d_h, kf, cfg.hidden, cfg.seed);

  struct Sample {
    Eigen::VectorXd x;
    double tc_gold, ge_gold;
    std::vector<double> tc_neg, ge_neg;  // candidate pool for negatives
  };
  std::vector<Sample> samples;
  EnsembleTrainReport rep;
  for (size_t b = 0; b < star_dev.blocks.size(); ++b) {
    const ScoreBlock& sb = star_dev.blocks[b];
    QueryFeatures f = extract_features(kg, sb, geo_dev.blocks[b], entity_reps, cfg);
    if (f.unseen) {
      ++rep.skipped_unseen;
      continue;
    }
    size_t gold_pos = static_cast<size_t>(
        std::find(sb.candidates.begin(), sb.candidates.end(), sb.gold) -
        sb.candidates.begin());
    bool gold_in = std::find(f.top_k.begin(), f.top_k.end(), gold_pos) !=
                   f.top_k.end();
    if (!gold_in) {
      ++rep.skipped_gold_outside_topk;
      continue;
    }
    Sample s;
    s.x = f.x;
    s.tc_gold = f.s_tc[gold_pos];
    s.ge_gold = f.s_ge[gold_pos];
    for (size_t pos : f.top_k) {
      if (pos == gold_pos) continue;
      s.tc_neg.push_back(f.s_tc[pos]);
      s.ge_neg.push_back(f.s_ge[pos]);
    }
    if (s.tc_neg.empty()) continue;
    samples.push_back(std::move(s));
    ++rep.used_queries;
  }

  std::mt19937_64 rng(cfg.seed + 1);
  ad::AdamState adam;
  std::vector<ad::ParamRef> refs = params.refs();
  ad::GradBuffer grads(refs);

  for (int epoch = 1; epoch <= cfg.epochs && !samples.empty(); ++epoch) {
    double epoch_loss = 0.0;
    grads.zero();
    ad::Tape tape;
    std::vector<ad::Matrix*> gp = grads.ptrs();
    ad::Var w1 = tape.leaf(params.w1, gp[0]), b1 = tape.leaf(params.b1, gp[1]);
    ad::Var w2 = tape.leaf(params.w2, gp[2]), b2 = tape.leaf(params.b2, gp[3]);
    ad::Var acc = tape.constant(ad::Matrix::Zero(1, 1));
    long n_terms = 0;
    for (const Sample& s : samples) {
      ad::Var x = tape.constant(s.x);
      ad::Var h = tape.relu(tape.add_bias(tape.matmul(w1, x), b1));
      ad::Var alpha = tape.sigmoid(tape.add_bias(tape.matmul(w2, h), b2));
      // s_sa = s_ge + alpha * (s_tc - s_ge)
      ad::Var sa_gold = tape.add_const(
          tape.scale(alpha, s.tc_gold - s.ge_gold), s.ge_gold);
      std::uniform_int_distribution<size_t> pick(0, s.tc_neg.size() - 1);
      for (int j = 0; j < cfg.n_negatives; ++j) {
        size_t ni = pick(rng);
        ad::Var sa_neg = tape.add_const(
            tape.scale(alpha, s.tc_neg[ni] - s.ge_neg[ni]), s.ge_neg[ni]);
        ad::Var hinge = tape.relu(
            tape.add_const(tape.sub(sa_neg, sa_gold), cfg.margin));
        acc = tape.add(acc, hinge);
        ++n_terms;
      }
    }
    if (n_terms == 0) break;
    ad::Var loss = tape.scale(acc, 1.0 / static_cast<double>(n_terms));
    epoch_loss = loss.scalar();
    tape.backward(loss);
    adam.step(refs, grads.ptrs(), cfg.learning_rate);
    rep.final_loss = epoch_loss;
  }
  if (report) *report = rep;
  return params;
}

}  // namespace star
