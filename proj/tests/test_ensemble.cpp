#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "star/checkpoint.hpp"
#include "star/ensemble.hpp"
#include "star/synth.hpp"

using namespace star;

namespace {

std::vector<Eigen::VectorXd> random_reps(int n, int d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Eigen::VectorXd> reps(n);
  for (auto& r : reps) {
    r.resize(d);
    for (int i = 0; i < d; ++i) r(i) = nd(rng);
  }
  return reps;
}

// A tiny graph plus paired score blocks for rerank tests.
struct Fixture {
  KnowledgeGraph kg;
  ScoreBlock star, geo;
  std::vector<Eigen::VectorXd> reps;

  explicit Fixture(uint64_t seed = 3, int n_entities = 8) {
    kg = synth::random_graph(n_entities, 2, 4 * n_entities, 4, 4, seed);
    star.source = kg.test[0];
    star.dir = Direction::PredictTail;
    star.gold = kg.test[0].tail;
    star.candidates.resize(n_entities);
    std::iota(star.candidates.begin(), star.candidates.end(), 0);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < n_entities; ++i) star.scores.push_back(uni(rng));
    geo = star;
    geo.scores.clear();
    for (int i = 0; i < n_entities; ++i) geo.scores.push_back(uni(rng) * 10 - 5);
    reps = random_reps(n_entities, 6, seed + 2);
  }
};

}  // namespace

TEST_CASE("rescale maps to the unit interval") {
  CHECK(rescale_scores({2, 4, 6}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(rescale_scores({3, 3, 3}) == std::vector<double>{0.5, 0.5, 0.5});
  // monotone input keeps its argsort
  std::vector<double> in = {-4, -1, 0.5, 7};
  std::vector<double> out = rescale_scores(in);
  CHECK(std::is_sorted(out.begin(), out.end()));
  CHECK(out.front() == 0.0);
  CHECK(out.back() == 1.0);
}

TEST_CASE("ambiguity degree: std block and similarity block") {
  // k=1: population std of a single sample is zero
  std::vector<Eigen::VectorXd> all = random_reps(5, 4, 7);
  Eigen::VectorXd ad1 = ambiguity_degree({all[0]}, all, 3);
  CHECK(ad1.head(4).norm() == 0.0);

  // candidate identical to m_sim other entities -> similarity entry 1
  std::vector<Eigen::VectorXd> clones(4, all[0]);
  Eigen::VectorXd ad2 = ambiguity_degree({all[0]}, clones, 3);
  CHECK(ad2(4) == doctest::Approx(1.0));

  // k=2, m_sim=3 against a brute-force cosine oracle
  std::vector<Eigen::VectorXd> topk = {all[1], all[2]};
  Eigen::VectorXd ad3 = ambiguity_degree(topk, all, 3);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> sims;
    for (const auto& v : all)
      sims.push_back(topk[c].dot(v) / (topk[c].norm() * v.norm()));
    std::sort(sims.rbegin(), sims.rend());
    double expect = (sims[0] + sims[1] + sims[2]) / 3.0;
    CHECK(ad3(4 + c) == doctest::Approx(expect));
  }
  // std block against a direct population-std computation
  for (int d = 0; d < 4; ++d) {
    double mean = (topk[0](d) + topk[1](d)) / 2.0;
    double var = ((topk[0](d) - mean) * (topk[0](d) - mean) +
                  (topk[1](d) - mean) * (topk[1](d) - mean)) /
                 2.0;
    CHECK(ad3(d) == doctest::Approx(std::sqrt(var)));
  }
}

TEST_CASE("score consistency blocks") {
  Eigen::VectorXd x = score_consistency({0.8}, {0.4});
  CHECK(x(0) == doctest::Approx(0.4));
  CHECK(x(1) == doctest::Approx(1.2));
  CHECK(x(2) == doctest::Approx(0.8));
  CHECK(x(3) == doctest::Approx(0.4));
  Eigen::VectorXd same = score_consistency({0.5, 0.2}, {0.5, 0.2});
  CHECK(same.head(2).norm() == 0.0);
  CHECK_THROWS_AS(score_consistency({0.5}, {0.5, 0.2}), std::invalid_argument);
}

TEST_CASE("adaptive alpha squashing and the unseen override") {
  AlphaParams p = AlphaParams::init(4, 3, 8, 11);
  Eigen::VectorXd x = Eigen::VectorXd::Random(p.feature_dim());
  double a = adaptive_alpha(x, p, false);
  CHECK(a > 0.0);
  CHECK(a < 1.0);
  CHECK(adaptive_alpha(x, p, true) == 1.0);
  // zero weights -> logistic(0) = 0.5
  p.w1.setZero();
  p.w2.setZero();
  p.b1.setZero();
  p.b2.setZero();
  CHECK(adaptive_alpha(x, p, false) == doctest::Approx(0.5));
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(adaptive_alpha(bad, p, false), std::invalid_argument);
}

TEST_CASE("blend endpoints and monotonicity") {
  CHECK(blend(1.0, 0.8, 0.4) == 0.8);
  CHECK(blend(0.0, 0.8, 0.4) == 0.4);
  CHECK(blend(0.5, 0.8, 0.4) == doctest::Approx(0.6));
  CHECK(blend(0.7, 0.9, 0.4) > blend(0.7, 0.8, 0.4));  // monotone in s_tc
  CHECK(blend(0.7, 0.8, 0.5) > blend(0.7, 0.8, 0.4));  // monotone in s_ge
}

TEST_CASE("rerank with alpha forced 1 and k = all reproduces the base ranking") {
  Fixture f;
  EnsembleConfig cfg;
  cfg.k = 0;  // all candidates
  cfg.mode = EnsembleMode::FixedAlpha;
  cfg.fixed_alpha = 1.0;
  std::mt19937_64 rng(2);
  RerankResult r = ensemble_rerank(f.kg, f.star, f.geo, nullptr, f.reps, cfg, rng);
  std::vector<size_t> order(f.star.candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return f.star.scores[a] > f.star.scores[b];
  });
  for (size_t i = 0; i < order.size(); ++i)
    CHECK(r.order[i] == f.star.candidates[order[i]]);
}

TEST_CASE("fixed alpha 0.5 with k = all orders by the score average") {
  Fixture f(5);
  EnsembleConfig cfg;
  cfg.k = 0;
  cfg.mode = EnsembleMode::FixedAlpha;
  cfg.fixed_alpha = 0.5;
  std::mt19937_64 rng(2);
  RerankResult r = ensemble_rerank(f.kg, f.star, f.geo, nullptr, f.reps, cfg, rng);
  std::vector<double> ge = rescale_scores(f.geo.scores);
  std::vector<size_t> order(f.star.candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return f.star.scores[a] + ge[a] > f.star.scores[b] + ge[b];
  });
  for (size_t i = 0; i < order.size(); ++i)
    CHECK(r.order[i] == f.star.candidates[order[i]]);
}

TEST_CASE("candidates outside the top-k keep their relative order") {
  Fixture f(7, 12);
  EnsembleConfig cfg;
  cfg.k = 4;
  cfg.mode = EnsembleMode::FixedAlpha;
  cfg.fixed_alpha = 0.0;  // maximally reshuffle the block
  std::mt19937_64 rng(2);
  RerankResult r = ensemble_rerank(f.kg, f.star, f.geo, nullptr, f.reps, cfg, rng);
  // the tail of the ordering must equal the base ordering minus the top-4
  std::vector<size_t> order(f.star.candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return f.star.scores[a] > f.star.scores[b];
  });
  for (size_t i = 4; i < order.size(); ++i)
    CHECK(r.order[i] == f.star.candidates[order[i]]);
  // the first 4 are a permutation of the base top-4
  std::vector<EntityId> base_top, rerank_top(r.order.begin(), r.order.begin() + 4);
  for (size_t i = 0; i < 4; ++i) base_top.push_back(f.star.candidates[order[i]]);
  std::sort(base_top.begin(), base_top.end());
  std::sort(rerank_top.begin(), rerank_top.end());
  CHECK(base_top == rerank_top);
}

TEST_CASE("mismatched blocks are rejected") {
  Fixture f;
  ScoreBlock other = f.geo;
  other.candidates.pop_back();
  other.scores.pop_back();
  EnsembleConfig cfg;
  CHECK_THROWS_AS(
      extract_features(f.kg, f.star, other, f.reps, cfg),
      std::invalid_argument);
}

TEST_CASE("gradient of the alpha MLP hinge loss matches finite differences") {
  AlphaParams p = AlphaParams::init(4, 3, 8, 13);
  Eigen::VectorXd x = Eigen::VectorXd::Random(p.feature_dim());
  const double tc_gold = 0.9, ge_gold = 0.2, tc_neg = 0.6, ge_neg = 0.8;
  const double margin = 0.6;

  auto loss_plain = [&]() {
    double a = adaptive_alpha(x, p, false);
    return std::max(0.0, margin - blend(a, tc_gold, ge_gold) +
                             blend(a, tc_neg, ge_neg));
  };

  std::vector<ad::ParamRef> refs = p.refs();
  ad::GradBuffer grads(refs);
  {
    ad::Tape t;
    std::vector<ad::Matrix*> gp = grads.ptrs();
    ad::Var w1 = t.leaf(p.w1, gp[0]), b1 = t.leaf(p.b1, gp[1]);
    ad::Var w2 = t.leaf(p.w2, gp[2]), b2 = t.leaf(p.b2, gp[3]);
    ad::Var xv = t.constant(x);
    ad::Var h = t.relu(t.add_bias(t.matmul(w1, xv), b1));
    ad::Var alpha = t.sigmoid(t.add_bias(t.matmul(w2, h), b2));
    ad::Var sa_g = t.add_const(t.scale(alpha, tc_gold - ge_gold), ge_gold);
    ad::Var sa_n = t.add_const(t.scale(alpha, tc_neg - ge_neg), ge_neg);
    ad::Var loss = t.relu(t.add_const(t.sub(sa_n, sa_g), margin));
    CHECK(loss.scalar() == doctest::Approx(loss_plain()));
    t.backward(loss);
  }

  double worst = 0.0;
  const double eps = 1e-6;
  std::vector<ad::Matrix*> gp = grads.ptrs();
  for (size_t pi = 0; pi < refs.size(); ++pi) {
    ad::Matrix& w = *refs[pi].tensor;
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        double orig = w(i, j);
        w(i, j) = orig + eps;
        double up = loss_plain();
        w(i, j) = orig - eps;
        double down = loss_plain();
        w(i, j) = orig;
        double fd = (up - down) / (2 * eps);
        double an = (*gp[pi])(i, j);
        worst = std::max(worst, std::abs(fd - an) /
                                    std::max({std::abs(fd), std::abs(an), 1.0}));
      }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("train_ensemble with zero epochs returns the initialization") {
  Fixture f;
  ScoreMatrix star_m, geo_m;
  star_m.blocks = {f.star};
  geo_m.blocks = {f.geo};
  EnsembleConfig cfg;
  cfg.k = 4;
  cfg.epochs = 0;
  cfg.seed = 21;
  AlphaParams trained = train_ensemble(f.kg, star_m, geo_m, f.reps, cfg);
  AlphaParams fresh = AlphaParams::init(
      static_cast<int>(f.reps[0].size()), cfg.k, cfg.hidden, cfg.seed);
  CHECK((trained.w1 - fresh.w1).norm() == 0.0);
  CHECK((trained.w2 - fresh.w2).norm() == 0.0);
}

TEST_CASE("train_ensemble reports skipped queries and moves the parameters") {
  KnowledgeGraph kg = synth::random_graph(10, 2, 40, 8, 8, 19);
  std::vector<Eigen::VectorXd> reps = random_reps(10, 6, 23);
  ScoreMatrix star_m, geo_m;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int qi = 0;
  for (const Triple& t : kg.dev) {
    ScoreBlock sb;
    sb.query_index = qi++;
    sb.source = t;
    sb.dir = Direction::PredictTail;
    sb.gold = t.tail;
    for (EntityId e = 0; e < 10; ++e) {
      sb.candidates.push_back(e);
      sb.scores.push_back(uni(rng));
    }
    ScoreBlock gb = sb;
    for (double& s : gb.scores) s = uni(rng);
    star_m.blocks.push_back(sb);
    geo_m.blocks.push_back(gb);
  }
  EnsembleConfig cfg;
  cfg.k = 3;  // small k so some golds fall outside
  cfg.epochs = 10;
  EnsembleTrainReport rep;
  AlphaParams trained = train_ensemble(kg, star_m, geo_m, reps, cfg, &rep);
  CHECK(rep.used_queries + rep.skipped_gold_outside_topk + rep.skipped_unseen ==
        static_cast<int>(star_m.blocks.size()));
  if (rep.used_queries > 0) {
    AlphaParams fresh = AlphaParams::init(6, cfg.k, cfg.hidden, cfg.seed);
    CHECK((trained.w1 - fresh.w1).norm() > 0.0);
  }
}

TEST_CASE("self-adaptive rerank helps a blended toy model") {
  // star is right on half the queries, geo on the other half; blending with
  // any alpha in (0,1) beats either pure ordering on at least one query
  Fixture f(31);
  EnsembleConfig cfg;
  cfg.k = 0;
  cfg.mode = EnsembleMode::FixedAlpha;
  cfg.fixed_alpha = 0.5;
  std::mt19937_64 rng(2);
  RerankResult r = ensemble_rerank(f.kg, f.star, f.geo, nullptr, f.reps, cfg, rng);
  CHECK(r.gold_rank >= 1);
  CHECK(r.gold_rank <= static_cast<int>(f.star.candidates.size()));
  CHECK(r.alpha == 0.5);
}
