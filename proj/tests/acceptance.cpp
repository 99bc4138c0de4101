// Acceptance suite: ten end-to-end criteria over the bundled dataset.
// Each criterion prints exactly one PASS/FAIL line; tolerances are pinned
// here. Set STAR_KGC_UMLS_DIR to point at an alternative dataset directory.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "star/checkpoint.hpp"
#include "star/ensemble.hpp"
#include "star/eval.hpp"
#include "star/synth.hpp"
#include "star/training.hpp"

using namespace star;

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void verdict(int criterion, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  (%s)\n", criterion, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

std::string dataset_dir() {
  if (const char* env = std::getenv("STAR_KGC_UMLS_DIR")) return env;
  return "data/umls_like";
}

int eval_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n ? static_cast<int>(n) : 1;
}

// Trained artifacts shared across criteria; built once, on first use.
struct Artifacts {
  KnowledgeGraph kg;
  StarModel star;
  double star_train_seconds = 0.0;
  GeoEmbeddings transe;
  double transe_train_seconds = 0.0;

  EvalResult star_test, geo_test, star_dev, geo_dev;
  std::vector<Eigen::VectorXd> reps;

  static Artifacts& get() {
    static Artifacts a;
    return a;
  }

  const KnowledgeGraph& graph() {
    if (kg.num_entities() == 0) {
      std::string d = dataset_dir();
      kg = load_graph(d + "/train.tsv", d + "/dev.tsv", d + "/test.tsv",
                      d + "/entity2text.tsv", d + "/relation2text.tsv");
    }
    return kg;
  }

  StarModel& star_model() {
    if (star.cfg.vocab_size == 0) {
      double t0 = now_s();
      star = train_star(graph(), EncoderConfig{}, TrainConfig{});
      star_train_seconds = now_s() - t0;
    }
    return star;
  }

  GeoEmbeddings& transe_model() {
    if (transe.entities.cols() == 0) {
      double t0 = now_s();
      transe = train_geo(graph(), GeoConfig{});
      transe_train_seconds = now_s() - t0;
    }
    return transe;
  }

  EvalResult star_eval(const std::vector<Triple>& split) {
    StarScorer scorer(star_model(), RankingBasis::SC, DistanceMetric::NegL2);
    EvalOptions opts;
    opts.jobs = eval_jobs();
    return evaluate(scorer, graph(), split, opts);
  }

  const EvalResult& star_test_eval() {
    if (star_test.records.empty()) star_test = star_eval(graph().test);
    return star_test;
  }
  const EvalResult& star_dev_eval() {
    if (star_dev.records.empty()) star_dev = star_eval(graph().dev);
    return star_dev;
  }
  EvalResult geo_eval(const std::vector<Triple>& split) {
    GeoScorer scorer(transe_model());
    EvalOptions opts;
    opts.jobs = eval_jobs();
    return evaluate(scorer, graph(), split, opts);
  }
  const EvalResult& geo_test_eval() {
    if (geo_test.records.empty()) geo_test = geo_eval(graph().test);
    return geo_test;
  }
  const EvalResult& geo_dev_eval() {
    if (geo_dev.records.empty()) geo_dev = geo_eval(graph().dev);
    return geo_dev;
  }
  const std::vector<Eigen::VectorXd>& entity_reps() {
    if (reps.empty()) {
      EntityRepCache cache;
      precompute_entity_reps(star_model(), graph(), cache);
      reps = cache.reps;
    }
    return reps;
  }
};

}  // namespace

TEST_CASE("criterion 1: closed-form loss values") {
  // all-probability-one-half classification batch -> ln 2
  double lc = classification_loss({{0.5, {0.5, 0.5, 0.5, 0.5, 0.5}}});
  bool c1 = std::abs(lc - std::log(2.0)) <= 1e-9;

  // positive and negative at identical distance -> exactly the margin
  double margin = 1.0;
  bool c2 = contrastive_loss_one(-0.37, {-0.37}, margin) == margin;

  // exact 64-bit linearity in the contrastive weight
  bool c3 = true;
  for (double g : {0.0, 0.5, 1.0, 2.0, 7.25})
    c3 = c3 && total_loss(0.7, 0.3, g) == 0.7 + g * 0.3;

  bool ok = c1 && c2 && c3;
  verdict(1, ok, "ln2 err=" + std::to_string(std::abs(lc - std::log(2.0))) +
                     " symmetry=" + (c2 ? "exact" : "off") +
                     " linearity=" + (c3 ? "exact" : "off"));
  CHECK(c1);
  CHECK(c2);
  CHECK(c3);
}

TEST_CASE("criterion 2: gradient fidelity through the full encoder") {
  double t0 = now_s();
  KnowledgeGraph kg = synth::random_graph(20, 3, 60, 5, 5, 21);
  EncoderConfig ecfg;
  ecfg.d_h = 16;
  ecfg.n_layers = 1;
  ecfg.n_heads = 2;
  ecfg.d_ff = 32;
  ecfg.seed = 3;
  StarModel model = StarModel::init(ecfg, kg);
  TrainConfig tcfg;
  std::mt19937_64 rng(11);
  TrainBatch batch;
  for (int i = 0; i < 2; ++i)
    batch.push_back({kg.train[static_cast<size_t>(i)],
                     sample_negatives(kg, kg.train[static_cast<size_t>(i)], 2, rng)});
  double err = gradient_check(model, kg, batch, tcfg, 200, 1e-5, 7);
  double secs = now_s() - t0;
  bool ok = err < 1e-4 && secs < 60.0;
  verdict(2, ok,
          "max rel err=" + std::to_string(err) + " tol=1e-4 runtime=" +
              std::to_string(secs) + "s");
  CHECK(err < 1e-4);
  CHECK(secs < 60.0);
}

TEST_CASE("criterion 3: ranking oracle equivalence and tie uniformity") {
  // filtered candidates + rank against a brute-force scan on random graphs
  bool oracle_ok = true;
  std::mt19937_64 rng(99);
  for (int g = 0; g < 100 && oracle_ok; ++g) {
    int ne = 5 + static_cast<int>(rng() % 16);  // <= 20 entities
    KnowledgeGraph kg =
        synth::random_graph(ne, 2, 2 * ne, 3, 3, 1000 + static_cast<uint64_t>(g));
    for (size_t qi = 0; qi < kg.test.size(); ++qi) {
      for (Direction dir : {Direction::PredictTail, Direction::PredictHead}) {
        RankingQuery q{static_cast<int>(qi), kg.test[qi], dir,
                       dir == Direction::PredictTail ? kg.test[qi].tail
                                                     : kg.test[qi].head};
        std::vector<EntityId> cands = filtered_candidates(kg, q, true);
        // distinct scores from a shuffled permutation
        std::vector<double> scores(cands.size());
        std::iota(scores.begin(), scores.end(), 0.0);
        std::shuffle(scores.begin(), scores.end(), rng);
        size_t gold_pos =
            static_cast<size_t>(std::find(cands.begin(), cands.end(), q.gold) -
                                cands.begin());
        int expect = 1;
        for (size_t i = 0; i < scores.size(); ++i)
          if (scores[i] > scores[gold_pos]) ++expect;
        std::mt19937_64 tie_rng(7);
        if (rank_gold(scores, gold_pos, tie_rng) != expect) oracle_ok = false;
      }
    }
  }

  // RANDOM protocol: gold tied with 3 others after 2 strictly higher scores
  std::vector<double> scores = {0.9, 0.8, 0.5, 0.5, 0.5, 0.5, 0.1};
  std::mt19937_64 tie_rng(17);
  const int trials = 10000;
  std::map<int, int> counts;
  for (int i = 0; i < trials; ++i) counts[rank_gold(scores, 3, tie_rng)]++;
  double chi2 = 0.0;
  for (int r = 3; r <= 6; ++r) {
    double expect = trials / 4.0;
    chi2 += (counts[r] - expect) * (counts[r] - expect) / expect;
  }
  bool chi_ok = chi2 < 11.345;  // 3 dof, alpha = 0.01

  bool ok = oracle_ok && chi_ok;
  verdict(3, ok,
          std::string("oracle=") + (oracle_ok ? "exact" : "mismatch") +
              " chi2=" + std::to_string(chi2) + " critical=11.345");
  CHECK(oracle_ok);
  CHECK(chi_ok);
}

TEST_CASE("criterion 4: encoder-call accounting and quadratic cost model") {
  double t0 = now_s();
  // 100 entities, 5 relations; texts long enough that every context
  // truncates to its full budget (32/32 split vs 64 joint)
  KnowledgeGraph kg;
  std::string words;
  for (int w = 0; w < 40; ++w) words += "filler" + std::to_string(w % 7) + " ";
  for (int e = 0; e < 100; ++e) {
    std::string key = "e" + std::to_string(e);
    kg.entity_by_key.emplace(key, e);
    kg.entity_keys.push_back(key);
    kg.texts.entity_text.push_back(words);
  }
  for (int r = 0; r < 5; ++r) {
    std::string key = "r" + std::to_string(r);
    kg.relation_by_key.emplace(key, r);
    kg.relation_keys.push_back(key);
    kg.texts.relation_text.push_back(words);
  }
  for (int i = 0; i < 100; ++i) kg.train.push_back({i, i % 4, (i + 1) % 100});
  // ten tail queries with distinct (h, r) never seen elsewhere
  for (int i = 0; i < 10; ++i) kg.test.push_back({i, 4, i + 20});
  kg.rebuild_derived();

  EncoderConfig ecfg;
  ecfg.d_h = 8;
  ecfg.n_layers = 1;
  ecfg.n_heads = 1;
  ecfg.d_ff = 16;
  ecfg.max_len_hr = 32;
  ecfg.max_len_t = 32;
  StarModel model = StarModel::init(ecfg, kg);

  EvalOptions opts;
  opts.self_loop_filter = false;
  opts.direction = Direction::PredictTail;
  opts.jobs = eval_jobs();

  StarScorer siam(model, RankingBasis::SC, DistanceMetric::NegL2, true);
  uint64_t siam_calls =
      evaluate(siam, kg, kg.test, opts).report.cost.siamese_calls;
  CrossScorer cross(model);
  uint64_t cross_calls =
      evaluate(cross, kg, kg.test, opts).report.cost.cross_calls;
  bool counts_ok = siam_calls == 110 && cross_calls == 1000;

  double predicted = whole_graph_cost_ratio(100, 5);
  bool formula_ok = std::abs(predicted - 4.0 * 100 * 5 / 6.0) < 1e-9;

  // whole-graph workload: one query per (h, r) pair
  std::vector<Triple> whole;
  for (int h = 0; h < 100; ++h)
    for (int r = 0; r < 5; ++r) whole.push_back({h, r, (h + r + 1) % 100});
  StarScorer siam2(model, RankingBasis::SC, DistanceMetric::NegL2, true);
  MetricsReport siam_rep = evaluate(siam2, kg, whole, opts).report;
  MetricsReport cross_rep = evaluate(cross, kg, whole, opts).report;
  double measured = static_cast<double>(cross_rep.cost.cross_sq) /
                    static_cast<double>(siam_rep.cost.siamese_sq);
  bool ratio_ok = measured > predicted / 2.0 && measured < predicted * 2.0;

  double secs = now_s() - t0;
  bool ok = counts_ok && formula_ok && ratio_ok && secs < 300.0;
  verdict(4, ok,
          "siamese=" + std::to_string(siam_calls) + "/110 cross=" +
              std::to_string(cross_calls) + "/1000 predicted=" +
              std::to_string(predicted) + " measured=" +
              std::to_string(measured) + " runtime=" + std::to_string(secs) + "s");
  CHECK(siam_calls == 110);
  CHECK(cross_calls == 1000);
  CHECK(formula_ok);
  CHECK(ratio_ok);
  CHECK(secs < 300.0);
}

TEST_CASE("criterion 5: desk-scale training hits the ranking targets") {
  Artifacts& a = Artifacts::get();
  const MetricsCore& m = a.star_test_eval().report.overall;
  bool ok = m.hits10 >= 0.75 && m.mr <= 20.0 && a.star_train_seconds <= 1800.0;
  verdict(5, ok,
          "hits10=" + std::to_string(m.hits10) + ">=0.75 mr=" +
              std::to_string(m.mr) + "<=20 train=" +
              std::to_string(a.star_train_seconds) + "s<=1800");
  CHECK(m.hits10 >= 0.75);
  CHECK(m.mr <= 20.0);
  CHECK(a.star_train_seconds <= 1800.0);
}

TEST_CASE("criterion 6: geometric baseline quality and invariances") {
  Artifacts& a = Artifacts::get();
  const MetricsCore& m = a.geo_test_eval().report.overall;
  bool quality_ok = m.hits10 >= 0.90 && a.transe_train_seconds <= 600.0;

  // translation invariance: shifting every entity by a common vector
  GeoEmbeddings shifted = a.transe_model();
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(shifted.entities.rows(), -0.3, 0.4);
  shifted.entities.colwise() += c;
  double max_diff = 0.0;
  for (size_t i = 0; i < 50 && i < a.graph().test.size(); ++i)
    max_diff = std::max(max_diff,
                        std::abs(transe_score(shifted, a.graph().test[i]) -
                                 transe_score(a.transe_model(), a.graph().test[i])));
  bool trans_ok = max_diff <= 1e-6;

  // phase invariance: rotating every entity by a common phase
  GeoConfig rcfg;
  rcfg.kind = GeoKind::RotatE;
  rcfg.epochs = 5;
  GeoEmbeddings rot = train_geo(a.graph(), rcfg);
  GeoEmbeddings spun = rot;
  double phi = 0.77;
  for (Eigen::Index e = 0; e < spun.entities.cols(); ++e)
    for (Eigen::Index j = 0; j + 1 < spun.entities.rows(); j += 2) {
      double re = spun.entities(j, e), im = spun.entities(j + 1, e);
      spun.entities(j, e) = re * std::cos(phi) - im * std::sin(phi);
      spun.entities(j + 1, e) = re * std::sin(phi) + im * std::cos(phi);
    }
  double max_rot_diff = 0.0;
  for (size_t i = 0; i < 50 && i < a.graph().test.size(); ++i)
    max_rot_diff = std::max(max_rot_diff,
                            std::abs(rotate_score(spun, a.graph().test[i]) -
                                     rotate_score(rot, a.graph().test[i])));
  bool rot_ok = max_rot_diff <= 1e-6;

  bool ok = quality_ok && trans_ok && rot_ok;
  verdict(6, ok,
          "hits10=" + std::to_string(m.hits10) + ">=0.90 train=" +
              std::to_string(a.transe_train_seconds) + "s translation_diff=" +
              std::to_string(max_diff) + " phase_diff=" +
              std::to_string(max_rot_diff));
  CHECK(m.hits10 >= 0.90);
  CHECK(a.transe_train_seconds <= 600.0);
  CHECK(trans_ok);
  CHECK(rot_ok);
}

TEST_CASE("criterion 7: contrastive objective reduces confident false positives") {
  Artifacts& a = Artifacts::get();
  const KnowledgeGraph& kg = a.graph();

  // shared corruption set over the whole test split
  std::vector<Triple> negatives;
  std::mt19937_64 neg_rng(123);
  for (const Triple& tp : kg.test) {
    std::vector<Triple> negs = sample_negatives(kg, tp, 5, neg_rng);
    negatives.insert(negatives.end(), negs.begin(), negs.end());
  }

  auto false_positive_fraction = [&](StarModel& m) {
    int hot = 0;
    for (const Triple& neg : negatives) {
      RepPair p = encode_pair(m, kg, neg);
      if (star_sc(m, p.u, p.v) > 0.9) ++hot;
    }
    return static_cast<double>(hot) / static_cast<double>(negatives.size());
  };
  auto train_arm = [&](double gamma, uint64_t seed) {
    EncoderConfig e;
    e.seed = seed;
    TrainConfig t;  // library defaults: d_h=64, 2 layers, 20 epochs
    t.gamma = gamma;
    t.seed = seed;
    return train_star(kg, e, t);
  };

  // seed 42 with the full objective is exactly the shared artifact model
  double with_d = 0.0, without_d = 0.0;
  for (uint64_t seed : {42ULL, 1ULL, 2ULL}) {
    if (seed == 42) {
      with_d += false_positive_fraction(a.star_model());
    } else {
      StarModel m = train_arm(1.0, seed);
      with_d += false_positive_fraction(m);
    }
    StarModel m0 = train_arm(0.0, seed);
    without_d += false_positive_fraction(m0);
  }
  with_d /= 3.0;
  without_d /= 3.0;

  bool ok = with_d < without_d;
  verdict(7, ok,
          "fp(gamma=1)=" + std::to_string(with_d) + " fp(gamma=0)=" +
              std::to_string(without_d) + " over 3 seeds");
  CHECK(with_d < without_d);
}

TEST_CASE("criterion 8: ensemble regressions and self-adaptive gain") {
  double t0 = now_s();
  Artifacts& a = Artifacts::get();
  const KnowledgeGraph& kg = a.graph();
  const ScoreMatrix& star_test = a.star_test_eval().matrix;
  const ScoreMatrix& geo_test = a.geo_test_eval().matrix;
  const std::vector<Eigen::VectorXd>& reps = a.entity_reps();

  // fixed alpha 0.5 over every candidate == mean of rescaled scores
  EnsembleConfig mean_cfg;
  mean_cfg.k = 0;  // all candidates
  mean_cfg.mode = EnsembleMode::FixedAlpha;
  mean_cfg.fixed_alpha = 0.5;
  bool mean_ok = true;
  bool alpha1_ok = true;
  for (size_t qi = 0; qi < star_test.blocks.size() && qi < 50; ++qi) {
    const ScoreBlock& sb = star_test.blocks[qi];
    const ScoreBlock& gb = geo_test.blocks[qi];
    std::mt19937_64 rng(qi);
    RerankResult r = ensemble_rerank(kg, sb, gb, nullptr, reps, mean_cfg, rng);
    const std::vector<double>& s_tc = sb.scores;  // classifier output, already in (0,1)
    std::vector<double> s_ge = rescale_scores(gb.scores);
    std::vector<size_t> idx(sb.candidates.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t x, size_t y) {
      return 0.5 * (s_tc[x] + s_ge[x]) > 0.5 * (s_tc[y] + s_ge[y]);
    });
    for (size_t i = 0; i < idx.size(); ++i)
      if (r.order[i] != sb.candidates[idx[i]]) mean_ok = false;

    // alpha forced to 1 reproduces the text-model ordering
    EnsembleConfig one_cfg = mean_cfg;
    one_cfg.fixed_alpha = 1.0;
    std::mt19937_64 rng2(qi);
    RerankResult r1 = ensemble_rerank(kg, sb, gb, nullptr, reps, one_cfg, rng2);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t x, size_t y) { return s_tc[x] > s_tc[y]; });
    for (size_t i = 0; i < idx.size(); ++i)
      if (r1.order[i] != sb.candidates[idx[i]]) alpha1_ok = false;
  }

  // self-adaptive blend trained on dev, applied to test
  EnsembleConfig cfg;
  AlphaParams alpha = train_ensemble(kg, a.star_dev_eval().matrix,
                                     a.geo_dev_eval().matrix, reps, cfg);
  std::vector<int> ranks;
  for (size_t qi = 0; qi < star_test.blocks.size(); ++qi) {
    std::mt19937_64 rng(1000 + qi);
    ranks.push_back(ensemble_rerank(kg, star_test.blocks[qi],
                                    geo_test.blocks[qi], &alpha, reps, cfg, rng)
                        .gold_rank);
  }
  double sa_mrr = metrics_from_ranks(ranks).mrr;
  double star_mrr = a.star_test_eval().report.overall.mrr;
  double geo_mrr = a.geo_test_eval().report.overall.mrr;
  double bar = std::max(star_mrr, geo_mrr) - 0.02;
  double secs = now_s() - t0;
  bool ok = mean_ok && alpha1_ok && sa_mrr >= bar && secs < 600.0;
  verdict(8, ok,
          std::string("mean=") + (mean_ok ? "exact" : "mismatch") +
              " alpha1=" + (alpha1_ok ? "exact" : "mismatch") + " sa_mrr=" +
              std::to_string(sa_mrr) + " bar=" + std::to_string(bar) +
              " runtime=" + std::to_string(secs) + "s");
  CHECK(mean_ok);
  CHECK(alpha1_ok);
  CHECK(sa_mrr >= bar);
  CHECK(secs < 600.0);
}

TEST_CASE("criterion 9: ablation grid completes and self-loop filter is safe") {
  Artifacts& a = Artifacts::get();
  const KnowledgeGraph& kg = a.graph();
  bool finite_ok = true;
  for (RankingBasis basis : {RankingBasis::SC, RankingBasis::SD,
                             RankingBasis::SUM, RankingBasis::PROD})
    for (DistanceMetric metric : {DistanceMetric::NegL2, DistanceMetric::Bilinear,
                                  DistanceMetric::Cosine}) {
      StarScorer scorer(a.star_model(), basis, metric);
      EvalOptions opts;
      opts.jobs = eval_jobs();
      MetricsCore m = evaluate(scorer, kg, kg.test, opts).report.overall;
      for (double v : {m.mr, m.mrr, m.hits1, m.hits3, m.hits10})
        if (!std::isfinite(v)) finite_ok = false;
      if (m.n != 2 * kg.test.size()) finite_ok = false;
    }

  // dropping the query's fixed entity can only improve the gold rank
  StarScorer with(a.star_model(), RankingBasis::SC, DistanceMetric::NegL2);
  StarScorer without(a.star_model(), RankingBasis::SC, DistanceMetric::NegL2);
  EvalOptions on, off;
  on.jobs = off.jobs = eval_jobs();
  on.self_loop_filter = true;
  off.self_loop_filter = false;
  EvalResult r_on = evaluate(with, kg, kg.test, on);
  EvalResult r_off = evaluate(without, kg, kg.test, off);
  bool loop_ok = r_on.records.size() == r_off.records.size();
  for (size_t i = 0; loop_ok && i < r_on.records.size(); ++i)
    if (r_on.records[i].rank > r_off.records[i].rank) loop_ok = false;

  bool ok = finite_ok && loop_ok;
  verdict(9, ok,
          std::string("grid=") + (finite_ok ? "12/12 finite" : "non-finite") +
              " self_loop=" + (loop_ok ? "never worse" : "regressed"));
  CHECK(finite_ok);
  CHECK(loop_ok);
}

TEST_CASE("criterion 10: inductive completion beats random placement") {
  // 200-entity typed graph; remove ten test entities from train
  synth::SynthSpec spec;
  spec.n_entities = 200;
  spec.n_train = 7000;
  spec.n_dev = 400;
  spec.n_test = 800;
  KnowledgeGraph kg = synth::generate(spec);
  ProbeSpec pspec;
  pspec.kind = ProbeKind::Probe2;
  pspec.seed = 13;
  pspec.n_removed = 10;
  ProbeResult probe = build_probe(kg, pspec);

  GeoConfig cfg;
  GeoEmbeddings g = train_geo(probe.graph, cfg);
  // removed entities got no gradient: their columns still sit at random init
  EvalOptions opts;
  opts.jobs = eval_jobs();
  GeoScorer random_scorer(g);
  double mrr_random =
      evaluate(random_scorer, probe.graph, probe.graph.test, opts)
          .report.overall.mrr;

  GeoEmbeddings completed = g;
  inductive_complete(completed, probe.support, probe.removed);
  GeoScorer inductive_scorer(completed);
  double mrr_inductive =
      evaluate(inductive_scorer, probe.graph, probe.graph.test, opts)
          .report.overall.mrr;

  // single-support placement is the exact translation identity
  GeoEmbeddings tiny;
  tiny.kind = GeoKind::TransE;
  tiny.entities = Eigen::MatrixXd::Zero(4, 2);
  tiny.entities.col(0) << 0.1, -0.2, 0.3, 0.05;
  tiny.relations = Eigen::MatrixXd::Zero(4, 1);
  tiny.relations.col(0) << 0.4, 0.1, -0.3, 0.2;
  inductive_complete(tiny, {{0, 0, 1}}, {1});
  Eigen::VectorXd expect = tiny.entities.col(0) + tiny.relations.col(0);
  bool exact_ok = (tiny.entities.col(1) - expect).norm() == 0.0;

  bool ok = mrr_inductive > mrr_random && exact_ok;
  verdict(10, ok,
          "mrr_inductive=" + std::to_string(mrr_inductive) + " mrr_random=" +
              std::to_string(mrr_random) + " single_support=" +
              (exact_ok ? "exact" : "off"));
  CHECK(mrr_inductive > mrr_random);
  CHECK(exact_ok);
}
