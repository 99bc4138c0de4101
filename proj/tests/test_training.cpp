#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "star/synth.hpp"
#include "star/training.hpp"

using namespace star;

namespace {

EncoderConfig tiny_cfg() {
  EncoderConfig cfg;
  cfg.d_h = 16;
  cfg.n_layers = 1;
  cfg.n_heads = 2;
  cfg.d_ff = 32;
  cfg.max_len_hr = 16;
  cfg.max_len_t = 16;
  cfg.seed = 5;
  return cfg;
}

TrainBatch fixed_batch(const KnowledgeGraph& kg, size_t n, int m, uint64_t seed) {
  std::mt19937_64 rng(seed);
  TrainBatch batch;
  for (size_t i = 0; i < n && i < kg.train.size(); ++i)
    batch.push_back({kg.train[i], sample_negatives(kg, kg.train[i], m, rng)});
  return batch;
}

}  // namespace

TEST_CASE("classification loss closed forms") {
  // every probability 0.5, one negative each -> ln 2
  std::vector<std::pair<double, std::vector<double>>> groups = {
      {0.5, {0.5}}, {0.5, {0.5}}};
  CHECK(classification_loss(groups) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // perfect scores drive the loss to ~0 (clamped at 1e-12)
  std::vector<std::pair<double, std::vector<double>>> perfect = {{1.0, {0.0, 0.0}}};
  CHECK(classification_loss(perfect) == doctest::Approx(0.0).epsilon(1e-9));

  // duplicated group equals single group (mean over positives)
  std::vector<std::pair<double, std::vector<double>>> one = {{0.8, {0.3, 0.1}}};
  std::vector<std::pair<double, std::vector<double>>> two = {{0.8, {0.3, 0.1}},
                                                             {0.8, {0.3, 0.1}}};
  CHECK(classification_loss(one) == doctest::Approx(classification_loss(two)));

  // hand-computed value
  double expect = -(std::log(0.8) + std::log(0.7) + std::log(0.9)) / 3.0;
  CHECK(classification_loss(one) == doctest::Approx(expect));
}

TEST_CASE("contrastive loss closed forms") {
  // equal scores at margin 1 -> exactly the margin
  CHECK(contrastive_loss({{-2.0, {-2.0}}}, 1.0) == 1.0);
  // big positive gap -> zero
  CHECK(contrastive_loss({{0.0, {-10.0}}}, 1.0) == 0.0);
  // mean of means
  double v = contrastive_loss({{-1.0, {-1.5, -0.25}}, {-3.0, {-2.0}}}, 1.0);
  double g1 = (std::max(0.0, 1.0 - (-1.0) + (-1.5)) +
               std::max(0.0, 1.0 - (-1.0) + (-0.25))) /
              2.0;
  double g2 = std::max(0.0, 1.0 - (-3.0) + (-2.0));
  CHECK(v == doctest::Approx((g1 + g2) / 2.0));
}

TEST_CASE("total loss is linear in gamma") {
  CHECK(total_loss(0.7, 0.3, 0.0) == 0.7);
  CHECK(total_loss(0.7, 0.3, 1.0) == doctest::Approx(1.0));
  CHECK(total_loss(0.7, 0.3, 2.0) - total_loss(0.7, 0.3, 0.0) ==
        doctest::Approx(2.0 * 0.3));
}

TEST_CASE("negative sampling avoids train triples and the positive") {
  KnowledgeGraph kg = synth::random_graph(20, 3, 60, 5, 5, 17);
  std::mt19937_64 rng(4);
  const Triple& tp = kg.train[0];
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Triple> negs = sample_negatives(kg, tp, 5, rng);
    CHECK(negs.size() == 5);
    for (const Triple& n : negs) {
      CHECK(n != tp);
      CHECK_FALSE(kg.train_set.contains(n));
      // only one slot corrupted
      bool head_same = n.head == tp.head, tail_same = n.tail == tp.tail;
      CHECK(n.rel == tp.rel);
      CHECK((head_same || tail_same));
    }
  }
}

TEST_CASE("negative sampling throws on a saturated graph") {
  // two entities, every possible triple is in train: nothing to sample
  KnowledgeGraph kg;
  kg.entity_keys = {"a", "b"};
  kg.relation_keys = {"r"};
  kg.entity_by_key = {{"a", 0}, {"b", 1}};
  kg.relation_by_key = {{"r", 0}};
  kg.texts.entity_text = {"a", "b"};
  kg.texts.relation_text = {"r"};
  kg.train = {{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, 0, 1}};
  kg.rebuild_derived();
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(sample_negatives(kg, kg.train[0], 2, rng),
                  std::runtime_error);
}

TEST_CASE("batch loss matches the closed-form losses on computed scores") {
  KnowledgeGraph kg = synth::random_graph(15, 3, 50, 5, 5, 23);
  StarModel model = StarModel::init(tiny_cfg(), kg);
  TrainBatch batch = fixed_batch(kg, 4, 3, 99);
  TrainConfig cfg;
  cfg.gamma = 0.7;

  StarGrads grads(model);
  ad::Tape tape;
  BatchLoss loss = star_batch_loss(tape, model, kg, batch, cfg, grads, false,
                                   nullptr);

  std::vector<std::pair<double, std::vector<double>>> sc_groups, sd_groups;
  for (const auto& g : batch) {
    RepPair pos = encode_pair(model, kg, g.pos);
    double sc = star_sc(model, pos.u, pos.v);
    double sd = star_sd(model, pos.u, pos.v, cfg.metric);
    std::vector<double> nsc, nsd;
    for (const Triple& n : g.negs) {
      RepPair np = encode_pair(model, kg, n);
      nsc.push_back(star_sc(model, np.u, np.v));
      nsd.push_back(star_sd(model, np.u, np.v, cfg.metric));
    }
    sc_groups.push_back({sc, nsc});
    sd_groups.push_back({sd, nsd});
  }
  double lc = classification_loss(sc_groups);
  double ld = contrastive_loss(sd_groups, cfg.margin);
  CHECK(loss.loss_c.scalar() == doctest::Approx(lc).epsilon(1e-10));
  CHECK(loss.loss_d.scalar() == doctest::Approx(ld).epsilon(1e-10));
  CHECK(loss.total.scalar() ==
        doctest::Approx(total_loss(lc, ld, cfg.gamma)).epsilon(1e-10));
}

TEST_CASE("gradient check through the full model") {
  KnowledgeGraph kg = synth::random_graph(12, 2, 40, 4, 4, 29);
  StarModel model = StarModel::init(tiny_cfg(), kg);
  TrainBatch batch = fixed_batch(kg, 2, 2, 7);
  TrainConfig cfg;
  double err = gradient_check(model, kg, batch, cfg, 120, 1e-5, 3);
  CHECK(err < 1e-4);
}

TEST_CASE("one small full-batch step decreases the loss on a toy graph") {
  KnowledgeGraph kg = synth::random_graph(10, 2, 10, 2, 2, 31);
  StarModel model = StarModel::init(tiny_cfg(), kg);
  TrainBatch batch = fixed_batch(kg, 10, 2, 55);
  TrainConfig cfg;
  cfg.dropout = 0.0;
  cfg.learning_rate = 1e-3;

  StarGrads grads(model);
  double before;
  {
    ad::Tape tape;
    BatchLoss loss =
        star_batch_loss(tape, model, kg, batch, cfg, grads, false, nullptr);
    before = loss.total.scalar();
    tape.backward(loss.total);
  }
  ad::AdamState adam;
  std::vector<ad::ParamRef> refs = model.refs();
  adam.step(refs, grads.ptrs(), cfg.learning_rate);
  {
    ad::Tape tape;
    StarGrads scratch(model);
    BatchLoss loss =
        star_batch_loss(tape, model, kg, batch, cfg, scratch, false, nullptr);
    CHECK(loss.total.scalar() < before);
  }
}

TEST_CASE("training is deterministic given the seed") {
  KnowledgeGraph kg = synth::random_graph(12, 2, 30, 4, 4, 37);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.n_negatives = 2;
  std::vector<double> losses_a, losses_b;
  StarModel a = train_star(kg, tiny_cfg(), cfg,
                           [&](const EpochLog& l, StarModel&) {
                             losses_a.push_back(l.loss_c + l.loss_d);
                           });
  StarModel b = train_star(kg, tiny_cfg(), cfg,
                           [&](const EpochLog& l, StarModel&) {
                             losses_b.push_back(l.loss_c + l.loss_d);
                           });
  CHECK(losses_a == losses_b);
  CHECK((a.enc.tok_emb - b.enc.tok_emb).norm() == 0.0);
  CHECK(a.version == b.version);
  CHECK(a.version > 0);
}

TEST_CASE("training reduces the loss over a few epochs") {
  KnowledgeGraph kg = synth::random_graph(12, 2, 30, 4, 4, 41);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;
  cfg.n_negatives = 2;
  cfg.dropout = 0.0;
  std::vector<double> losses;
  train_star(kg, tiny_cfg(), cfg, [&](const EpochLog& l, StarModel&) {
    losses.push_back(l.loss_c + l.loss_d);
  });
  REQUIRE(losses.size() == 5);
  CHECK(losses.back() < losses.front());
}
