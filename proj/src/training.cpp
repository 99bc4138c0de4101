#include "star/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace star {

std::vector<Triple> sample_negatives(const KnowledgeGraph& kg, const Triple& tp,
                                     int m, std::mt19937_64& rng) {
  if (kg.num_entities() < 2)
    throw std::runtime_error("sample_negatives: need at least 2 entities");
  std::uniform_int_distribution<EntityId> pick(0, kg.num_entities() - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<Triple> out;
  out.reserve(static_cast<size_t>(m));
  long attempts = 0;
  const long cap = 1000L * std::max(m, 1);
  while (static_cast<int>(out.size()) < m) {
    if (++attempts > cap)
      throw std::runtime_error("sample_negatives: rejection cap exceeded");
    Triple t = tp;
    if (coin(rng))
      t.head = pick(rng);
    else
      t.tail = pick(rng);
    if (t == tp) continue;
    if (kg.train_set.contains(t)) continue;
    out.push_back(t);
  }
  return out;
}

double classification_loss(
    const std::vector<std::pair<double, std::vector<double>>>& sc_groups) {
  if (sc_groups.empty()) return 0.0;
  constexpr double eps = 1e-12;
  auto lg = [eps](double x) { return std::log(std::clamp(x, eps, 1.0 - eps)); };
  double total = 0.0;
  for (const auto& [pos, negs] : sc_groups) {
    double term = lg(pos);
    for (double n : negs) term += lg(1.0 - n);
    total += term / (1.0 + static_cast<double>(negs.size()));
  }
  return -total / static_cast<double>(sc_groups.size());
}

double contrastive_loss_one(double sd_pos, const std::vector<double>& sd_negs,
                            double margin) {
  if (sd_negs.empty()) return 0.0;
  double total = 0.0;
  for (double n : sd_negs) total += std::max(0.0, margin - sd_pos + n);
  return total / static_cast<double>(sd_negs.size());
}

double contrastive_loss(
    const std::vector<std::pair<double, std::vector<double>>>& sd_groups,
    double margin) {
  if (sd_groups.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [pos, negs] : sd_groups)
    total += contrastive_loss_one(pos, negs, margin);
  return total / static_cast<double>(sd_groups.size());
}

double total_loss(double loss_c, double loss_d, double gamma) {
  return loss_c + gamma * loss_d;
}

StarGrads::StarGrads(StarModel& m) {
  for (auto& r : m.enc.refs())
    enc.push_back(ad::Matrix::Zero(r.tensor->rows(), r.tensor->cols()));
  for (auto& r : m.cls.refs())
    cls.push_back(ad::Matrix::Zero(r.tensor->rows(), r.tensor->cols()));
  for (auto& r : m.cross.refs())
    cross.push_back(ad::Matrix::Zero(r.tensor->rows(), r.tensor->cols()));
  bilinear = ad::Matrix::Zero(m.bilinear_w.rows(), m.bilinear_w.cols());
}

void StarGrads::zero() {
  for (auto& g : enc) g.setZero();
  for (auto& g : cls) g.setZero();
  for (auto& g : cross) g.setZero();
  bilinear.setZero();
}

std::vector<ad::Matrix*> StarGrads::ptrs() {
  std::vector<ad::Matrix*> p;
  for (auto& g : enc) p.push_back(&g);
  for (auto& g : cls) p.push_back(&g);
  for (auto& g : cross) p.push_back(&g);
  p.push_back(&bilinear);
  return p;
}

BatchLoss star_batch_loss(ad::Tape& tape, StarModel& model,
                          const KnowledgeGraph& kg, const TrainBatch& batch,
                          const TrainConfig& cfg, StarGrads& grads,
                          bool train_mode, std::mt19937_64* dropout_rng) {
  if (batch.empty()) throw std::invalid_argument("star_batch_loss: empty batch");

  EncodeOptions opts;
  opts.train_mode = train_mode;
  opts.dropout = train_mode ? cfg.dropout : 0.0;
  opts.rng = dropout_rng;

  std::map<std::pair<EntityId, RelationId>, ad::Var> u_cache;
  std::map<EntityId, ad::Var> v_cache;
  auto u_of = [&](EntityId h, RelationId r) {
    auto key = std::make_pair(h, r);
    auto it = u_cache.find(key);
    if (it != u_cache.end()) return it->second;
    ad::Var u = pool(tape, encode(tape, model.enc, model.cfg,
                                  hr_context(model, kg, h, r), &grads.enc, opts));
    u_cache.emplace(key, u);
    return u;
  };
  auto v_of = [&](EntityId e) {
    auto it = v_cache.find(e);
    if (it != v_cache.end()) return it->second;
    ad::Var v = pool(tape, encode(tape, model.enc, model.cfg,
                                  t_context(model, kg, e), &grads.enc, opts));
    v_cache.emplace(e, v);
    return v;
  };

  ad::Var bw;
  if (cfg.metric == DistanceMetric::Bilinear)
    bw = tape.leaf(model.bilinear_w, &grads.bilinear);

  constexpr double eps = 1e-12;
  auto log_clamped = [&](ad::Var x) {
    return tape.log_(tape.clamp(x, eps, 1.0 - eps));
  };
  auto sd_of = [&](ad::Var u, ad::Var v) {
    return distance_score(tape, u, v, cfg.metric, bw);
  };

  ad::Var acc_c = tape.constant(ad::Matrix::Zero(1, 1));
  ad::Var acc_d = tape.constant(ad::Matrix::Zero(1, 1));
  const bool want_d = cfg.gamma != 0.0;

  for (const auto& group : batch) {
    ad::Var u = u_of(group.pos.head, group.pos.rel);
    ad::Var v = v_of(group.pos.tail);
    ad::Var sc = classify_sc(tape, interactive_concat(tape, u, v), model.cls,
                             &grads.cls);
    ad::Var term = log_clamped(sc);
    ad::Var sd = want_d ? sd_of(u, v) : ad::Var();
    ad::Var hinge_sum;
    for (const Triple& neg : group.negs) {
      ad::Var un = u_of(neg.head, neg.rel);
      ad::Var vn = v_of(neg.tail);
      ad::Var scn = classify_sc(tape, interactive_concat(tape, un, vn),
                                model.cls, &grads.cls);
      term = tape.add(term,
                      log_clamped(tape.scale(tape.add_const(scn, -1.0), -1.0)));
      if (want_d) {
        ad::Var h = tape.relu(
            tape.add_const(tape.sub(sd_of(un, vn), sd), cfg.margin));
        hinge_sum = hinge_sum.valid() ? tape.add(hinge_sum, h) : h;
      }
    }
    acc_c = tape.add(
        acc_c, tape.scale(term, 1.0 / (1.0 + static_cast<double>(group.negs.size()))));
    if (want_d && hinge_sum.valid())
      acc_d = tape.add(acc_d, tape.scale(hinge_sum,
                                         1.0 / static_cast<double>(group.negs.size())));
  }

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  BatchLoss out;
  out.loss_c = tape.scale(acc_c, -inv_b);
  out.loss_d = tape.scale(acc_d, inv_b);
  out.total = tape.add(out.loss_c, tape.scale(out.loss_d, cfg.gamma));
  return out;
}

namespace {

EpochLog run_epoch(StarModel& model, const KnowledgeGraph& kg,
                   const TrainConfig& cfg, int epoch, std::mt19937_64& rng,
                   StarGrads& grads, ad::AdamState& adam,
                   const std::vector<ad::ParamRef>& refs) {
  std::vector<size_t> order(kg.train.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  double sum_c = 0.0, sum_d = 0.0;
  size_t n_batches = 0;
  for (size_t start = 0; start < order.size();
       start += static_cast<size_t>(cfg.batch_size)) {
    size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
    TrainBatch batch;
    batch.reserve(end - start);
    for (size_t i = start; i < end; ++i) {
      const Triple& tp = kg.train[order[i]];
      batch.push_back({tp, sample_negatives(kg, tp, cfg.n_negatives, rng)});
    }
    ad::Tape tape;
    grads.zero();
    BatchLoss loss = star_batch_loss(tape, model, kg, batch, cfg, grads,
                                     /*train_mode=*/cfg.dropout > 0.0, &rng);
    double lc = loss.loss_c.scalar(), ld = loss.loss_d.scalar();
    if (!std::isfinite(lc) || !std::isfinite(ld))
      throw std::runtime_error("train_star: non-finite loss at epoch " +
                               std::to_string(epoch));
    tape.backward(loss.total);
    adam.step(refs, grads.ptrs(), cfg.learning_rate, cfg.adam_beta1,
              cfg.adam_beta2, cfg.adam_eps);
    ++model.version;
    sum_c += lc;
    sum_d += ld;
    ++n_batches;
  }
  EpochLog log;
  log.epoch = epoch;
  log.loss_c = n_batches ? sum_c / static_cast<double>(n_batches) : 0.0;
  log.loss_d = n_batches ? sum_d / static_cast<double>(n_batches) : 0.0;
  return log;
}

}  // namespace

void train_star_epochs(StarModel& model, const KnowledgeGraph& kg,
                       const TrainConfig& cfg, EpochCallback on_epoch,
                       DevMetric dev_metric) {
  if (kg.train.empty()) throw std::runtime_error("train_star: empty train split");
  std::mt19937_64 rng(cfg.seed);
  StarGrads grads(model);
  ad::AdamState adam;
  std::vector<ad::ParamRef> refs = model.refs();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochLog log = run_epoch(model, kg, cfg, epoch, rng, grads, adam, refs);
    if (dev_metric) log.dev_hits10 = dev_metric(model);
    if (on_epoch) on_epoch(log, model);
  }
}

StarModel train_star(const KnowledgeGraph& kg, EncoderConfig enc_cfg,
                     const TrainConfig& cfg, EpochCallback on_epoch,
                     DevMetric dev_metric) {
  StarModel model = StarModel::init(enc_cfg, kg);
  train_star_epochs(model, kg, cfg, on_epoch, std::move(dev_metric));
  return model;
}

double gradient_check(StarModel& model, const KnowledgeGraph& kg,
                      const TrainBatch& batch, const TrainConfig& cfg,
                      int n_coords, double eps, uint64_t seed) {
  TrainConfig cc = cfg;
  cc.dropout = 0.0;  // loss must be a deterministic function of the params

  StarGrads grads(model);
  {
    ad::Tape tape;
    BatchLoss loss =
        star_batch_loss(tape, model, kg, batch, cc, grads, false, nullptr);
    tape.backward(loss.total);
  }
  auto loss_value = [&]() {
    ad::Tape tape;
    StarGrads scratch(model);
    return star_batch_loss(tape, model, kg, batch, cc, scratch, false, nullptr)
        .total.scalar();
  };

  std::vector<ad::ParamRef> refs = model.refs();
  std::vector<ad::Matrix*> g = grads.ptrs();
  // Cross-head weights never enter the loss; skip them so the sample is spent
  // on coordinates with meaning.
  std::vector<size_t> live;
  for (size_t i = 0; i < refs.size(); ++i)
    if (refs[i].name.rfind("xhead", 0) != 0) live.push_back(i);

  std::mt19937_64 rng(seed);
  double max_rel = 0.0;
  for (int c = 0; c < n_coords; ++c) {
    size_t pi = live[std::uniform_int_distribution<size_t>(0, live.size() - 1)(rng)];
    ad::Matrix& w = *refs[pi].tensor;
    Eigen::Index i = std::uniform_int_distribution<Eigen::Index>(0, w.rows() - 1)(rng);
    Eigen::Index j = std::uniform_int_distribution<Eigen::Index>(0, w.cols() - 1)(rng);
    double orig = w(i, j);
    w(i, j) = orig + eps;
    double up = loss_value();
    w(i, j) = orig - eps;
    double down = loss_value();
    w(i, j) = orig;
    double fd = (up - down) / (2.0 * eps);
    double an = (*g[pi])(i, j);
    double denom = std::max({std::abs(fd), std::abs(an), 1.0});
    max_rel = std::max(max_rel, std::abs(fd - an) / denom);
  }
  return max_rel;
}

}  // namespace star
