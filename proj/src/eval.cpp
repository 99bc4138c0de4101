#include "star/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace star {

namespace {
uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::vector<EntityId> filtered_candidates(const KnowledgeGraph& kg,
                                          const RankingQuery& q,
                                          bool self_loop_filter) {
  EntityId fixed = q.dir == Direction::PredictTail ? q.source.head : q.source.tail;
  RelationId r = q.source.rel;
  const std::unordered_set<EntityId>* truths =
      kg.truth_index.completions(fixed, r, q.dir);
  std::vector<EntityId> out;
  out.reserve(static_cast<size_t>(kg.num_entities()));
  for (EntityId e = 0; e < kg.num_entities(); ++e) {
    if (e == q.gold) {
      out.push_back(e);
      continue;
    }
    if (truths && truths->contains(e)) continue;
    if (self_loop_filter && e == fixed) continue;
    out.push_back(e);
  }
  return out;
}

int rank_gold(const std::vector<double>& scores, size_t gold_pos,
              std::mt19937_64& rng) {
  if (gold_pos >= scores.size())
    throw std::out_of_range("rank_gold: gold outside candidate list");
  double g = scores[gold_pos];
  int higher = 0, tied = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > g)
      ++higher;
    else if (scores[i] == g && i != gold_pos)
      ++tied;
  }
  int offset = tied > 0
                   ? std::uniform_int_distribution<int>(0, tied)(rng)
                   : 0;
  return 1 + higher + offset;
}

MetricsCore metrics_from_ranks(const std::vector<int>& ranks) {
  MetricsCore m;
  m.n = ranks.size();
  if (ranks.empty()) return m;
  for (int r : ranks) {
    m.mr += r;
    m.mrr += 1.0 / r;
    if (r <= 1) m.hits1 += 1.0;
    if (r <= 3) m.hits3 += 1.0;
    if (r <= 10) m.hits10 += 1.0;
  }
  double n = static_cast<double>(m.n);
  m.mr /= n;
  m.mrr /= n;
  m.hits1 /= n;
  m.hits3 /= n;
  m.hits10 /= n;
  return m;
}

namespace {
nlohmann::ordered_json core_json(const MetricsCore& m) {
  return {{"n", m.n},      {"mr", m.mr},       {"mrr", m.mrr},
          {"hits1", m.hits1}, {"hits3", m.hits3}, {"hits10", m.hits10}};
}
}  // namespace

std::string MetricsReport::to_json(const KnowledgeGraph* kg) const {
  nlohmann::ordered_json j;
  j["overall"] = core_json(overall);
  j["predict_head"] = core_json(predict_head);
  j["predict_tail"] = core_json(predict_tail);
  nlohmann::ordered_json rels = nlohmann::ordered_json::object();
  for (const auto& [rid, m] : per_relation) {
    std::string key = kg ? kg->relation_keys[static_cast<size_t>(rid)]
                         : std::to_string(rid);
    rels[key] = core_json(m);
  }
  j["per_relation"] = rels;
  j["cost"] = {{"siamese_calls", cost.siamese_calls.load()},
               {"cross_calls", cost.cross_calls.load()},
               {"siamese_sq", cost.siamese_sq.load()},
               {"cross_sq", cost.cross_sq.load()}};
  return j.dump(2);
}

void StarScorer::prepare(const KnowledgeGraph& kg, CostCounter& cost) {
  if (use_cache_) precompute_entity_reps(model_, kg, cache_, &cost);
}

const Eigen::VectorXd* StarScorer::entity_rep(EntityId e) const {
  if (!use_cache_ || static_cast<size_t>(e) >= cache_.reps.size()) return nullptr;
  return &cache_.reps[static_cast<size_t>(e)];
}

Eigen::VectorXd StarScorer::hr_rep(const KnowledgeGraph& kg, EntityId h,
                                   RelationId r, CostCounter& cost) {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(h, r);
  auto it = hr_cache_.find(key);
  if (it != hr_cache_.end()) return it->second;
  Eigen::VectorXd u = encode_hr_pooled(model_, kg, h, r, &cost);
  hr_cache_.emplace(key, u);
  return u;
}

std::vector<double> StarScorer::score(const KnowledgeGraph& kg,
                                      const RankingQuery& q,
                                      const std::vector<EntityId>& candidates,
                                      CostCounter& cost) {
  const bool need_sd = basis_ != RankingBasis::SC;
  const bool need_sc = basis_ != RankingBasis::SD;

  auto tail_rep = [&](EntityId e) -> Eigen::VectorXd {
    if (use_cache_) return cache_.reps[static_cast<size_t>(e)];
    return encode_t_pooled(model_, kg, e, &cost);
  };

  std::vector<double> sc(candidates.size(), 0.0), sd(candidates.size(), 0.0);
  if (q.dir == Direction::PredictTail) {
    Eigen::VectorXd u = hr_rep(kg, q.source.head, q.source.rel, cost);
    for (size_t i = 0; i < candidates.size(); ++i) {
      Eigen::VectorXd v = tail_rep(candidates[i]);
      if (need_sc) sc[i] = star_sc(model_, u, v);
      if (need_sd) sd[i] = star_sd(model_, u, v, metric_);
    }
  } else {
    Eigen::VectorXd v = tail_rep(q.source.tail);
    for (size_t i = 0; i < candidates.size(); ++i) {
      Eigen::VectorXd u = hr_rep(kg, candidates[i], q.source.rel, cost);
      if (need_sc) sc[i] = star_sc(model_, u, v);
      if (need_sd) sd[i] = star_sd(model_, u, v, metric_);
    }
  }

  std::vector<double> out(candidates.size());
  std::optional<RescaleContext> ctx;
  if (basis_ == RankingBasis::SUM || basis_ == RankingBasis::PROD) {
    auto [mn, mx] = std::minmax_element(sd.begin(), sd.end());
    ctx = RescaleContext{*mn, *mx};
  }
  for (size_t i = 0; i < candidates.size(); ++i)
    out[i] = combine_basis(sc[i], sd[i], basis_, ctx);
  return out;
}

std::vector<double> CrossScorer::score(const KnowledgeGraph& kg,
                                       const RankingQuery& q,
                                       const std::vector<EntityId>& candidates,
                                       CostCounter& cost) {
  std::vector<double> out(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    Triple t = q.source;
    (q.dir == Direction::PredictTail ? t.tail : t.head) = candidates[i];
    out[i] = cross_encoder_score(model_, kg, t, &cost);
  }
  return out;
}

std::vector<double> GeoScorer::score(const KnowledgeGraph& kg,
                                     const RankingQuery& q,
                                     const std::vector<EntityId>& candidates,
                                     CostCounter& cost) {
  std::vector<double> out(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    Triple t = q.source;
    (q.dir == Direction::PredictTail ? t.tail : t.head) = candidates[i];
    out[i] = geo_score(g_, t);
  }
  return out;
}

EvalResult evaluate(Scorer& scorer, const KnowledgeGraph& kg,
                    const std::vector<Triple>& split, const EvalOptions& opts) {
  std::vector<RankingQuery> queries;
  for (const Triple& t : split) {
    if (!opts.direction || *opts.direction == Direction::PredictTail)
      queries.push_back({static_cast<int>(queries.size()), t,
                         Direction::PredictTail, t.tail});
    if (!opts.direction || *opts.direction == Direction::PredictHead)
      queries.push_back({static_cast<int>(queries.size()), t,
                         Direction::PredictHead, t.head});
  }

  EvalResult res;
  res.records.resize(queries.size());
  res.matrix.blocks.resize(queries.size());
  if (queries.empty()) return res;

  scorer.prepare(kg, res.report.cost);

  auto run_one = [&](size_t qi) {
    const RankingQuery& q = queries[qi];
    std::vector<EntityId> candidates =
        filtered_candidates(kg, q, opts.self_loop_filter);
    std::vector<double> scores =
        scorer.score(kg, q, candidates, res.report.cost);
    size_t gold_pos =
        static_cast<size_t>(std::find(candidates.begin(), candidates.end(),
                                      q.gold) -
                            candidates.begin());
    std::mt19937_64 rng(
        splitmix64(opts.seed ^ splitmix64(static_cast<uint64_t>(q.query_index))));
    RankRecord rec;
    rec.query = q;
    rec.rank = rank_gold(scores, gold_pos, rng);
    rec.gold_score = scores[gold_pos];
    std::vector<size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    size_t k = std::min<size_t>(static_cast<size_t>(opts.top_k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(k),
                      order.end(),
                      [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    for (size_t i = 0; i < k; ++i)
      rec.top_k.emplace_back(candidates[order[i]], scores[order[i]]);
    res.records[qi] = std::move(rec);

    ScoreBlock& blk = res.matrix.blocks[qi];
    blk.query_index = q.query_index;
    blk.source = q.source;
    blk.dir = q.dir;
    blk.gold = q.gold;
    blk.candidates = std::move(candidates);
    blk.scores = std::move(scores);
  };

  int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    for (size_t qi = 0; qi < queries.size(); ++qi) run_one(qi);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&]() {
        for (size_t qi = next.fetch_add(1); qi < queries.size();
             qi = next.fetch_add(1))
          run_one(qi);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<int> all, head, tail;
  std::map<RelationId, std::vector<int>> by_rel;
  for (const RankRecord& rec : res.records) {
    all.push_back(rec.rank);
    (rec.query.dir == Direction::PredictHead ? head : tail).push_back(rec.rank);
    by_rel[rec.query.source.rel].push_back(rec.rank);
  }
  res.report.overall = metrics_from_ranks(all);
  res.report.predict_head = metrics_from_ranks(head);
  res.report.predict_tail = metrics_from_ranks(tail);
  for (const auto& [rid, ranks] : by_rel)
    res.report.per_relation[rid] = metrics_from_ranks(ranks);
  return res;
}

CostPrediction predicted_cost(double L, double n_entities, double n_queries) {
  CostPrediction p;
  p.cross = L * L * n_entities * n_queries;
  double half = L / 2.0;
  p.siamese = half * half * (n_entities + n_queries);
  return p;
}

CostPrediction predicted_whole_graph_cost(double L, double n_entities,
                                          double n_relations) {
  CostPrediction p;
  p.cross = L * L * n_entities * n_entities * n_relations;
  double half = L / 2.0;
  p.siamese = half * half * n_entities * (1.0 + n_relations);
  return p;
}

double whole_graph_cost_ratio(double n_entities, double n_relations) {
  return 4.0 * n_entities * n_relations / (1.0 + n_relations);
}

}  // namespace star
