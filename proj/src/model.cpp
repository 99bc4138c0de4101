#include "star/model.hpp"

namespace star {

StarModel StarModel::init(EncoderConfig cfg, const KnowledgeGraph& kg) {
  StarModel m;
  m.vocab = Vocabulary::build_from_train(kg);
  cfg.vocab_size = m.vocab.size();
  m.cfg = cfg;
  m.enc = EncoderParams::init(cfg);
  m.cls = ClassifierParams::init(cfg.d_h, cfg.seed + 1);
  m.cross = CrossHeadParams::init(cfg.d_h, cfg.seed + 2);
  m.bilinear_w = ad::Matrix::Identity(cfg.d_h, cfg.d_h);
  return m;
}

std::vector<ad::ParamRef> StarModel::refs() {
  std::vector<ad::ParamRef> out = enc.refs();
  for (auto& r : cls.refs()) out.push_back(r);
  for (auto& r : cross.refs()) out.push_back(r);
  out.push_back({"bilinear_w", &bilinear_w});
  return out;
}

TokenSequence hr_context(const StarModel& m, const KnowledgeGraph& kg,
                         EntityId h, RelationId r) {
  return build_context_hr(kg.texts.entity_text[static_cast<size_t>(h)],
                          kg.texts.relation_text[static_cast<size_t>(r)],
                          m.vocab, m.cfg.max_len_hr);
}

TokenSequence t_context(const StarModel& m, const KnowledgeGraph& kg, EntityId e) {
  return build_context_t(kg.texts.entity_text[static_cast<size_t>(e)], m.vocab,
                         m.cfg.max_len_t);
}

TokenSequence full_context(const StarModel& m, const KnowledgeGraph& kg,
                           const Triple& t) {
  return build_context_full(kg.texts.entity_text[static_cast<size_t>(t.head)],
                            kg.texts.relation_text[static_cast<size_t>(t.rel)],
                            kg.texts.entity_text[static_cast<size_t>(t.tail)],
                            m.vocab, m.cfg.max_len_hr + m.cfg.max_len_t);
}

Eigen::VectorXd encode_hr_pooled(const StarModel& m, const KnowledgeGraph& kg,
                                 EntityId h, RelationId r, CostCounter* counter) {
  TokenSequence seq = hr_context(m, kg, h, r);
  if (counter) counter->record(EncoderKind::Siamese, seq.length());
  return encode_pooled(m.enc, m.cfg, seq);
}

Eigen::VectorXd encode_t_pooled(const StarModel& m, const KnowledgeGraph& kg,
                                EntityId e, CostCounter* counter) {
  TokenSequence seq = t_context(m, kg, e);
  if (counter) counter->record(EncoderKind::Siamese, seq.length());
  return encode_pooled(m.enc, m.cfg, seq);
}

RepPair encode_pair(const StarModel& m, const KnowledgeGraph& kg,
                    const Triple& t, CostCounter* counter) {
  return {encode_hr_pooled(m, kg, t.head, t.rel, counter),
          encode_t_pooled(m, kg, t.tail, counter)};
}

void precompute_entity_reps(const StarModel& m, const KnowledgeGraph& kg,
                            EntityRepCache& cache, CostCounter* counter) {
  if (cache.fresh_for(m.version)) return;
  cache.reps.resize(static_cast<size_t>(kg.num_entities()));
  for (EntityId e = 0; e < kg.num_entities(); ++e)
    cache.reps[static_cast<size_t>(e)] = encode_t_pooled(m, kg, e, counter);
  cache.params_version = m.version;
}

double star_sc(const StarModel& m, const Eigen::VectorXd& u,
               const Eigen::VectorXd& v) {
  return classify(interactive_concat(u, v), m.cls).s_c;
}

double star_sd(const StarModel& m, const Eigen::VectorXd& u,
               const Eigen::VectorXd& v, DistanceMetric metric) {
  return distance_score(u, v, metric, &m.bilinear_w);
}

double cross_encoder_score(const StarModel& m, const KnowledgeGraph& kg,
                           const Triple& t, CostCounter* counter) {
  TokenSequence seq = full_context(m, kg, t);
  if (counter) counter->record(EncoderKind::Cross, seq.length());
  ad::Tape tape;
  ad::Var pooled = pool(tape, encode(tape, m.enc, m.cfg, seq, nullptr));
  ad::Var sc = cross_head_sc(tape, pooled, m.cross, nullptr);
  return sc.scalar();
}

}  // namespace star
