#include "star/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace star {

Vocabulary::Vocabulary() {
  for (const char* s : {"[PAD]", "[UNK]", "[CLS]", "[SEP]"}) add(s);
}

TokenId Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  TokenId id = static_cast<TokenId>(tokens_.size());
  ids_.emplace(token, id);
  tokens_.push_back(token);
  return id;
}

TokenId Vocabulary::lookup(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

Vocabulary Vocabulary::build_from_train(const KnowledgeGraph& kg) {
  Vocabulary v;
  std::vector<bool> e_seen(kg.entity_keys.size(), false);
  std::vector<bool> r_seen(kg.relation_keys.size(), false);
  for (const Triple& t : kg.train) {
    e_seen[static_cast<size_t>(t.head)] = true;
    e_seen[static_cast<size_t>(t.tail)] = true;
    r_seen[static_cast<size_t>(t.rel)] = true;
  }
  for (size_t e = 0; e < e_seen.size(); ++e)
    if (e_seen[e])
      for (const std::string& w : split_words(kg.texts.entity_text[e])) v.add(w);
  for (size_t r = 0; r < r_seen.size(); ++r)
    if (r_seen[r])
      for (const std::string& w : split_words(kg.texts.relation_text[r])) v.add(w);
  return v;
}

std::vector<TokenId> tokenize(const std::string& text, const Vocabulary& vocab,
                              int max_len) {
  std::vector<TokenId> ids;
  int budget = std::max(0, max_len - 3);  // room for [CLS] and up to two [SEP]
  for (const std::string& w : split_words(text)) {
    if (static_cast<int>(ids.size()) >= budget) break;
    ids.push_back(vocab.lookup(w));
  }
  return ids;
}

TokenSequence build_context_hr(const std::string& h_text,
                               const std::string& r_text,
                               const Vocabulary& vocab, int max_len_hr) {
  std::vector<TokenId> h = tokenize(h_text, vocab, max_len_hr);
  std::vector<TokenId> r = tokenize(r_text, vocab, max_len_hr);
  // [CLS] h [SEP] r [SEP]; entity span gives way first.
  int overflow = static_cast<int>(h.size() + r.size()) + 3 - max_len_hr;
  if (overflow > 0) {
    int cut = std::min<int>(overflow, static_cast<int>(h.size()));
    h.resize(h.size() - static_cast<size_t>(cut));
    overflow -= cut;
    if (overflow > 0) r.resize(r.size() - static_cast<size_t>(overflow));
  }
  TokenSequence seq;
  seq.ids.push_back(Vocabulary::kCls);
  seq.segments.push_back(0);
  for (TokenId id : h) {
    seq.ids.push_back(id);
    seq.segments.push_back(0);
  }
  seq.ids.push_back(Vocabulary::kSep);
  seq.segments.push_back(0);
  for (TokenId id : r) {
    seq.ids.push_back(id);
    seq.segments.push_back(1);
  }
  seq.ids.push_back(Vocabulary::kSep);
  seq.segments.push_back(1);
  return seq;
}

TokenSequence build_context_t(const std::string& t_text,
                              const Vocabulary& vocab, int max_len_t) {
  std::vector<TokenId> t = tokenize(t_text, vocab, max_len_t);
  TokenSequence seq;
  seq.ids.push_back(Vocabulary::kCls);
  seq.segments.push_back(0);
  for (TokenId id : t) {
    seq.ids.push_back(id);
    seq.segments.push_back(0);
  }
  seq.ids.push_back(Vocabulary::kSep);
  seq.segments.push_back(0);
  return seq;
}

TokenSequence build_context_full(const std::string& h_text,
                                 const std::string& r_text,
                                 const std::string& t_text,
                                 const Vocabulary& vocab, int max_len) {
  std::vector<TokenId> h = tokenize(h_text, vocab, max_len);
  std::vector<TokenId> r = tokenize(r_text, vocab, max_len);
  std::vector<TokenId> t = tokenize(t_text, vocab, max_len);
  int content_budget = max_len - 4 - static_cast<int>(r.size());
  int total = static_cast<int>(h.size() + t.size());
  if (total > content_budget && total > 0) {
    // shrink entity spans proportionally
    int keep_h = static_cast<int>(
        std::floor(static_cast<double>(content_budget) * static_cast<double>(h.size()) / total));
    int keep_t = content_budget - keep_h;
    keep_h = std::clamp(keep_h, 0, static_cast<int>(h.size()));
    keep_t = std::clamp(keep_t, 0, static_cast<int>(t.size()));
    h.resize(static_cast<size_t>(keep_h));
    t.resize(static_cast<size_t>(keep_t));
  }
  TokenSequence seq;
  seq.ids.push_back(Vocabulary::kCls);
  seq.segments.push_back(0);
  for (TokenId id : h) {
    seq.ids.push_back(id);
    seq.segments.push_back(0);
  }
  seq.ids.push_back(Vocabulary::kSep);
  seq.segments.push_back(0);
  for (TokenId id : r) {
    seq.ids.push_back(id);
    seq.segments.push_back(1);
  }
  seq.ids.push_back(Vocabulary::kSep);
  seq.segments.push_back(1);
  for (TokenId id : t) {
    seq.ids.push_back(id);
    seq.segments.push_back(0);
  }
  seq.ids.push_back(Vocabulary::kSep);
  seq.segments.push_back(0);
  return seq;
}

namespace {

// Canonical tensor enumeration; refs() and graph binding must agree.
template <typename P, typename F>
void visit_params(P& p, F&& f) {
  f("tok_emb", p.tok_emb);
  f("pos_emb", p.pos_emb);
  f("seg_emb", p.seg_emb);
  f("ln_emb_g", p.ln_emb_g);
  f("ln_emb_b", p.ln_emb_b);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& L = p.layers[l];
    std::string pre = "l" + std::to_string(l) + ".";
    f(pre + "wq", L.wq);
    f(pre + "bq", L.bq);
    f(pre + "wk", L.wk);
    f(pre + "bk", L.bk);
    f(pre + "wv", L.wv);
    f(pre + "bv", L.bv);
    f(pre + "wo", L.wo);
    f(pre + "bo", L.bo);
    f(pre + "ln1_g", L.ln1_g);
    f(pre + "ln1_b", L.ln1_b);
    f(pre + "w1", L.w1);
    f(pre + "b1", L.b1);
    f(pre + "w2", L.w2);
    f(pre + "b2", L.b2);
    f(pre + "ln2_g", L.ln2_g);
    f(pre + "ln2_b", L.ln2_b);
  }
}

ad::Matrix randn(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng,
                 double stddev) {
  std::normal_distribution<double> nd(0.0, stddev);
  ad::Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

}  // namespace

EncoderParams EncoderParams::init(const EncoderConfig& cfg) {
  if (cfg.d_h % cfg.n_heads != 0)
    throw std::invalid_argument("encoder: d_h must be divisible by n_heads");
  if (cfg.max_len_hr < 3 || cfg.max_len_t < 3)
    throw std::invalid_argument("encoder: max lengths must be >= 3");
  if (cfg.vocab_size <= 0)
    throw std::invalid_argument("encoder: vocab_size must be set before init");
  std::mt19937_64 rng(cfg.seed);
  const double s = 0.02;
  EncoderParams p;
  p.tok_emb = randn(cfg.d_h, cfg.vocab_size, rng, s);
  p.pos_emb = randn(cfg.d_h, cfg.max_pos(), rng, s);
  p.seg_emb = randn(cfg.d_h, 2, rng, s);
  p.ln_emb_g = Matrix::Ones(cfg.d_h, 1);
  p.ln_emb_b = Matrix::Zero(cfg.d_h, 1);
  for (int l = 0; l < cfg.n_layers; ++l) {
    Layer L;
    L.wq = randn(cfg.d_h, cfg.d_h, rng, s);
    L.bq = Matrix::Zero(cfg.d_h, 1);
    L.wk = randn(cfg.d_h, cfg.d_h, rng, s);
    L.bk = Matrix::Zero(cfg.d_h, 1);
    L.wv = randn(cfg.d_h, cfg.d_h, rng, s);
    L.bv = Matrix::Zero(cfg.d_h, 1);
    L.wo = randn(cfg.d_h, cfg.d_h, rng, s);
    L.bo = Matrix::Zero(cfg.d_h, 1);
    L.ln1_g = Matrix::Ones(cfg.d_h, 1);
    L.ln1_b = Matrix::Zero(cfg.d_h, 1);
    L.w1 = randn(cfg.d_ff, cfg.d_h, rng, s);
    L.b1 = Matrix::Zero(cfg.d_ff, 1);
    L.w2 = randn(cfg.d_h, cfg.d_ff, rng, s);
    L.b2 = Matrix::Zero(cfg.d_h, 1);
    L.ln2_g = Matrix::Ones(cfg.d_h, 1);
    L.ln2_b = Matrix::Zero(cfg.d_h, 1);
    p.layers.push_back(std::move(L));
  }
  return p;
}

std::vector<ad::ParamRef> EncoderParams::refs(const std::string& prefix) {
  std::vector<ad::ParamRef> out;
  visit_params(*this, [&](const std::string& name, Matrix& m) {
    out.push_back({prefix + "." + name, &m});
  });
  return out;
}

ad::Var encode(ad::Tape& tape, const EncoderParams& params,
               const EncoderConfig& cfg, const TokenSequence& seq,
               std::vector<ad::Matrix>* grads, const EncodeOptions& opts) {
  const int n = seq.length();
  if (n < 1) throw std::invalid_argument("encode: empty sequence");
  if (n > cfg.max_pos())
    throw std::invalid_argument("encode: sequence exceeds positional table");

  // Bind leaves in the same order as refs().
  std::vector<ad::Var> leaves;
  size_t li = 0;
  visit_params(const_cast<EncoderParams&>(params),
               [&](const std::string&, ad::Matrix& m) {
                 ad::Matrix* sink = grads ? &(*grads)[li] : nullptr;
                 leaves.push_back(tape.leaf(m, sink));
                 ++li;
               });
  size_t k = 0;
  auto next = [&]() { return leaves[k++]; };
  ad::Var tok_emb = next(), pos_emb = next(), seg_emb = next();
  ad::Var ln_emb_g = next(), ln_emb_b = next();

  std::vector<int> pos_ids(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) pos_ids[static_cast<size_t>(i)] = i;
  std::vector<int> tok_ids(seq.ids.begin(), seq.ids.end());

  bool drop = opts.train_mode && opts.dropout > 0.0 && opts.rng != nullptr;
  auto maybe_dropout = [&](ad::Var x) {
    return drop ? tape.dropout(x, opts.dropout, *opts.rng) : x;
  };

  ad::Var x = tape.add(tape.gather_cols(tok_emb, tok_ids),
                       tape.add(tape.gather_cols(pos_emb, pos_ids),
                                tape.gather_cols(seg_emb, seq.segments)));
  x = tape.layer_norm_cols(x, ln_emb_g, ln_emb_b);
  x = maybe_dropout(x);

  const int dk = cfg.head_dim();
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dk));
  for (int l = 0; l < cfg.n_layers; ++l) {
    ad::Var wq = next(), bq = next(), wk2 = next(), bk = next();
    ad::Var wv = next(), bv = next(), wo = next(), bo = next();
    ad::Var ln1_g = next(), ln1_b = next();
    ad::Var w1 = next(), b1 = next(), w2 = next(), b2 = next();
    ad::Var ln2_g = next(), ln2_b = next();

    ad::Var q = tape.add_bias(tape.matmul(wq, x), bq);
    ad::Var key = tape.add_bias(tape.matmul(wk2, x), bk);
    ad::Var val = tape.add_bias(tape.matmul(wv, x), bv);
    std::vector<ad::Var> heads;
    for (int h = 0; h < cfg.n_heads; ++h) {
      ad::Var qh = tape.rows(q, h * dk, dk);
      ad::Var kh = tape.rows(key, h * dk, dk);
      ad::Var vh = tape.rows(val, h * dk, dk);
      // scores(i, j) = k_i . q_j; softmax over keys per query column
      ad::Var scores = tape.scale(tape.matmul(tape.transpose(kh), qh), att_scale);
      ad::Var attn = tape.softmax_cols(scores);
      heads.push_back(tape.matmul(vh, attn));
    }
    ad::Var mh = tape.add_bias(tape.matmul(wo, tape.vstack(heads)), bo);
    x = tape.layer_norm_cols(tape.add(x, maybe_dropout(mh)), ln1_g, ln1_b);

    ad::Var ff = tape.add_bias(
        tape.matmul(w2, tape.gelu(tape.add_bias(tape.matmul(w1, x), b1))), b2);
    x = tape.layer_norm_cols(tape.add(x, maybe_dropout(ff)), ln2_g, ln2_b);
  }
  return x;
}

ad::Var pool(ad::Tape& tape, ad::Var encoded) { return tape.col(encoded, 0); }

Eigen::VectorXd encode_pooled(const EncoderParams& params,
                              const EncoderConfig& cfg,
                              const TokenSequence& seq) {
  ad::Tape tape;
  ad::Var u = pool(tape, encode(tape, params, cfg, seq, nullptr));
  return u.value().col(0);
}

}  // namespace star
