#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "star/autodiff.hpp"
#include "star/cost.hpp"
#include "star/kg.hpp"

namespace star {

using TokenId = int32_t;

class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kCls = 2;
  static constexpr TokenId kSep = 3;

  Vocabulary();

  TokenId add(const std::string& token);  // idempotent
  TokenId lookup(const std::string& token) const;  // kUnk when absent
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Word-level vocabulary over the text of elements that occur in train.
  static Vocabulary build_from_train(const KnowledgeGraph& kg);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

// Lowercased alphanumeric word split; no subwords.
std::vector<std::string> split_words(const std::string& text);

// Content ids only, truncated to max_len minus the 3-token special budget.
std::vector<TokenId> tokenize(const std::string& text, const Vocabulary& vocab,
                              int max_len);

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<int> segments;
  int length() const { return static_cast<int>(ids.size()); }
};

struct EncoderConfig {
  int d_h = 64;
  int n_layers = 2;
  int n_heads = 4;
  int d_ff = 128;
  int max_len_hr = 32;
  int max_len_t = 32;
  int vocab_size = 0;  // filled after vocabulary build
  double dropout = 0.1;
  uint64_t seed = 42;

  int max_pos() const { return max_len_hr + max_len_t; }  // cross-encoder fits too
  int head_dim() const { return d_h / n_heads; }
};

// [CLS] h [SEP] r [SEP]; segment 0 over entity span, 1 over relation span.
// Entity span truncated before relation span on overflow.
TokenSequence build_context_hr(const std::string& h_text,
                               const std::string& r_text,
                               const Vocabulary& vocab, int max_len_hr);

// [CLS] t [SEP]; all segments 0.
TokenSequence build_context_t(const std::string& t_text,
                              const Vocabulary& vocab, int max_len_t);

// [CLS] h [SEP] r [SEP] t [SEP] for the cross-encoder baseline; entity spans
// truncated proportionally on overflow. Budget is max_len_hr + max_len_t.
TokenSequence build_context_full(const std::string& h_text,
                                 const std::string& r_text,
                                 const std::string& t_text,
                                 const Vocabulary& vocab, int max_len);

struct EncoderParams {
  using Matrix = ad::Matrix;
  struct Layer {
    Matrix wq, bq, wk, bk, wv, bv, wo, bo;
    Matrix ln1_g, ln1_b;
    Matrix w1, b1, w2, b2;
    Matrix ln2_g, ln2_b;
  };
  Matrix tok_emb, pos_emb, seg_emb;
  Matrix ln_emb_g, ln_emb_b;
  std::vector<Layer> layers;

  static EncoderParams init(const EncoderConfig& cfg);
  std::vector<ad::ParamRef> refs(const std::string& prefix = "enc");
};

struct EncodeOptions {
  bool train_mode = false;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;
};

// Full multi-head self-attention encoder; output d_h x n.
ad::Var encode(ad::Tape& tape, const EncoderParams& params,
               const EncoderConfig& cfg, const TokenSequence& seq,
               std::vector<ad::Matrix>* grads,
               const EncodeOptions& opts = {});

// Column 0 ([CLS]).
ad::Var pool(ad::Tape& tape, ad::Var encoded);

// Plain-value encode for inference paths that never backprop.
Eigen::VectorXd encode_pooled(const EncoderParams& params,
                              const EncoderConfig& cfg,
                              const TokenSequence& seq);

struct EntityRepCache {
  std::vector<Eigen::VectorXd> reps;  // indexed by EntityId
  uint64_t params_version = UINT64_MAX;
  bool fresh_for(uint64_t version) const { return params_version == version; }
};

}  // namespace star
