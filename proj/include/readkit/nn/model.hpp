#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "readkit/nn/tape.hpp"
#include "readkit/nn/vocab.hpp"

namespace readkit::nn {

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 64;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int heads = 2;
  int ffn_dim = 128;
  std::array<int, 3> head_hidden{512, 256, 128};
  double dropout = 0.1;
  std::uint64_t seed = 0;
  int max_positions = 128;

  void validate() const;  // throws Error on a bad combination
};

struct HeadOutputs {
  double yod_score = 0.0;
  std::array<double, 16> yod_logits{};
};

// Four affine layers with ReLU between them; dropout after each hidden
// activation in training mode.
struct MlpHead {
  std::vector<Parameter*> weights;
  std::vector<Parameter*> biases;
  Node* apply(Tape& t, Node* x, double dropout_rate, bool training,
              std::uint64_t* dropout_state) const;
};

MlpHead make_mlp_head(ParameterRegistry& params, const std::string& prefix,
                      const std::vector<int>& widths);

// Plain-matrix pooling used by callers outside a tape.
Eigen::RowVectorXd mean_pool(const Mat& states, const std::vector<double>& mask);

struct ForwardGraph {
  Node* encoder_out = nullptr;  // S x d
  Node* pooled = nullptr;       // 1 x d
  Node* reg_score = nullptr;    // 1 x 1
  Node* cls_logits = nullptr;   // 1 x 16
  Node* dec_logits = nullptr;   // T x vocab, null when dec_input empty
};

class Model {
 public:
  explicit Model(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  ParameterRegistry& params() { return params_; }
  const ParameterRegistry& params() const { return params_; }

  // src_ids must be non-empty; dec_input_ids may be empty to skip the decoder.
  ForwardGraph forward(Tape& t, const std::vector<int>& src_ids,
                       const std::vector<int>& dec_input_ids, bool training,
                       std::uint64_t* dropout_state) const;

  HeadOutputs predict_heads(const std::vector<int>& src_ids) const;

  // Greedy argmax decoding until eos or max_len tokens.
  std::vector<int> greedy_decode(const std::vector<int>& src_ids, int max_len) const;

  void save(const std::string& path, const ControlVocab& vocab) const;
  struct Loaded {
    std::unique_ptr<Model> model;
    ControlVocab vocab;
  };
  static Loaded load(const std::string& path);

 private:
  struct AttentionBlock {
    Parameter *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
  };
  struct NormBlock {
    Parameter *gamma, *beta;
  };
  struct FfnBlock {
    Parameter *w1, *b1, *w2, *b2;
  };
  struct EncoderLayer {
    NormBlock ln1, ln2;
    AttentionBlock attn;
    FfnBlock ffn;
  };
  struct DecoderLayer {
    NormBlock ln1, ln2, ln3;
    AttentionBlock self_attn, cross_attn;
    FfnBlock ffn;
  };

  Node* attention(Tape& t, Node* queries, Node* keys_values,
                  const AttentionBlock& block, bool causal) const;
  Node* feed_forward(Tape& t, Node* x, const FfnBlock& block, bool training,
                     std::uint64_t* dropout_state) const;
  Node* encode(Tape& t, const std::vector<int>& src_ids, bool training,
               std::uint64_t* dropout_state) const;
  Mat positional_slice(int length) const;
  void init_parameters();

  ModelConfig cfg_;
  ParameterRegistry params_;
  Parameter* embedding_;
  std::vector<EncoderLayer> enc_layers_;
  std::vector<DecoderLayer> dec_layers_;
  NormBlock enc_final_ln_;
  NormBlock dec_final_ln_;
  Parameter* out_w_;
  Parameter* out_b_;
  MlpHead reg_head_;
  MlpHead cls_head_;
  Mat positional_;  // max_positions x d
};

}  // namespace readkit::nn
