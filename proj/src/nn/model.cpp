#include "readkit/nn/model.hpp"

#include <cmath>

#include <json.hpp>

#include "readkit/io.hpp"

namespace readkit::nn {

using nlohmann::json;

void ModelConfig::validate() const {
  if (vocab_size < ControlVocab::kFirstBaseId) {
    throw Error("vocab_size must cover the reserved token range");
  }
  if (d_model <= 0) throw Error("d_model must be positive");
  if (heads <= 0 || d_model % heads != 0) {
    throw Error("heads must divide d_model");
  }
  if (encoder_layers <= 0 || decoder_layers <= 0) {
    throw Error("layer counts must be positive");
  }
  if (ffn_dim <= 0) throw Error("ffn_dim must be positive");
  if (!(head_hidden[0] > head_hidden[1] && head_hidden[1] > head_hidden[2]) ||
      head_hidden[2] <= 0) {
    throw Error("head hidden dims must be strictly decreasing and positive");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw Error("dropout must be in [0,1)");
  if (max_positions <= 0) throw Error("max_positions must be positive");
}

Node* MlpHead::apply(Tape& t, Node* x, double dropout_rate, bool training,
                     std::uint64_t* dropout_state) const {
  Node* h = x;
  for (std::size_t layer = 0; layer < weights.size(); ++layer) {
    h = t.add_rowvec(t.matmul(h, t.param(weights[layer])), t.param(biases[layer]));
    if (layer + 1 < weights.size()) {
      h = t.relu(h);
      if (training && dropout_state) {
        h = t.dropout(h, dropout_rate, *dropout_state, training);
      }
    }
  }
  return h;
}

MlpHead make_mlp_head(ParameterRegistry& params, const std::string& prefix,
                      const std::vector<int>& widths) {
  if (widths.size() < 2) throw Error("mlp head needs at least one layer");
  MlpHead head;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    head.weights.push_back(params.create(prefix + ".w" + std::to_string(i),
                                         widths[i], widths[i + 1]));
    head.biases.push_back(params.create(prefix + ".b" + std::to_string(i), 1,
                                        widths[i + 1], /*decay=*/false));
  }
  return head;
}

Eigen::RowVectorXd mean_pool(const Mat& states, const std::vector<double>& mask) {
  if (static_cast<Eigen::Index>(mask.size()) != states.rows()) {
    throw Error("mask length does not match row count");
  }
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(states.cols());
  int on = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] > 0.5) {
      sum += states.row(static_cast<Eigen::Index>(i));
      ++on;
    }
  }
  if (on == 0) throw AllMaskedError();
  return sum / static_cast<double>(on);
}

namespace {

void xavier_init(Parameter* p, std::uint64_t& state) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(p->value.rows() + p->value.cols()));
  for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
    for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
      p->value(i, j) = uniform_range(state, -limit, limit);
    }
  }
}

}  // namespace

Model::Model(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int d = cfg_.d_model;
  embedding_ = params_.create("embed", cfg_.vocab_size, d);

  auto make_norm = [&](const std::string& name) {
    NormBlock n;
    n.gamma = params_.create(name + ".gamma", 1, d, /*decay=*/false);
    n.beta = params_.create(name + ".beta", 1, d, /*decay=*/false);
    return n;
  };
  auto make_attention = [&](const std::string& name) {
    AttentionBlock a;
    a.wq = params_.create(name + ".wq", d, d);
    a.bq = params_.create(name + ".bq", 1, d, /*decay=*/false);
    a.wk = params_.create(name + ".wk", d, d);
    a.bk = params_.create(name + ".bk", 1, d, /*decay=*/false);
    a.wv = params_.create(name + ".wv", d, d);
    a.bv = params_.create(name + ".bv", 1, d, /*decay=*/false);
    a.wo = params_.create(name + ".wo", d, d);
    a.bo = params_.create(name + ".bo", 1, d, /*decay=*/false);
    return a;
  };
  auto make_ffn = [&](const std::string& name) {
    FfnBlock f;
    f.w1 = params_.create(name + ".w1", d, cfg_.ffn_dim);
    f.b1 = params_.create(name + ".b1", 1, cfg_.ffn_dim, /*decay=*/false);
    f.w2 = params_.create(name + ".w2", cfg_.ffn_dim, d);
    f.b2 = params_.create(name + ".b2", 1, d, /*decay=*/false);
    return f;
  };

  for (int l = 0; l < cfg_.encoder_layers; ++l) {
    const std::string base = "enc" + std::to_string(l);
    EncoderLayer layer;
    layer.ln1 = make_norm(base + ".ln1");
    layer.attn = make_attention(base + ".attn");
    layer.ln2 = make_norm(base + ".ln2");
    layer.ffn = make_ffn(base + ".ffn");
    enc_layers_.push_back(layer);
  }
  enc_final_ln_ = make_norm("enc.ln");

  for (int l = 0; l < cfg_.decoder_layers; ++l) {
    const std::string base = "dec" + std::to_string(l);
    DecoderLayer layer;
    layer.ln1 = make_norm(base + ".ln1");
    layer.self_attn = make_attention(base + ".self");
    layer.ln2 = make_norm(base + ".ln2");
    layer.cross_attn = make_attention(base + ".cross");
    layer.ln3 = make_norm(base + ".ln3");
    layer.ffn = make_ffn(base + ".ffn");
    dec_layers_.push_back(layer);
  }
  dec_final_ln_ = make_norm("dec.ln");

  out_w_ = params_.create("out.w", d, cfg_.vocab_size);
  out_b_ = params_.create("out.b", 1, cfg_.vocab_size, /*decay=*/false);

  reg_head_ = make_mlp_head(params_, "reg",
                            {d, cfg_.head_hidden[0], cfg_.head_hidden[1],
                             cfg_.head_hidden[2], 1});
  cls_head_ = make_mlp_head(params_, "cls",
                            {d, cfg_.head_hidden[0], cfg_.head_hidden[1],
                             cfg_.head_hidden[2], 16});

  positional_ = Mat::Zero(cfg_.max_positions, d);
  for (int pos = 0; pos < cfg_.max_positions; ++pos) {
    for (int i = 0; i < d; i += 2) {
      const double angle =
          static_cast<double>(pos) /
          std::pow(10000.0, static_cast<double>(i) / static_cast<double>(d));
      positional_(pos, i) = std::sin(angle);
      if (i + 1 < d) positional_(pos, i + 1) = std::cos(angle);
    }
  }

  init_parameters();
}

void Model::init_parameters() {
  std::uint64_t state = cfg_.seed ^ 0xA076'1D64'78BD'642FULL;
  for (const auto& p : params_.all()) {
    const bool is_norm_gain = p->name.ends_with(".gamma");
    const bool is_bias_like =
        p->name.ends_with(".beta") || p->name.find(".b") != std::string::npos;
    if (is_norm_gain) {
      p->value.setOnes();
    } else if (is_bias_like) {
      p->value.setZero();
    } else {
      xavier_init(p.get(), state);
    }
  }
}

Mat Model::positional_slice(int length) const {
  if (length > cfg_.max_positions) {
    throw Error("sequence longer than max_positions");
  }
  return positional_.topRows(length);
}

Node* Model::attention(Tape& t, Node* queries, Node* keys_values,
                       const AttentionBlock& block, bool causal) const {
  const int d = cfg_.d_model;
  const int dh = d / cfg_.heads;
  Node* q = t.add_rowvec(t.matmul(queries, t.param(block.wq)), t.param(block.bq));
  Node* k = t.add_rowvec(t.matmul(keys_values, t.param(block.wk)), t.param(block.bk));
  Node* v = t.add_rowvec(t.matmul(keys_values, t.param(block.wv)), t.param(block.bv));

  Mat causal_mask;
  if (causal) {
    const Eigen::Index s = q->value.rows(), tt = k->value.rows();
    causal_mask = Mat::Zero(s, tt);
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = i + 1; j < tt; ++j) causal_mask(i, j) = -1e30;
    }
  }

  std::vector<Node*> head_outputs;
  for (int h = 0; h < cfg_.heads; ++h) {
    Node* qh = t.slice_cols(q, h * dh, dh);
    Node* kh = t.slice_cols(k, h * dh, dh);
    Node* vh = t.slice_cols(v, h * dh, dh);
    Node* scores =
        t.scale(t.matmul(qh, t.transpose(kh)), 1.0 / std::sqrt(static_cast<double>(dh)));
    if (causal) scores = t.add_const(scores, causal_mask);
    Node* attn = t.softmax_rows(scores);
    head_outputs.push_back(t.matmul(attn, vh));
  }
  Node* merged = t.concat_cols(head_outputs);
  return t.add_rowvec(t.matmul(merged, t.param(block.wo)), t.param(block.bo));
}

Node* Model::feed_forward(Tape& t, Node* x, const FfnBlock& block, bool training,
                          std::uint64_t* dropout_state) const {
  Node* h = t.relu(t.add_rowvec(t.matmul(x, t.param(block.w1)), t.param(block.b1)));
  if (training && dropout_state) {
    h = t.dropout(h, cfg_.dropout, *dropout_state, training);
  }
  return t.add_rowvec(t.matmul(h, t.param(block.w2)), t.param(block.b2));
}

Node* Model::encode(Tape& t, const std::vector<int>& src_ids, bool training,
                    std::uint64_t* dropout_state) const {
  Node* x = t.embed(embedding_, src_ids);
  x = t.add_const(x, positional_slice(static_cast<int>(src_ids.size())));
  if (training && dropout_state) {
    x = t.dropout(x, cfg_.dropout, *dropout_state, training);
  }
  for (const auto& layer : enc_layers_) {
    Node* normed = t.layer_norm(x, t.param(layer.ln1.gamma), t.param(layer.ln1.beta));
    Node* attn_out = attention(t, normed, normed, layer.attn, /*causal=*/false);
    if (training && dropout_state) {
      attn_out = t.dropout(attn_out, cfg_.dropout, *dropout_state, training);
    }
    x = t.add(x, attn_out);
    Node* normed2 = t.layer_norm(x, t.param(layer.ln2.gamma), t.param(layer.ln2.beta));
    x = t.add(x, feed_forward(t, normed2, layer.ffn, training, dropout_state));
  }
  return t.layer_norm(x, t.param(enc_final_ln_.gamma), t.param(enc_final_ln_.beta));
}

ForwardGraph Model::forward(Tape& t, const std::vector<int>& src_ids,
                            const std::vector<int>& dec_input_ids, bool training,
                            std::uint64_t* dropout_state) const {
  if (src_ids.empty()) throw Error("encoder input must be non-empty");
  ForwardGraph g;
  g.encoder_out = encode(t, src_ids, training, dropout_state);

  std::vector<double> mask(src_ids.size(), 1.0);
  g.pooled = t.mean_pool_rows(g.encoder_out, mask);
  g.reg_score = reg_head_.apply(t, g.pooled, cfg_.dropout, training, dropout_state);
  g.cls_logits = cls_head_.apply(t, g.pooled, cfg_.dropout, training, dropout_state);

  if (!dec_input_ids.empty()) {
    Node* y = t.embed(embedding_, dec_input_ids);
    y = t.add_const(y, positional_slice(static_cast<int>(dec_input_ids.size())));
    if (training && dropout_state) {
      y = t.dropout(y, cfg_.dropout, *dropout_state, training);
    }
    for (const auto& layer : dec_layers_) {
      Node* n1 = t.layer_norm(y, t.param(layer.ln1.gamma), t.param(layer.ln1.beta));
      Node* self_out = attention(t, n1, n1, layer.self_attn, /*causal=*/true);
      if (training && dropout_state) {
        self_out = t.dropout(self_out, cfg_.dropout, *dropout_state, training);
      }
      y = t.add(y, self_out);
      Node* n2 = t.layer_norm(y, t.param(layer.ln2.gamma), t.param(layer.ln2.beta));
      Node* cross_out = attention(t, n2, g.encoder_out, layer.cross_attn,
                                  /*causal=*/false);
      if (training && dropout_state) {
        cross_out = t.dropout(cross_out, cfg_.dropout, *dropout_state, training);
      }
      y = t.add(y, cross_out);
      Node* n3 = t.layer_norm(y, t.param(layer.ln3.gamma), t.param(layer.ln3.beta));
      y = t.add(y, feed_forward(t, n3, layer.ffn, training, dropout_state));
    }
    y = t.layer_norm(y, t.param(dec_final_ln_.gamma), t.param(dec_final_ln_.beta));
    g.dec_logits = t.add_rowvec(t.matmul(y, t.param(out_w_)), t.param(out_b_));
  }
  return g;
}

HeadOutputs Model::predict_heads(const std::vector<int>& src_ids) const {
  Tape t;
  auto g = forward(t, src_ids, {}, /*training=*/false, nullptr);
  HeadOutputs out;
  out.yod_score = g.reg_score->value(0, 0);
  for (int i = 0; i < 16; ++i) out.yod_logits[static_cast<std::size_t>(i)] = g.cls_logits->value(0, i);
  return out;
}

std::vector<int> Model::greedy_decode(const std::vector<int>& src_ids,
                                      int max_len) const {
  std::vector<int> dec_input = {ControlVocab::kBosId};
  std::vector<int> out;
  for (int step = 0; step < max_len; ++step) {
    Tape t;
    auto g = forward(t, src_ids, dec_input, /*training=*/false, nullptr);
    const Eigen::Index last = g.dec_logits->value.rows() - 1;
    Eigen::Index best = 0;
    g.dec_logits->value.row(last).maxCoeff(&best);
    const int next = static_cast<int>(best);
    if (next == ControlVocab::kEosId) break;
    out.push_back(next);
    dec_input.push_back(next);
  }
  return out;
}

void Model::save(const std::string& path, const ControlVocab& vocab) const {
  json doc;
  doc["format_version"] = 1;
  doc["config"] = {{"vocab_size", cfg_.vocab_size},
                   {"d_model", cfg_.d_model},
                   {"encoder_layers", cfg_.encoder_layers},
                   {"decoder_layers", cfg_.decoder_layers},
                   {"heads", cfg_.heads},
                   {"ffn_dim", cfg_.ffn_dim},
                   {"head_hidden", cfg_.head_hidden},
                   {"dropout", cfg_.dropout},
                   {"seed", cfg_.seed},
                   {"max_positions", cfg_.max_positions}};
  doc["vocab"] = vocab.tokens();
  json params = json::array();
  for (const auto& p : params_.all()) {
    json entry;
    entry["name"] = p->name;
    entry["rows"] = p->value.rows();
    entry["cols"] = p->value.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(p->value.size()));
    for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
        data.push_back(p->value(i, j));
      }
    }
    entry["data"] = std::move(data);
    params.push_back(std::move(entry));
  }
  doc["params"] = std::move(params);
  io::atomic_write(path, doc.dump());
}

Model::Loaded Model::load(const std::string& path) {
  json doc = json::parse(io::read_file(path), nullptr, false);
  if (doc.is_discarded()) throw Error("checkpoint is not valid JSON: " + path);
  if (!doc.contains("format_version") || doc["format_version"].get<int>() != 1) {
    throw Error("unsupported checkpoint version");
  }
  const auto& c = doc["config"];
  ModelConfig cfg;
  cfg.vocab_size = c.at("vocab_size").get<int>();
  cfg.d_model = c.at("d_model").get<int>();
  cfg.encoder_layers = c.at("encoder_layers").get<int>();
  cfg.decoder_layers = c.at("decoder_layers").get<int>();
  cfg.heads = c.at("heads").get<int>();
  cfg.ffn_dim = c.at("ffn_dim").get<int>();
  cfg.head_hidden = c.at("head_hidden").get<std::array<int, 3>>();
  cfg.dropout = c.at("dropout").get<double>();
  cfg.seed = c.at("seed").get<std::uint64_t>();
  cfg.max_positions = c.at("max_positions").get<int>();

  Loaded loaded{std::make_unique<Model>(cfg),
                ControlVocab::from_tokens(
                    doc.at("vocab").get<std::vector<std::string>>())};
  if (loaded.vocab.size() != cfg.vocab_size) {
    throw Error("checkpoint vocab size does not match config");
  }

  for (const auto& entry : doc.at("params")) {
    Parameter* p = loaded.model->params_.get(entry.at("name").get<std::string>());
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    if (rows != p->value.rows() || cols != p->value.cols()) {
      throw Error("checkpoint shape mismatch for " + p->name);
    }
    const auto data = entry.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw Error("checkpoint data length mismatch for " + p->name);
    }
    std::size_t at = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) p->value(i, j) = data[at++];
    }
  }
  return loaded;
}

}  // namespace readkit::nn
