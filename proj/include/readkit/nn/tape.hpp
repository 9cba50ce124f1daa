#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "readkit/common.hpp"

namespace readkit::nn {

using Mat = Eigen::MatrixXd;

struct Parameter {
  std::string name;
  Mat value;
  Mat grad;
  Mat m;  // first moment
  Mat v;  // second moment
  bool decay = true;

  void zero_grad() { grad.setZero(); }
};

class ParameterRegistry {
 public:
  Parameter* create(const std::string& name, int rows, int cols, bool decay = true);
  Parameter* get(const std::string& name) const;  // throws Error when absent
  const std::vector<std::unique_ptr<Parameter>>& all() const { return params_; }
  void zero_grads();
  std::int64_t coordinate_count() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

// Reverse-mode autodiff over a per-graph tape. Creation order is a valid
// topological order, so backward just walks the node list in reverse.
struct Node {
  Mat value;
  Mat grad;
  std::function<void(Node&)> backprop;
};

class Tape {
 public:
  Node* constant(Mat value);
  Node* param(Parameter* p);

  Node* matmul(Node* a, Node* b);
  Node* add(Node* a, Node* b);              // same shape
  Node* add_rowvec(Node* a, Node* row);     // row broadcast over a's rows
  Node* add_const(Node* a, const Mat& c);   // constant offset, same shape
  Node* scale(Node* a, double c);
  Node* relu(Node* a);
  Node* transpose(Node* a);
  Node* softmax_rows(Node* a);
  Node* layer_norm(Node* x, Node* gamma, Node* beta, double eps = 1e-5);
  Node* slice_cols(Node* a, int start, int len);
  Node* concat_cols(const std::vector<Node*>& parts);
  // Row gather from an embedding table; gradients accumulate straight into
  // the table parameter.
  Node* embed(Parameter* table, const std::vector<int>& ids);
  // Mean over rows whose mask entry is nonzero; throws AllMaskedError.
  Node* mean_pool_rows(Node* a, const std::vector<double>& mask);
  // Inverted dropout; identity when !training or rate == 0.
  Node* dropout(Node* a, double rate, std::uint64_t& rng_state, bool training);
  // Mean over rows of -log softmax(logits)[i, target_i]; returns 1x1.
  Node* cross_entropy_rows(Node* logits, const std::vector<int>& targets);
  // (pred - target)^2 for a 1x1 node; returns 1x1.
  Node* mse_scalar(Node* pred, double target);

  void backward(Node* loss);  // loss must be 1x1
  std::size_t node_count() const { return nodes_.size(); }

 private:
  Node* make(Mat value, std::function<void(Node&)> backprop);
  std::deque<Node> nodes_;
};

// Portable deterministic RNG primitives used throughout the toy model.
std::uint64_t splitmix64(std::uint64_t& state);
double uniform01(std::uint64_t& state);                    // [0,1)
double uniform_range(std::uint64_t& state, double lo, double hi);

}  // namespace readkit::nn
