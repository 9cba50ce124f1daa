#include "readkit/nn/tape.hpp"

#include <cmath>

namespace readkit::nn {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

double uniform_range(std::uint64_t& state, double lo, double hi) {
  return lo + (hi - lo) * uniform01(state);
}

Parameter* ParameterRegistry::create(const std::string& name, int rows, int cols,
                                     bool decay) {
  for (const auto& p : params_) {
    if (p->name == name) throw Error("duplicate parameter name: " + name);
  }
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Mat::Zero(rows, cols);
  p->grad = Mat::Zero(rows, cols);
  p->m = Mat::Zero(rows, cols);
  p->v = Mat::Zero(rows, cols);
  p->decay = decay;
  params_.push_back(std::move(p));
  return params_.back().get();
}

Parameter* ParameterRegistry::get(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  throw Error("unknown parameter: " + name);
}

void ParameterRegistry::zero_grads() {
  for (auto& p : params_) p->zero_grad();
}

std::int64_t ParameterRegistry::coordinate_count() const {
  std::int64_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

Node* Tape::make(Mat value, std::function<void(Node&)> backprop) {
  nodes_.emplace_back();
  Node& n = nodes_.back();
  n.value = std::move(value);
  n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  n.backprop = std::move(backprop);
  return &n;
}

Node* Tape::constant(Mat value) { return make(std::move(value), nullptr); }

Node* Tape::param(Parameter* p) {
  return make(p->value, [p](Node& n) { p->grad += n.grad; });
}

Node* Tape::matmul(Node* a, Node* b) {
  Mat v = a->value * b->value;
  return make(std::move(v), [a, b](Node& n) {
    a->grad += n.grad * b->value.transpose();
    b->grad += a->value.transpose() * n.grad;
  });
}

Node* Tape::add(Node* a, Node* b) {
  Mat v = a->value + b->value;
  return make(std::move(v), [a, b](Node& n) {
    a->grad += n.grad;
    b->grad += n.grad;
  });
}

Node* Tape::add_rowvec(Node* a, Node* row) {
  Mat v = a->value.rowwise() + row->value.row(0);
  return make(std::move(v), [a, row](Node& n) {
    a->grad += n.grad;
    row->grad.row(0) += n.grad.colwise().sum();
  });
}

Node* Tape::add_const(Node* a, const Mat& c) {
  Mat v = a->value + c;
  return make(std::move(v), [a](Node& n) { a->grad += n.grad; });
}

Node* Tape::scale(Node* a, double c) {
  Mat v = a->value * c;
  return make(std::move(v), [a, c](Node& n) { a->grad += n.grad * c; });
}

Node* Tape::relu(Node* a) {
  Mat v = a->value.cwiseMax(0.0);
  return make(std::move(v), [a](Node& n) {
    a->grad.array() += n.grad.array() * (a->value.array() > 0.0).cast<double>();
  });
}

Node* Tape::transpose(Node* a) {
  Mat v = a->value.transpose();
  return make(std::move(v), [a](Node& n) { a->grad += n.grad.transpose(); });
}

Node* Tape::softmax_rows(Node* a) {
  Mat v = a->value;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double mx = v.row(i).maxCoeff();
    v.row(i) = (v.row(i).array() - mx).exp();
    v.row(i) /= v.row(i).sum();
  }
  Mat y = v;
  return make(std::move(v), [a, y](Node& n) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double dot = n.grad.row(i).cwiseProduct(y.row(i)).sum();
      a->grad.row(i).array() +=
          (n.grad.row(i).array() - dot) * y.row(i).array();
    }
  });
}

Node* Tape::layer_norm(Node* x, Node* gamma, Node* beta, double eps) {
  const Eigen::Index rows = x->value.rows(), cols = x->value.cols();
  Mat xhat(rows, cols);
  Eigen::VectorXd inv_sigma(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double mu = x->value.row(i).mean();
    const double var = (x->value.row(i).array() - mu).square().mean();
    inv_sigma(i) = 1.0 / std::sqrt(var + eps);
    xhat.row(i) = (x->value.row(i).array() - mu) * inv_sigma(i);
  }
  Mat v = ((xhat.array().rowwise() * gamma->value.row(0).array()).rowwise() +
           beta->value.row(0).array())
              .matrix();
  return make(std::move(v), [x, gamma, beta, xhat, inv_sigma](Node& n) {
    const Eigen::Index cols = xhat.cols();
    const double dcols = static_cast<double>(cols);
    for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
      Eigen::RowVectorXd g =
          n.grad.row(i).cwiseProduct(gamma->value.row(0));
      const double mean_g = g.mean();
      const double mean_gx = g.cwiseProduct(xhat.row(i)).sum() / dcols;
      x->grad.row(i).array() +=
          inv_sigma(i) * (g.array() - mean_g - xhat.row(i).array() * mean_gx);
      gamma->grad.row(0) += n.grad.row(i).cwiseProduct(xhat.row(i));
      beta->grad.row(0) += n.grad.row(i);
    }
  });
}

Node* Tape::slice_cols(Node* a, int start, int len) {
  Mat v = a->value.middleCols(start, len);
  return make(std::move(v), [a, start, len](Node& n) {
    a->grad.middleCols(start, len) += n.grad;
  });
}

Node* Tape::concat_cols(const std::vector<Node*>& parts) {
  if (parts.empty()) throw Error("concat_cols over no parts");
  Eigen::Index rows = parts[0]->value.rows(), cols = 0;
  for (auto* p : parts) cols += p->value.cols();
  Mat v(rows, cols);
  Eigen::Index at = 0;
  for (auto* p : parts) {
    v.middleCols(at, p->value.cols()) = p->value;
    at += p->value.cols();
  }
  std::vector<Node*> parents = parts;
  return make(std::move(v), [parents](Node& n) {
    Eigen::Index at = 0;
    for (auto* p : parents) {
      p->grad += n.grad.middleCols(at, p->value.cols());
      at += p->value.cols();
    }
  });
}

Node* Tape::embed(Parameter* table, const std::vector<int>& ids) {
  Mat v(static_cast<Eigen::Index>(ids.size()), table->value.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table->value.rows()) {
      throw Error("embedding id out of range");
    }
    v.row(static_cast<Eigen::Index>(i)) = table->value.row(ids[i]);
  }
  std::vector<int> keep = ids;
  return make(std::move(v), [table, keep](Node& n) {
    for (std::size_t i = 0; i < keep.size(); ++i) {
      table->grad.row(keep[i]) += n.grad.row(static_cast<Eigen::Index>(i));
    }
  });
}

Node* Tape::mean_pool_rows(Node* a, const std::vector<double>& mask) {
  if (static_cast<Eigen::Index>(mask.size()) != a->value.rows()) {
    throw Error("mask length does not match row count");
  }
  Eigen::Index on = 0;
  Mat v = Mat::Zero(1, a->value.cols());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] > 0.5) {
      v.row(0) += a->value.row(static_cast<Eigen::Index>(i));
      ++on;
    }
  }
  if (on == 0) throw AllMaskedError();
  v /= static_cast<double>(on);
  std::vector<double> keep = mask;
  const double inv = 1.0 / static_cast<double>(on);
  return make(std::move(v), [a, keep, inv](Node& n) {
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (keep[i] > 0.5) {
        a->grad.row(static_cast<Eigen::Index>(i)) += n.grad.row(0) * inv;
      }
    }
  });
}

Node* Tape::dropout(Node* a, double rate, std::uint64_t& rng_state, bool training) {
  if (!training || rate <= 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - rate);
  Mat mask(a->value.rows(), a->value.cols());
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
      mask(i, j) = (uniform01(rng_state) >= rate) ? keep_scale : 0.0;
    }
  }
  Mat v = a->value.cwiseProduct(mask);
  return make(std::move(v), [a, mask](Node& n) {
    a->grad += n.grad.cwiseProduct(mask);
  });
}

Node* Tape::cross_entropy_rows(Node* logits, const std::vector<int>& targets) {
  const Eigen::Index rows = logits->value.rows();
  if (static_cast<Eigen::Index>(targets.size()) != rows) {
    throw Error("target count does not match logit rows");
  }
  Mat probs(rows, logits->value.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const int t = targets[static_cast<std::size_t>(i)];
    if (t < 0 || t >= logits->value.cols()) throw Error("target id out of range");
    const double mx = logits->value.row(i).maxCoeff();
    Eigen::RowVectorXd z = (logits->value.row(i).array() - mx).matrix();
    const double lse = std::log(z.array().exp().sum());
    probs.row(i) = (z.array() - lse).exp().matrix();
    loss -= z(t) - lse;
  }
  loss /= static_cast<double>(rows);
  Mat v(1, 1);
  v(0, 0) = loss;
  std::vector<int> keep = targets;
  return make(std::move(v), [logits, probs, keep](Node& n) {
    const double up = n.grad(0, 0) / static_cast<double>(probs.rows());
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
      logits->grad.row(i) += probs.row(i) * up;
      logits->grad(i, keep[static_cast<std::size_t>(i)]) -= up;
    }
  });
}

Node* Tape::mse_scalar(Node* pred, double target) {
  const double diff = pred->value(0, 0) - target;
  Mat v(1, 1);
  v(0, 0) = diff * diff;
  return make(std::move(v), [pred, diff](Node& n) {
    pred->grad(0, 0) += 2.0 * diff * n.grad(0, 0);
  });
}

void Tape::backward(Node* loss) {
  if (loss->value.rows() != 1 || loss->value.cols() != 1) {
    throw Error("backward requires a scalar loss node");
  }
  loss->grad(0, 0) = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (it->backprop) it->backprop(*it);
  }
}

}  // namespace readkit::nn
