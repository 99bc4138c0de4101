#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace star::ad {

using Matrix = Eigen::MatrixXd;

// Reverse-mode tape. Nodes are created in topological order; backward()
// walks the tape in reverse. Leaf nodes reference external tensors (no copy)
// and accumulate gradients into an external sink.
class Tape;

class Var {
 public:
  Var() : tape_(nullptr), idx_(-1) {}
  Var(Tape* t, int idx) : tape_(t), idx_(idx) {}

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int idx() const { return idx_; }

 private:
  Tape* tape_;
  int idx_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf over an external tensor; value is referenced, not copied. The
  // tensor and grad_sink (may be null for forward-only graphs) must
  // outlive the tape; grad_sink must match the tensor's shape.
  Var leaf(const Matrix& value, Matrix* grad_sink);
  Var constant(Matrix value);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var hadamard(Var a, Var b);
  Var cdiv(Var a, Var b);        // elementwise a/b
  Var add_bias(Var a, Var bias); // bias d x 1 broadcast over columns
  Var scale(Var a, double s);
  Var add_const(Var a, double c);
  Var scale_by(Var a, Var s);    // s is 1x1
  Var transpose(Var a);
  Var rows(Var a, int first, int count);
  Var col(Var a, int j);
  Var vstack(const std::vector<Var>& parts);
  Var gather_cols(Var table, const std::vector<int>& ids);
  Var softmax_cols(Var a);
  Var layer_norm_cols(Var x, Var gain, Var bias, double eps = 1e-5);
  Var gelu(Var a);
  Var sigmoid(Var a);
  Var tanh_(Var a);
  Var relu(Var a);
  Var log_(Var a);
  Var square(Var a);
  Var clamp(Var a, double lo, double hi);
  Var l2_norm(Var a);  // 1x1 Frobenius norm
  Var sum(Var a);      // 1x1
  Var mean(Var a);     // 1x1
  Var dropout(Var a, double rate, std::mt19937_64& rng);

  // Seeds d(out)=1 and propagates to all leaves' sinks.
  void backward(Var out);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix storage;
    const Matrix* vptr = nullptr;  // &storage for interior nodes
    Matrix grad;
    bool has_grad = false;
    Matrix* sink = nullptr;
    std::function<void(Tape&, Node&)> back;
    const Matrix& v() const { return *vptr; }
  };

  Var push(Matrix value, std::function<void(Tape&, Node&)> back);
  const Matrix& val(int idx) const { return *nodes_[static_cast<size_t>(idx)]->vptr; }
  Matrix& grad_of(int idx);

  std::vector<std::unique_ptr<Node>> nodes_;
  friend class Var;
};

// Named parameter registry shared by model structs; drives Adam,
// checkpointing and gradient checks.
struct ParamRef {
  std::string name;
  Matrix* tensor;
};

// Gradient accumulators parallel to a registry.
struct GradBuffer {
  std::vector<Matrix> g;
  explicit GradBuffer(const std::vector<ParamRef>& refs) {
    for (const ParamRef& r : refs) g.push_back(Matrix::Zero(r.tensor->rows(), r.tensor->cols()));
  }
  void zero() {
    for (Matrix& m : g) m.setZero();
  }
  std::vector<Matrix*> ptrs() {
    std::vector<Matrix*> p;
    for (Matrix& m : g) p.push_back(&m);
    return p;
  }
};

class AdamState {
 public:
  void step(const std::vector<ParamRef>& params,
            const std::vector<Matrix*>& grads, double lr,
            double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void reset() { m_.clear(); v_.clear(); t_ = 0; }

 private:
  std::vector<Matrix> m_, v_;
  int64_t t_ = 0;
};

}  // namespace star::ad
