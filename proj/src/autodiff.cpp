#include "star/autodiff.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace star::ad {

const Matrix& Var::value() const { return tape_->val(idx_); }

Var Tape::push(Matrix value, std::function<void(Tape&, Node&)> back) {
  auto n = std::make_unique<Node>();
  n->storage = std::move(value);
  n->vptr = &n->storage;
  n->back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix& Tape::grad_of(int idx) {
  Node& n = *nodes_[static_cast<size_t>(idx)];
  if (!n.has_grad) {
    n.grad = Matrix::Zero(n.v().rows(), n.v().cols());
    n.has_grad = true;
  }
  return n.grad;
}

Var Tape::leaf(const Matrix& value, Matrix* grad_sink) {
  auto n = std::make_unique<Node>();
  n->vptr = &value;
  n->sink = grad_sink;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::constant(Matrix value) { return push(std::move(value), nullptr); }

Var Tape::matmul(Var a, Var b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  int ia = a.idx(), ib = b.idx();
  return push(a.value() * b.value(), [ia, ib](Tape& t, Node& n) {
    t.grad_of(ia).noalias() += n.grad * t.val(ib).transpose();
    t.grad_of(ib).noalias() += t.val(ia).transpose() * n.grad;
  });
}

Var Tape::add(Var a, Var b) {
  int ia = a.idx(), ib = b.idx();
  return push(a.value() + b.value(), [ia, ib](Tape& t, Node& n) {
    t.grad_of(ia) += n.grad;
    t.grad_of(ib) += n.grad;
  });
}

Var Tape::sub(Var a, Var b) {
  int ia = a.idx(), ib = b.idx();
  return push(a.value() - b.value(), [ia, ib](Tape& t, Node& n) {
    t.grad_of(ia) += n.grad;
    t.grad_of(ib) -= n.grad;
  });
}

Var Tape::hadamard(Var a, Var b) {
  int ia = a.idx(), ib = b.idx();
  return push(a.value().cwiseProduct(b.value()), [ia, ib](Tape& t, Node& n) {
    t.grad_of(ia) += n.grad.cwiseProduct(t.val(ib));
    t.grad_of(ib) += n.grad.cwiseProduct(t.val(ia));
  });
}

Var Tape::cdiv(Var a, Var b) {
  int ia = a.idx(), ib = b.idx();
  return push(a.value().cwiseQuotient(b.value()), [ia, ib](Tape& t, Node& n) {
    const Matrix& bv = t.val(ib);
    const Matrix& av = t.val(ia);
    t.grad_of(ia) += n.grad.cwiseQuotient(bv);
    t.grad_of(ib) -= n.grad.cwiseProduct(av).cwiseQuotient(bv.cwiseProduct(bv));
  });
}

Var Tape::add_bias(Var a, Var bias) {
  if (bias.cols() != 1 || bias.rows() != a.rows())
    throw std::invalid_argument("add_bias: bias must be d x 1");
  int ia = a.idx(), ib = bias.idx();
  Matrix v = a.value();
  v.colwise() += Eigen::VectorXd(bias.value().col(0));
  return push(std::move(v), [ia, ib](Tape& t, Node& n) {
    t.grad_of(ia) += n.grad;
    t.grad_of(ib) += n.grad.rowwise().sum();
  });
}

Var Tape::scale(Var a, double s) {
  int ia = a.idx();
  return push(a.value() * s, [ia, s](Tape& t, Node& n) { t.grad_of(ia) += n.grad * s; });
}

Var Tape::add_const(Var a, double c) {
  int ia = a.idx();
  return push(a.value().array() + c, [ia](Tape& t, Node& n) { t.grad_of(ia) += n.grad; });
}

Var Tape::scale_by(Var a, Var s) {
  if (s.rows() != 1 || s.cols() != 1) throw std::invalid_argument("scale_by: s must be 1x1");
  int ia = a.idx(), is = s.idx();
  return push(a.value() * s.scalar(), [ia, is](Tape& t, Node& n) {
    double sv = t.val(is)(0, 0);
    t.grad_of(ia) += n.grad * sv;
    t.grad_of(is)(0, 0) += n.grad.cwiseProduct(t.val(ia)).sum();
  });
}

Var Tape::transpose(Var a) {
  int ia = a.idx();
  return push(a.value().transpose(), [ia](Tape& t, Node& n) {
    t.grad_of(ia) += n.grad.transpose();
  });
}

Var Tape::rows(Var a, int first, int count) {
  int ia = a.idx();
  return push(a.value().middleRows(first, count), [ia, first, count](Tape& t, Node& n) {
    t.grad_of(ia).middleRows(first, count) += n.grad;
  });
}

Var Tape::col(Var a, int j) {
  int ia = a.idx();
  return push(a.value().col(j), [ia, j](Tape& t, Node& n) {
    t.grad_of(ia).col(j) += n.grad;
  });
}

Var Tape::vstack(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("vstack: empty");
  Eigen::Index total = 0;
  for (const Var& p : parts) total += p.rows();
  Matrix v(total, parts[0].cols());
  Eigen::Index off = 0;
  std::vector<int> idxs;
  std::vector<int> heights;
  for (const Var& p : parts) {
    v.middleRows(off, p.rows()) = p.value();
    idxs.push_back(p.idx());
    heights.push_back(static_cast<int>(p.rows()));
    off += p.rows();
  }
  return push(std::move(v), [idxs, heights](Tape& t, Node& n) {
    Eigen::Index off2 = 0;
    for (size_t i = 0; i < idxs.size(); ++i) {
      t.grad_of(idxs[i]) += n.grad.middleRows(off2, heights[i]);
      off2 += heights[i];
    }
  });
}

Var Tape::gather_cols(Var table, const std::vector<int>& ids) {
  int it = table.idx();
  Matrix v(table.rows(), static_cast<Eigen::Index>(ids.size()));
  for (size_t j = 0; j < ids.size(); ++j)
    v.col(static_cast<Eigen::Index>(j)) = table.value().col(ids[j]);
  return push(std::move(v), [it, ids](Tape& t, Node& n) {
    Matrix& g = t.grad_of(it);
    for (size_t j = 0; j < ids.size(); ++j)
      g.col(ids[j]) += n.grad.col(static_cast<Eigen::Index>(j));
  });
}

Var Tape::softmax_cols(Var a) {
  int ia = a.idx();
  Matrix v = a.value();
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::VectorXd c = v.col(j);
    double mx = c.maxCoeff();
    c = (c.array() - mx).exp();
    v.col(j) = c / c.sum();
  }
  return push(std::move(v), [ia](Tape& t, Node& n) {
    Matrix& g = t.grad_of(ia);
    for (Eigen::Index j = 0; j < n.v().cols(); ++j) {
      Eigen::VectorXd s = n.v().col(j);
      Eigen::VectorXd go = n.grad.col(j);
      double dot = s.dot(go);
      g.col(j) += (go.array() - dot).matrix().cwiseProduct(s);
    }
  });
}

Var Tape::layer_norm_cols(Var x, Var gain, Var bias, double eps) {
  int ix = x.idx(), ig = gain.idx(), ib = bias.idx();
  const Matrix& xv = x.value();
  Eigen::Index d = xv.rows();
  Matrix xhat(d, xv.cols());
  Eigen::VectorXd inv_std(xv.cols());
  for (Eigen::Index j = 0; j < xv.cols(); ++j) {
    double mu = xv.col(j).mean();
    Eigen::VectorXd c = xv.col(j).array() - mu;
    double var = c.squaredNorm() / static_cast<double>(d);
    double is = 1.0 / std::sqrt(var + eps);
    xhat.col(j) = c * is;
    inv_std(j) = is;
  }
  Matrix y = xhat;
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    y.col(j) = y.col(j).cwiseProduct(gain.value().col(0)) + bias.value().col(0);
  return push(std::move(y), [ix, ig, ib, xhat, inv_std](Tape& t, Node& n) {
    const Matrix& gn = t.val(ig);
    Matrix& gx = t.grad_of(ix);
    Matrix& gg = t.grad_of(ig);
    Matrix& gb = t.grad_of(ib);
    for (Eigen::Index j = 0; j < n.grad.cols(); ++j) {
      Eigen::VectorXd go = n.grad.col(j);
      gb.col(0) += go;
      gg.col(0) += go.cwiseProduct(xhat.col(j));
      Eigen::VectorXd gxh = go.cwiseProduct(gn.col(0));
      double m1 = gxh.mean();
      double m2 = gxh.cwiseProduct(xhat.col(j)).mean();
      gx.col(j) +=
          inv_std(j) * (gxh.array() - m1 - xhat.col(j).array() * m2).matrix();
    }
  });
}

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

Var Tape::gelu(Var a) {
  int ia = a.idx();
  Matrix v = a.value().unaryExpr(
      [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); });
  return push(std::move(v), [ia](Tape& t, Node& n) {
    const Matrix& x = t.val(ia);
    Matrix d = x.unaryExpr([](double xi) {
      double phi = 0.5 * (1.0 + std::erf(xi * kInvSqrt2));
      double pdf = kInvSqrt2Pi * std::exp(-0.5 * xi * xi);
      return phi + xi * pdf;
    });
    t.grad_of(ia) += n.grad.cwiseProduct(d);
  });
}

Var Tape::sigmoid(Var a) {
  int ia = a.idx();
  Matrix v = a.value().unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  return push(std::move(v), [ia](Tape& t, Node& n) {
    Matrix d = n.v().cwiseProduct((1.0 - n.v().array()).matrix());
    t.grad_of(ia) += n.grad.cwiseProduct(d);
  });
}

Var Tape::tanh_(Var a) {
  int ia = a.idx();
  Matrix v = a.value().array().tanh();
  return push(std::move(v), [ia](Tape& t, Node& n) {
    Matrix d = (1.0 - n.v().array().square()).matrix();
    t.grad_of(ia) += n.grad.cwiseProduct(d);
  });
}

Var Tape::relu(Var a) {
  int ia = a.idx();
  Matrix v = a.value().cwiseMax(0.0);
  return push(std::move(v), [ia](Tape& t, Node& n) {
    const Matrix& x = t.val(ia);
    t.grad_of(ia) += n.grad.cwiseProduct((x.array() > 0.0).cast<double>().matrix());
  });
}

Var Tape::log_(Var a) {
  int ia = a.idx();
  Matrix v = a.value().array().log();
  return push(std::move(v), [ia](Tape& t, Node& n) {
    t.grad_of(ia) += n.grad.cwiseQuotient(t.val(ia));
  });
}

Var Tape::square(Var a) {
  int ia = a.idx();
  Matrix v = a.value().array().square();
  return push(std::move(v), [ia](Tape& t, Node& n) {
    t.grad_of(ia) += 2.0 * n.grad.cwiseProduct(t.val(ia));
  });
}

Var Tape::clamp(Var a, double lo, double hi) {
  int ia = a.idx();
  Matrix v = a.value().cwiseMax(lo).cwiseMin(hi);
  return push(std::move(v), [ia, lo, hi](Tape& t, Node& n) {
    const Matrix& x = t.val(ia);
    Matrix mask = ((x.array() >= lo) && (x.array() <= hi)).cast<double>().matrix();
    t.grad_of(ia) += n.grad.cwiseProduct(mask);
  });
}

Var Tape::l2_norm(Var a) {
  int ia = a.idx();
  double norm = a.value().norm();
  Matrix v(1, 1);
  v(0, 0) = norm;
  return push(std::move(v), [ia, norm](Tape& t, Node& n) {
    if (norm < 1e-30) return;
    t.grad_of(ia) += (n.grad(0, 0) / norm) * t.val(ia);
  });
}

Var Tape::sum(Var a) {
  int ia = a.idx();
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return push(std::move(v), [ia](Tape& t, Node& n) {
    t.grad_of(ia).array() += n.grad(0, 0);
  });
}

Var Tape::mean(Var a) {
  int ia = a.idx();
  double count = static_cast<double>(a.value().size());
  Matrix v(1, 1);
  v(0, 0) = a.value().sum() / count;
  return push(std::move(v), [ia, count](Tape& t, Node& n) {
    t.grad_of(ia).array() += n.grad(0, 0) / count;
  });
}

Var Tape::dropout(Var a, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return a;
  int ia = a.idx();
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(a.rows(), a.cols());
  double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.rows(); ++i)
    for (Eigen::Index j = 0; j < mask.cols(); ++j)
      mask(i, j) = keep(rng) ? scale : 0.0;
  return push(a.value().cwiseProduct(mask), [ia, mask](Tape& t, Node& n) {
    t.grad_of(ia) += n.grad.cwiseProduct(mask);
  });
}

void Tape::backward(Var out) {
  if (out.value().size() != 1)
    throw std::invalid_argument("backward: output must be scalar");
  grad_of(out.idx())(0, 0) = 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    Node& n = *nodes_[static_cast<size_t>(i)];
    if (!n.has_grad) continue;
    if (n.back) n.back(*this, n);
    if (n.sink) *n.sink += n.grad;
  }
}

void AdamState::step(const std::vector<ParamRef>& params,
                     const std::vector<Matrix*>& grads, double lr,
                     double beta1, double beta2, double eps) {
  if (m_.empty()) {
    for (const ParamRef& p : params) {
      m_.push_back(Matrix::Zero(p.tensor->rows(), p.tensor->cols()));
      v_.push_back(Matrix::Zero(p.tensor->rows(), p.tensor->cols()));
    }
  }
  ++t_;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = *grads[i];
    m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
    v_[i] = beta2 * v_[i] + (1.0 - beta2) * g.cwiseProduct(g);
    Matrix mhat = m_[i] / bc1;
    Matrix vhat = v_[i] / bc2;
    *params[i].tensor -=
        lr * mhat.cwiseQuotient((vhat.cwiseSqrt().array() + eps).matrix());
  }
}

}  // namespace star::ad
