#include "mixw2/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace mixw2 {

namespace {

double phi_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double phi_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace

int Tape::check(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("Tape: dangling Var handle");
  return v.id;
}

Var Tape::push(Matrix value, std::function<void(Tape&)> pull) {
  Node n;
  n.adjoint = Matrix::Zero(value.rows(), value.cols());
  n.value = std::move(value);
  n.pull = std::move(pull);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::clear() {
  nodes_.clear();
  leaves_.clear();
}

double Tape::value_scalar(Var v) const {
  const Matrix& m = value(v);
  if (m.size() != 1) throw std::invalid_argument("Tape: node is not scalar");
  return m(0, 0);
}

Var Tape::constant(Matrix v) { return push(std::move(v), nullptr); }

Var Tape::scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return constant(std::move(m));
}

Var Tape::leaf(Matrix v) {
  Var out = push(std::move(v), nullptr);
  leaves_.push_back(out);
  return out;
}

namespace {
void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string("Tape: shape mismatch in ") + op);
}
}  // namespace

Var Tape::add(Var a, Var b) {
  const int ia = check(a), ib = check(b);
  require_same_shape(val(ia), val(ib), "add");
  return push(val(ia) + val(ib), [ia, ib, self = nodes_.size()](Tape& t) {
    t.adj(ia) += t.adj(static_cast<int>(self));
    t.adj(ib) += t.adj(static_cast<int>(self));
  });
}

Var Tape::sub(Var a, Var b) {
  const int ia = check(a), ib = check(b);
  require_same_shape(val(ia), val(ib), "sub");
  return push(val(ia) - val(ib), [ia, ib, self = nodes_.size()](Tape& t) {
    t.adj(ia) += t.adj(static_cast<int>(self));
    t.adj(ib) -= t.adj(static_cast<int>(self));
  });
}

Var Tape::cwise_mul(Var a, Var b) {
  const int ia = check(a), ib = check(b);
  require_same_shape(val(ia), val(ib), "cwise_mul");
  return push(val(ia).cwiseProduct(val(ib)),
              [ia, ib, self = nodes_.size()](Tape& t) {
                const Matrix& g = t.adj(static_cast<int>(self));
                t.adj(ia) += g.cwiseProduct(t.val(ib));
                t.adj(ib) += g.cwiseProduct(t.val(ia));
              });
}

Var Tape::cwise_div(Var a, Var b) {
  const int ia = check(a), ib = check(b);
  require_same_shape(val(ia), val(ib), "cwise_div");
  if ((val(ib).array() == 0.0).any())
    throw std::domain_error("Tape: division by zero");
  return push(val(ia).cwiseQuotient(val(ib)),
              [ia, ib, self = nodes_.size()](Tape& t) {
                const Matrix& g = t.adj(static_cast<int>(self));
                const Matrix& bv = t.val(ib);
                t.adj(ia) += g.cwiseQuotient(bv);
                t.adj(ib) -= g.cwiseProduct(t.val(static_cast<int>(self))).cwiseQuotient(bv);
              });
}

Var Tape::matmul(Var a, Var b) {
  const int ia = check(a), ib = check(b);
  if (val(ia).cols() != val(ib).rows())
    throw std::invalid_argument("Tape: inner dimension mismatch in matmul");
  return push(val(ia) * val(ib), [ia, ib, self = nodes_.size()](Tape& t) {
    const Matrix& g = t.adj(static_cast<int>(self));
    t.adj(ia) += g * t.val(ib).transpose();
    t.adj(ib) += t.val(ia).transpose() * g;
  });
}

Var Tape::add_scalar(Var a, double s) {
  const int ia = check(a);
  return push((val(ia).array() + s).matrix(), [ia, self = nodes_.size()](Tape& t) {
    t.adj(ia) += t.adj(static_cast<int>(self));
  });
}

Var Tape::scale(Var a, double s) {
  const int ia = check(a);
  return push(val(ia) * s, [ia, s, self = nodes_.size()](Tape& t) {
    t.adj(ia) += s * t.adj(static_cast<int>(self));
  });
}

Var Tape::square(Var a) {
  const int ia = check(a);
  return push(val(ia).array().square().matrix(), [ia, self = nodes_.size()](Tape& t) {
    t.adj(ia) += 2.0 * t.adj(static_cast<int>(self)).cwiseProduct(t.val(ia));
  });
}

Var Tape::abs(Var a) {
  const int ia = check(a);
  return push(val(ia).cwiseAbs(), [ia, self = nodes_.size()](Tape& t) {
    t.adj(ia) += t.adj(static_cast<int>(self))
                     .cwiseProduct(t.val(ia).unaryExpr(
                         [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }));
  });
}

Var Tape::cos(Var a) {
  const int ia = check(a);
  return push(val(ia).array().cos().matrix(), [ia, self = nodes_.size()](Tape& t) {
    t.adj(ia) -= t.adj(static_cast<int>(self))
                     .cwiseProduct(t.val(ia).array().sin().matrix());
  });
}

Var Tape::exp(Var a) {
  const int ia = check(a);
  return push(val(ia).array().exp().matrix(), [ia, self = nodes_.size()](Tape& t) {
    t.adj(ia) += t.adj(static_cast<int>(self))
                     .cwiseProduct(t.val(static_cast<int>(self)));
  });
}

Var Tape::gelu(Var a) {
  const int ia = check(a);
  return push(val(ia).unaryExpr([](double x) { return x * phi_cdf(x); }),
              [ia, self = nodes_.size()](Tape& t) {
                t.adj(ia) += t.adj(static_cast<int>(self))
                                 .cwiseProduct(t.val(ia).unaryExpr([](double x) {
                                   return phi_cdf(x) + x * phi_pdf(x);
                                 }));
              });
}

Var Tape::relu(Var a) {
  const int ia = check(a);
  return push(val(ia).cwiseMax(0.0), [ia, self = nodes_.size()](Tape& t) {
    t.adj(ia) += t.adj(static_cast<int>(self))
                     .cwiseProduct(t.val(ia).unaryExpr(
                         [](double x) { return x > 0.0 ? 1.0 : 0.0; }));
  });
}

Var Tape::elu(Var a, double alpha) {
  const int ia = check(a);
  return push(val(ia).unaryExpr(
                  [alpha](double x) { return x > 0.0 ? x : alpha * (std::exp(x) - 1.0); }),
              [ia, alpha, self = nodes_.size()](Tape& t) {
                t.adj(ia) += t.adj(static_cast<int>(self))
                                 .cwiseProduct(t.val(ia).unaryExpr([alpha](double x) {
                                   return x > 0.0 ? 1.0 : alpha * std::exp(x);
                                 }));
              });
}

Var Tape::leaky_relu(Var a, double slope) {
  const int ia = check(a);
  return push(val(ia).unaryExpr([slope](double x) { return x > 0.0 ? x : slope * x; }),
              [ia, slope, self = nodes_.size()](Tape& t) {
                t.adj(ia) += t.adj(static_cast<int>(self))
                                 .cwiseProduct(t.val(ia).unaryExpr([slope](double x) {
                                   return x > 0.0 ? 1.0 : slope;
                                 }));
              });
}

Var Tape::sum(Var a) {
  const int ia = check(a);
  Matrix out(1, 1);
  out(0, 0) = val(ia).sum();
  return push(std::move(out), [ia, self = nodes_.size()](Tape& t) {
    t.adj(ia).array() += t.adj(static_cast<int>(self))(0, 0);
  });
}

Var Tape::mean(Var a) {
  const int ia = check(a);
  const double n = static_cast<double>(val(ia).size());
  Matrix out(1, 1);
  out(0, 0) = val(ia).sum() / n;
  return push(std::move(out), [ia, n, self = nodes_.size()](Tape& t) {
    t.adj(ia).array() += t.adj(static_cast<int>(self))(0, 0) / n;
  });
}

Var Tape::coeff(Var a, int i, int j) {
  const int ia = check(a);
  if (i < 0 || i >= val(ia).rows() || j < 0 || j >= val(ia).cols())
    throw std::invalid_argument("Tape: coeff index out of range");
  Matrix out(1, 1);
  out(0, 0) = val(ia)(i, j);
  return push(std::move(out), [ia, i, j, self = nodes_.size()](Tape& t) {
    t.adj(ia)(i, j) += t.adj(static_cast<int>(self))(0, 0);
  });
}

Var Tape::slice_rows(Var a, int start, int len) {
  const int ia = check(a);
  if (start < 0 || len < 0 || start + len > val(ia).rows())
    throw std::invalid_argument("Tape: slice_rows out of range");
  return push(val(ia).middleRows(start, len),
              [ia, start, len, self = nodes_.size()](Tape& t) {
                t.adj(ia).middleRows(start, len) += t.adj(static_cast<int>(self));
              });
}

Var Tape::vstack(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("Tape: vstack of nothing");
  std::vector<int> ids;
  ids.reserve(parts.size());
  Eigen::Index rows = 0;
  const Eigen::Index cols = value(parts.front()).cols();
  for (Var p : parts) {
    ids.push_back(check(p));
    if (value(p).cols() != cols)
      throw std::invalid_argument("Tape: vstack column mismatch");
    rows += value(p).rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (int id : ids) {
    out.middleRows(at, val(id).rows()) = val(id);
    at += val(id).rows();
  }
  return push(std::move(out), [ids, self = nodes_.size()](Tape& t) {
    const Matrix& g = t.adj(static_cast<int>(self));
    Eigen::Index at = 0;
    for (int id : ids) {
      t.adj(id) += g.middleRows(at, t.val(id).rows());
      at += t.val(id).rows();
    }
  });
}

Var Tape::detach(Var a) { return push(value(a), nullptr); }

Var Tape::round(Var a) {
  const int ia = check(a);
  return push(val(ia).unaryExpr([](double x) { return std::round(x); }), nullptr);
}

Var Tape::gaussian_weight(Var mean, Var scale, Matrix eps) {
  const int im = check(mean), is = check(scale);
  require_same_shape(val(im), val(is), "gaussian_weight");
  require_same_shape(val(im), eps, "gaussian_weight");
  Matrix w = val(im) + val(is).cwiseAbs().cwiseProduct(eps);
  return push(std::move(w), [im, is, eps = std::move(eps), self = nodes_.size()](Tape& t) {
    const Matrix& g = t.adj(static_cast<int>(self));
    t.adj(im) += g;
    t.adj(is) += g.cwiseProduct(eps).cwiseProduct(t.val(is).unaryExpr(
        [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }));
  });
}

void Tape::backward(Var root) {
  const int ir = check(root);
  if (nodes_[ir].value.size() != 1)
    throw std::invalid_argument("Tape: backward root must be scalar");
  for (Node& n : nodes_) n.adjoint.setZero();
  nodes_[ir].adjoint(0, 0) = 1.0;
  for (int i = ir; i >= 0; --i) {
    if (nodes_[i].pull && (nodes_[i].adjoint.array() != 0.0).any()) nodes_[i].pull(*this);
  }
}

}  // namespace mixw2
