#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace mixw2 {

class Tape;

/// Handle to a node on a tape. Cheap to copy; only valid for the tape that
/// created it, until the next clear().
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode autodiff tape over dense Eigen matrices. Scalars are 1x1.
/// Node creation order is the topological order; backward() walks it in
/// reverse. One tape per training step; a tape is confined to one thread.
class Tape {
 public:
  using Matrix = Eigen::MatrixXd;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // leaves
  Var constant(Matrix v);
  Var scalar(double v);
  Var leaf(Matrix v);  // trainable root, listed in leaves()

  // arithmetic
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var cwise_mul(Var a, Var b);
  Var cwise_div(Var a, Var b);  // throws on zero divisor entries
  Var matmul(Var a, Var b);
  Var add_scalar(Var a, double s);
  Var scale(Var a, double s);

  // elementwise nonlinearities
  Var square(Var a);
  Var abs(Var a);
  Var cos(Var a);
  Var exp(Var a);
  Var gelu(Var a);  // exact x * Phi(x)
  Var relu(Var a);
  Var elu(Var a, double alpha);
  Var leaky_relu(Var a, double slope);

  // reductions and shape
  Var sum(Var a);
  Var mean(Var a);
  Var coeff(Var a, int i, int j = 0);
  Var slice_rows(Var a, int start, int len);
  Var vstack(const std::vector<Var>& parts);

  // gradient control
  Var detach(Var a);  // same value, gradient barrier
  Var round(Var a);   // rounds half away from zero; zero partial

  /// Fused reparameterized Gaussian weight: value = mean + |scale| .* eps.
  /// Gradients: d/dmean = 1, d/dscale = sign(scale) .* eps.
  Var gaussian_weight(Var mean, Var scale, Matrix eps);

  /// Reverse sweep from a scalar root. Resets all adjoints first, so
  /// repeated calls give identical results.
  void backward(Var root);

  const Matrix& value(Var v) const { return nodes_[check(v)].value; }
  const Matrix& adjoint(Var v) const { return nodes_[check(v)].adjoint; }
  double value_scalar(Var v) const;

  const std::vector<Var>& leaves() const { return leaves_; }
  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    Matrix value;
    Matrix adjoint;
    // Accumulates this node's adjoint into its parents; empty for leaves
    // and gradient barriers.
    std::function<void(Tape&)> pull;
  };

  int check(Var v) const;
  Var push(Matrix value, std::function<void(Tape&)> pull);
  Matrix& adj(int id) { return nodes_[id].adjoint; }
  const Matrix& val(int id) const { return nodes_[id].value; }

  std::vector<Node> nodes_;
  std::vector<Var> leaves_;
};

}  // namespace mixw2
