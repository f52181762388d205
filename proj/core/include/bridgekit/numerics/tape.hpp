#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bridgekit/numerics/matrix.hpp"
#include "bridgekit/numerics/params.hpp"

namespace bridgekit {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const;

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Records a forward computation and replays it backwards.
///
/// Nodes are appended in evaluation order, so a reverse sweep over node ids
/// is a valid topological order. A node requires a gradient when any of its
/// inputs does; parameter leaves are the only sources. Gradients reach
/// Parameter::grad by accumulation, so a parameter used twice receives the sum.
class Tape {
 public:
  /// Backward rule: receives the tape and the gradient of this node's output.
  using BackwardFn = std::function<void(Tape&, const Matrix&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf whose gradient accumulates into `p.grad` during backward().
  Var param(Parameter& p);

  /// Records an op. `backward` may be empty, in which case reaching the node
  /// during backward() raises UnsupportedOpError.
  Var record(Matrix value, std::string op, const std::vector<Var>& inputs, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be 1x1.
  void backward(Var loss);

  /// Adds `g` into the gradient slot of `v`; no-op when `v` needs no gradient.
  void accumulate(Var v, const Matrix& g);
  bool requires_grad(Var v) const;

  const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::string op;
    BackwardFn backward;
    Parameter* param = nullptr;
  };

  Var push(Node node);

  std::deque<Node> nodes_;  // deque keeps value references stable on append
};

// ---- differentiable ops ---------------------------------------------------

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
/// Elementwise product; used with a constant mask for dropout.
Var hadamard(Var a, Var b);
/// Adds a 1xC row to every row of `a`.
Var add_row(Var a, Var row);
Var relu(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
Var transpose(Var a);
Var concat_cols(Var a, Var b);
Var concat_rows(Var a, Var b);
/// Repeats a 1xC row `n` times.
Var broadcast_rows(Var row, Eigen::Index n);
Var gather_rows(Var a, std::vector<int> rows);
/// Column sums / means as a 1xC row.
Var sum_rows(Var a);
Var mean_rows(Var a);
Var sum_all(Var a);
Var mean_all(Var a);
/// Row-wise cosine similarity, Nx1. Rows with norm < 1e-12 give 0 and no gradient.
Var row_cosine(Var a, Var b);
/// Sparse left-multiplication `adj * a` (message passing).
Var spmm(std::shared_ptr<const SparseMatrix> adj, Var a);
/// Mean of squared differences over all entries against a fixed target.
Var mse(Var pred, const Matrix& target);
/// Mean binary cross-entropy of sigmoid(logits) against 0/1 labels; logits Nx1.
Var bce_with_logits(Var logits, const std::vector<double>& labels);
/// Mean softmax cross-entropy over the listed rows.
Var softmax_cross_entropy(Var logits, const std::vector<int>& labels, const std::vector<int>& rows);
/// Copies the value and cuts the gradient path; upstream receives exactly zero.
Var detach(Var a);

/// Row-wise softmax of a plain matrix.
Matrix softmax_rows(const Matrix& logits);

}  // namespace bridgekit
