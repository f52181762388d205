#include "bridgekit/numerics/tape.hpp"

#include <cmath>
#include <string>

#include "bridgekit/error.hpp"

namespace bridgekit {

namespace {

void require_same_tape(Var a, Var b, const char* op) {
  if (!a.valid() || !b.valid() || a.tape() != b.tape()) {
    throw ConfigError(std::string(op) + ": operands must live on the same tape");
  }
}

void require_shape(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    throw ConfigError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ")");
  }
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ConfigError("scalar(): node is not 1x1");
  return v(0, 0);
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.op = "constant";
  return push(std::move(n));
}

Var Tape::param(Parameter& p) {
  Node n;
  n.value = p.value;
  n.op = "param";
  n.requires_grad = true;
  n.param = &p;
  return push(std::move(n));
}

Var Tape::record(Matrix value, std::string op, const std::vector<Var>& inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.op = std::move(op);
  for (const Var& v : inputs) {
    if (v.tape() != this) throw ConfigError("record: input from a different tape");
    n.requires_grad = n.requires_grad || nodes_[static_cast<std::size_t>(v.id())].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

bool Tape::requires_grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id())].requires_grad; }

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[static_cast<std::size_t>(v.id())];
  if (!n.requires_grad) return;
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw ConfigError("backward: loss from a different tape");
  const Matrix& lv = loss.value();
  if (lv.rows() != 1 || lv.cols() != 1) throw ConfigError("backward: loss must be a 1x1 scalar");
  accumulate(loss, Matrix::Ones(1, 1));
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad || !n.requires_grad) continue;
    if (n.param != nullptr) {
      n.param->grad += n.grad;
    } else if (n.backward) {
      n.backward(*this, n.grad);
    } else {
      throw UnsupportedOpError("backward: op '" + n.op + "' has no gradient rule");
    }
    // Release intermediate gradients as we go.
    n.grad = Matrix();
    n.has_grad = false;
  }
}

// ---- ops -------------------------------------------------------------------

Var matmul(Var a, Var b) {
  require_same_tape(a, b, "matmul");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  require_shape(av.cols() == bv.rows(), "matmul", av, bv);
  Matrix out = av * bv;
  return a.tape()->record(std::move(out), "matmul", {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a, g * b.value().transpose());
    if (t.requires_grad(b)) t.accumulate(b, a.value().transpose() * g);
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b, "add");
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "add", a.value(), b.value());
  Matrix out = a.value() + b.value();
  return a.tape()->record(std::move(out), "add", {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b, "sub");
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "sub", a.value(), b.value());
  Matrix out = a.value() - b.value();
  return a.tape()->record(std::move(out), "sub", {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

Var scale(Var a, double s) {
  Matrix out = a.value() * s;
  return a.tape()->record(std::move(out), "scale", {a}, [a, s](Tape& t, const Matrix& g) { t.accumulate(a, g * s); });
}

Var hadamard(Var a, Var b) {
  require_same_tape(a, b, "hadamard");
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "hadamard", a.value(), b.value());
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape()->record(std::move(out), "hadamard", {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a, g.cwiseProduct(b.value()));
    if (t.requires_grad(b)) t.accumulate(b, g.cwiseProduct(a.value()));
  });
}

Var add_row(Var a, Var row) {
  require_same_tape(a, row, "add_row");
  require_shape(row.rows() == 1 && row.cols() == a.cols(), "add_row", a.value(), row.value());
  Matrix out = a.value().rowwise() + row.value().row(0);
  return a.tape()->record(std::move(out), "add_row", {a, row}, [a, row](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    if (t.requires_grad(row)) t.accumulate(row, g.colwise().sum());
  });
}

Var relu(Var a) {
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape()->record(std::move(out), "relu", {a}, [a](Tape& t, const Matrix& g) {
    // Subgradient 0 at exactly 0.
    Matrix mask = (a.value().array() > 0.0).cast<double>().matrix();
    t.accumulate(a, g.cwiseProduct(mask));
  });
}

Var tanh(Var a) {
  Matrix out = a.value().array().tanh().matrix();
  Matrix y = out;
  return a.tape()->record(std::move(out), "tanh", {a}, [a, y = std::move(y)](Tape& t, const Matrix& g) {
    t.accumulate(a, g.cwiseProduct((1.0 - y.array().square()).matrix()));
  });
}

Var sigmoid(Var a) {
  Matrix out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  Matrix y = out;
  return a.tape()->record(std::move(out), "sigmoid", {a}, [a, y = std::move(y)](Tape& t, const Matrix& g) {
    t.accumulate(a, g.cwiseProduct((y.array() * (1.0 - y.array())).matrix()));
  });
}

Var transpose(Var a) {
  Matrix out = a.value().transpose();
  return a.tape()->record(std::move(out), "transpose", {a},
                          [a](Tape& t, const Matrix& g) { t.accumulate(a, Matrix(g.transpose())); });
}

Var concat_cols(Var a, Var b) {
  require_same_tape(a, b, "concat_cols");
  require_shape(a.rows() == b.rows(), "concat_cols", a.value(), b.value());
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a.value(), b.value();
  const Eigen::Index ca = a.cols();
  const Eigen::Index cb = b.cols();
  return a.tape()->record(std::move(out), "concat_cols", {a, b}, [a, b, ca, cb](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a, g.leftCols(ca));
    if (t.requires_grad(b)) t.accumulate(b, g.rightCols(cb));
  });
}

Var concat_rows(Var a, Var b) {
  require_same_tape(a, b, "concat_rows");
  require_shape(a.cols() == b.cols(), "concat_rows", a.value(), b.value());
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a.value(), b.value();
  const Eigen::Index ra = a.rows();
  const Eigen::Index rb = b.rows();
  return a.tape()->record(std::move(out), "concat_rows", {a, b}, [a, b, ra, rb](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a, g.topRows(ra));
    if (t.requires_grad(b)) t.accumulate(b, g.bottomRows(rb));
  });
}

Var broadcast_rows(Var row, Eigen::Index n) {
  if (row.rows() != 1) throw ConfigError("broadcast_rows: input must have one row");
  Matrix out = row.value().replicate(n, 1);
  return row.tape()->record(std::move(out), "broadcast_rows", {row},
                            [row](Tape& t, const Matrix& g) { t.accumulate(row, g.colwise().sum()); });
}

Var gather_rows(Var a, std::vector<int> rows) {
  const Matrix& av = a.value();
  Matrix out(static_cast<Eigen::Index>(rows.size()), av.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= av.rows()) throw ConfigError("gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = av.row(rows[i]);
  }
  const Eigen::Index n = av.rows();
  return a.tape()->record(std::move(out), "gather_rows", {a}, [a, n, rows = std::move(rows)](Tape& t, const Matrix& g) {
    Matrix ga = Matrix::Zero(n, g.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) ga.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
    t.accumulate(a, ga);
  });
}

Var sum_rows(Var a) {
  Matrix out = a.value().colwise().sum();
  const Eigen::Index n = a.rows();
  return a.tape()->record(std::move(out), "sum_rows", {a},
                          [a, n](Tape& t, const Matrix& g) { t.accumulate(a, g.replicate(n, 1)); });
}

Var mean_rows(Var a) {
  const Eigen::Index n = a.rows();
  if (n == 0) throw ConfigError("mean_rows: empty input");
  Matrix out = a.value().colwise().mean();
  return a.tape()->record(std::move(out), "mean_rows", {a}, [a, n](Tape& t, const Matrix& g) {
    t.accumulate(a, g.replicate(n, 1) / static_cast<double>(n));
  });
}

Var sum_all(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  const Eigen::Index r = a.rows();
  const Eigen::Index c = a.cols();
  return a.tape()->record(std::move(out), "sum_all", {a},
                          [a, r, c](Tape& t, const Matrix& g) { t.accumulate(a, Matrix::Constant(r, c, g(0, 0))); });
}

Var mean_all(Var a) {
  const Eigen::Index r = a.rows();
  const Eigen::Index c = a.cols();
  if (r * c == 0) throw ConfigError("mean_all: empty input");
  Matrix out(1, 1);
  out(0, 0) = a.value().mean();
  const double inv = 1.0 / static_cast<double>(r * c);
  return a.tape()->record(std::move(out), "mean_all", {a}, [a, r, c, inv](Tape& t, const Matrix& g) {
    t.accumulate(a, Matrix::Constant(r, c, g(0, 0) * inv));
  });
}

Var row_cosine(Var a, Var b) {
  require_same_tape(a, b, "row_cosine");
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "row_cosine", a.value(), b.value());
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const Eigen::Index n = av.rows();
  Matrix out(n, 1);
  std::vector<double> na(static_cast<std::size_t>(n)), nb(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    na[i] = av.row(i).norm();
    nb[i] = bv.row(i).norm();
    out(i, 0) = (na[i] < 1e-12 || nb[i] < 1e-12) ? 0.0 : av.row(i).dot(bv.row(i)) / (na[i] * nb[i]);
  }
  Matrix cos = out;
  return a.tape()->record(std::move(out), "row_cosine", {a, b},
                          [a, b, na = std::move(na), nb = std::move(nb), cos = std::move(cos)](Tape& t, const Matrix& g) {
    const Matrix& av = a.value();
    const Matrix& bv = b.value();
    const bool need_a = t.requires_grad(a);
    const bool need_b = t.requires_grad(b);
    Matrix ga = Matrix::Zero(av.rows(), av.cols());
    Matrix gb = Matrix::Zero(bv.rows(), bv.cols());
    for (Eigen::Index i = 0; i < av.rows(); ++i) {
      if (na[i] < 1e-12 || nb[i] < 1e-12) continue;
      const double c = cos(i, 0);
      const double gi = g(i, 0);
      if (need_a) ga.row(i) = gi * (bv.row(i) / (na[i] * nb[i]) - c * av.row(i) / (na[i] * na[i]));
      if (need_b) gb.row(i) = gi * (av.row(i) / (na[i] * nb[i]) - c * bv.row(i) / (nb[i] * nb[i]));
    }
    if (need_a) t.accumulate(a, ga);
    if (need_b) t.accumulate(b, gb);
  });
}

Var spmm(std::shared_ptr<const SparseMatrix> adj, Var a) {
  if (adj->cols() != a.rows()) throw ConfigError("spmm: adjacency columns do not match node count");
  Matrix out = (*adj) * a.value();
  return a.tape()->record(std::move(out), "spmm", {a}, [adj, a](Tape& t, const Matrix& g) {
    t.accumulate(a, Matrix(adj->transpose() * g));
  });
}

Var mse(Var pred, const Matrix& target) {
  const Matrix& pv = pred.value();
  require_shape(pv.rows() == target.rows() && pv.cols() == target.cols(), "mse", pv, target);
  Matrix diff = pv - target;
  Matrix out(1, 1);
  out(0, 0) = diff.squaredNorm() / static_cast<double>(diff.size());
  const double k = 2.0 / static_cast<double>(diff.size());
  return pred.tape()->record(std::move(out), "mse", {pred}, [pred, diff = std::move(diff), k](Tape& t, const Matrix& g) {
    t.accumulate(pred, diff * (k * g(0, 0)));
  });
}

Var bce_with_logits(Var logits, const std::vector<double>& labels) {
  const Matrix& z = logits.value();
  if (z.cols() != 1 || z.rows() != static_cast<Eigen::Index>(labels.size()) || labels.empty()) {
    throw ConfigError("bce_with_logits: expects Nx1 logits and N labels");
  }
  const double n = static_cast<double>(labels.size());
  double total = 0.0;
  Matrix dz(z.rows(), 1);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double x = z(i, 0);
    const double y = labels[static_cast<std::size_t>(i)];
    total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
    dz(i, 0) = (1.0 / (1.0 + std::exp(-x)) - y) / n;
  }
  Matrix out(1, 1);
  out(0, 0) = total / n;
  return logits.tape()->record(std::move(out), "bce_with_logits", {logits},
                               [logits, dz = std::move(dz)](Tape& t, const Matrix& g) { t.accumulate(logits, dz * g(0, 0)); });
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    RowVector e = (logits.row(i).array() - m).exp().matrix();
    out.row(i) = e / e.sum();
  }
  return out;
}

Var softmax_cross_entropy(Var logits, const std::vector<int>& labels, const std::vector<int>& rows) {
  const Matrix& z = logits.value();
  if (rows.empty()) throw ConfigError("softmax_cross_entropy: no rows selected");
  if (static_cast<Eigen::Index>(labels.size()) != z.rows()) throw ConfigError("softmax_cross_entropy: label count mismatch");
  const double n = static_cast<double>(rows.size());
  Matrix dz = Matrix::Zero(z.rows(), z.cols());
  double total = 0.0;
  for (int r : rows) {
    const int y = labels[static_cast<std::size_t>(r)];
    if (y < 0 || y >= z.cols()) throw ConfigError("softmax_cross_entropy: label out of range");
    const double m = z.row(r).maxCoeff();
    RowVector e = (z.row(r).array() - m).exp().matrix();
    const double s = e.sum();
    total += -(z(r, y) - m - std::log(s));
    dz.row(r) += e / (s * n);
    dz(r, y) -= 1.0 / n;
  }
  Matrix out(1, 1);
  out(0, 0) = total / n;
  return logits.tape()->record(std::move(out), "softmax_cross_entropy", {logits},
                               [logits, dz = std::move(dz)](Tape& t, const Matrix& g) { t.accumulate(logits, dz * g(0, 0)); });
}

Var detach(Var a) { return a.tape()->constant(a.value()); }

}  // namespace bridgekit
