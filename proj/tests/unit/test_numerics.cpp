#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "bridgekit/error.hpp"
#include "bridgekit/numerics/gradcheck.hpp"
#include "bridgekit/numerics/layers.hpp"
#include "bridgekit/numerics/optim.hpp"
#include "bridgekit/numerics/persist.hpp"
#include "bridgekit/numerics/tape.hpp"
#include "toy.hpp"

using namespace bridgekit;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = standard_normal(rng);
  }
  return m;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("linear: identity weight passes the input through") {
  Tape t;
  Var y = linear(t.constant(make_matrix({{1, 2}})), t.constant(make_matrix({{1, 0}, {0, 1}})),
                 t.constant(make_matrix({{0, 0}})));
  CHECK(y.value() == make_matrix({{1, 2}}));
}

TEST_CASE("linear: hand arithmetic 1*2 + 1*3 + 1") {
  Tape t;
  Var y = linear(t.constant(make_matrix({{1, 1}})), t.constant(make_matrix({{2}, {3}})), t.constant(make_matrix({{1}})));
  CHECK(y.scalar() == doctest::Approx(6.0));
}

TEST_CASE("linear: mismatched inner dimension is a configuration error") {
  Tape t;
  CHECK_THROWS_AS(linear(t.constant(Matrix::Zero(3, 4)), t.constant(Matrix::Zero(5, 2)), t.constant(Matrix::Zero(1, 2))),
                  ConfigError);
}

TEST_CASE("make_matrix rejects ragged rows; require_finite rejects NaN") {
  CHECK_THROWS_AS(make_matrix({{1, 2}, {3}}), ConfigError);
  Matrix m = make_matrix({{1, std::numeric_limits<double>::quiet_NaN()}});
  CHECK_FALSE(all_finite(m));
  CHECK_THROWS_AS(require_finite(m, "features"), DataError);
}

TEST_CASE("gradient of sum(x W) is x in every column of W") {
  ParamStore store;
  Parameter& w = store.add("w", make_matrix({{0.3, -1.0, 2.0}, {0.5, 0.1, -0.7}}));
  Tape t;
  Var loss = sum_all(matmul(t.constant(make_matrix({{1, 2}})), t.param(w)));
  t.backward(loss);
  for (int j = 0; j < 3; ++j) {
    CHECK(w.grad(0, j) == 1.0);
    CHECK(w.grad(1, j) == 2.0);
  }
}

TEST_CASE("a loss that does not depend on a parameter leaves its gradient at zero") {
  ParamStore store;
  Parameter& w = store.add("w", make_matrix({{1, 2}}));
  Parameter& v = store.add("v", make_matrix({{3}}));
  Tape t;
  t.param(w);
  Var loss = sum_all(scale(t.param(v), 2.0));
  t.backward(loss);
  CHECK(w.grad.isZero(0.0));
  CHECK(v.grad(0, 0) == 2.0);
}

TEST_CASE("detach cuts the gradient path exactly") {
  ParamStore store;
  Rng rng(1);
  Parameter& w = store.add("w", random_matrix(3, 2, rng));
  Parameter& v = store.add("v", random_matrix(3, 2, rng));
  Tape t;
  Var x = t.constant(random_matrix(4, 3, rng));
  Var h = matmul(x, t.param(w));
  Var loss = add(sum_all(relu(detach(h))), sum_all(tanh(matmul(x, t.param(v)))));
  t.backward(loss);
  CHECK(w.grad.isZero(0.0));
  CHECK_FALSE(v.grad.isZero(0.0));
}

TEST_CASE("a parameter used twice receives the summed gradient") {
  ParamStore store;
  Parameter& w = store.add("w", make_matrix({{2}}));
  Tape t;
  Var a = t.param(w);
  Var b = t.param(w);
  t.backward(sum_all(hadamard(a, b)));  // w^2
  CHECK(w.grad(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("backprop through an op without a backward rule raises UnsupportedOpError") {
  ParamStore store;
  Parameter& w = store.add("w", make_matrix({{1}}));
  Tape t;
  Var p = t.param(w);
  Var odd = t.record(p.value(), "mystery", {p}, {});
  CHECK_THROWS_AS(t.backward(sum_all(odd)), UnsupportedOpError);
}

TEST_CASE("check_gradients: linear + relu + mse toy model") {
  ParamStore store;
  Rng rng(7);
  Linear l1(store, "l1", 4, 5, rng);
  Linear l2(store, "l2", 5, 2, rng);
  // Shift biases away from zero so no ReLU input sits at the kink.
  store.get("l1.bias").value.setConstant(0.05);
  const Matrix x = random_matrix(6, 4, rng);
  const Matrix target = random_matrix(6, 2, rng);
  auto loss = [&](Tape& t) { return mse(l2.forward(t, relu(l1.forward(t, t.constant(x)))), target); };
  const auto r = check_gradients(loss, store, 1e-5);
  CHECK(r.entries_checked == store.scalar_count());
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("check_gradients: constant model reports zero error") {
  ParamStore store;
  store.add("w", make_matrix({{1, 2}, {3, 4}}));
  auto loss = [](Tape& t) { return sum_all(t.constant(make_matrix({{5}}))); };
  CHECK(check_gradients(loss, store, 1e-5).max_rel_error == 0.0);
}

TEST_CASE("check_gradients rejects eps outside (0, 1e-3]") {
  ParamStore store;
  store.add("w", make_matrix({{1}}));
  auto loss = [&](Tape& t) { return sum_all(t.param(store.get("w"))); };
  CHECK_THROWS_AS(check_gradients(loss, store, 0.0), ConfigError);
  CHECK_THROWS_AS(check_gradients(loss, store, 1e-2), ConfigError);
}

TEST_CASE("check_gradients over every differentiable op") {
  Rng rng(11);
  ParamStore store;
  Parameter& a = store.add("a", random_matrix(4, 3, rng));
  Parameter& b = store.add("b", random_matrix(4, 3, rng));
  Parameter& row = store.add("row", random_matrix(1, 3, rng));
  Parameter& w = store.add("w", random_matrix(3, 1, rng));
  auto adj = std::make_shared<SparseMatrix>(4, 4);
  adj->insert(0, 1) = 0.5;
  adj->insert(0, 2) = 0.5;
  adj->insert(3, 0) = 1.0;
  adj->insert(2, 2) = 0.3;
  adj->makeCompressed();
  std::shared_ptr<const SparseMatrix> cadj = adj;

  SUBCASE("elementwise and shape ops") {
    auto loss = [&](Tape& t) {
      Var pa = t.param(a), pb = t.param(b), pr = t.param(row);
      Var x = add(hadamard(sigmoid(pa), tanh(pb)), sub(pa, scale(pb, 0.3)));
      Var y = add_row(x, pr);
      Var g = gather_rows(concat_rows(y, pb), {3, 0, 0, 6});
      Var m = add(mean_rows(g), sum_rows(broadcast_rows(pr, 2)));
      return add(mean_all(m), sum_all(concat_cols(transpose(x), transpose(pb))));
    };
    CHECK(check_gradients(loss, store, 1e-5).max_rel_error < 1e-4);
  }
  SUBCASE("cosine, sparse aggregation and losses") {
    auto loss = [&](Tape& t) {
      Var pa = t.param(a), pb = t.param(b);
      Var cos = row_cosine(pa, pb);
      Var logits = matmul(spmm(cadj, pa), t.param(w));
      Var bce = bce_with_logits(add(logits, cos), {1, 0, 1, 0});
      Var ce = softmax_cross_entropy(concat_cols(pa, pb), {0, 5, 2, 4}, {0, 1, 3});
      return add(bce, ce);
    };
    CHECK(check_gradients(loss, store, 1e-5).max_rel_error < 1e-4);
  }
}

TEST_CASE("bce_with_logits at logit 0 equals ln 2") {
  Tape t;
  Var l = bce_with_logits(t.constant(Matrix::Zero(5, 1)), {1, 0, 1, 1, 0});
  CHECK(l.scalar() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("row_cosine of zero rows is 0") {
  Tape t;
  Var c = row_cosine(t.constant(make_matrix({{0, 0}, {1, 1}})), t.constant(make_matrix({{1, 0}, {1, 0}})));
  CHECK(c.value()(0, 0) == 0.0);
  CHECK(c.value()(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("relu subgradient at zero is zero") {
  ParamStore store;
  Parameter& p = store.add("p", make_matrix({{0.0, 1.0, -1.0}}));
  Tape t;
  t.backward(sum_all(relu(t.param(p))));
  CHECK(p.grad == make_matrix({{0.0, 1.0, 0.0}}));
}

TEST_CASE("softmax_rows of [0, 0] is [0.5, 0.5]") {
  Matrix s = softmax_rows(make_matrix({{0, 0}, {1000, 0}}));
  CHECK(s(0, 0) == 0.5);
  CHECK(s(0, 1) == 0.5);
  CHECK(s(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("SGD: lr 0.1, theta 1, grad 1 -> 0.9") {
  ParamStore store;
  Parameter& p = store.add("p", make_matrix({{1.0}}));
  p.grad(0, 0) = 1.0;
  OptimizerConfig c;
  c.kind = OptimizerConfig::Kind::Sgd;
  c.lr = 0.1;
  optimizer_step(store, c);
  CHECK(p.value(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(p.grad(0, 0) == 0.0);
}

TEST_CASE("Adam: zero gradient leaves parameters unchanged") {
  ParamStore store;
  Parameter& p = store.add("p", make_matrix({{1.5, -2.0}}));
  const Matrix before = p.value;
  optimizer_step(store, OptimizerConfig{});
  CHECK(bitwise_equal(p.value, before));
}

TEST_CASE("Adam: first step with g = 1 moves theta by lr / (1 + eps)") {
  ParamStore store;
  Parameter& p = store.add("p", make_matrix({{0.25}}));
  p.grad(0, 0) = 1.0;
  OptimizerConfig c;
  c.lr = 0.001;
  optimizer_step(store, c);
  // m = 0.1, v = 0.001; bias-corrected m_hat = 1, v_hat = 1.
  const double m_hat = (1.0 - 0.9) * 1.0 / (1.0 - 0.9);
  const double v_hat = (1.0 - 0.999) * 1.0 / (1.0 - 0.999);
  const double expected = 0.25 - 0.001 * m_hat / (std::sqrt(v_hat) + 1e-8);
  CHECK(p.value(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(0.25 - p.value(0, 0) == doctest::Approx(0.001).epsilon(1e-6));
}

TEST_CASE("optimizer refuses a non-finite gradient and names the parameter") {
  ParamStore store;
  Parameter& ok = store.add("ok", make_matrix({{1.0}}));
  Parameter& bad = store.add("bad.weight", make_matrix({{1.0}}));
  ok.grad(0, 0) = 1.0;
  bad.grad(0, 0) = std::numeric_limits<double>::infinity();
  try {
    optimizer_step(store, OptimizerConfig{});
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("bad.weight") != std::string::npos);
  }
  CHECK(ok.value(0, 0) == 1.0);
  CHECK(bad.value(0, 0) == 1.0);
}

TEST_CASE("optimizer_step on a subset zeroes every gradient but updates only the subset") {
  ParamStore store;
  Parameter& a = store.add("a", make_matrix({{1.0}}));
  Parameter& b = store.add("b", make_matrix({{1.0}}));
  a.grad(0, 0) = 1.0;
  b.grad(0, 0) = 1.0;
  OptimizerConfig c;
  c.kind = OptimizerConfig::Kind::Sgd;
  c.lr = 0.5;
  std::vector<Parameter*> subset{&a};
  optimizer_step(store, subset, c);
  CHECK(a.value(0, 0) == 0.5);
  CHECK(b.value(0, 0) == 1.0);
  CHECK(b.grad(0, 0) == 0.0);
}

TEST_CASE("clip_values clamps to [-c, c]") {
  ParamStore store;
  Parameter& p = store.add("p", make_matrix({{-0.5, 0.004, 0.2}}));
  std::vector<Parameter*> ps{&p};
  clip_values(ps, 0.01);
  CHECK(p.value == make_matrix({{-0.01, 0.004, 0.01}}));
}

TEST_CASE("glorot_uniform stays inside its bound; Linear biases start at zero") {
  Rng rng(3);
  const Matrix w = glorot_uniform(10, 6, rng);
  const double bound = std::sqrt(6.0 / 16.0);
  CHECK(w.cwiseAbs().maxCoeff() <= bound);
  ParamStore store;
  Linear l(store, "l", 10, 6, rng);
  CHECK(store.get("l.bias").value.isZero(0.0));
}

TEST_CASE("dropout: identity at rate 0, inverted scaling otherwise") {
  Rng rng(5);
  Tape t;
  Var x = t.constant(Matrix::Constant(20, 20, 2.0));
  CHECK(dropout(x, 0.0, &rng).value() == x.value());
  CHECK(dropout(x, 0.5, nullptr).value() == x.value());
  const Matrix d = dropout(x, 0.5, &rng).value();
  for (Eigen::Index i = 0; i < d.size(); ++i) CHECK((d.data()[i] == 0.0 || d.data()[i] == 4.0));
}

TEST_CASE("identical seeds give bitwise-identical forward values and gradients") {
  auto run = [](Matrix& value, Matrix& grad) {
    ParamStore store;
    Rng rng(99);
    Mlp mlp(store, "m", {5, 7, 3}, Activation::Tanh, rng);
    Tape t;
    Var y = mlp.forward(t, t.constant(random_matrix(4, 5, rng)));
    t.backward(mean_all(y));
    value = y.value();
    grad = store.get("m.0.weight").grad;
  };
  Matrix v1, g1, v2, g2;
  run(v1, g1);
  run(v2, g2);
  CHECK(bitwise_equal(v1, v2));
  CHECK(bitwise_equal(g1, g2));
}

TEST_CASE("parameter files round-trip and reject mismatches") {
  const auto dir = toy::scratch_dir("persist");
  Rng rng(2);
  ParamStore a;
  a.add("x.weight", random_matrix(3, 2, rng));
  a.add("x.bias", random_matrix(1, 2, rng));
  save_params(a, dir / "p.bin");

  ParamStore b;
  b.add("x.weight", Matrix::Zero(3, 2));
  b.add("x.bias", Matrix::Zero(1, 2));
  load_params(b, dir / "p.bin");
  CHECK(bitwise_equal(b.get("x.weight").value, a.get("x.weight").value));
  CHECK(bitwise_equal(b.get("x.bias").value, a.get("x.bias").value));

  ParamStore wrong_shape;
  wrong_shape.add("x.weight", Matrix::Zero(2, 2));
  wrong_shape.add("x.bias", Matrix::Zero(1, 2));
  CHECK_THROWS_AS(load_params(wrong_shape, dir / "p.bin"), DataError);

  ParamStore extra;
  extra.add("x.weight", Matrix::Zero(3, 2));
  extra.add("x.bias", Matrix::Zero(1, 2));
  extra.add("y", Matrix::Zero(1, 1));
  CHECK_THROWS_AS(load_params(extra, dir / "p.bin"), DataError);

  std::ofstream(dir / "junk.bin") << "not a parameter file";
  CHECK_THROWS_AS(load_params(b, dir / "junk.bin"), DataError);
}

TEST_CASE("parameter file header is the documented little-endian layout") {
  const auto dir = toy::scratch_dir("persist_layout");
  ParamStore s;
  s.add("ab", make_matrix({{1.0, -2.0}}));
  save_params(s, dir / "p.bin");
  std::ifstream in(dir / "p.bin", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // magic(8) + count(4) + name_len(4) + "ab"(2) + rows(8) + cols(8) + 2 doubles(16)
  REQUIRE(bytes.size() == 8 + 4 + 4 + 2 + 8 + 8 + 16);
  CHECK(bytes.substr(0, 8) == "BKPARAM1");
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);
  CHECK(bytes.substr(16, 2) == "ab");
  double first = 0.0;
  std::memcpy(&first, bytes.data() + 34, sizeof(double));
  CHECK(first == 1.0);
}
