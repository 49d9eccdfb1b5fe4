#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mdgan/adam.hpp"
#include "mdgan/checkpoint.hpp"
#include "mdgan/gradcheck.hpp"
#include "mdgan/mlp.hpp"
#include "mdgan/tape.hpp"
#include "oracles.hpp"

using namespace mdgan;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(r, c);
  for (double& v : m.values()) v = g(rng);
  return m;
}

// Direct forward pass with explicit loops, used as the network oracle.
std::vector<long double> direct_forward(const MlpNetwork& net, std::span<const double> x) {
  std::vector<long double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const auto& layer = net.layers()[l];
    std::vector<long double> z(layer.weight.value.rows());
    for (std::size_t o = 0; o < z.size(); ++o) {
      long double s = layer.bias.value(0, o);
      for (std::size_t i = 0; i < a.size(); ++i) s += layer.weight.value(o, i) * a[i];
      z[o] = s;
    }
    if (l + 1 < net.layers().size())
      for (auto& v : z) {
        switch (net.hidden()) {
          case Nonlinearity::leaky_relu: v = v > 0 ? v : kLeakyReluSlope * v; break;
          case Nonlinearity::relu: v = v > 0 ? v : 0; break;
          case Nonlinearity::tanh: v = std::tanh(v); break;
        }
      }
    a = std::move(z);
  }
  return a;
}

}  // namespace

TEST(Mlp, ZeroNetworkOutputsZero) {
  const MlpNetwork net({2, 8, 3}, Nonlinearity::leaky_relu);
  Rng rng(1);
  const Matrix out = net.predict(random_matrix(5, 2, rng));
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Mlp, IdentityLayerPassesInputThrough) {
  MlpNetwork net({3, 3}, Nonlinearity::relu);
  for (std::size_t i = 0; i < 3; ++i) net.layers()[0].weight.value(i, i) = 1.0;
  Rng rng(2);
  const Matrix x = random_matrix(4, 3, rng);
  EXPECT_EQ(net.predict(x), x);
}

TEST(Mlp, ForwardMatchesDirectOracle) {
  for (auto kind : {Nonlinearity::leaky_relu, Nonlinearity::relu, Nonlinearity::tanh}) {
    Rng rng(3);
    const MlpNetwork net = init_network({2, 8, 3}, kind, rng);
    const Matrix x = random_matrix(16, 2, rng);
    const Matrix out = net.predict(x);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto want = direct_forward(net, x.row(r));
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(out(r, j), static_cast<double>(want[j]), 1e-13);
    }
  }
}

TEST(Mlp, TapeForwardIsBitIdenticalToPredict) {
  Rng rng(4);
  MlpNetwork net = init_network({2, 128, 128, 24}, Nonlinearity::leaky_relu, rng);
  const Matrix x = random_matrix(32, 2, rng);
  Tape tape;
  const Var out = net.forward(tape, tape.input(x));
  EXPECT_EQ(tape.value(out), net.predict(x));
}

TEST(Mlp, LinearLayerGradientIsOuterProduct) {
  // loss = mean(x W^T + b) over an n x 1 output: dW = mean_r x_r, db = 1.
  Rng rng(5);
  MlpNetwork net = init_network({3, 1}, Nonlinearity::relu, rng);
  const Matrix x = random_matrix(10, 3, rng);
  Tape tape;
  const Var xin = tape.input(x);
  tape.backward(tape.mean(net.forward(tape, xin)));
  const auto& layer = net.layers()[0];
  for (std::size_t i = 0; i < 3; ++i) {
    long double s = 0;
    for (std::size_t r = 0; r < 10; ++r) s += x(r, i);
    EXPECT_NEAR(layer.weight.grad(0, i), static_cast<double>(s / 10), 1e-15);
    for (std::size_t r = 0; r < 10; ++r) EXPECT_NEAR(tape.grad(xin)(r, i), layer.weight.value(0, i) / 10, 1e-16);
  }
  EXPECT_NEAR(layer.bias.grad(0, 0), 1.0, 1e-15);
}

TEST(Mlp, ConstantLossGivesZeroGradient) {
  Rng rng(6);
  MlpNetwork net = init_network({2, 4, 1}, Nonlinearity::relu, rng);
  Tape tape;
  const Var out = net.forward(tape, tape.input(random_matrix(3, 2, rng)));
  LossValue constant;
  constant.value = 3.5;
  constant.grad_fake = Matrix(3, 1, 0.0);
  tape.backward(tape.loss_head(constant, std::nullopt, out));
  for (const Tensor* p : std::as_const(net).parameters())
    for (double g : p->grad.values()) EXPECT_EQ(g, 0.0);
}

TEST(Mlp, UntrackedParametersReceiveNoGradient) {
  Rng rng(7);
  MlpNetwork net = init_network({2, 4, 2}, Nonlinearity::leaky_relu, rng);
  Tape tape;
  const Var xin = tape.input(random_matrix(3, 2, rng));
  tape.backward(tape.mean(net.forward(tape, xin, false)));
  for (const Tensor* p : std::as_const(net).parameters()) EXPECT_FALSE(p->has_grad());
  EXPECT_FALSE(tape.grad(xin).empty());
}

TEST(Mlp, BackwardMatchesFiniteDifferencesOnTanhNetwork) {
  // Smooth activations make every coordinate checkable.
  Rng rng(8);
  MlpNetwork net = init_network({2, 6, 3}, Nonlinearity::tanh, rng);
  const Matrix x = random_matrix(5, 2, rng);
  auto loss_of = [&](std::span<const double> flat) {
    MlpNetwork copy = net;
    copy.unflatten(flat);
    const Matrix out = copy.predict(x);
    double s = 0;
    for (double v : out.values()) s += v * v;
    return s / out.size();
  };
  Tape tape;
  const Var out = net.forward(tape, tape.input(x));
  LossValue head;
  head.value = loss_of(net.flatten());
  head.grad_fake = tape.value(out);
  for (double& v : head.grad_fake.values()) v *= 2.0 / head.grad_fake.size();
  tape.backward(tape.loss_head(head, std::nullopt, out));
  std::vector<double> analytic;
  for (const Tensor* p : std::as_const(net).parameters())
    analytic.insert(analytic.end(), p->grad.values().begin(), p->grad.values().end());
  const auto fd = oracle::finite_difference(loss_of, net.flatten());
  EXPECT_LE(oracle::relative_error(analytic, fd), 1e-7);
}

TEST(Mlp, InitIsDeterministicAndBounded) {
  Rng a(9), b(9);
  const auto n1 = init_network({32, 128, 2}, Nonlinearity::relu, a);
  const auto n2 = init_network({32, 128, 2}, Nonlinearity::relu, b);
  EXPECT_TRUE(n1 == n2);
  const double bound = 1.0 / std::sqrt(32.0);
  for (double w : n1.layers()[0].weight.value.values()) EXPECT_LE(std::abs(w), bound);
  for (double v : n1.layers()[0].bias.value.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(n1.parameter_count(), 32u * 128 + 128 + 128 * 2 + 2);
}

TEST(Mlp, RejectsBadShapes) {
  EXPECT_THROW(MlpNetwork({3}, Nonlinearity::relu), std::invalid_argument);
  EXPECT_THROW(MlpNetwork({3, 0, 1}, Nonlinearity::relu), std::invalid_argument);
  Tape tape;
  const Var scalar_not = tape.input(Matrix(2, 1));
  EXPECT_THROW(tape.backward(scalar_not), std::invalid_argument);
}

TEST(Adam, FirstStepMovesEachParameterByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps').
  Tensor p(Matrix(1, 3, std::vector<double>{1.0, -2.0, 0.5}));
  p.ensure_grad() = Matrix(1, 3, std::vector<double>{0.3, -4.0, 0.0});
  AdamState st;
  st.hyper.lr = 0.01;
  Tensor* params[] = {&p};
  adam_step(params, st);
  const double eps = st.hyper.epsilon;
  EXPECT_NEAR(p.value(0, 0), 1.0 - 0.01 * 0.3 / (0.3 + eps), 1e-15);
  EXPECT_NEAR(p.value(0, 1), -2.0 + 0.01 * 4.0 / (4.0 + eps), 1e-15);
  EXPECT_EQ(p.value(0, 2), 0.5);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adam, SecondStepMatchesHandComputation) {
  Tensor p(Matrix(1, 1, 0.0));
  AdamState st;
  st.hyper = {0.1, 0.5, 0.999, 1e-8};
  Tensor* params[] = {&p};
  p.ensure_grad()(0, 0) = 1.0;
  adam_step(params, st);
  p.grad(0, 0) = 3.0;
  adam_step(params, st);
  const double m = 0.5 * (0.5 * 1.0) + 0.5 * 3.0;             // 1.75
  const double v = 0.999 * (0.001 * 1.0) + 0.001 * 9.0;       // 0.009999
  const double mhat = m / (1 - 0.25);
  const double vhat = v / (1 - 0.999 * 0.999);
  const double first = -0.1 * 1.0 / (1.0 + 1e-8);
  EXPECT_NEAR(p.value(0, 0), first - 0.1 * mhat / (std::sqrt(vhat) + 1e-8), 1e-14);
}

TEST(Adam, MissingGradientCountsAsZero) {
  Tensor p(Matrix(2, 2, 1.0));
  AdamState st;
  Tensor* params[] = {&p};
  adam_step(params, st);
  EXPECT_EQ(p.value, Matrix(2, 2, 1.0));
  Tensor q(Matrix(3, 1));
  Tensor* other[] = {&q};
  EXPECT_THROW(adam_step(other, st), std::invalid_argument);
}

TEST(Checkpoint, RoundTripIsExact) {
  Rng rng(10);
  Checkpoint c;
  c.seed = 42;
  c.step = 17;
  c.objective = 1;
  c.embed_dim = 24;
  c.sigma = 0.2;
  c.circumradius = 1.0;
  c.last_d_loss = -32.5;
  c.last_g_loss = 1.0 / 3.0;
  c.config_text = "seed = 42\nsigma = 0.2\n";
  c.generator = init_network({32, 16, 2}, Nonlinearity::relu, rng);
  c.discriminator = init_network({2, 16, 1}, Nonlinearity::leaky_relu, rng);
  for (Tensor* t : c.discriminator.parameters()) t->ensure_grad().fill(0.25);
  adam_step(c.discriminator.parameters(), c.adam_discriminator);
  c.discriminator.zero_grad();
  for (Tensor* t : c.discriminator.parameters()) t->grad = Matrix();
  std::stringstream ss;
  write_checkpoint(ss, c);
  const Checkpoint back = read_checkpoint(ss);
  EXPECT_TRUE(back == c);
}

TEST(Checkpoint, RejectsBadMagicAndTruncation) {
  std::stringstream bad("NOTACKPT-------------------");
  EXPECT_THROW(read_checkpoint(bad), std::runtime_error);
  Checkpoint c;
  c.generator = MlpNetwork({2, 2}, Nonlinearity::relu);
  c.discriminator = MlpNetwork({2, 1}, Nonlinearity::relu);
  std::stringstream ss;
  write_checkpoint(ss, c);
  const std::string bytes = ss.str();
  std::stringstream cut(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(read_checkpoint(cut), std::runtime_error);
}

TEST(Gradcheck, FullSuitePasses) {
  GradcheckOptions opts;
  opts.cases = 20;
  for (const auto& s : run_gradcheck(opts)) {
    EXPECT_TRUE(s.passed()) << s.name << " " << s.max_rel_error;
    EXPECT_EQ(s.cases, 20u) << s.name;
  }
}
