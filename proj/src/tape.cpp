#include "mdgan/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mdgan/simd/kernels.hpp"

namespace mdgan {

Var Tape::push(Matrix value, bool requires_grad,
               std::function<void(Tape&, const Node&)> propagate) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  node.propagate = std::move(propagate);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Matrix& Tape::grad_slot(std::size_t id) {
  Node& node = nodes_[id];
  if (!node.grad.same_shape(node.value)) node.grad = Matrix(node.value.rows(), node.value.cols());
  return node.grad;
}

Var Tape::input(Matrix value) { return push(std::move(value), true); }

Var Tape::constant(Matrix value) { return push(std::move(value), false); }

Var Tape::param(Tensor& param, bool track) {
  if (!track) return push(param.value, false);
  Var v = push(param.value, true, [](Tape&, const Node& self) {
    Matrix& dst = self.bound->ensure_grad();
    simd::kernels().axpy(1.0, self.grad.data(), dst.data(), dst.size());
  });
  nodes_[v.id].bound = &param;
  return v;
}

Var Tape::affine(Var x, Var weight, Var bias) {
  const Matrix& xv = value(x);
  const Matrix& wv = value(weight);
  const Matrix& bv = value(bias);
  if (xv.cols() != wv.cols())
    throw std::invalid_argument("affine: input has " + std::to_string(xv.cols()) +
                                " columns, weight expects " + std::to_string(wv.cols()));
  if (bv.rows() != 1 || bv.cols() != wv.rows())
    throw std::invalid_argument("affine: bias must be 1 x out");

  const std::size_t batch = xv.rows();
  const std::size_t in = wv.cols();
  const std::size_t out = wv.rows();
  const auto& k = simd::kernels();

  Matrix y(batch, out);
  k.matmul_nt(xv.data(), wv.data(), y.data(), batch, out, in);
  for (std::size_t r = 0; r < batch; ++r)
    k.axpy(1.0, bv.data(), y.data() + r * out, out);

  const bool rg = requires_grad(x) || requires_grad(weight) || requires_grad(bias);
  return push(std::move(y), rg, [x, weight, bias, batch, in, out](Tape& t, const Node& self) {
    const auto& k = simd::kernels();
    const Matrix& dy = self.grad;
    if (t.requires_grad(x)) {
      Matrix& dx = t.grad_slot(x.id);
      k.matmul_nn_acc(dy.data(), t.nodes_[weight.id].value.data(), dx.data(), batch, out, in);
    }
    if (t.requires_grad(weight)) {
      Matrix& dw = t.grad_slot(weight.id);
      k.matmul_tn_acc(dy.data(), t.nodes_[x.id].value.data(), dw.data(), batch, out, in);
    }
    if (t.requires_grad(bias)) {
      Matrix& db = t.grad_slot(bias.id);
      for (std::size_t r = 0; r < batch; ++r) k.axpy(1.0, dy.data() + r * out, db.data(), out);
    }
  });
}

Var Tape::activation(Var x, Nonlinearity kind) {
  Matrix y = value(x);
  for (double& v : y.values()) {
    switch (kind) {
      case Nonlinearity::leaky_relu:
        if (v < 0.0) v *= kLeakyReluSlope;
        break;
      case Nonlinearity::relu:
        if (v < 0.0) v = 0.0;
        break;
      case Nonlinearity::tanh:
        v = std::tanh(v);
        break;
    }
  }
  return push(std::move(y), requires_grad(x), [x, kind](Tape& t, const Node& self) {
    if (!t.requires_grad(x)) return;
    Matrix& dx = t.grad_slot(x.id);
    const Matrix& in = t.nodes_[x.id].value;
    const std::size_t n = dx.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = self.grad.data()[i];
      double local = 1.0;
      switch (kind) {
        case Nonlinearity::leaky_relu:
          local = in.data()[i] < 0.0 ? kLeakyReluSlope : 1.0;
          break;
        case Nonlinearity::relu:
          local = in.data()[i] < 0.0 ? 0.0 : 1.0;
          break;
        case Nonlinearity::tanh: {
          const double th = self.value.data()[i];
          local = 1.0 - th * th;
          break;
        }
      }
      dx.data()[i] += g * local;
    }
  });
}

Var Tape::mean(Var x) {
  const Matrix& xv = value(x);
  if (xv.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double v : xv.values()) s += v;
  const double inv_n = 1.0 / static_cast<double>(xv.size());
  return push(Matrix(1, 1, s * inv_n), requires_grad(x), [x, inv_n](Tape& t, const Node& self) {
    if (!t.requires_grad(x)) return;
    Matrix& dx = t.grad_slot(x.id);
    const double g = self.grad(0, 0) * inv_n;
    for (double& v : dx.values()) v += g;
  });
}

Var Tape::sgmm_log_lk(Var embeddings, const SimplexMixture& mixture) {
  Matrix row_grads;
  std::vector<double> ll = mixture.log_lk_batch(value(embeddings), &row_grads);
  const std::size_t n = ll.size();
  return push(Matrix(n, 1, std::move(ll)), requires_grad(embeddings),
              [embeddings, row_grads = std::move(row_grads)](Tape& t, const Node& self) {
                if (!t.requires_grad(embeddings)) return;
                Matrix& de = t.grad_slot(embeddings.id);
                const auto& k = simd::kernels();
                for (std::size_t r = 0; r < de.rows(); ++r)
                  k.axpy(self.grad(r, 0), row_grads.row(r).data(), de.row(r).data(), de.cols());
              });
}

Var Tape::loss_head(LossValue loss, std::optional<Var> real, std::optional<Var> fake) {
  auto check = [this](std::optional<Var> v, const Matrix& g, const char* side) {
    if (v && !value(*v).same_shape(g))
      throw std::invalid_argument(std::string("loss_head: ") + side +
                                  " gradient does not match its batch");
  };
  check(real, loss.grad_real, "real");
  check(fake, loss.grad_fake, "fake");
  const bool rg = (real && requires_grad(*real)) || (fake && requires_grad(*fake));
  const double v = loss.value;
  return push(Matrix(1, 1, v), rg,
              [real, fake, gr = std::move(loss.grad_real),
               gf = std::move(loss.grad_fake)](Tape& t, const Node& self) {
                const double upstream = self.grad(0, 0);
                const auto& k = simd::kernels();
                if (real && t.requires_grad(*real)) {
                  Matrix& d = t.grad_slot(real->id);
                  k.axpy(upstream, gr.data(), d.data(), d.size());
                }
                if (fake && t.requires_grad(*fake)) {
                  Matrix& d = t.grad_slot(fake->id);
                  k.axpy(upstream, gf.data(), d.data(), d.size());
                }
              });
}

void Tape::backward(Var loss) {
  const Node& root = nodes_.at(loss.id);
  if (root.value.rows() != 1 || root.value.cols() != 1)
    throw std::invalid_argument("backward: loss must be a 1 x 1 scalar");
  for (Node& n : nodes_) n.grad = Matrix();
  grad_slot(loss.id)(0, 0) = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (node.grad.empty() || !node.requires_grad || !node.propagate) continue;
    node.propagate(*this, node);
  }
}

void Tape::clear() { nodes_.clear(); }

}  // namespace mdgan
