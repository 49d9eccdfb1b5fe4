#include "mdgan/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mdgan/simd/kernels.hpp"

namespace mdgan {

std::string_view to_string(Nonlinearity kind) {
  switch (kind) {
    case Nonlinearity::leaky_relu:
      return "leaky_relu";
    case Nonlinearity::relu:
      return "relu";
    case Nonlinearity::tanh:
      return "tanh";
  }
  return "unknown";
}

Nonlinearity parse_nonlinearity(std::string_view text) {
  if (text == "leaky_relu") return Nonlinearity::leaky_relu;
  if (text == "relu") return Nonlinearity::relu;
  if (text == "tanh") return Nonlinearity::tanh;
  throw std::invalid_argument("unknown nonlinearity '" + std::string(text) + "'");
}

std::uint32_t nonlinearity_code(Nonlinearity kind) { return static_cast<std::uint32_t>(kind); }

Nonlinearity nonlinearity_from_code(std::uint32_t code) {
  if (code > 2) throw std::invalid_argument("unknown nonlinearity code " + std::to_string(code));
  return static_cast<Nonlinearity>(code);
}

MlpNetwork::MlpNetwork(std::vector<std::size_t> sizes, Nonlinearity hidden)
    : sizes_(std::move(sizes)), hidden_(hidden) {
  if (sizes_.size() < 2) throw std::invalid_argument("MlpNetwork: need at least two layer sizes");
  for (std::size_t s : sizes_)
    if (s == 0) throw std::invalid_argument("MlpNetwork: layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    DenseLayer layer;
    layer.weight = Tensor(Matrix(sizes_[l + 1], sizes_[l]));
    layer.bias = Tensor(Matrix(1, sizes_[l + 1]));
    layers_.push_back(std::move(layer));
  }
}

std::size_t MlpNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) n += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  return n;
}

std::vector<Tensor*> MlpNetwork::parameters() {
  std::vector<Tensor*> out;
  for (auto& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<const Tensor*> MlpNetwork::parameters() const {
  std::vector<const Tensor*> out;
  for (const auto& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<double> MlpNetwork::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Tensor* p : parameters())
    flat.insert(flat.end(), p->value.values().begin(), p->value.values().end());
  return flat;
}

void MlpNetwork::unflatten(std::span<const double> flat) {
  if (flat.size() != parameter_count())
    throw std::invalid_argument("unflatten: expected " + std::to_string(parameter_count()) +
                                " values, got " + std::to_string(flat.size()));
  std::size_t offset = 0;
  for (Tensor* p : parameters()) {
    auto& v = p->value.values();
    std::copy(flat.begin() + offset, flat.begin() + offset + v.size(), v.begin());
    offset += v.size();
  }
}

void MlpNetwork::zero_grad() {
  for (Tensor* p : parameters()) p->zero_grad();
}

Var MlpNetwork::forward(Tape& tape, Var input, bool track_params) {
  if (tape.value(input).cols() != input_size())
    throw std::invalid_argument("forward: input has " + std::to_string(tape.value(input).cols()) +
                                " columns, network expects " + std::to_string(input_size()));
  Var h = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Var w = tape.param(layers_[l].weight, track_params);
    const Var b = tape.param(layers_[l].bias, track_params);
    h = tape.affine(h, w, b);
    if (l + 1 < layers_.size()) h = tape.activation(h, hidden_);
  }
  return h;
}

Matrix MlpNetwork::predict(const Matrix& input) const {
  if (input.cols() != input_size())
    throw std::invalid_argument("predict: input has " + std::to_string(input.cols()) +
                                " columns, network expects " + std::to_string(input_size()));
  const auto& k = simd::kernels();
  Matrix h = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Matrix& w = layers_[l].weight.value;
    const Matrix& b = layers_[l].bias.value;
    Matrix y(h.rows(), w.rows());
    k.matmul_nt(h.data(), w.data(), y.data(), h.rows(), w.rows(), w.cols());
    for (std::size_t r = 0; r < y.rows(); ++r) k.axpy(1.0, b.data(), y.row(r).data(), y.cols());
    if (l + 1 < layers_.size()) {
      for (double& v : y.values()) {
        switch (hidden_) {
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
    }
    h = std::move(y);
  }
  return h;
}

bool MlpNetwork::operator==(const MlpNetwork& other) const {
  return sizes_ == other.sizes_ && hidden_ == other.hidden_ && flatten() == other.flatten();
}

MlpNetwork init_network(std::vector<std::size_t> sizes, Nonlinearity hidden, Rng& rng) {
  MlpNetwork net(std::move(sizes), hidden);
  for (auto& layer : net.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.value.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : layer.weight.value.values()) w = dist(rng);
  }
  return net;
}

}  // namespace mdgan
