#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mdgan/tape.hpp"
#include "mdgan/tensor.hpp"

namespace mdgan {

using Rng = std::mt19937_64;

std::string_view to_string(Nonlinearity kind);
Nonlinearity parse_nonlinearity(std::string_view text);
std::uint32_t nonlinearity_code(Nonlinearity kind);
Nonlinearity nonlinearity_from_code(std::uint32_t code);

struct DenseLayer {
  Tensor weight;  // out x in
  Tensor bias;    // 1 x out
};

// Fully connected network: hidden layers apply the nonlinearity, the output
// layer is linear.
class MlpNetwork {
 public:
  MlpNetwork() = default;
  // Zero-initialized network. Throws std::invalid_argument for fewer than two
  // sizes or a zero size.
  MlpNetwork(std::vector<std::size_t> sizes, Nonlinearity hidden);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  Nonlinearity hidden() const { return hidden_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Weights then bias of each layer, in layer order.
  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;

  std::vector<double> flatten() const;
  void unflatten(std::span<const double> flat);

  void zero_grad();

  // Records the forward pass on tape. With track_params = false the network
  // weights are treated as constants (gradients still flow to the input).
  Var forward(Tape& tape, Var input, bool track_params = true);
  // Plain evaluation without recording.
  Matrix predict(const Matrix& input) const;

  bool operator==(const MlpNetwork& other) const;

 private:
  std::vector<std::size_t> sizes_;
  Nonlinearity hidden_ = Nonlinearity::leaky_relu;
  std::vector<DenseLayer> layers_;
};

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) drawn layer by layer in
// row-major order; biases zero.
MlpNetwork init_network(std::vector<std::size_t> sizes, Nonlinearity hidden, Rng& rng);

}  // namespace mdgan
