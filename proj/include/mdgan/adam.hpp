#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdgan/tensor.hpp"

namespace mdgan {

struct AdamHyper {
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamHyper&) const = default;
};

struct AdamState {
  AdamHyper hyper;
  std::uint64_t step = 0;
  // One moment vector per parameter tensor, same element count.
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  bool operator==(const AdamState&) const = default;
};

// Bias-corrected Adam:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
//   p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
// Moments are allocated on the first call. A parameter without an allocated
// gradient is treated as having a zero gradient. Throws std::invalid_argument
// when the moment shapes do not mirror params.
void adam_step(std::span<Tensor* const> params, AdamState& state);

}  // namespace mdgan
