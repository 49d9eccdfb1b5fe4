#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "mdgan/adam.hpp"
#include "mdgan/mlp.hpp"

namespace mdgan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Everything needed to evaluate or inspect a training run.
//
// On disk (all integers and IEEE-754 doubles little-endian):
//   header      "MDGANCKP", u32 version, u64 seed, u64 step, u32 objective,
//               u64 embed_dim, f64 sigma, f64 circumradius, f64 last_d_loss,
//               f64 last_g_loss, u64 len + bytes of the resolved config text,
//               then per network (generator, discriminator):
//               u32 layer count, u64 sizes..., u32 nonlinearity code
//   parameters  generator then discriminator, each layer's weights (row-major)
//               followed by its bias, as f64
//   optimizer   per network: f64 lr, beta1, beta2, epsilon, u64 step,
//               u8 has_moments, then first and second moments per tensor
struct Checkpoint {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::uint32_t objective = 0;
  std::uint64_t embed_dim = 0;
  double sigma = 0.0;
  double circumradius = 0.0;
  double last_d_loss = 0.0;
  double last_g_loss = 0.0;
  std::string config_text;
  MlpNetwork generator;
  MlpNetwork discriminator;
  AdamState adam_generator;
  AdamState adam_discriminator;

  bool operator==(const Checkpoint&) const = default;
};

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
// Throws std::runtime_error on a bad magic, unsupported version or truncation.
Checkpoint read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mdgan
