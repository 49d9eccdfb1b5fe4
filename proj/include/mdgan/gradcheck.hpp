#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mdgan {

struct GradcheckSuite {
  std::string name;
  std::size_t cases = 0;
  // Coordinates skipped because the central difference straddled a tie
  // (nearest-vertex switch) or an activation kink.
  std::size_t skipped = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_rel_error <= tolerance; }
};

struct GradcheckOptions {
  std::size_t cases = 100;
  std::uint64_t seed = 1;
  double step = 1e-5;
  double head_tolerance = 1e-5;
  double network_tolerance = 1e-4;
};

// Analytic gradients against central finite differences for the mixture
// head, every loss head, and full discriminator/generator backward passes.
// Per case, the error is ||analytic - numeric||_inf / ||numeric||_inf.
std::vector<GradcheckSuite> run_gradcheck(const GradcheckOptions& opts = {});

}  // namespace mdgan
