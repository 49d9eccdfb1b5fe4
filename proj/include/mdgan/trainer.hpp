#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mdgan/adam.hpp"
#include "mdgan/checkpoint.hpp"
#include "mdgan/metrics.hpp"
#include "mdgan/mlp.hpp"
#include "mdgan/objective.hpp"
#include "mdgan/sgmm.hpp"
#include "mdgan/synthdata.hpp"

namespace mdgan {

enum class Objective : std::uint32_t { mdgan = 0, vanilla = 1 };

std::string_view to_string(Objective o);
Objective parse_objective(std::string_view text);

struct TrainConfig {
  std::uint64_t seed = 0;
  std::size_t total_g_steps = 30000;
  std::size_t d_steps_per_g = 1;
  std::size_t batch_size = 128;

  Objective objective = Objective::mdgan;
  std::size_t embed_dim = 24;
  double sigma = 0.2;
  double circumradius = 1.0;
  LossConfig loss;

  LatentSpec latent;
  std::vector<std::size_t> generator_hidden = {128, 128};
  Nonlinearity generator_nonlinearity = Nonlinearity::relu;
  std::vector<std::size_t> discriminator_hidden = {128, 128};
  Nonlinearity discriminator_nonlinearity = Nonlinearity::leaky_relu;
  AdamHyper adam_generator;
  AdamHyper adam_discriminator;

  std::size_t grid_size = 5;
  double grid_spacing = 2.0;
  double data_sigma = 0.05;

  std::size_t eval_every = 1000;
  std::size_t eval_samples = 2500;
  double threshold_sigmas = 3.0;

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;

  // Discriminator output width: embed_dim for mdgan, 1 for vanilla.
  std::size_t discriminator_output() const;
  std::vector<std::size_t> generator_sizes() const;
  std::vector<std::size_t> discriminator_sizes() const;
  GridDataset dataset() const;
};

struct RunRecord {
  std::size_t step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  ModeReport report;
  double frechet = 0.0;
  double wall_time = 0.0;  // seconds since the run started
};

// One NDJSON line, fixed key order. wall_time is only emitted on request so
// that logs of equal runs stay byte-identical.
std::string to_ndjson(const RunRecord& record, bool include_wall_time = false);

// Raised when a loss, gradient or parameter becomes non-finite.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(std::size_t step, std::string quantity, double value);
  std::size_t step() const { return step_; }
  const std::string& quantity() const { return quantity_; }
  double value() const { return value_; }
  // Diagnostic NDJSON line.
  std::string to_ndjson() const;

 private:
  std::size_t step_;
  std::string quantity_;
  double value_;
};

// Alternating adversarial training of one (generator, discriminator) pair.
// Single-threaded; equal configurations produce bit-identical trajectories.
class TrainingSession {
 public:
  // config_text is stored verbatim in checkpoints.
  explicit TrainingSession(TrainConfig cfg, std::string config_text = {});

  // d_steps_per_g discriminator updates followed by one generator update.
  void step();
  std::size_t steps_done() const { return step_; }
  double last_d_loss() const { return last_d_loss_; }
  double last_g_loss() const { return last_g_loss_; }

  Checkpoint checkpoint() const;
  const TrainConfig& config() const { return cfg_; }
  const MlpNetwork& generator() const { return generator_; }
  const MlpNetwork& discriminator() const { return discriminator_; }
  // Only meaningful for the mdgan objective.
  const SimplexMixture& mixture() const { return *mixture_; }

  // Discriminator embeddings of a batch, for inspection.
  Matrix embed(const Matrix& x) const { return discriminator_.predict(x); }

 private:
  void discriminator_step();
  void generator_step();
  void check_finite(std::string_view what, double value) const;
  void check_grads(std::string_view what, MlpNetwork& net) const;

  TrainConfig cfg_;
  std::string config_text_;
  GridDataset data_;
  std::unique_ptr<SimplexMixture> mixture_;
  MlpNetwork generator_;
  MlpNetwork discriminator_;
  AdamState adam_g_;
  AdamState adam_d_;
  Rng data_rng_;
  Rng latent_rng_;
  std::size_t step_ = 0;
  double last_d_loss_ = 0.0;
  double last_g_loss_ = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<RunRecord> records;
};

// Runs cfg.total_g_steps generator updates, evaluating every eval_every
// steps and once more at the end if the last step was not an evaluation step.
// Throws NumericalFailure on a non-finite loss.
TrainResult train(const TrainConfig& cfg, const std::function<void(const RunRecord&)>& on_record = {},
                  std::string config_text = {});

// Produces n generated points for evaluation.
using SampleSource = std::function<Matrix(std::size_t n, Rng& rng)>;

// Mode report of eval_samples generated points plus the Frechet distance
// between Gaussians fitted to a reference real sample and to the generated
// sample. The evaluation stream is seeded from (seed, step) only.
RunRecord evaluate_source(const SampleSource& source, const GridDataset& ds,
                          const TrainConfig& cfg, std::uint64_t seed, std::size_t step);

RunRecord evaluate(const Checkpoint& ckpt, const GridDataset& ds, const TrainConfig& cfg);

struct EmbeddingSample {
  std::vector<double> embedding;
  std::size_t component = 0;
  double distance = 0.0;
};

// Discriminator embeddings of n real samples with their nearest simplex
// vertex. Throws std::invalid_argument for n == 0 or a non-mdgan checkpoint.
std::vector<EmbeddingSample> embedding_snapshot(const Checkpoint& ckpt, const GridDataset& ds,
                                                std::size_t n, std::uint64_t sample_seed = 0);

// Deterministic child seed for an independent random stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mdgan
