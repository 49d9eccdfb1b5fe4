#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mdgan/trainer.hpp"

using namespace mdgan;

namespace {

TrainConfig smoke_config(std::size_t steps) {
  TrainConfig cfg;
  cfg.seed = 3;
  cfg.total_g_steps = steps;
  cfg.embed_dim = 4;
  cfg.batch_size = 64;
  cfg.generator_hidden = {32, 32};
  cfg.discriminator_hidden = {32, 32};
  cfg.eval_every = 100;
  cfg.eval_samples = 500;
  return cfg;
}

}  // namespace

TEST(Trainer, ZeroStepsKeepsInitialization) {
  TrainConfig cfg = smoke_config(0);
  const auto result = train(cfg);
  EXPECT_TRUE(result.records.empty());
  const TrainingSession fresh(cfg);
  EXPECT_TRUE(result.checkpoint.generator == fresh.generator());
  EXPECT_TRUE(result.checkpoint.discriminator == fresh.discriminator());
  EXPECT_EQ(result.checkpoint.step, 0u);
}

TEST(Trainer, SmokeRunStaysFinite) {
  for (auto objective : {Objective::mdgan, Objective::vanilla}) {
    TrainConfig cfg = smoke_config(500);
    cfg.objective = objective;
    std::vector<std::size_t> steps;
    const auto result = train(cfg, [&](const RunRecord& r) { steps.push_back(r.step); });
    ASSERT_EQ(result.records.size(), 5u);
    EXPECT_EQ(steps, (std::vector<std::size_t>{100, 200, 300, 400, 500}));
    for (const auto& r : result.records) {
      EXPECT_TRUE(std::isfinite(r.d_loss));
      EXPECT_TRUE(std::isfinite(r.g_loss));
      EXPECT_TRUE(std::isfinite(r.frechet));
      EXPECT_EQ(r.report.n_samples, 500u);
    }
  }
}

TEST(Trainer, FinalStepIsEvaluatedWhenOffTheGrid) {
  TrainConfig cfg = smoke_config(150);
  const auto result = train(cfg);
  ASSERT_EQ(result.records.size(), 2u);
  EXPECT_EQ(result.records.back().step, 150u);
}

TEST(Trainer, BitIdenticalAcrossRuns) {
  const TrainConfig cfg = smoke_config(200);
  const auto a = train(cfg);
  const auto b = train(cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    EXPECT_EQ(to_ndjson(a.records[i]), to_ndjson(b.records[i]));
  EXPECT_TRUE(a.checkpoint == b.checkpoint);
}

TEST(Trainer, DifferentSeedsDiverge) {
  TrainConfig cfg = smoke_config(50);
  const auto a = train(cfg);
  cfg.seed = 4;
  const auto b = train(cfg);
  EXPECT_FALSE(a.checkpoint.generator == b.checkpoint.generator);
}

TEST(Trainer, CheckpointRoundTripReproducesEvaluation) {
  const TrainConfig cfg = smoke_config(100);
  const auto result = train(cfg);
  std::stringstream ss;
  write_checkpoint(ss, result.checkpoint);
  const Checkpoint back = read_checkpoint(ss);
  const auto r1 = evaluate(result.checkpoint, cfg.dataset(), cfg);
  const auto r2 = evaluate(back, cfg.dataset(), cfg);
  EXPECT_EQ(to_ndjson(r1), to_ndjson(r2));
  EXPECT_EQ(to_ndjson(r1), to_ndjson(result.records.back()));
}

TEST(Trainer, ZeroSumCouplingOnAFakeBatch) {
  // In minimax mode the generator loss on a fake batch is the negated fake term
  // of the discriminator loss on the same batch.
  TrainConfig cfg = smoke_config(10);
  TrainingSession s(cfg);
  for (int i = 0; i < 10; ++i) s.step();
  Rng rng(99);
  const Matrix z = sample_latent(cfg.latent, 64, rng);
  const Matrix fake = s.embed(s.generator().predict(z));
  const Matrix real = s.embed(sample_real(cfg.dataset(), 64, rng));
  const auto d = d_loss_mdgan(s.mixture(), real, fake, cfg.loss);
  const auto g = g_loss_mdgan(s.mixture(), fake, cfg.loss);
  double mean_real = 0;
  for (std::size_t r = 0; r < real.rows(); ++r) mean_real += s.mixture().log_lk(real.row(r));
  mean_real /= real.rows();
  EXPECT_NEAR(-(d.value + mean_real), g.value, 1e-10);
}

TEST(Evaluate, IdealSamplerCoversEveryMode) {
  TrainConfig cfg;
  const GridDataset ds = cfg.dataset();
  const SampleSource ideal = [&](std::size_t n, Rng& rng) { return sample_real(ds, n, rng); };
  const auto rec = evaluate_source(ideal, ds, cfg, 1, 0);
  EXPECT_EQ(rec.report.modes_captured, 25u);
  EXPECT_GE(rec.report.hq_fraction, 0.99);
  // Two independent 2500-point fits of the same mixture: sampling noise only.
  // Per-entry covariance standard error is about 8 * sqrt(2 / 2500) = 0.23.
  EXPECT_LT(rec.frechet, 0.5);
  EXPECT_EQ(to_ndjson(rec), to_ndjson(evaluate_source(ideal, ds, cfg, 1, 0)));
}

TEST(Evaluate, ConstantGeneratorCapturesOneMode) {
  TrainConfig cfg;
  const GridDataset ds = cfg.dataset();
  const SampleSource constant = [](std::size_t n, Rng&) { return Matrix(n, 2, 2.0); };
  const auto rec = evaluate_source(constant, ds, cfg, 1, 0);
  EXPECT_EQ(rec.report.modes_captured, 1u);
  EXPECT_EQ(rec.report.hq_fraction, 1.0);
}

TEST(EmbeddingSnapshot, UntrainedIsFiniteAndErrorsAreReported) {
  TrainConfig cfg = smoke_config(0);
  const TrainingSession s(cfg);
  const Checkpoint ckpt = s.checkpoint();
  const auto snap = embedding_snapshot(ckpt, cfg.dataset(), 50);
  ASSERT_EQ(snap.size(), 50u);
  for (const auto& e : snap) {
    EXPECT_TRUE(std::isfinite(e.distance));
    EXPECT_LT(e.component, 5u);
    EXPECT_EQ(e.embedding.size(), 4u);
  }
  EXPECT_THROW(embedding_snapshot(ckpt, cfg.dataset(), 0), std::invalid_argument);
  cfg.objective = Objective::vanilla;
  const TrainingSession v(cfg);
  EXPECT_THROW(embedding_snapshot(v.checkpoint(), cfg.dataset(), 10), std::invalid_argument);
}

TEST(TrainConfig, ValidationAndShapes) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.discriminator_sizes(), (std::vector<std::size_t>{2, 128, 128, 24}));
  EXPECT_EQ(cfg.generator_sizes(), (std::vector<std::size_t>{32, 128, 128, 2}));
  cfg.objective = Objective::vanilla;
  EXPECT_EQ(cfg.discriminator_output(), 1u);
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(NumericalFailure, DiagnosticLine) {
  const NumericalFailure f(12, "d_loss", NAN);
  EXPECT_EQ(f.step(), 12u);
  EXPECT_NE(f.to_ndjson().find("d_loss"), std::string::npos);
}
