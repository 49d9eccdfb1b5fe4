#include "mdgan/trainer.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>
#include <optional>
#include <string>

#include "mdgan/tape.hpp"

namespace mdgan {
namespace {

enum Stream : std::uint64_t { kInitStream = 1, kDataStream = 2, kLatentStream = 3 };
constexpr std::uint64_t kEvalStreamBase = 0x45564100000000ull;

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw std::invalid_argument(field + ": " + why);
}

std::vector<std::size_t> with_ends(std::size_t in, const std::vector<std::size_t>& hidden,
                                   std::size_t out) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string_view to_string(Objective o) { return o == Objective::mdgan ? "mdgan" : "vanilla"; }

Objective parse_objective(std::string_view text) {
  if (text == "mdgan") return Objective::mdgan;
  if (text == "vanilla") return Objective::vanilla;
  throw std::invalid_argument("unknown objective '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  require(d_steps_per_g >= 1, "d_steps_per_g", "must be >= 1");
  require(batch_size >= 1, "batch_size", "must be >= 1");
  require(embed_dim >= 1, "embed_dim", "must be >= 1");
  require(sigma > 0.0 && std::isfinite(sigma), "sigma", "must be positive");
  require(circumradius > 0.0 && std::isfinite(circumradius), "circumradius", "must be positive");
  require(latent.latent_dim >= 1, "generator.latent_dim", "must be >= 1");
  for (std::size_t h : generator_hidden) require(h >= 1, "generator.hidden", "sizes must be >= 1");
  for (std::size_t h : discriminator_hidden)
    require(h >= 1, "discriminator.hidden", "sizes must be >= 1");
  for (const auto* a : {&adam_generator, &adam_discriminator}) {
    const std::string key = a == &adam_generator ? "adam_g" : "adam_d";
    require(a->lr > 0.0, key + ".lr", "must be positive");
    require(a->beta1 >= 0.0 && a->beta1 < 1.0, key + ".beta1", "must lie in [0, 1)");
    require(a->beta2 >= 0.0 && a->beta2 < 1.0, key + ".beta2", "must lie in [0, 1)");
    require(a->epsilon > 0.0, key + ".epsilon", "must be positive");
  }
  require(grid_size >= 1, "data.grid_size", "must be >= 1");
  require(grid_spacing > 0.0, "data.spacing", "must be positive");
  require(data_sigma >= 0.0, "data.sigma", "must be >= 0");
  require(eval_every >= 1, "eval_every", "must be >= 1");
  require(eval_samples >= 3, "eval_samples", "must be >= 3 (Gaussian fit in 2D)");
  require(threshold_sigmas > 0.0, "eval.threshold_sigmas", "must be positive");
  try {
    loss.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("loss.clamp_epsilon: ") + e.what());
  }
}

std::size_t TrainConfig::discriminator_output() const {
  return objective == Objective::mdgan ? embed_dim : 1;
}

std::vector<std::size_t> TrainConfig::generator_sizes() const {
  return with_ends(latent.latent_dim, generator_hidden, 2);
}

std::vector<std::size_t> TrainConfig::discriminator_sizes() const {
  return with_ends(2, discriminator_hidden, discriminator_output());
}

GridDataset TrainConfig::dataset() const { return GridDataset(grid_size, grid_spacing, data_sigma); }

std::string to_ndjson(const RunRecord& r, bool include_wall_time) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["d_loss"] = r.d_loss;
  j["g_loss"] = r.g_loss;
  j["modes_captured"] = r.report.modes_captured;
  j["hq_fraction"] = r.report.hq_fraction;
  j["frechet"] = r.frechet;
  j["mode_report"] = nlohmann::ordered_json::parse(to_ndjson(r.report));
  if (include_wall_time) j["wall_time"] = r.wall_time;
  return j.dump();
}

NumericalFailure::NumericalFailure(std::size_t step, std::string quantity, double value)
    : std::runtime_error("non-finite " + quantity + " at step " + std::to_string(step)),
      step_(step),
      quantity_(std::move(quantity)),
      value_(value) {}

std::string NumericalFailure::to_ndjson() const {
  nlohmann::ordered_json j;
  j["error"] = "non-finite value";
  j["step"] = step_;
  j["quantity"] = quantity_;
  j["value"] = std::isnan(value_) ? "nan" : (value_ > 0 ? "inf" : "-inf");
  return j.dump();
}

TrainingSession::TrainingSession(TrainConfig cfg, std::string config_text)
    : cfg_(std::move(cfg)),
      config_text_(std::move(config_text)),
      data_(cfg_.dataset()),
      data_rng_(derive_seed(cfg_.seed, kDataStream)),
      latent_rng_(derive_seed(cfg_.seed, kLatentStream)) {
  cfg_.validate();
  if (cfg_.objective == Objective::mdgan)
    mixture_ = std::make_unique<SimplexMixture>(cfg_.embed_dim, cfg_.sigma, cfg_.circumradius);
  Rng init_rng(derive_seed(cfg_.seed, kInitStream));
  generator_ = init_network(cfg_.generator_sizes(), cfg_.generator_nonlinearity, init_rng);
  discriminator_ = init_network(cfg_.discriminator_sizes(), cfg_.discriminator_nonlinearity, init_rng);
  adam_g_.hyper = cfg_.adam_generator;
  adam_d_.hyper = cfg_.adam_discriminator;
}

void TrainingSession::check_finite(std::string_view what, double value) const {
  if (!std::isfinite(value)) throw NumericalFailure(step_ + 1, std::string(what), value);
}

void TrainingSession::check_grads(std::string_view what, MlpNetwork& net) const {
  for (const Tensor* p : net.parameters()) {
    if (p->has_grad() && !all_finite(p->grad.values()))
      throw NumericalFailure(step_ + 1, std::string(what), std::nan(""));
  }
}

void TrainingSession::discriminator_step() {
  const Matrix real = sample_real(data_, cfg_.batch_size, data_rng_);
  const Matrix fake = generator_.predict(sample_latent(cfg_.latent, cfg_.batch_size, latent_rng_));

  Tape tape;
  discriminator_.zero_grad();
  const Var real_out = discriminator_.forward(tape, tape.constant(real));
  const Var fake_out = discriminator_.forward(tape, tape.constant(fake));
  LossValue loss = cfg_.objective == Objective::mdgan
                       ? d_loss_mdgan(*mixture_, tape.value(real_out), tape.value(fake_out), cfg_.loss)
                       : d_loss_vanilla(tape.value(real_out), tape.value(fake_out));
  check_finite("d_loss", loss.value);
  last_d_loss_ = loss.value;
  const Var head = tape.loss_head(std::move(loss), real_out, fake_out);
  tape.backward(head);
  check_grads("discriminator gradient", discriminator_);
  adam_step(discriminator_.parameters(), adam_d_);
}

void TrainingSession::generator_step() {
  const Matrix z = sample_latent(cfg_.latent, cfg_.batch_size, latent_rng_);

  Tape tape;
  generator_.zero_grad();
  const Var fake = generator_.forward(tape, tape.constant(z));
  const Var fake_out = discriminator_.forward(tape, fake, /*track_params=*/false);
  LossValue loss = cfg_.objective == Objective::mdgan
                       ? g_loss_mdgan(*mixture_, tape.value(fake_out), cfg_.loss)
                       : g_loss_vanilla(tape.value(fake_out));
  check_finite("g_loss", loss.value);
  last_g_loss_ = loss.value;
  const Var head = tape.loss_head(std::move(loss), std::nullopt, fake_out);
  tape.backward(head);
  check_grads("generator gradient", generator_);
  adam_step(generator_.parameters(), adam_g_);
}

void TrainingSession::step() {
  for (std::size_t i = 0; i < cfg_.d_steps_per_g; ++i) discriminator_step();
  generator_step();
  ++step_;
}

Checkpoint TrainingSession::checkpoint() const {
  Checkpoint c;
  c.seed = cfg_.seed;
  c.step = step_;
  c.objective = static_cast<std::uint32_t>(cfg_.objective);
  c.embed_dim = cfg_.discriminator_output();
  c.sigma = cfg_.sigma;
  c.circumradius = cfg_.circumradius;
  c.last_d_loss = last_d_loss_;
  c.last_g_loss = last_g_loss_;
  c.config_text = config_text_;
  c.generator = generator_;
  c.discriminator = discriminator_;
  c.adam_generator = adam_g_;
  c.adam_discriminator = adam_d_;
  return c;
}

RunRecord evaluate_source(const SampleSource& source, const GridDataset& ds,
                          const TrainConfig& cfg, std::uint64_t seed, std::size_t step) {
  Rng rng(derive_seed(seed, kEvalStreamBase + step));
  const Matrix generated = source(cfg.eval_samples, rng);
  const Matrix reference = sample_real(ds, cfg.eval_samples, rng);
  RunRecord rec;
  rec.step = step;
  rec.report = mode_report(generated, ds, cfg.threshold_sigmas);
  rec.frechet = frechet_distance(fit_gaussian(reference), fit_gaussian(generated));
  return rec;
}

RunRecord evaluate(const Checkpoint& ckpt, const GridDataset& ds, const TrainConfig& cfg) {
  const MlpNetwork& gen = ckpt.generator;
  if (gen.input_size() != cfg.latent.latent_dim)
    throw std::invalid_argument("evaluate: checkpoint generator does not match latent_dim");
  const SampleSource source = [&](std::size_t n, Rng& rng) {
    return gen.predict(sample_latent(cfg.latent, n, rng));
  };
  RunRecord rec = evaluate_source(source, ds, cfg, ckpt.seed, ckpt.step);
  rec.d_loss = ckpt.last_d_loss;
  rec.g_loss = ckpt.last_g_loss;
  return rec;
}

TrainResult train(const TrainConfig& cfg, const std::function<void(const RunRecord&)>& on_record,
                  std::string config_text) {
  TrainingSession session(cfg, std::move(config_text));
  const GridDataset ds = cfg.dataset();
  const auto start = std::chrono::steady_clock::now();
  TrainResult result;
  for (std::size_t s = 1; s <= cfg.total_g_steps; ++s) {
    session.step();
    if (s % cfg.eval_every == 0 || s == cfg.total_g_steps) {
      RunRecord rec = evaluate(session.checkpoint(), ds, cfg);
      rec.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (on_record) on_record(rec);
      result.records.push_back(std::move(rec));
    }
  }
  result.checkpoint = session.checkpoint();
  return result;
}

std::vector<EmbeddingSample> embedding_snapshot(const Checkpoint& ckpt, const GridDataset& ds,
                                                std::size_t n, std::uint64_t sample_seed) {
  if (n == 0) throw std::invalid_argument("embedding_snapshot: n must be >= 1");
  if (ckpt.objective != static_cast<std::uint32_t>(Objective::mdgan))
    throw std::invalid_argument("embedding_snapshot: checkpoint is not an mdgan run");
  const SimplexMixture mixture(ckpt.embed_dim, ckpt.sigma, ckpt.circumradius);
  Rng rng(sample_seed);
  const Matrix emb = ckpt.discriminator.predict(sample_real(ds, n, rng));
  std::vector<EmbeddingSample> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const NearestComponent nc = mixture.nearest_component(emb.row(r));
    out.push_back({std::vector<double>(emb.row(r).begin(), emb.row(r).end()), nc.index,
                   std::sqrt(nc.squared_distance)});
  }
  return out;
}

}  // namespace mdgan
