// mdgan: train, evaluate, gradient-check and plot mixture-density GAN runs on
// the 2D Gaussian grid.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>

#include "mdgan/checkpoint.hpp"
#include "mdgan/config.hpp"
#include "mdgan/gradcheck.hpp"
#include "mdgan/plot.hpp"
#include "mdgan/simd/kernels.hpp"
#include "mdgan/synthdata.hpp"
#include "mdgan/trainer.hpp"

namespace fs = std::filesystem;
using namespace mdgan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path resolve_config_path(const std::string& name) {
  if (fs::exists(name)) return name;
  for (const fs::path& dir : {fs::path("configs"), fs::path(MDGAN_CONFIG_DIR)}) {
    for (const fs::path& candidate : {dir / name, dir / (name + ".conf")})
      if (fs::exists(candidate)) return candidate;
  }
  throw UsageError("config file not found: " + name);
}

std::string run_header() {
  std::ostringstream os;
  os << "# mdgan " << MDGAN_VERSION << ", kernels: " << simd::kernels().name << '\n';
  return os.str();
}

TrainConfig config_from_checkpoint(const Checkpoint& ckpt) {
  std::istringstream is(ckpt.config_text);
  return parse_config(is);
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::string objective;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> embed_dim;
  std::optional<double> sigma;
  std::vector<std::string> sets;
  std::size_t checkpoint_every = 0;
};

TrainConfig resolve_train_config(const TrainArgs& a) {
  TrainConfig cfg = load_config_file(resolve_config_path(a.config));
  if (!a.objective.empty()) apply_setting(cfg, "objective", a.objective);
  if (a.steps) cfg.total_g_steps = *a.steps;
  if (a.embed_dim) cfg.embed_dim = *a.embed_dim;
  if (a.sigma) cfg.sigma = *a.sigma;
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.substr(0, msg.find(':')), msg.substr(msg.find(':') + 2));
  }
  return cfg;
}

// One seed into one directory; returns the exit code.
int run_one(TrainConfig cfg, const fs::path& dir, std::size_t checkpoint_every, std::mutex& io) {
  fs::create_directories(dir);
  const std::string config_text = to_config_text(cfg);
  {
    std::ofstream os(dir / "config.txt");
    os << run_header() << config_text;
  }
  std::ofstream log(dir / "log.ndjson");
  std::ofstream timing(dir / "timing.ndjson");
  if (checkpoint_every > 0) fs::create_directories(dir / "checkpoints");

  try {
    TrainingSession session(cfg, config_text);
    const GridDataset ds = cfg.dataset();
    const auto start = std::chrono::steady_clock::now();
    RunRecord last;
    for (std::size_t s = 1; s <= cfg.total_g_steps; ++s) {
      session.step();
      if (checkpoint_every > 0 && s % checkpoint_every == 0)
        save_checkpoint(dir / "checkpoints" / ("step_" + std::to_string(s) + ".ckpt"),
                        session.checkpoint());
      if (s % cfg.eval_every == 0 || s == cfg.total_g_steps) {
        last = evaluate(session.checkpoint(), ds, cfg);
        last.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log << to_ndjson(last) << '\n' << std::flush;
        timing << nlohmann::ordered_json{{"step", last.step}, {"wall_time", last.wall_time}}.dump()
               << '\n';
        std::lock_guard lock(io);
        std::cerr << "seed " << cfg.seed << " step " << s << " modes "
                  << last.report.modes_captured << " hq " << last.report.hq_fraction
                  << " frechet " << last.frechet << '\n';
      }
    }
    const Checkpoint final_ckpt = session.checkpoint();
    save_checkpoint(dir / "final.ckpt", final_ckpt);
    const RunRecord final_rec = cfg.total_g_steps > 0 ? last : evaluate(final_ckpt, ds, cfg);
    std::ofstream(dir / "report.ndjson") << to_ndjson(final_rec.report) << '\n';
  } catch (const NumericalFailure& e) {
    log << e.to_ndjson() << '\n';
    std::lock_guard lock(io);
    std::cerr << "seed " << cfg.seed << ": " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

std::size_t thread_cap() {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MDGAN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = static_cast<std::size_t>(v);
  }
  return cap;
}

int cmd_train(const TrainArgs& a) {
  TrainConfig base = resolve_train_config(a);
  std::vector<std::uint64_t> seeds = a.seeds;
  if (seeds.empty()) seeds.push_back(base.seed);

  std::mutex io;
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kExitOk};
  const auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      TrainConfig cfg = base;
      cfg.seed = seeds[i];
      const fs::path dir =
          seeds.size() == 1 ? fs::path(a.out) : fs::path(a.out) / ("seed_" + std::to_string(seeds[i]));
      const int rc = run_one(cfg, dir, a.checkpoint_every, io);
      int cur = worst.load();
      while (rc > cur && !worst.compare_exchange_weak(cur, rc)) {
      }
    }
  };
  const std::size_t n_threads = std::min(thread_cap(), seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return worst.load();
}

// --- eval / sample / plot ----------------------------------------------------

int cmd_eval(const std::string& path, std::optional<std::size_t> samples) {
  const Checkpoint ckpt = load_checkpoint(path);
  TrainConfig cfg = config_from_checkpoint(ckpt);
  if (samples) cfg.eval_samples = *samples;
  const RunRecord rec = evaluate(ckpt, cfg.dataset(), cfg);
  std::cout << to_ndjson(rec) << '\n';
  return kExitOk;
}

Matrix generated_points(const std::string& checkpoint, bool ideal, std::size_t n, Rng& rng,
                        TrainConfig& cfg) {
  if (ideal) return sample_real(cfg.dataset(), n, rng);
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  cfg = config_from_checkpoint(ckpt);
  return ckpt.generator.predict(sample_latent(cfg.latent, n, rng));
}

int cmd_sample(const std::string& checkpoint, std::size_t n, std::uint64_t seed,
               const std::string& out) {
  if (n == 0) throw UsageError("--n must be >= 1");
  TrainConfig cfg;
  Rng rng(seed);
  const bool real = checkpoint.empty();
  const Matrix pts = generated_points(checkpoint, real, n, rng, cfg);
  const char* kind = real ? "real" : "generated";
  if (out.empty() || out == "-") {
    write_points_csv(std::cout, pts, kind);
  } else {
    std::ofstream os(out);
    write_points_csv(os, pts, kind);
  }
  return kExitOk;
}

int cmd_plot(const std::string& checkpoint, bool ideal, std::size_t n, std::uint64_t seed,
             const std::string& svg_path, const std::string& csv_path, const std::string& title) {
  if (checkpoint.empty() == !ideal) throw UsageError("plot needs exactly one of --checkpoint or --ideal");
  if (n == 0) throw UsageError("--samples must be >= 1");
  TrainConfig cfg;
  Rng gen_rng(derive_seed(seed, 1));
  ScatterPlot plot;
  plot.generated = generated_points(checkpoint, ideal, n, gen_rng, cfg);
  const GridDataset ds = cfg.dataset();
  Rng real_rng(derive_seed(seed, 2));
  plot.real = sample_real(ds, n, real_rng);
  plot.centers = ds.centers();
  plot.extent = 0.5 * ds.spacing() * static_cast<double>(ds.grid_size()) + 1.0;
  plot.title = !title.empty() ? title : (ideal ? std::string("ideal sampler") : checkpoint);
  {
    std::ofstream os(svg_path);
    if (!os) throw UsageError("cannot write " + svg_path);
    write_svg(os, plot);
  }
  const std::string csv = csv_path.empty() ? fs::path(svg_path).replace_extension(".csv").string() : csv_path;
  std::ofstream os(csv);
  write_points_csv(os, plot.generated, "generated");
  return kExitOk;
}

int cmd_gradcheck(std::size_t cases, std::uint64_t seed) {
  GradcheckOptions opts;
  opts.cases = cases;
  opts.seed = seed;
  bool ok = true;
  for (const auto& s : run_gradcheck(opts)) {
    nlohmann::ordered_json j;
    j["suite"] = s.name;
    j["cases"] = s.cases;
    j["skipped_coordinates"] = s.skipped;
    j["max_rel_error"] = s.max_rel_error;
    j["tolerance"] = s.tolerance;
    j["passed"] = s.passed();
    std::cout << j.dump() << '\n';
    ok = ok && s.passed();
  }
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture-density GAN on the 2D Gaussian grid"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train one or more seeds");
  train->add_option("--config", ta.config, "Config file path or name under configs/")->required();
  std::uint64_t single_seed = 0;
  auto* seed_opt = train->add_option("--seed", single_seed, "Random seed");
  train->add_option("--seeds", ta.seeds, "Several seeds, run in parallel (MDGAN_THREADS caps)")
      ->delimiter(',')
      ->excludes(seed_opt);
  train->add_option("--out", ta.out, "Run directory")->required();
  train->add_option("--objective", ta.objective, "mdgan or vanilla")
      ->check(CLI::IsMember({"mdgan", "vanilla"}));
  train->add_option("--steps", ta.steps, "Generator steps");
  train->add_option("--embed-dim", ta.embed_dim, "Embedding dimension d (d+1 clusters)");
  train->add_option("--sigma", ta.sigma, "Mixture component standard deviation");
  train->add_option("--set", ta.sets, "Override any config key: key=value");
  train->add_option("--checkpoint-every", ta.checkpoint_every, "Also save checkpoints every N steps");

  std::string ckpt_path;
  std::optional<std::size_t> eval_samples;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint; prints one NDJSON record");
  eval->add_option("--checkpoint", ckpt_path, "Checkpoint file")->required();
  eval->add_option("--samples", eval_samples, "Number of generated samples");

  std::size_t gc_cases = 100;
  std::uint64_t gc_seed = 1;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  gradcheck->add_option("--cases", gc_cases, "Random cases per suite");
  gradcheck->add_option("--seed", gc_seed, "Random seed");

  std::string plot_ckpt, svg_out, csv_out, title;
  bool ideal = false;
  std::size_t plot_samples = 2500;
  std::uint64_t plot_seed = 0;
  auto* plot = app.add_subcommand("plot", "Scatter plot of generated vs real samples (SVG + CSV)");
  plot->add_option("--checkpoint", plot_ckpt, "Checkpoint file");
  plot->add_flag("--ideal", ideal, "Plot the ideal sampler (real data) instead of a checkpoint");
  plot->add_option("--out", svg_out, "SVG output path")->required();
  plot->add_option("--csv", csv_out, "CSV output path (default: next to the SVG)");
  plot->add_option("--samples", plot_samples, "Generated samples to draw");
  plot->add_option("--seed", plot_seed, "Random seed");
  plot->add_option("--title", title, "Plot title");

  std::string sample_ckpt, sample_out;
  std::size_t sample_n = 2500;
  std::uint64_t sample_seed = 0;
  auto* sample = app.add_subcommand("sample", "Dump real (or generated) samples as CSV");
  sample->add_option("--checkpoint", sample_ckpt, "Draw from this checkpoint's generator");
  sample->add_option("--n", sample_n, "Number of samples");
  sample->add_option("--seed", sample_seed, "Random seed");
  sample->add_option("--out", sample_out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      if (*seed_opt) ta.seeds = {single_seed};
      return cmd_train(ta);
    }
    if (*eval) return cmd_eval(ckpt_path, eval_samples);
    if (*gradcheck) return cmd_gradcheck(gc_cases, gc_seed);
    if (*plot) return cmd_plot(plot_ckpt, ideal, plot_samples, plot_seed, svg_out, csv_out, title);
    if (*sample) return cmd_sample(sample_ckpt, sample_n, sample_seed, sample_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error in '" << e.key() << "': " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
