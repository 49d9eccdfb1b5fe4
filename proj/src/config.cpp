#include "mdgan/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace mdgan {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(std::string(key), "expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(std::string(key), "expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ConfigError(std::string(key), "expected a number, got '" + s + "'");
  return out;
}

std::vector<std::size_t> parse_sizes(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  if (trim(v).empty()) return out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto piece = trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
    out.push_back(parse_count(key, piece));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sizes[i]);
  }
  return out;
}

template <typename Fn>
auto wrap(std::string_view key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string(key), e.what());
  }
}

struct Field {
  std::string key;
  std::function<void(TrainConfig&, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define MDGAN_COUNT(name, member)                                                         \
  Field {                                                                                 \
    name, [](TrainConfig& c, std::string_view v) { c.member = parse_count(name, v); },    \
        [](const TrainConfig& c) { return std::to_string(c.member); }                     \
  }
#define MDGAN_REAL(name, member)                                                          \
  Field {                                                                                 \
    name, [](TrainConfig& c, std::string_view v) { c.member = parse_real(name, v); },     \
        [](const TrainConfig& c) { return fmt_real(c.member); }                           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"seed", [](TrainConfig& c, std::string_view v) { c.seed = parse_u64("seed", v); },
            [](const TrainConfig& c) { return std::to_string(c.seed); }},
      MDGAN_COUNT("total_g_steps", total_g_steps),
      MDGAN_COUNT("d_steps_per_g", d_steps_per_g),
      MDGAN_COUNT("batch_size", batch_size),
      Field{"objective",
            [](TrainConfig& c, std::string_view v) {
              c.objective = wrap("objective", [&] { return parse_objective(v); });
            },
            [](const TrainConfig& c) { return std::string(to_string(c.objective)); }},
      MDGAN_COUNT("embed_dim", embed_dim),
      MDGAN_REAL("sigma", sigma),
      MDGAN_REAL("circumradius", circumradius),
      MDGAN_REAL("loss.clamp_epsilon", loss.clamp_epsilon),
      Field{"loss.generator_mode",
            [](TrainConfig& c, std::string_view v) {
              c.loss.generator_mode =
                  wrap("loss.generator_mode", [&] { return parse_generator_mode(v); });
            },
            [](const TrainConfig& c) { return std::string(to_string(c.loss.generator_mode)); }},
      MDGAN_COUNT("generator.latent_dim", latent.latent_dim),
      Field{"generator.latent_distribution",
            [](TrainConfig& c, std::string_view v) {
              c.latent.distribution = wrap("generator.latent_distribution",
                                           [&] { return parse_latent_distribution(v); });
            },
            [](const TrainConfig& c) { return std::string(to_string(c.latent.distribution)); }},
      Field{"generator.hidden",
            [](TrainConfig& c, std::string_view v) {
              c.generator_hidden = parse_sizes("generator.hidden", v);
            },
            [](const TrainConfig& c) { return fmt_sizes(c.generator_hidden); }},
      Field{"generator.nonlinearity",
            [](TrainConfig& c, std::string_view v) {
              c.generator_nonlinearity =
                  wrap("generator.nonlinearity", [&] { return parse_nonlinearity(v); });
            },
            [](const TrainConfig& c) { return std::string(to_string(c.generator_nonlinearity)); }},
      Field{"discriminator.hidden",
            [](TrainConfig& c, std::string_view v) {
              c.discriminator_hidden = parse_sizes("discriminator.hidden", v);
            },
            [](const TrainConfig& c) { return fmt_sizes(c.discriminator_hidden); }},
      Field{"discriminator.nonlinearity",
            [](TrainConfig& c, std::string_view v) {
              c.discriminator_nonlinearity =
                  wrap("discriminator.nonlinearity", [&] { return parse_nonlinearity(v); });
            },
            [](const TrainConfig& c) {
              return std::string(to_string(c.discriminator_nonlinearity));
            }},
      MDGAN_REAL("adam_g.lr", adam_generator.lr),
      MDGAN_REAL("adam_g.beta1", adam_generator.beta1),
      MDGAN_REAL("adam_g.beta2", adam_generator.beta2),
      MDGAN_REAL("adam_g.epsilon", adam_generator.epsilon),
      MDGAN_REAL("adam_d.lr", adam_discriminator.lr),
      MDGAN_REAL("adam_d.beta1", adam_discriminator.beta1),
      MDGAN_REAL("adam_d.beta2", adam_discriminator.beta2),
      MDGAN_REAL("adam_d.epsilon", adam_discriminator.epsilon),
      MDGAN_COUNT("data.grid_size", grid_size),
      MDGAN_REAL("data.spacing", grid_spacing),
      MDGAN_REAL("data.sigma", data_sigma),
      MDGAN_COUNT("eval_every", eval_every),
      MDGAN_COUNT("eval_samples", eval_samples),
      MDGAN_REAL("eval.threshold_sigmas", threshold_sigmas),
  };
  return table;
}

#undef MDGAN_COUNT
#undef MDGAN_REAL

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

void apply_setting(TrainConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(cfg, trim(value));
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown configuration key");
}

TrainConfig parse_config(std::istream& is, TrainConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(sv), "line " + std::to_string(lineno) + " is not key = value");
    apply_setting(base, trim(sv.substr(0, eq)), trim(sv.substr(eq + 1)));
  }
  return base;
}

TrainConfig load_config_file(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path.string());
  return parse_config(is, std::move(base));
}

std::string to_config_text(const TrainConfig& cfg) {
  std::ostringstream os;
  for (const auto& f : fields()) os << f.key << " = " << f.get(cfg) << '\n';
  return os.str();
}

}  // namespace mdgan
