#include "mdgan/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mdgan {
namespace {

constexpr std::array<char, 8> kMagic = {'M', 'D', 'G', 'A', 'N', 'C', 'K', 'P'};
// Guards against absurd allocations when reading a corrupt file.
constexpr std::uint64_t kMaxCount = 1ull << 32;

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  template <typename U>
  void uint(U v) {
    unsigned char buf[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    os_.write(reinterpret_cast<const char*>(buf), sizeof(U));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const std::string& s) {
    uint<std::uint64_t>(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  template <typename U>
  U uint() {
    unsigned char buf[sizeof(U)];
    read(reinterpret_cast<char*>(buf), sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::uint64_t count() {
    const auto n = uint<std::uint64_t>();
    if (n > kMaxCount) throw std::runtime_error("checkpoint: implausible length field");
    return n;
  }
  std::string bytes() {
    std::string s(count(), '\0');
    read(s.data(), s.size());
    return s;
  }
  void read(char* dst, std::size_t n) {
    is_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n)
      throw std::runtime_error("checkpoint: unexpected end of file");
  }

 private:
  std::istream& is_;
};

void write_shape(Writer& w, const MlpNetwork& net) {
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(net.sizes().size()));
  for (std::size_t s : net.sizes()) w.uint<std::uint64_t>(s);
  w.uint<std::uint32_t>(nonlinearity_code(net.hidden()));
}

MlpNetwork read_shape(Reader& r) {
  const auto layers = r.uint<std::uint32_t>();
  if (layers < 2 || layers > 1024) throw std::runtime_error("checkpoint: bad layer count");
  std::vector<std::size_t> sizes(layers);
  for (auto& s : sizes) s = r.count();
  return MlpNetwork(std::move(sizes), nonlinearity_from_code(r.uint<std::uint32_t>()));
}

void write_params(Writer& w, const MlpNetwork& net) {
  for (double v : net.flatten()) w.f64(v);
}

void read_params(Reader& r, MlpNetwork& net) {
  std::vector<double> flat(net.parameter_count());
  for (double& v : flat) v = r.f64();
  net.unflatten(flat);
}

void write_adam(Writer& w, const AdamState& s) {
  w.f64(s.hyper.lr);
  w.f64(s.hyper.beta1);
  w.f64(s.hyper.beta2);
  w.f64(s.hyper.epsilon);
  w.uint<std::uint64_t>(s.step);
  w.uint<std::uint8_t>(s.first_moment.empty() ? 0 : 1);
  for (const auto& m : s.first_moment)
    for (double v : m) w.f64(v);
  for (const auto& m : s.second_moment)
    for (double v : m) w.f64(v);
}

AdamState read_adam(Reader& r, const MlpNetwork& net) {
  AdamState s;
  s.hyper.lr = r.f64();
  s.hyper.beta1 = r.f64();
  s.hyper.beta2 = r.f64();
  s.hyper.epsilon = r.f64();
  s.step = r.uint<std::uint64_t>();
  if (r.uint<std::uint8_t>() != 0) {
    for (auto* moments : {&s.first_moment, &s.second_moment})
      for (const Tensor* p : net.parameters()) {
        std::vector<double> m(p->value.size());
        for (double& v : m) v = r.f64();
        moments->push_back(std::move(m));
      }
  }
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& c) {
  Writer w(os);
  os.write(kMagic.data(), kMagic.size());
  w.uint<std::uint32_t>(kCheckpointVersion);
  w.uint<std::uint64_t>(c.seed);
  w.uint<std::uint64_t>(c.step);
  w.uint<std::uint32_t>(c.objective);
  w.uint<std::uint64_t>(c.embed_dim);
  w.f64(c.sigma);
  w.f64(c.circumradius);
  w.f64(c.last_d_loss);
  w.f64(c.last_g_loss);
  w.bytes(c.config_text);
  write_shape(w, c.generator);
  write_shape(w, c.discriminator);
  write_params(w, c.generator);
  write_params(w, c.discriminator);
  write_adam(w, c.adam_generator);
  write_adam(w, c.adam_discriminator);
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& is) {
  Reader r(is);
  std::array<char, 8> magic{};
  r.read(magic.data(), magic.size());
  if (magic != kMagic) throw std::runtime_error("checkpoint: bad magic");
  const auto version = r.uint<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint c;
  c.seed = r.uint<std::uint64_t>();
  c.step = r.uint<std::uint64_t>();
  c.objective = r.uint<std::uint32_t>();
  c.embed_dim = r.uint<std::uint64_t>();
  c.sigma = r.f64();
  c.circumradius = r.f64();
  c.last_d_loss = r.f64();
  c.last_g_loss = r.f64();
  c.config_text = r.bytes();
  c.generator = read_shape(r);
  c.discriminator = read_shape(r);
  read_params(r, c.generator);
  read_params(r, c.discriminator);
  c.adam_generator = read_adam(r, c.generator);
  c.adam_discriminator = read_adam(r, c.discriminator);
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_checkpoint(os, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(is);
}

}  // namespace mdgan
