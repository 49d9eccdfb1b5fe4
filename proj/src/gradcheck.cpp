#include "mdgan/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "mdgan/mlp.hpp"
#include "mdgan/objective.hpp"
#include "mdgan/sgmm.hpp"
#include "mdgan/tape.hpp"

namespace mdgan {
namespace {

// Accumulates one case's analytic/numeric pair.
struct CaseError {
  double max_abs_diff = 0.0;
  double max_numeric = 0.0;

  void add(double analytic, double numeric) {
    max_abs_diff = std::max(max_abs_diff, std::abs(analytic - numeric));
    max_numeric = std::max(max_numeric, std::abs(numeric));
  }
  double relative() const { return max_numeric > 0.0 ? max_abs_diff / max_numeric : max_abs_diff; }
};

// Embedding near a random vertex, at a distance of a few sigma, with a clear
// margin to the second-nearest vertex.
std::vector<double> embedding_near_vertex(const SimplexMixture& m, Rng& rng, double min_scale,
                                          double max_scale) {
  std::uniform_int_distribution<std::size_t> pick(0, m.components() - 1);
  std::uniform_real_distribution<double> scale(min_scale, max_scale);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const auto mu = m.mean(pick(rng));
    std::vector<double> dir(m.dim());
    double norm = 0.0;
    for (double& v : dir) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double r = scale(rng) * m.sigma();
    std::vector<double> e(m.dim());
    for (std::size_t j = 0; j < m.dim(); ++j) e[j] = mu[j] + r * dir[j] / norm;

    std::vector<double> d2(m.components());
    for (std::size_t i = 0; i < m.components(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m.dim(); ++j) s += (e[j] - m.mean(i)[j]) * (e[j] - m.mean(i)[j]);
      d2[i] = s;
    }
    std::sort(d2.begin(), d2.end());
    if (d2.size() < 2 || d2[1] - d2[0] > 1e-3) return e;
  }
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = gauss(rng);
  return m;
}

Matrix embeddings_near_vertices(const SimplexMixture& m, std::size_t n, Rng& rng) {
  Matrix out(n, m.dim());
  for (std::size_t r = 0; r < n; ++r) {
    const auto e = embedding_near_vertex(m, rng, 0.5, 2.5);
    std::copy(e.begin(), e.end(), out.row(r).begin());
  }
  return out;
}

// Central differences of f over every entry of x.
void check_matrix(Matrix& x, const Matrix& analytic, const std::function<double()>& f, double h,
                  CaseError& err) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = f();
    x.data()[i] = saved - h;
    const double down = f();
    x.data()[i] = saved;
    err.add(analytic.data()[i], (up - down) / (2.0 * h));
  }
}

GradcheckSuite check_sgmm(const GradcheckOptions& o) {
  GradcheckSuite suite{"sgmm.log_lk_grad", 0, 0, 0.0, o.head_tolerance};
  Rng rng(o.seed);
  const std::size_t dims[] = {1, 2, 8, 24};
  const double sigmas[] = {0.1, 0.2, 0.5};
  for (std::size_t c = 0; c < o.cases; ++c) {
    const SimplexMixture m(dims[c % 4], sigmas[(c / 4) % 3]);
    std::vector<double> e = embedding_near_vertex(m, rng, 0.2, 3.0);
    const std::vector<double> g = m.log_lk_grad(e);
    CaseError err;
    for (std::size_t j = 0; j < e.size(); ++j) {
      const double saved = e[j];
      e[j] = saved + o.step;
      const double up = m.log_lk(e);
      e[j] = saved - o.step;
      const double down = m.log_lk(e);
      e[j] = saved;
      err.add(g[j], (up - down) / (2.0 * o.step));
    }
    suite.max_rel_error = std::max(suite.max_rel_error, err.relative());
    ++suite.cases;
  }
  return suite;
}

GradcheckSuite check_heads(const GradcheckOptions& o) {
  GradcheckSuite suite{"objective.heads", 0, 0, 0.0, o.head_tolerance};
  Rng rng(o.seed + 1);
  const std::size_t dims[] = {2, 8};
  const std::size_t batch = 4;
  for (std::size_t c = 0; c < o.cases; ++c) {
    const SimplexMixture m(dims[c % 2], 0.2);
    LossConfig cfg;
    CaseError err;
    switch (c % 5) {
      case 0: {
        Matrix real = embeddings_near_vertices(m, batch, rng);
        Matrix fake = embeddings_near_vertices(m, batch, rng);
        const LossValue lv = d_loss_mdgan(m, real, fake, cfg);
        const auto f = [&] { return d_loss_mdgan(m, real, fake, cfg).value; };
        check_matrix(real, lv.grad_real, f, o.step, err);
        check_matrix(fake, lv.grad_fake, f, o.step, err);
        break;
      }
      case 1:
      case 2: {
        cfg.generator_mode = c % 5 == 1 ? GeneratorMode::minimax : GeneratorMode::nonsaturating;
        Matrix fake = embeddings_near_vertices(m, batch, rng);
        const LossValue lv = g_loss_mdgan(m, fake, cfg);
        check_matrix(fake, lv.grad_fake, [&] { return g_loss_mdgan(m, fake, cfg).value; }, o.step,
                     err);
        break;
      }
      case 3: {
        Matrix real = random_matrix(batch, 1, rng, 3.0);
        Matrix fake = random_matrix(batch, 1, rng, 3.0);
        const LossValue lv = d_loss_vanilla(real, fake);
        const auto f = [&] { return d_loss_vanilla(real, fake).value; };
        check_matrix(real, lv.grad_real, f, o.step, err);
        check_matrix(fake, lv.grad_fake, f, o.step, err);
        break;
      }
      default: {
        Matrix fake = random_matrix(batch, 1, rng, 3.0);
        const LossValue lv = g_loss_vanilla(fake);
        check_matrix(fake, lv.grad_fake, [&] { return g_loss_vanilla(fake).value; }, o.step, err);
        break;
      }
    }
    suite.max_rel_error = std::max(suite.max_rel_error, err.relative());
    ++suite.cases;
  }
  return suite;
}

// Forward pass that also records the sign of every hidden pre-activation, so
// that a finite difference crossing a kink can be detected.
Matrix forward_with_pattern(const MlpNetwork& net, const Matrix& x, std::vector<bool>& pattern) {
  Matrix h = x;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Matrix& w = layers[l].weight.value;
    const Matrix& b = layers[l].bias.value;
    Matrix y(h.rows(), w.rows());
    for (std::size_t r = 0; r < h.rows(); ++r)
      for (std::size_t o = 0; o < w.rows(); ++o) {
        double s = b(0, o);
        for (std::size_t i = 0; i < w.cols(); ++i) s += h(r, i) * w(o, i);
        y(r, o) = s;
      }
    if (l + 1 < layers.size()) {
      for (double& v : y.values()) {
        pattern.push_back(v < 0.0);
        switch (net.hidden()) {
          case Nonlinearity::leaky_relu:
            if (v < 0.0) v *= kLeakyReluSlope;
            break;
          case Nonlinearity::relu:
            if (v < 0.0) v = 0.0;
            break;
          case Nonlinearity::tanh:
            v = std::tanh(v);
            break;
        }
      }
    }
    h = std::move(y);
  }
  return h;
}

void append_assignment(const SimplexMixture& m, const Matrix& emb, std::vector<bool>& pattern) {
  for (std::size_t r = 0; r < emb.rows(); ++r) {
    const std::size_t idx = m.nearest_component(emb.row(r)).index;
    for (std::size_t b = 0; b < 8; ++b) pattern.push_back((idx >> b) & 1u);
  }
}

GradcheckSuite check_networks(const GradcheckOptions& o) {
  GradcheckSuite suite{"network.backward", 0, 0, 0.0, o.network_tolerance};
  Rng rng(o.seed + 2);
  const std::size_t dims[] = {2, 4, 8};
  const std::size_t batch = 8;
  const std::size_t latent = 4;
  LossConfig loss_cfg;

  for (std::size_t c = 0; c < o.cases; ++c) {
    const std::size_t kind = c % 4;
    const bool mdgan = kind == 0 || kind == 2;
    const bool through_generator = kind >= 2;
    const std::size_t d = mdgan ? dims[(c / 4) % 3] : 1;
    const SimplexMixture mix(mdgan ? d : 1, 0.5);

    MlpNetwork disc = init_network({2, 16, 16, d}, Nonlinearity::leaky_relu, rng);
    MlpNetwork gen = init_network({latent, 16, 16, 2}, Nonlinearity::tanh, rng);
    const Matrix real = random_matrix(batch, 2, rng, 2.0);
    const Matrix fake_in = random_matrix(batch, 2, rng, 2.0);
    const Matrix z = random_matrix(batch, latent, rng, 1.0);

    // Loss and kink/assignment pattern at the current parameters.
    const auto evaluate = [&](std::vector<bool>& pattern) {
      if (!through_generator) {
        const Matrix er = forward_with_pattern(disc, real, pattern);
        const Matrix ef = forward_with_pattern(disc, fake_in, pattern);
        if (!mdgan) return d_loss_vanilla(er, ef).value;
        append_assignment(mix, er, pattern);
        append_assignment(mix, ef, pattern);
        return d_loss_mdgan(mix, er, ef, loss_cfg).value;
      }
      const Matrix x = forward_with_pattern(gen, z, pattern);
      const Matrix ef = forward_with_pattern(disc, x, pattern);
      if (!mdgan) return g_loss_vanilla(ef).value;
      append_assignment(mix, ef, pattern);
      return g_loss_mdgan(mix, ef, loss_cfg).value;
    };

    // Analytic gradients through the tape.
    MlpNetwork& target = through_generator ? gen : disc;
    disc.zero_grad();
    gen.zero_grad();
    {
      Tape tape;
      if (!through_generator) {
        const Var er = disc.forward(tape, tape.constant(real));
        const Var ef = disc.forward(tape, tape.constant(fake_in));
        LossValue lv = mdgan ? d_loss_mdgan(mix, tape.value(er), tape.value(ef), loss_cfg)
                             : d_loss_vanilla(tape.value(er), tape.value(ef));
        tape.backward(tape.loss_head(std::move(lv), er, ef));
      } else {
        const Var x = gen.forward(tape, tape.constant(z));
        const Var ef = disc.forward(tape, x, false);
        LossValue lv = mdgan ? g_loss_mdgan(mix, tape.value(ef), loss_cfg)
                             : g_loss_vanilla(tape.value(ef));
        tape.backward(tape.loss_head(std::move(lv), std::nullopt, ef));
      }
    }

    std::vector<bool> base_pattern;
    evaluate(base_pattern);
    CaseError err;
    for (Tensor* p : target.parameters()) {
      const Matrix analytic = p->has_grad() ? p->grad : Matrix(p->value.rows(), p->value.cols());
      for (std::size_t i = 0; i < p->value.size(); ++i) {
        double& theta = p->value.data()[i];
        const double saved = theta;
        const double h = o.step * std::max(1.0, std::abs(saved));
        std::vector<bool> up_pattern, down_pattern;
        theta = saved + h;
        const double up = evaluate(up_pattern);
        theta = saved - h;
        const double down = evaluate(down_pattern);
        theta = saved;
        if (up_pattern != base_pattern || down_pattern != base_pattern) {
          ++suite.skipped;
          continue;
        }
        err.add(analytic.data()[i], (up - down) / (2.0 * h));
      }
    }
    suite.max_rel_error = std::max(suite.max_rel_error, err.relative());
    ++suite.cases;
  }
  return suite;
}

}  // namespace

std::vector<GradcheckSuite> run_gradcheck(const GradcheckOptions& opts) {
  return {check_sgmm(opts), check_heads(opts), check_networks(opts)};
}

}  // namespace mdgan
