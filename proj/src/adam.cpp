#include "mdgan/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mdgan {

void adam_step(std::span<Tensor* const> params, AdamState& state) {
  if (state.first_moment.empty() && state.second_moment.empty() && state.step == 0) {
    for (const Tensor* p : params) {
      state.first_moment.emplace_back(p->value.size(), 0.0);
      state.second_moment.emplace_back(p->value.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size())
    throw std::invalid_argument("adam_step: optimizer state does not match parameter list");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::size_t n = params[i]->value.size();
    if (state.first_moment[i].size() != n || state.second_moment[i].size() != n)
      throw std::invalid_argument("adam_step: moment shape does not match parameter");
    if (params[i]->has_grad() && !params[i]->grad.same_shape(params[i]->value))
      throw std::invalid_argument("adam_step: gradient shape does not match parameter");
  }

  const AdamHyper& h = state.hyper;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    double* value = p.value.data();
    const double* grad = p.has_grad() ? p.grad.data() : nullptr;
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double g = grad != nullptr ? grad[j] : 0.0;
      m[j] = h.beta1 * m[j] + (1.0 - h.beta1) * g;
      v[j] = h.beta2 * v[j] + (1.0 - h.beta2) * g * g;
      value[j] -= h.lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + h.epsilon);
    }
  }
}

}  // namespace mdgan
