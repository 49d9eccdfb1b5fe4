#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mdgan/objective.hpp"
#include "mdgan/tensor.hpp"

namespace mdgan {

enum class Nonlinearity { leaky_relu, relu, tanh };

inline constexpr double kLeakyReluSlope = 0.2;

// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

// Reverse-mode differentiation record over dense matrices.
//
// Every primitive appends one node holding its forward value and the closure
// that propagates the node's gradient to its inputs. backward() walks the
// nodes in exact reverse order of recording. Parameters enter through
// param(): their gradients are accumulated into the bound Tensor, which must
// outlive the tape's use.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // A differentiable input whose gradient is readable through grad() after
  // backward().
  Var input(Matrix value);
  // A value that receives no gradient.
  Var constant(Matrix value);
  // A bound parameter; backward() adds d(loss)/d(param) into param.grad.
  // With track = false the parameter acts as a constant.
  Var param(Tensor& param, bool track = true);

  // x * W^T + b with W of shape out x in and b of shape 1 x out.
  Var affine(Var x, Var weight, Var bias);
  Var activation(Var x, Nonlinearity kind);
  // Mean over all entries, as a 1 x 1 value.
  Var mean(Var x);

  // Row-wise log_lk of the mixture head: n x d embeddings -> n x 1.
  Var sgmm_log_lk(Var embeddings, const SimplexMixture& mixture);

  // A scalar loss head over up to two batches, carrying its own gradients
  // (see objective.hpp). A head that consumes only fakes passes no real Var.
  Var loss_head(LossValue loss, std::optional<Var> real, std::optional<Var> fake);

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
  // Gradient of the last backward() pass; empty for nodes it did not reach.
  const Matrix& grad(Var v) const { return nodes_.at(v.id).grad; }

  // Seeds d(loss)/d(loss) = 1 and propagates. Throws std::invalid_argument
  // unless loss is 1 x 1.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  // Releases all records.
  void clear();

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Tensor* bound = nullptr;
    bool requires_grad = false;
    std::function<void(Tape&, const Node&)> propagate;
  };

  Var push(Matrix value, bool requires_grad,
           std::function<void(Tape&, const Node&)> propagate = {});
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  Matrix& grad_slot(std::size_t id);

  std::vector<Node> nodes_;
};

}  // namespace mdgan
