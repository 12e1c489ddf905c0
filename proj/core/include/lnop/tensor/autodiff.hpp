#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lnop/tensor/tensor.hpp"

namespace lnop {

/// A learnable tensor together with its gradient and Adam moments.
///
/// Gradients accumulate across backward passes until zero_grad().
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor value);

  std::string name;
  Tensor value;
  Tensor grad;
  Tensor first_moment;
  Tensor second_moment;
  std::int64_t step = 0;

  void zero_grad();
  /// Clears Adam moments and the step counter.
  void reset_optimizer_state();
};

class Tape;

/// A tensor value flowing through a computation, optionally recorded on a Tape.
///
/// Untracked Vars are plain values: operations on them record nothing, which is
/// how inference runs. A Var never outlives the Tape it was recorded on.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value);

  /// Shares ownership of an immutable tensor (e.g. a cached basis matrix).
  explicit Var(std::shared_ptr<const Tensor> value);

  /// Non-owning view of a tensor; the caller keeps it alive and unmodified
  /// until any tape holding it has run backward.
  static Var view(const Tensor& value);

  const Tensor& value() const { return *value_; }
  const Shape& shape() const { return value_->shape(); }
  bool tracked() const noexcept { return tape_ != nullptr; }
  Tape* tape() const noexcept { return tape_; }
  std::size_t node() const noexcept { return node_; }
  explicit operator bool() const noexcept { return static_cast<bool>(value_); }

 private:
  friend class Tape;
  std::shared_ptr<const Tensor> value_;
  Tape* tape_ = nullptr;
  std::size_t node_ = 0;
};

/// Gradient buffers of an operation's inputs, handed to its backward rule.
class GradAccess {
 public:
  /// Whether input `slot` leads to anything that wants a gradient.
  bool needed(std::size_t slot) const;
  /// Zero-initialised (on first use) gradient buffer for input `slot`.
  Tensor& at(std::size_t slot);

 private:
  friend class Tape;
  GradAccess(Tape& tape, const std::vector<std::size_t>& inputs) : tape_(tape), inputs_(inputs) {}
  Tape& tape_;
  const std::vector<std::size_t>& inputs_;
};

using BackwardFn = std::function<void(const Tensor& grad_out, GradAccess& grads)>;

/// Reverse-mode gradient tape.
///
/// Nodes are appended in evaluation order, so the node list is topologically
/// sorted by construction; backward() walks it once in reverse.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf for a parameter; backward() accumulates into `param.grad`.
  Var watch(Parameter& param);

  /// Appends an operation node. Untracked inputs are stored but never receive
  /// gradients. Inputs recorded on a different tape are rejected.
  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward);

  /// Propagates d(loss)/d(node) through the tape and clears it.
  void backward(const Var& loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  void clear();

 private:
  friend class GradAccess;
  static constexpr std::size_t kUntracked = static_cast<std::size_t>(-1);

  struct Node {
    std::vector<std::size_t> inputs;
    Shape shape;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
};

/// Returns the tape shared by the tracked inputs (nullptr when none are
/// tracked); throws ContractError if they disagree.
Tape* common_tape(std::initializer_list<const Var*> inputs);

/// Maps parameters to Vars: watched on a tape while training, plain views for
/// inference.
class ParamBinder {
 public:
  ParamBinder() = default;
  explicit ParamBinder(Tape* tape) : tape_(tape) {}
  Var operator()(Parameter& p) const { return tape_ ? tape_->watch(p) : Var::view(p.value); }
  Var operator()(const Parameter& p) const;
  Tape* tape() const noexcept { return tape_; }

 private:
  Tape* tape_ = nullptr;
};

}  // namespace lnop
