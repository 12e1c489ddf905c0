#include "lnop/tensor/autodiff.hpp"

#include "lnop/error.hpp"

namespace lnop {

Parameter::Parameter(std::string name_, Tensor value_)
    : name(std::move(name_)),
      value(std::move(value_)),
      grad(value.shape()),
      first_moment(value.shape()),
      second_moment(value.shape()) {}

void Parameter::zero_grad() { grad.fill(0.0); }

void Parameter::reset_optimizer_state() {
  first_moment.fill(0.0);
  second_moment.fill(0.0);
  step = 0;
}

Var::Var(Tensor value) : value_(std::make_shared<const Tensor>(std::move(value))) {}

Var::Var(std::shared_ptr<const Tensor> value) : value_(std::move(value)) {}

Var Var::view(const Tensor& value) {
  Var v;
  v.value_ = std::shared_ptr<const Tensor>(std::shared_ptr<const Tensor>{}, &value);
  return v;
}

Var ParamBinder::operator()(const Parameter& p) const {
  if (tape_) throw ContractError("cannot watch const parameter '" + p.name + "' on a tape");
  return Var::view(p.value);
}

bool GradAccess::needed(std::size_t slot) const {
  const auto id = inputs_.at(slot);
  return id != Tape::kUntracked && tape_.nodes_[id].requires_grad;
}

Tensor& GradAccess::at(std::size_t slot) {
  const auto id = inputs_.at(slot);
  if (id == Tape::kUntracked) throw ContractError("gradient requested for an untracked input");
  auto& g = tape_.grads_[id];
  if (g.empty()) g = Tensor(tape_.nodes_[id].shape);
  return g;
}

Var Tape::watch(Parameter& param) {
  if (param.grad.shape() != param.value.shape()) param.grad = Tensor(param.value.shape());
  Node node;
  node.shape = param.value.shape();
  node.param = &param;
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  Var v = Var::view(param.value);
  v.tape_ = this;
  v.node_ = nodes_.size() - 1;
  return v;
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward) {
  Node node;
  node.shape = value.shape();
  node.inputs.reserve(inputs.size());
  for (const auto& in : inputs) {
    if (!in.tracked()) {
      node.inputs.push_back(kUntracked);
      continue;
    }
    if (in.tape() != this) throw ContractError("operation mixes Vars from different tapes");
    node.inputs.push_back(in.node());
    node.requires_grad = node.requires_grad || nodes_[in.node()].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  Var v(std::move(value));
  v.tape_ = this;
  v.node_ = nodes_.size() - 1;
  return v;
}

void Tape::backward(const Var& loss) {
  if (!loss.tracked() || loss.tape() != this) {
    throw ContractError("backward() requires a loss recorded on this tape");
  }
  if (loss.value().size() != 1) {
    throw ContractError("backward() requires a scalar loss, got shape " + to_string(loss.shape()));
  }
  grads_.assign(nodes_.size(), Tensor{});
  grads_[loss.node()] = Tensor(loss.shape(), 1.0);
  for (std::size_t i = loss.node() + 1; i-- > 0;) {
    if (grads_[i].empty()) continue;
    auto& node = nodes_[i];
    if (node.param) {
      node.param->grad += grads_[i];
    } else if (node.backward) {
      GradAccess access(*this, node.inputs);
      node.backward(grads_[i], access);
    }
    grads_[i] = Tensor{};
  }
  clear();
}

void Tape::clear() {
  nodes_.clear();
  grads_.clear();
}

Tape* common_tape(std::initializer_list<const Var*> inputs) {
  Tape* tape = nullptr;
  for (const Var* v : inputs) {
    if (!v->tracked()) continue;
    if (tape && tape != v->tape()) throw ContractError("operation mixes Vars from different tapes");
    tape = v->tape();
  }
  return tape;
}

}  // namespace lnop
