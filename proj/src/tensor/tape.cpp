#include "slotzero/tensor/tape.hpp"

namespace sz {

namespace {
thread_local Tape* current_tape = nullptr;
}

Tape* active_tape() noexcept { return current_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(current_tape) { current_tape = &tape; }
TapeScope::~TapeScope() { current_tape = previous_; }

void Tape::record(std::shared_ptr<detail::Node> out, Backward backward) {
  entries_.push_back({std::move(out), std::move(backward)});
}

void Tape::backward(const Tensor& root) {
  if (!root.defined() || root.numel() != 1) {
    throw ShapeError("backward needs a scalar root, got " +
                     (root.defined() ? shape_string(root.shape()) : std::string("undefined")));
  }
  // Intermediate adjoints are per-pass; only leaves accumulate across calls.
  for (auto& entry : entries_) entry.out->grad.clear();

  auto& root_node = *root.node();
  root_node.ensure_grad();
  root_node.grad[0] += 1.0;

  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->out->grad.empty()) continue;  // not upstream of root
    it->backward(*it->out);
  }
}

}  // namespace sz
