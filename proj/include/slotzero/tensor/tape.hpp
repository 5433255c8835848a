#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "slotzero/tensor/tensor.hpp"

namespace sz {

/// Ordered record of primitive operations for reverse-mode differentiation.
///
/// Operations append themselves while a TapeScope for this tape is alive on the
/// current thread, so the record is topologically ordered by construction. A tape
/// belongs to one thread.
class Tape {
 public:
  using Backward = std::function<void(const detail::Node& out)>;

  void record(std::shared_ptr<detail::Node> out, Backward backward);

  /// Propagates d(root)/d(leaf) into every reachable leaf with requires_grad.
  /// Leaf gradients accumulate across calls; intermediate gradients are reset.
  void backward(const Tensor& root);

  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

 private:
  struct Entry {
    std::shared_ptr<detail::Node> out;
    Backward backward;
  };
  std::vector<Entry> entries_;
};

/// Makes `tape` the recording target on this thread for the scope's lifetime.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

Tape* active_tape() noexcept;

}  // namespace sz
