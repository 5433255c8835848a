#include "slotzero/model/params.hpp"
#include "slotzero/tensor/ops.hpp"

namespace sz::model {

Tensor forward(const Mlp& mlp, const Tensor& x) {
  Tensor h = ops::tanh(ops::linear(x, mlp.w0, mlp.b0));
  h = ops::tanh(ops::linear(h, mlp.w1, mlp.b1));
  return ops::linear(h, mlp.w2, mlp.b2);
}

}  // namespace sz::model
