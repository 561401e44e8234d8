#pragma once

// Small dense rank-3 tensor (nodes x channels x time), stored time-major
// so that each time slice is a contiguous (n x f) row-major matrix.

#include <cstddef>
#include <vector>

namespace opflab::gnn {

struct Tensor3 {
  int n = 0;  // nodes
  int f = 0;  // channels
  int t = 0;  // time steps
  std::vector<double> data;  // data[(tt*n + i)*f + c]

  Tensor3() = default;
  Tensor3(int nodes, int channels, int time)
      : n(nodes), f(channels), t(time),
        data(static_cast<std::size_t>(nodes) * channels * time, 0.0) {}

  double& at(int i, int c, int tt) {
    return data[(static_cast<std::size_t>(tt) * n + i) * f + c];
  }
  double at(int i, int c, int tt) const {
    return data[(static_cast<std::size_t>(tt) * n + i) * f + c];
  }
  // contiguous (n x f) matrix for one time step
  double* slice(int tt) { return data.data() + static_cast<std::size_t>(tt) * n * f; }
  const double* slice(int tt) const {
    return data.data() + static_cast<std::size_t>(tt) * n * f;
  }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor3& o) const {
    return n == o.n && f == o.f && t == o.t;
  }
};

// rows x cols row-major helpers used by the attention math
void row_softmax(const double* in, double* out, int rows, int cols);
// backward of row_softmax: given softmax output s and upstream g,
// writes d(input) into out
void row_softmax_backward(const double* s, const double* g, double* out,
                          int rows, int cols);

}  // namespace opflab::gnn
