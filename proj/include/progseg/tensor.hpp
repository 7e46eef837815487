#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "progseg/errors.hpp"

namespace progseg {

// Dense NCHW float tensor. All network activations and kernels use this
// layout; per-(n,c) planes are contiguous, which im2col and the per-channel
// reductions rely on.
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> v;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_, float fill = 0.0f)
        : n(n_), c(c_), h(h_), w(w_), v(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

    std::size_t size() const { return v.size(); }
    bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    std::size_t idx(int in, int ic, int iy, int ix) const {
        return ((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix;
    }
    float& at(int in, int ic, int iy, int ix) { return v[idx(in, ic, iy, ix)]; }
    float at(int in, int ic, int iy, int ix) const { return v[idx(in, ic, iy, ix)]; }

    float* plane(int in, int ic) { return v.data() + idx(in, ic, 0, 0); }
    const float* plane(int in, int ic) const { return v.data() + idx(in, ic, 0, 0); }

    void zero() { std::fill(v.begin(), v.end(), 0.0f); }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) throw ShapeMismatch(std::string("shape mismatch in ") + what);
}

}  // namespace progseg
