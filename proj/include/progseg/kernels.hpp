#pragma once

#include <cstdint>
#include <vector>

#include "progseg/tensor.hpp"

namespace progseg::kernels {

// Every kernel ships in two flavors: Parallel (OpenMP, GEMM-backed where it
// pays) used by the trainer, and Serial — a plain-loop reference the tests
// compare against. Parallel results are reproducible run-to-run for a fixed
// thread count: reductions combine fixed per-thread partials in thread order
// and never use omp float reductions.
enum class Exec { Serial, Parallel };

// Row-major C = alpha*op(A)*op(B) + beta*C. Serial is a naive triple loop;
// Parallel dispatches to single-threaded BLAS (batch-level parallelism is
// the caller's job).
void gemm(Exec exec, bool trans_a, bool trans_b, int m, int n, int k, float alpha,
          const float* a, int lda, const float* b, int ldb, float beta, float* c, int ldc);

struct ConvShape {
    int kernel = 3;
    int stride = 1;
    int pad = 1;

    int out_dim(int in) const { return (in + 2 * pad - kernel) / stride + 1; }
};

// y[N,Cout,Ho,Wo] = conv(x[N,Cin,H,W], w[Cout,Cin,k,k]) + b
void conv2d_forward(Exec exec, const Tensor& x, const Tensor& w, const std::vector<float>& b,
                    const ConvShape& cs, Tensor& y);

// Overwrites dw/db (and dx when non-null). x is the forward input.
void conv2d_backward(Exec exec, const Tensor& x, const Tensor& w, const Tensor& dy,
                     const ConvShape& cs, Tensor& dw, std::vector<float>& db, Tensor* dx);

struct BatchNormState {
    std::vector<float> gamma, beta;
    std::vector<float> running_mean, running_var;
    // Saved by the training forward for the backward pass.
    std::vector<float> save_mean, save_invstd;
    float eps = 1e-5f;
    float momentum = 0.1f;
};

void batchnorm_forward_train(Exec exec, const Tensor& x, BatchNormState& bn, Tensor& y);
void batchnorm_forward_eval(Exec exec, const Tensor& x, const BatchNormState& bn, Tensor& y);
void batchnorm_backward(Exec exec, const Tensor& x, const Tensor& dy, const BatchNormState& bn,
                        Tensor& dx, std::vector<float>& dgamma, std::vector<float>& dbeta);

void relu_forward(Exec exec, const Tensor& x, Tensor& y);
// Uses the forward output: dx = dy where y > 0.
void relu_backward(Exec exec, const Tensor& y, const Tensor& dy, Tensor& dx);

// Inverted dropout; mask records kept elements. Draws are derived per image
// from `key`, so results do not depend on the thread count.
void dropout_forward(Exec exec, const Tensor& x, float rate, std::uint64_t key, Tensor& y,
                     std::vector<std::uint8_t>& mask);
void dropout_backward(Exec exec, const Tensor& dy, const std::vector<std::uint8_t>& mask,
                      float rate, Tensor& dx);

// Half-pixel-center bilinear resize to y's spatial dims.
void bilinear_forward(Exec exec, const Tensor& x, Tensor& y);
// Scatter-adds into dx (pre-sized to the forward input dims, zeroed here).
void bilinear_backward(Exec exec, const Tensor& dy, Tensor& dx);

void add_inplace(Exec exec, Tensor& y, const Tensor& x);

void sigmoid(Exec exec, const Tensor& x, Tensor& y);

struct AdamParams {
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

// One Adam update on a flat parameter vector; t is the 1-based step count.
void adam_step(Exec exec, std::vector<float>& w, const std::vector<float>& g,
               std::vector<float>& m, std::vector<float>& v, float lr, const AdamParams& ap,
               std::int64_t t);

}  // namespace progseg::kernels
