#include "progseg/kernels.hpp"

#include <cblas.h>
#include <omp.h>

#include <cmath>
#include <cstring>
#include <mutex>

#include "progseg/rng.hpp"

extern "C" void openblas_set_num_threads(int);

namespace progseg::kernels {

namespace {

// BLAS must stay single-threaded: GEMMs run inside OpenMP batch loops.
void pin_blas_threads() {
    static std::once_flag once;
    std::call_once(once, [] { openblas_set_num_threads(1); });
}

thread_local std::vector<float> tl_col;
thread_local std::vector<float> tl_col2;

float* scratch(std::vector<float>& buf, std::size_t n) {
    if (buf.size() < n) buf.resize(n);
    return buf.data();
}

// col[Cin*k*k][Ho*Wo] for one image plane set.
void im2col(const float* x, int cin, int h, int w, const ConvShape& cs, float* col) {
    const int ho = cs.out_dim(h), wo = cs.out_dim(w);
    const int k = cs.kernel;
    const std::size_t opix = static_cast<std::size_t>(ho) * wo;
    for (int c = 0; c < cin; ++c) {
        const float* xp = x + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                float* row = col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * opix;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * cs.stride + ky - cs.pad;
                    float* dst = row + static_cast<std::size_t>(oy) * wo;
                    if (iy < 0 || iy >= h) {
                        std::memset(dst, 0, sizeof(float) * wo);
                        continue;
                    }
                    const float* src = xp + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * cs.stride + kx - cs.pad;
                        dst[ox] = (ix >= 0 && ix < w) ? src[ix] : 0.0f;
                    }
                }
            }
        }
    }
}

void col2im(const float* col, int cin, int h, int w, const ConvShape& cs, float* x) {
    const int ho = cs.out_dim(h), wo = cs.out_dim(w);
    const int k = cs.kernel;
    const std::size_t opix = static_cast<std::size_t>(ho) * wo;
    std::memset(x, 0, sizeof(float) * cin * h * w);
    for (int c = 0; c < cin; ++c) {
        float* xp = x + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const float* row = col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * opix;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * cs.stride + ky - cs.pad;
                    if (iy < 0 || iy >= h) continue;
                    const float* src = row + static_cast<std::size_t>(oy) * wo;
                    float* dst = xp + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * cs.stride + kx - cs.pad;
                        if (ix >= 0 && ix < w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

}  // namespace

void gemm(Exec exec, bool trans_a, bool trans_b, int m, int n, int k, float alpha,
          const float* a, int lda, const float* b, int ldb, float beta, float* c, int ldc) {
    if (exec == Exec::Parallel) {
        pin_blas_threads();
        cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                    trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c,
                    ldc);
        return;
    }
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            float acc = 0.0f;
            for (int p = 0; p < k; ++p) {
                const float av = trans_a ? a[static_cast<std::size_t>(p) * lda + i]
                                         : a[static_cast<std::size_t>(i) * lda + p];
                const float bv = trans_b ? b[static_cast<std::size_t>(j) * ldb + p]
                                         : b[static_cast<std::size_t>(p) * ldb + j];
                acc += av * bv;
            }
            float& dst = c[static_cast<std::size_t>(i) * ldc + j];
            dst = alpha * acc + (beta == 0.0f ? 0.0f : beta * dst);
        }
    }
}

void conv2d_forward(Exec exec, const Tensor& x, const Tensor& w, const std::vector<float>& b,
                    const ConvShape& cs, Tensor& y) {
    const int cout = w.n, cin = w.c, k = cs.kernel;
    if (x.c != cin) throw ChannelMismatch("conv2d: input channels do not match kernel");
    const int ho = cs.out_dim(x.h), wo = cs.out_dim(x.w);
    y = Tensor(x.n, cout, ho, wo);
    const std::size_t opix = static_cast<std::size_t>(ho) * wo;
    const int kcol = cin * k * k;

    if (exec == Exec::Serial) {
        for (int in = 0; in < x.n; ++in)
            for (int oc = 0; oc < cout; ++oc)
                for (int oy = 0; oy < ho; ++oy)
                    for (int ox = 0; ox < wo; ++ox) {
                        float acc = b.empty() ? 0.0f : b[oc];
                        for (int ic = 0; ic < cin; ++ic)
                            for (int ky = 0; ky < k; ++ky)
                                for (int kx = 0; kx < k; ++kx) {
                                    const int iy = oy * cs.stride + ky - cs.pad;
                                    const int ix = ox * cs.stride + kx - cs.pad;
                                    if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
                                    acc += x.at(in, ic, iy, ix) * w.at(oc, ic, ky, kx);
                                }
                        y.at(in, oc, oy, ox) = acc;
                    }
        return;
    }

    pin_blas_threads();
#pragma omp parallel for schedule(static)
    for (int in = 0; in < x.n; ++in) {
        float* col = scratch(tl_col, static_cast<std::size_t>(kcol) * opix);
        im2col(x.plane(in, 0), cin, x.h, x.w, cs, col);
        float* out = y.plane(in, 0);
        cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, cout, static_cast<int>(opix), kcol,
                    1.0f, w.v.data(), kcol, col, static_cast<int>(opix), 0.0f, out,
                    static_cast<int>(opix));
        if (!b.empty()) {
            for (int oc = 0; oc < cout; ++oc) {
                float* p = out + static_cast<std::size_t>(oc) * opix;
                const float bias = b[oc];
                for (std::size_t i = 0; i < opix; ++i) p[i] += bias;
            }
        }
    }
}

void conv2d_backward(Exec exec, const Tensor& x, const Tensor& w, const Tensor& dy,
                     const ConvShape& cs, Tensor& dw, std::vector<float>& db, Tensor* dx) {
    const int cout = w.n, cin = w.c, k = cs.kernel;
    const int ho = dy.h, wo = dy.w;
    const std::size_t opix = static_cast<std::size_t>(ho) * wo;
    const int kcol = cin * k * k;
    dw = Tensor(w.n, w.c, w.h, w.w);
    db.assign(cout, 0.0f);
    if (dx) *dx = Tensor(x.n, x.c, x.h, x.w);

    if (exec == Exec::Serial) {
        for (int in = 0; in < x.n; ++in)
            for (int oc = 0; oc < cout; ++oc)
                for (int oy = 0; oy < ho; ++oy)
                    for (int ox = 0; ox < wo; ++ox) {
                        const float g = dy.at(in, oc, oy, ox);
                        db[oc] += g;
                        for (int ic = 0; ic < cin; ++ic)
                            for (int ky = 0; ky < k; ++ky)
                                for (int kx = 0; kx < k; ++kx) {
                                    const int iy = oy * cs.stride + ky - cs.pad;
                                    const int ix = ox * cs.stride + kx - cs.pad;
                                    if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
                                    dw.at(oc, ic, ky, kx) += g * x.at(in, ic, iy, ix);
                                    if (dx) dx->at(in, ic, iy, ix) += g * w.at(oc, ic, ky, kx);
                                }
                    }
        return;
    }

    pin_blas_threads();
    const int nthreads = omp_get_max_threads();
    std::vector<std::vector<float>> dw_part(nthreads);
    std::vector<std::vector<float>> db_part(nthreads);

#pragma omp parallel num_threads(nthreads)
    {
        const int tid = omp_get_thread_num();
        dw_part[tid].assign(dw.size(), 0.0f);
        db_part[tid].assign(cout, 0.0f);
#pragma omp for schedule(static)
        for (int in = 0; in < x.n; ++in) {
            float* col = scratch(tl_col, static_cast<std::size_t>(kcol) * opix);
            im2col(x.plane(in, 0), cin, x.h, x.w, cs, col);
            const float* g = dy.plane(in, 0);
            // dW += g * col^T
            cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasTrans, cout, kcol,
                        static_cast<int>(opix), 1.0f, g, static_cast<int>(opix), col,
                        static_cast<int>(opix), 1.0f, dw_part[tid].data(), kcol);
            for (int oc = 0; oc < cout; ++oc) {
                const float* gp = g + static_cast<std::size_t>(oc) * opix;
                float acc = 0.0f;
                for (std::size_t i = 0; i < opix; ++i) acc += gp[i];
                db_part[tid][oc] += acc;
            }
            if (dx) {
                float* dcol = scratch(tl_col2, static_cast<std::size_t>(kcol) * opix);
                // dcol = W^T * g
                cblas_sgemm(CblasRowMajor, CblasTrans, CblasNoTrans, kcol, static_cast<int>(opix),
                            cout, 1.0f, w.v.data(), kcol, g, static_cast<int>(opix), 0.0f, dcol,
                            static_cast<int>(opix));
                col2im(dcol, cin, x.h, x.w, cs, dx->plane(in, 0));
            }
        }
    }
    // Fixed combine order keeps results reproducible for a given thread count.
    for (int t = 0; t < nthreads; ++t) {
        if (dw_part[t].empty()) continue;
        for (std::size_t i = 0; i < dw.size(); ++i) dw.v[i] += dw_part[t][i];
        for (int oc = 0; oc < cout; ++oc) db[oc] += db_part[t][oc];
    }
}

namespace {

// Per-channel moments; each channel is reduced serially by one thread so the
// sum order never depends on scheduling.
void channel_moments(Exec exec, const Tensor& x, std::vector<float>& mean,
                     std::vector<float>& var) {
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    const double count = static_cast<double>(x.n) * plane;
    mean.assign(x.c, 0.0f);
    var.assign(x.c, 0.0f);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (int c = 0; c < x.c; ++c) {
        double s = 0.0, s2 = 0.0;
        for (int in = 0; in < x.n; ++in) {
            const float* p = x.plane(in, c);
            for (std::size_t i = 0; i < plane; ++i) {
                s += p[i];
                s2 += static_cast<double>(p[i]) * p[i];
            }
        }
        const double m = s / count;
        mean[c] = static_cast<float>(m);
        var[c] = static_cast<float>(s2 / count - m * m);
    }
}

}  // namespace

void batchnorm_forward_train(Exec exec, const Tensor& x, BatchNormState& bn, Tensor& y) {
    y = Tensor(x.n, x.c, x.h, x.w);
    std::vector<float> mean, var;
    channel_moments(exec, x, mean, var);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    const double count = static_cast<double>(x.n) * plane;
    bn.save_mean = mean;
    bn.save_invstd.assign(x.c, 0.0f);
    for (int c = 0; c < x.c; ++c)
        bn.save_invstd[c] = 1.0f / std::sqrt(var[c] + bn.eps);
    // Running stats use the unbiased variance.
    const float unbias = count > 1.0 ? static_cast<float>(count / (count - 1.0)) : 1.0f;
    for (int c = 0; c < x.c; ++c) {
        bn.running_mean[c] = (1.0f - bn.momentum) * bn.running_mean[c] + bn.momentum * mean[c];
        bn.running_var[c] =
            (1.0f - bn.momentum) * bn.running_var[c] + bn.momentum * var[c] * unbias;
    }
#pragma omp parallel for schedule(static) collapse(2) if (exec == Exec::Parallel)
    for (int in = 0; in < x.n; ++in)
        for (int c = 0; c < x.c; ++c) {
            const float* p = x.plane(in, c);
            float* q = y.plane(in, c);
            const float m = mean[c], is = bn.save_invstd[c];
            const float g = bn.gamma[c], b = bn.beta[c];
            for (std::size_t i = 0; i < plane; ++i) q[i] = (p[i] - m) * is * g + b;
        }
}

void batchnorm_forward_eval(Exec exec, const Tensor& x, const BatchNormState& bn, Tensor& y) {
    y = Tensor(x.n, x.c, x.h, x.w);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
#pragma omp parallel for schedule(static) collapse(2) if (exec == Exec::Parallel)
    for (int in = 0; in < x.n; ++in)
        for (int c = 0; c < x.c; ++c) {
            const float* p = x.plane(in, c);
            float* q = y.plane(in, c);
            const float m = bn.running_mean[c];
            const float is = 1.0f / std::sqrt(bn.running_var[c] + bn.eps);
            const float g = bn.gamma[c], b = bn.beta[c];
            for (std::size_t i = 0; i < plane; ++i) q[i] = (p[i] - m) * is * g + b;
        }
}

void batchnorm_backward(Exec exec, const Tensor& x, const Tensor& dy, const BatchNormState& bn,
                        Tensor& dx, std::vector<float>& dgamma, std::vector<float>& dbeta) {
    dx = Tensor(x.n, x.c, x.h, x.w);
    dgamma.assign(x.c, 0.0f);
    dbeta.assign(x.c, 0.0f);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    const double count = static_cast<double>(x.n) * plane;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (int c = 0; c < x.c; ++c) {
        const float m = bn.save_mean[c];
        const float is = bn.save_invstd[c];
        const float g = bn.gamma[c];
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int in = 0; in < x.n; ++in) {
            const float* xp = x.plane(in, c);
            const float* gp = dy.plane(in, c);
            for (std::size_t i = 0; i < plane; ++i) {
                const float xhat = (xp[i] - m) * is;
                sum_dy += gp[i];
                sum_dy_xhat += static_cast<double>(gp[i]) * xhat;
            }
        }
        dbeta[c] = static_cast<float>(sum_dy);
        dgamma[c] = static_cast<float>(sum_dy_xhat);
        const float k1 = static_cast<float>(sum_dy / count);
        const float k2 = static_cast<float>(sum_dy_xhat / count);
        for (int in = 0; in < x.n; ++in) {
            const float* xp = x.plane(in, c);
            const float* gp = dy.plane(in, c);
            float* dp = dx.plane(in, c);
            for (std::size_t i = 0; i < plane; ++i) {
                const float xhat = (xp[i] - m) * is;
                dp[i] = g * is * (gp[i] - k1 - xhat * k2);
            }
        }
    }
}

void relu_forward(Exec exec, const Tensor& x, Tensor& y) {
    y = Tensor(x.n, x.c, x.h, x.w);
    const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (std::int64_t i = 0; i < n; ++i) y.v[i] = x.v[i] > 0.0f ? x.v[i] : 0.0f;
}

void relu_backward(Exec exec, const Tensor& y, const Tensor& dy, Tensor& dx) {
    dx = Tensor(y.n, y.c, y.h, y.w);
    const std::int64_t n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (std::int64_t i = 0; i < n; ++i) dx.v[i] = y.v[i] > 0.0f ? dy.v[i] : 0.0f;
}

void dropout_forward(Exec exec, const Tensor& x, float rate, std::uint64_t key, Tensor& y,
                     std::vector<std::uint8_t>& mask) {
    y = Tensor(x.n, x.c, x.h, x.w);
    mask.assign(x.size(), 1);
    if (rate <= 0.0f) {
        y.v = x.v;
        return;
    }
    const float scale = 1.0f / (1.0f - rate);
    const std::size_t per_image = x.size() / static_cast<std::size_t>(x.n);
    // Threshold on the top 32 bits keeps the draw independent of float
    // rounding.
    const std::uint64_t cut =
        static_cast<std::uint64_t>(static_cast<double>(rate) * 4294967296.0);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (int in = 0; in < x.n; ++in) {
        std::uint64_t state = hash_combine(key, static_cast<std::uint64_t>(in));
        const std::size_t base = static_cast<std::size_t>(in) * per_image;
        for (std::size_t i = 0; i < per_image; ++i) {
            const bool drop = (splitmix64(state) >> 32) < cut;
            mask[base + i] = drop ? 0 : 1;
            y.v[base + i] = drop ? 0.0f : x.v[base + i] * scale;
        }
    }
}

void dropout_backward(Exec exec, const Tensor& dy, const std::vector<std::uint8_t>& mask,
                      float rate, Tensor& dx) {
    dx = Tensor(dy.n, dy.c, dy.h, dy.w);
    if (rate <= 0.0f) {
        dx.v = dy.v;
        return;
    }
    const float scale = 1.0f / (1.0f - rate);
    const std::int64_t n = static_cast<std::int64_t>(dy.size());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (std::int64_t i = 0; i < n; ++i) dx.v[i] = mask[i] ? dy.v[i] * scale : 0.0f;
}

namespace {

struct LerpCoeff {
    int lo, hi;
    float t;
};

std::vector<LerpCoeff> resize_coeffs(int in_dim, int out_dim) {
    std::vector<LerpCoeff> c(out_dim);
    const double scale = static_cast<double>(in_dim) / out_dim;
    for (int o = 0; o < out_dim; ++o) {
        double src = (o + 0.5) * scale - 0.5;
        if (src < 0.0) src = 0.0;
        if (src > in_dim - 1) src = in_dim - 1;
        const int lo = static_cast<int>(src);
        c[o] = {lo, lo + 1 < in_dim ? lo + 1 : lo, static_cast<float>(src - lo)};
    }
    return c;
}

}  // namespace

void bilinear_forward(Exec exec, const Tensor& x, Tensor& y) {
    const auto ys = resize_coeffs(x.h, y.h);
    const auto xs = resize_coeffs(x.w, y.w);
#pragma omp parallel for schedule(static) collapse(2) if (exec == Exec::Parallel)
    for (int in = 0; in < x.n; ++in)
        for (int c = 0; c < x.c; ++c) {
            const float* src = x.plane(in, c);
            float* dst = y.plane(in, c);
            for (int oy = 0; oy < y.h; ++oy) {
                const auto& ry = ys[oy];
                const float* r0 = src + static_cast<std::size_t>(ry.lo) * x.w;
                const float* r1 = src + static_cast<std::size_t>(ry.hi) * x.w;
                for (int ox = 0; ox < y.w; ++ox) {
                    const auto& rx = xs[ox];
                    const float top = r0[rx.lo] + (r0[rx.hi] - r0[rx.lo]) * rx.t;
                    const float bot = r1[rx.lo] + (r1[rx.hi] - r1[rx.lo]) * rx.t;
                    dst[static_cast<std::size_t>(oy) * y.w + ox] = top + (bot - top) * ry.t;
                }
            }
        }
}

void bilinear_backward(Exec exec, const Tensor& dy, Tensor& dx) {
    const auto ys = resize_coeffs(dx.h, dy.h);
    const auto xs = resize_coeffs(dx.w, dy.w);
    dx.zero();
    // Parallel across planes: the scatter targets of one plane never alias
    // another's.
#pragma omp parallel for schedule(static) collapse(2) if (exec == Exec::Parallel)
    for (int in = 0; in < dy.n; ++in)
        for (int c = 0; c < dy.c; ++c) {
            const float* g = dy.plane(in, c);
            float* dst = dx.plane(in, c);
            for (int oy = 0; oy < dy.h; ++oy) {
                const auto& ry = ys[oy];
                for (int ox = 0; ox < dy.w; ++ox) {
                    const auto& rx = xs[ox];
                    const float v = g[static_cast<std::size_t>(oy) * dy.w + ox];
                    dst[static_cast<std::size_t>(ry.lo) * dx.w + rx.lo] +=
                        v * (1.0f - ry.t) * (1.0f - rx.t);
                    dst[static_cast<std::size_t>(ry.lo) * dx.w + rx.hi] += v * (1.0f - ry.t) * rx.t;
                    dst[static_cast<std::size_t>(ry.hi) * dx.w + rx.lo] += v * ry.t * (1.0f - rx.t);
                    dst[static_cast<std::size_t>(ry.hi) * dx.w + rx.hi] += v * ry.t * rx.t;
                }
            }
        }
}

void add_inplace(Exec exec, Tensor& y, const Tensor& x) {
    require_same_shape(y, x, "add_inplace");
    const std::int64_t n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (std::int64_t i = 0; i < n; ++i) y.v[i] += x.v[i];
}

void sigmoid(Exec exec, const Tensor& x, Tensor& y) {
    y = Tensor(x.n, x.c, x.h, x.w);
    const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (std::int64_t i = 0; i < n; ++i) y.v[i] = 1.0f / (1.0f + std::exp(-x.v[i]));
}

void adam_step(Exec exec, std::vector<float>& w, const std::vector<float>& g,
               std::vector<float>& m, std::vector<float>& v, float lr, const AdamParams& ap,
               std::int64_t t) {
    const float bc1 = 1.0f - std::pow(ap.beta1, static_cast<float>(t));
    const float bc2 = 1.0f - std::pow(ap.beta2, static_cast<float>(t));
    const std::int64_t n = static_cast<std::int64_t>(w.size());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel && n > 4096)
    for (std::int64_t i = 0; i < n; ++i) {
        m[i] = ap.beta1 * m[i] + (1.0f - ap.beta1) * g[i];
        v[i] = ap.beta2 * v[i] + (1.0f - ap.beta2) * g[i] * g[i];
        const float mhat = m[i] / bc1;
        const float vhat = v[i] / bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + ap.eps);
    }
}

}  // namespace progseg::kernels
