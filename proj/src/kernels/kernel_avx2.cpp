#include "kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace hamhom::kern {
namespace {

inline __m256d abs_pd(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

// Generic exponent: per-lane std::pow so the result matches the scalar path.
inline __m256d pow_lanes(__m256d r, double beta) {
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, r);
    tmp[0] = std::pow(tmp[0], beta);
    tmp[1] = std::pow(tmp[1], beta);
    tmp[2] = std::pow(tmp[2], beta);
    tmp[3] = std::pow(tmp[3], beta);
    return _mm256_load_pd(tmp);
}

} // namespace

// Vector body mirrors node_value exactly: same operations, same order, no FMA.
void step_avx2(const StepPlan& p, std::size_t row_begin, std::size_t row_end) {
    const int n0 = p.n0;
    const __m256d inv_h0 = _mm256_set1_pd(p.inv_h[0]);
    const __m256d inv_h1 = _mm256_set1_pd(p.inv_h[1]);
    const __m256d inv_h2 = _mm256_set1_pd(p.inv_h[2]);
    const __m256d th0 = _mm256_set1_pd(p.theta_half[0]);
    const __m256d th1 = _mm256_set1_pd(p.theta_half[1]);
    const __m256d th2 = _mm256_set1_pd(p.theta_half[2]);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d sx0 = _mm256_set1_pd(p.sx0);
    const __m256d sx1 = _mm256_set1_pd(p.sx1);
    const __m256d off_abs = _mm256_set1_pd(p.off_abs);
    const __m256d off_lin = _mm256_set1_pd(p.off_lin);
    const __m256d dtv = _mm256_set1_pd(p.dt);
    const __m256d dt_alpha = _mm256_set1_pd(p.dt_alpha);

    for (std::size_t r = row_begin; r < row_end; ++r) {
        const RowPtrs ptr = row_ptrs(p, r);
        double* out = p.out + ptr.base;

        auto scalar_at = [&](int j) {
            out[j] = node_value(p, ptr.row, ptr.rm1, ptr.rp1, ptr.rm2, ptr.rp2,
                                ptr.base + static_cast<std::size_t>(j), j);
        };

        scalar_at(0);
        int j = 1;
        for (; j + 4 <= n0 - 1; j += 4) {
            const std::size_t gi = ptr.base + static_cast<std::size_t>(j);
            const __m256d vc = _mm256_loadu_pd(ptr.row + j);
            __m256d s0, s1 = _mm256_setzero_pd(), s2 = _mm256_setzero_pd();
            __m256d dd;
            {
                const __m256d vl = _mm256_loadu_pd(ptr.row + j - 1);
                const __m256d vr = _mm256_loadu_pd(ptr.row + j + 1);
                const __m256d dm = _mm256_mul_pd(_mm256_sub_pd(vc, vl), inv_h0);
                const __m256d dp = _mm256_mul_pd(_mm256_sub_pd(vr, vc), inv_h0);
                s0 = _mm256_mul_pd(_mm256_add_pd(dm, dp), half);
                dd = _mm256_mul_pd(th0, _mm256_sub_pd(dp, dm));
            }
            if (p.naxes > 1) {
                const __m256d vm = _mm256_loadu_pd(ptr.rm1 + j);
                const __m256d vp = _mm256_loadu_pd(ptr.rp1 + j);
                const __m256d dm = _mm256_mul_pd(_mm256_sub_pd(vc, vm), inv_h1);
                const __m256d dp = _mm256_mul_pd(_mm256_sub_pd(vp, vc), inv_h1);
                s1 = _mm256_mul_pd(_mm256_add_pd(dm, dp), half);
                dd = _mm256_add_pd(dd, _mm256_mul_pd(th1, _mm256_sub_pd(dp, dm)));
            }
            if (p.naxes > 2) {
                const __m256d vm = _mm256_loadu_pd(ptr.rm2 + j);
                const __m256d vp = _mm256_loadu_pd(ptr.rp2 + j);
                const __m256d dm = _mm256_mul_pd(_mm256_sub_pd(vc, vm), inv_h2);
                const __m256d dp = _mm256_mul_pd(_mm256_sub_pd(vp, vc), inv_h2);
                s2 = _mm256_mul_pd(_mm256_add_pd(dm, dp), half);
                dd = _mm256_add_pd(dd, _mm256_mul_pd(th2, _mm256_sub_pd(dp, dm)));
            }
            __m256d rad;
            if (p.coercive_dims == 1) {
                rad = abs_pd(_mm256_add_pd(s0, sx0));
            } else {
                const __m256d u = _mm256_add_pd(s0, sx0);
                const __m256d w = _mm256_add_pd(s1, sx1);
                rad = _mm256_sqrt_pd(
                    _mm256_add_pd(_mm256_mul_pd(u, u), _mm256_mul_pd(w, w)));
            }
            const __m256d pw = p.beta_case == 1
                                   ? rad
                                   : (p.beta_case == 2 ? _mm256_mul_pd(rad, rad)
                                                       : pow_lanes(rad, p.beta));
            __m256d G = _mm256_mul_pd(_mm256_loadu_pd(p.a_vals + gi), pw);
            const __m256d sy = p.naxes == 2 ? s1 : s2;
            if (p.babs_vals) {
                const __m256d z = abs_pd(_mm256_add_pd(sy, off_abs));
                G = _mm256_add_pd(G, _mm256_mul_pd(_mm256_loadu_pd(p.babs_vals + gi), z));
            }
            if (p.blin_vals) {
                const __m256d z = _mm256_add_pd(sy, off_lin);
                G = _mm256_add_pd(G, _mm256_mul_pd(_mm256_loadu_pd(p.blin_vals + gi), z));
            }
            if (p.src_vals) G = _mm256_sub_pd(G, _mm256_loadu_pd(p.src_vals + gi));
            if (p.extra_vals) G = _mm256_add_pd(G, _mm256_loadu_pd(p.extra_vals + gi));
            const __m256d flux = _mm256_sub_pd(G, dd);
            const __m256d res = _mm256_sub_pd(_mm256_sub_pd(vc, _mm256_mul_pd(dtv, flux)),
                                              _mm256_mul_pd(dt_alpha, vc));
            _mm256_storeu_pd(out + j, res);
        }
        for (; j < n0; ++j) scalar_at(j);
    }
}

} // namespace hamhom::kern

#else

namespace hamhom::kern {

// Toolchain without AVX2 support: never selected by the dispatcher.
void step_avx2(const StepPlan& p, std::size_t row_begin, std::size_t row_end) {
    step_scalar(p, row_begin, row_end);
}

} // namespace hamhom::kern

#endif
