#pragma once

#include <cmath>
#include <cstddef>

namespace hamhom::kern {

// One explicit step of the monotone flux update over a torus field:
//
//   out = v - dt * (G(node, avg slopes) - sum_a theta_a * (dp_a - dm_a)/2) - dt*alpha * v
//
// with one-sided slopes dm/dp per axis and term tables sampled per node.
// Axis 0 is contiguous; outer axes are iterated as rows. The scalar and SIMD
// kernels must perform the identical operation sequence so their outputs are
// bit-for-bit equal; keep node_value below the single source of truth for it.
struct StepPlan {
    int naxes = 1;
    int n0 = 0;                 // cells along axis 0
    std::size_t n_rows = 1;     // product of outer axis cells
    int cells1 = 1, cells2 = 1; // outer axis cell counts (1 when absent)
    std::size_t stride1 = 0, stride2 = 0;
    double inv_h[3] = {0, 0, 0};
    double theta_half[3] = {0, 0, 0};
    double dt = 0;
    double dt_alpha = 0;

    const double* a_vals = nullptr; // coercive coefficient, never null
    int beta_case = 1;              // 1, 2, or 0 for generic pow
    double beta = 1.0;
    double sx0 = 0, sx1 = 0;        // gradient shift on the x-axes
    int coercive_dims = 1;

    const double* babs_vals = nullptr; // |p_y + off| drift coefficient
    double off_abs = 0;
    const double* blin_vals = nullptr; // (p_y + off) drift coefficient
    double off_lin = 0;
    const double* src_vals = nullptr;   // subtracted
    const double* extra_vals = nullptr; // added

    const double* v = nullptr;
    double* out = nullptr;
};

inline double node_value(const StepPlan& p, const double* row,
                         const double* rm1, const double* rp1,
                         const double* rm2, const double* rp2,
                         std::size_t gi, int j) {
    const int n0 = p.n0;
    const double vc = row[j];
    double s0, s1 = 0.0, s2 = 0.0;
    double dd;
    {
        const double vl = row[j == 0 ? n0 - 1 : j - 1];
        const double vr = row[j == n0 - 1 ? 0 : j + 1];
        const double dm = (vc - vl) * p.inv_h[0];
        const double dp = (vr - vc) * p.inv_h[0];
        s0 = (dm + dp) * 0.5;
        dd = p.theta_half[0] * (dp - dm);
    }
    if (p.naxes > 1) {
        const double dm = (vc - rm1[j]) * p.inv_h[1];
        const double dp = (rp1[j] - vc) * p.inv_h[1];
        s1 = (dm + dp) * 0.5;
        dd += p.theta_half[1] * (dp - dm);
    }
    if (p.naxes > 2) {
        const double dm = (vc - rm2[j]) * p.inv_h[2];
        const double dp = (rp2[j] - vc) * p.inv_h[2];
        s2 = (dm + dp) * 0.5;
        dd += p.theta_half[2] * (dp - dm);
    }
    double r;
    if (p.coercive_dims == 1) {
        r = std::fabs(s0 + p.sx0);
    } else {
        const double u = s0 + p.sx0;
        const double w = s1 + p.sx1;
        r = std::sqrt(u * u + w * w);
    }
    const double pw = p.beta_case == 1 ? r : (p.beta_case == 2 ? r * r : std::pow(r, p.beta));
    double G = p.a_vals[gi] * pw;
    const double sy = p.naxes == 2 ? s1 : s2; // y is always the last axis
    if (p.babs_vals) G += p.babs_vals[gi] * std::fabs(sy + p.off_abs);
    if (p.blin_vals) G += p.blin_vals[gi] * (sy + p.off_lin);
    if (p.src_vals) G -= p.src_vals[gi];
    if (p.extra_vals) G += p.extra_vals[gi];
    const double flux = G - dd;
    return (vc - p.dt * flux) - p.dt_alpha * vc;
}

// Row decomposition shared by the kernels: row r covers nodes
// [r1*stride1 + r2*stride2 + j], j in [0, n0).
struct RowPtrs {
    const double* row;
    const double* rm1;
    const double* rp1;
    const double* rm2;
    const double* rp2;
    std::size_t base;
};

inline RowPtrs row_ptrs(const StepPlan& p, std::size_t r) {
    std::size_t r1 = p.cells1 > 1 ? r % static_cast<std::size_t>(p.cells1) : 0;
    std::size_t r2 = p.cells1 > 1 ? r / static_cast<std::size_t>(p.cells1) : r;
    std::size_t base = r1 * p.stride1 + r2 * p.stride2;
    RowPtrs ptr{};
    ptr.base = base;
    ptr.row = p.v + base;
    if (p.naxes > 1) {
        std::size_t m1 = (r1 == 0 ? p.cells1 - 1 : r1 - 1) * p.stride1 + r2 * p.stride2;
        std::size_t p1 = (r1 + 1 == static_cast<std::size_t>(p.cells1) ? 0 : r1 + 1) * p.stride1 +
                         r2 * p.stride2;
        ptr.rm1 = p.v + m1;
        ptr.rp1 = p.v + p1;
    } else {
        ptr.rm1 = ptr.rp1 = ptr.row;
    }
    if (p.naxes > 2) {
        std::size_t m2 = r1 * p.stride1 + (r2 == 0 ? p.cells2 - 1 : r2 - 1) * p.stride2;
        std::size_t p2 = r1 * p.stride1 +
                         (r2 + 1 == static_cast<std::size_t>(p.cells2) ? 0 : r2 + 1) * p.stride2;
        ptr.rm2 = p.v + m2;
        ptr.rp2 = p.v + p2;
    } else {
        ptr.rm2 = ptr.rp2 = ptr.row;
    }
    return ptr;
}

using StepKernelFn = void (*)(const StepPlan&, std::size_t row_begin, std::size_t row_end);

void step_scalar(const StepPlan&, std::size_t row_begin, std::size_t row_end);
void step_avx2(const StepPlan&, std::size_t row_begin, std::size_t row_end);

// Runtime selection: HAMHOM_KERNEL=scalar|avx2 overrides; otherwise the widest
// supported variant. The choice is fixed per process.
StepKernelFn select_step_kernel();
const char* selected_kernel_name();
bool avx2_available();

} // namespace hamhom::kern
