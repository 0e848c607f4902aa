#include "kernels.hpp"

namespace hamhom::kern {

void step_scalar(const StepPlan& p, std::size_t row_begin, std::size_t row_end) {
    for (std::size_t r = row_begin; r < row_end; ++r) {
        const RowPtrs ptr = row_ptrs(p, r);
        double* out = p.out + ptr.base;
        for (int j = 0; j < p.n0; ++j) {
            out[j] = node_value(p, ptr.row, ptr.rm1, ptr.rp1, ptr.rm2, ptr.rp2,
                                ptr.base + static_cast<std::size_t>(j), j);
        }
    }
}

} // namespace hamhom::kern
