#include "kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "hamhom/errors.hpp"

namespace hamhom::kern {
namespace {

bool cpu_has_avx2() {
#if defined(HAMHOM_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

struct Selection {
    StepKernelFn fn;
    const char* name;
};

Selection make_selection() {
    const char* env = std::getenv("HAMHOM_KERNEL");
    if (env && *env) {
        if (std::strcmp(env, "scalar") == 0) return {step_scalar, "scalar"};
        if (std::strcmp(env, "avx2") == 0) {
            if (!cpu_has_avx2())
                throw ConfigError("HAMHOM_KERNEL=avx2 requested but AVX2 is unavailable");
            return {step_avx2, "avx2"};
        }
        throw ConfigError(std::string("unknown HAMHOM_KERNEL value: ") + env);
    }
    if (cpu_has_avx2()) return {step_avx2, "avx2"};
    return {step_scalar, "scalar"};
}

const Selection& selection() {
    static const Selection sel = make_selection();
    return sel;
}

} // namespace

StepKernelFn select_step_kernel() { return selection().fn; }

const char* selected_kernel_name() { return selection().name; }

bool avx2_available() { return cpu_has_avx2(); }

} // namespace hamhom::kern
