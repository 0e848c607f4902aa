#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hamhom/coeff_field.hpp"

namespace hamhom {

enum class DriftShape { absolute, linear };

// a(x,t) * |p_x|^beta with a > 0, beta >= 1. The coefficient must not depend on y.
struct CoerciveTerm {
    CoeffField a;
    double beta = 1.0;
};

// b(x,y,t) * |p_y + offset|  (absolute) or b(x,y,t) * (p_y + offset)  (linear).
struct DriftTerm {
    CoeffField b;
    DriftShape shape = DriftShape::absolute;
    double offset = 0.0;
};

// Contributes -f(x,t); the coefficient must not depend on y.
struct SourceTerm {
    CoeffField f;
};

// Scalar front-speed equation data: H(x,u,t,p) = c(x,t)|p| + g(u,t), c > 0.
// In g the CoeffMode::ky slot is the wavenumber in u.
struct GraphSpec {
    int space_dims = 1;
    CoeffField c;
    CoeffField g;

    double eval(std::span<const double> x, double u, double t, std::span<const double> p) const;
    void validate() const;
};

// Closed term algebra for G(x,y,t,p_x,p_y). A gradient shift is realized by
// composition: stored per-axis offsets are added to the argument before the
// terms are evaluated, so shifted specs evaluate exactly as the unshifted
// spec at the shifted argument.
struct HamiltonianSpec {
    int space_dims = 1;
    bool has_y = false;
    std::vector<CoerciveTerm> coercive;
    std::vector<DriftTerm> drifts;
    std::vector<SourceTerm> sources;
    std::array<double, 2> shift_x{0.0, 0.0};
    double shift_y = 0.0;
    std::optional<GraphSpec> graph_inner;

    double eval(std::span<const double> x, double y, double t,
                std::span<const double> px, double py) const;

    // Structural invariants: exactly one coercive term with beta >= 1 and a
    // positive coefficient bound, coercive/source coefficients y-independent,
    // all drift offsets equal. Throws ConfigError.
    void validate() const;

    // Common drift offset plus the stored y-shift; 0 when no drift terms.
    double l_effective() const;

    bool time_dependent() const;
    bool depends_on(int axis_kind) const; // 0: x, 1: y, 2: t

    // Stable content hash of the spec (used to tie tables to their spec).
    std::string digest() const;
};

// F(x,y,t,p_x,p_y) = c(x,t)|p_x| + g(y,t)|p_y|. Requires c > 0; the inner
// graph data is recorded on the result. Throws ConfigError when c can reach 0.
HamiltonianSpec lift(const GraphSpec& graph);

// G(.,q) = F(., q + P): offsets accumulate exactly.
HamiltonianSpec shift(const HamiltonianSpec& spec, std::span<const double> Px, double Py);

// Every coefficient's mode amplitudes scaled by factor (means untouched):
// a uniform perturbation of the spec within the term algebra.
HamiltonianSpec scale_amplitudes(const HamiltonianSpec& spec, double factor);

} // namespace hamhom
