#include "hamhom/coeff_field.hpp"

#include <cmath>
#include <cstdlib>

namespace hamhom {

bool operator==(const CoeffMode& a, const CoeffMode& b) {
    return a.kx == b.kx && a.ky == b.ky && a.kt == b.kt &&
           a.amplitude == b.amplitude && a.phase == b.phase;
}

double CoeffField::eval(std::span<const double> x, double y, double t) const {
    double v = mean;
    for (const CoeffMode& m : modes) {
        double arg = m.kx[0] * (x.size() > 0 ? x[0] : 0.0) +
                     m.kx[1] * (x.size() > 1 ? x[1] : 0.0) +
                     m.ky * y + m.kt * t;
        v += m.amplitude * std::cos(kTwoPi * arg + m.phase);
    }
    return v;
}

double CoeffField::sup_bound() const {
    double s = std::fabs(mean);
    for (const CoeffMode& m : modes) s += std::fabs(m.amplitude);
    return s;
}

double CoeffField::inf_bound() const {
    double s = mean;
    for (const CoeffMode& m : modes) s -= std::fabs(m.amplitude);
    return s;
}

double CoeffField::dy_bound() const {
    double s = 0.0;
    for (const CoeffMode& m : modes) s += std::fabs(m.amplitude * m.ky);
    return kTwoPi * s;
}

bool CoeffField::depends_on_y() const {
    for (const CoeffMode& m : modes)
        if (m.ky != 0 && m.amplitude != 0.0) return true;
    return false;
}

bool CoeffField::depends_on_t() const {
    for (const CoeffMode& m : modes)
        if (m.kt != 0 && m.amplitude != 0.0) return true;
    return false;
}

CoeffField CoeffField::scaled_amplitudes(double factor) const {
    CoeffField out = *this;
    for (CoeffMode& m : out.modes) m.amplitude *= factor;
    return out;
}

} // namespace hamhom
