#pragma once

#include <array>
#include <span>
#include <vector>

namespace hamhom {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// One cosine mode: amplitude * cos(2*pi*(kx.x + ky*y + kt*t) + phase).
// Wavevectors are integers so every mode is 1-periodic in each variable.
// For coefficients of graph specs the ky slot carries the wavenumber in u.
struct CoeffMode {
    std::array<int, 2> kx{0, 0};
    int ky = 0;
    int kt = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

// Trigonometric polynomial: mean + sum of modes. Closed under the spec algebra,
// exactly evaluable anywhere, and serializable.
struct CoeffField {
    double mean = 0.0;
    std::vector<CoeffMode> modes;

    double eval(std::span<const double> x, double y, double t) const;

    // Upper bound |mean| + sum |amplitude| >= sup |value|.
    double sup_bound() const;
    // Lower bound mean - sum |amplitude| <= inf value.
    double inf_bound() const;
    // Bound on |d/dy| (2*pi * sum |ky*amplitude|); for graph g this is the u-Lipschitz bound.
    double dy_bound() const;

    bool depends_on_y() const;
    bool depends_on_t() const;

    static CoeffField constant(double c) { return CoeffField{c, {}}; }

    CoeffField scaled_amplitudes(double factor) const;

    bool operator==(const CoeffField&) const = default;
};

bool operator==(const CoeffMode&, const CoeffMode&);

} // namespace hamhom
