#include "hamhom/corpus.hpp"

#include <cmath>

#include "hamhom/errors.hpp"

namespace hamhom {
namespace {

constexpr double kHalfPi = 1.5707963267948966;

CoeffMode mode_x(int k, double amplitude, double phase) {
    return CoeffMode{{k, 0}, 0, 0, amplitude, phase};
}

HamiltonianSpec make_eikonal_sine() {
    HamiltonianSpec s;
    s.space_dims = 1;
    CoeffField f;
    f.modes.push_back(mode_x(1, 1.0, -kHalfPi)); // sin(2 pi x)
    s.coercive.push_back({CoeffField::constant(1.0), 1.0});
    s.sources.push_back({f});
    s.validate();
    return s;
}

HamiltonianSpec make_noncoercive_xyt() {
    HamiltonianSpec s;
    s.space_dims = 1;
    s.has_y = true;
    s.coercive.push_back({CoeffField::constant(1.0), 1.0});
    CoeffField b; // sin(2 pi (x - y)): vanishes on a diagonal, so the y-part
    b.modes.push_back(CoeffMode{{1, 0}, -1, 0, 1.0, -kHalfPi}); // of G is not coercive
    s.drifts.push_back({b, DriftShape::absolute, 0.0});
    CoeffField f;
    f.modes.push_back(CoeffMode{{0, 0}, 0, 1, 1.0, 0.0}); // cos(2 pi t)
    s.sources.push_back({f});
    s.validate();
    return s;
}

HamiltonianSpec make_drift_lneg() {
    HamiltonianSpec s;
    s.space_dims = 1;
    s.has_y = true;
    s.coercive.push_back({CoeffField::constant(1.0), 1.0});
    CoeffField b; // 1 + 0.5 cos(2 pi y), strictly positive
    b.mean = 1.0;
    b.modes.push_back(CoeffMode{{0, 0}, 1, 0, 0.5, 0.0});
    s.drifts.push_back({b, DriftShape::absolute, -1.0});
    s.validate();
    return s;
}

GraphSpec make_graph_harmonic() {
    GraphSpec g;
    g.space_dims = 1;
    // 1/(1 + 0.5 sin(2 pi x)) expanded as a geometric cosine series:
    // mean 2/sqrt(3), mode k amplitude 2*mean*(2-sqrt(3))^k, phase k*pi/2.
    // Twelve modes leave a tail below 1.2e-7 and keep the reciprocal's
    // average at 1 to machine precision.
    g.c.mean = 2.0 / std::sqrt(3.0);
    const double ratio = 2.0 - std::sqrt(3.0);
    double amp = 2.0 * g.c.mean;
    for (int k = 1; k <= 12; ++k) {
        amp *= ratio;
        const double phase[4] = {0.0, kHalfPi, 2.0 * kHalfPi, -kHalfPi};
        g.c.modes.push_back(mode_x(k, amp, phase[k % 4]));
    }
    g.validate();
    return g;
}

GraphSpec make_graph_smooth() {
    GraphSpec g;
    g.space_dims = 1;
    g.c.mean = 1.0; // 1 + 0.1 cos(2 pi (x+t)) + 0.1 cos(2 pi (x-t))
    g.c.modes.push_back(CoeffMode{{1, 0}, 0, 1, 0.1, 0.0});
    g.c.modes.push_back(CoeffMode{{1, 0}, 0, -1, 0.1, 0.0});
    g.g.mean = 0.3; // 0.3 + 0.2 cos(2 pi u): positive value coupling
    g.g.modes.push_back(CoeffMode{{0, 0}, 1, 0, 0.2, 0.0});
    g.validate();
    return g;
}

GraphSpec make_graph_pinning() {
    GraphSpec g;
    g.space_dims = 1;
    g.c = CoeffField::constant(1.0);
    g.g.modes.push_back(CoeffMode{{0, 0}, 1, 0, 0.4, 0.0}); // 0.4 cos(2 pi u):
    g.validate();                                           // sign-changing coupling
    return g;
}

std::vector<CorpusEntry> build() {
    std::vector<CorpusEntry> v;
    v.push_back({"eikonal_sine", "one-dimensional |p| with a sinusoidal source",
                 make_eikonal_sine(), {}});
    v.push_back({"noncoercive_xyt",
                 "coercive in x only; sign-changing y-drift and oscillating time source",
                 make_noncoercive_xyt(), {}});
    v.push_back({"drift_lneg", "y-drift offset -1 with strictly positive coefficient",
                 make_drift_lneg(), {}});
    v.push_back({"graph_harmonic", "front speed 1/(1 + 0.5 sin(2 pi x)), no value coupling",
                 {}, make_graph_harmonic()});
    v.push_back({"graph_smooth",
                 "traveling-wave speed modulation with positive value coupling", {},
                 make_graph_smooth()});
    v.push_back({"graph_pinning", "unit speed with sign-changing value coupling", {},
                 make_graph_pinning()});
    return v;
}

std::string known_names(bool specs) {
    std::string s;
    for (const CorpusEntry& e : corpus()) {
        if (specs != e.spec.has_value()) continue;
        if (!s.empty()) s += ", ";
        s += e.name;
    }
    return s;
}

} // namespace

const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> v = build();
    return v;
}

const CorpusEntry& corpus_entry(std::string_view name) {
    for (const CorpusEntry& e : corpus())
        if (e.name == name) return e;
    throw ConfigError("unknown corpus entry '" + std::string(name) + "'; known: " +
                      known_names(true) + ", " + known_names(false));
}

const HamiltonianSpec& corpus_spec(std::string_view name) {
    for (const CorpusEntry& e : corpus())
        if (e.name == name && e.spec) return *e.spec;
    throw ConfigError("unknown spec '" + std::string(name) + "'; corpus specs: " +
                      known_names(true));
}

const GraphSpec& corpus_graph(std::string_view name) {
    for (const CorpusEntry& e : corpus())
        if (e.name == name && e.graph) return *e.graph;
    throw ConfigError("unknown graph spec '" + std::string(name) + "'; corpus graphs: " +
                      known_names(false));
}

} // namespace hamhom
