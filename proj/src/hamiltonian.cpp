#include "hamhom/hamiltonian.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>

#include "hamhom/errors.hpp"

namespace hamhom {

namespace {

double coercive_norm(std::span<const double> px, const std::array<double, 2>& sx, int n) {
    if (n == 1) return std::fabs(px[0] + sx[0]);
    double u = px[0] + sx[0];
    double v = px[1] + sx[1];
    return std::sqrt(u * u + v * v);
}

double power(double r, double beta) {
    if (beta == 1.0) return r;
    if (beta == 2.0) return r * r;
    return std::pow(r, beta);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

double GraphSpec::eval(std::span<const double> x, double u, double t,
                       std::span<const double> p) const {
    double norm = 0.0;
    for (double pi : p) norm += pi * pi;
    norm = std::sqrt(norm);
    return c.eval(x, 0.0, t) * norm + g.eval({}, u, t);
}

void GraphSpec::validate() const {
    require(space_dims == 1 || space_dims == 2, "graph spec: space_dims must be 1 or 2");
    require(!c.depends_on_y(), "graph spec: c must depend on (x,t) only");
    require(c.inf_bound() > 0.0, "graph spec: c must be bounded below by a positive constant");
    for (const CoeffMode& m : g.modes)
        require(m.kx[0] == 0 && m.kx[1] == 0, "graph spec: g must depend on (u,t) only");
}

double HamiltonianSpec::eval(std::span<const double> x, double y, double t,
                             std::span<const double> px, double py) const {
    double g = 0.0;
    for (const CoerciveTerm& term : coercive)
        g += term.a.eval(x, y, t) * power(coercive_norm(px, shift_x, space_dims), term.beta);
    double py_eff = py + shift_y;
    for (const DriftTerm& term : drifts) {
        double z = py_eff + term.offset;
        g += term.b.eval(x, y, t) * (term.shape == DriftShape::absolute ? std::fabs(z) : z);
    }
    for (const SourceTerm& term : sources) g -= term.f.eval(x, y, t);
    return g;
}

void HamiltonianSpec::validate() const {
    require(space_dims == 1 || space_dims == 2, "spec: space_dims must be 1 or 2");
    require(coercive.size() == 1, "spec: exactly one coercive term required, got " +
                                      std::to_string(coercive.size()));
    const CoerciveTerm& ct = coercive.front();
    require(ct.beta >= 1.0, "spec: coercive exponent must be >= 1");
    require(!ct.a.depends_on_y(), "spec: coercive coefficient must depend on (x,t) only");
    require(ct.a.inf_bound() > 0.0,
            "spec: coercive coefficient must be bounded below by a positive constant");
    for (const SourceTerm& s : sources)
        require(!s.f.depends_on_y(), "spec: source coefficient must depend on (x,t) only");
    if (!drifts.empty()) {
        require(has_y, "spec: drift terms require a y-axis");
        double l0 = drifts.front().offset;
        for (const DriftTerm& d : drifts)
            require(d.offset == l0, "spec: all drift offsets must be equal");
    }
    if (graph_inner) graph_inner->validate();
}

double HamiltonianSpec::l_effective() const {
    if (drifts.empty()) return 0.0;
    return drifts.front().offset + shift_y;
}

bool HamiltonianSpec::time_dependent() const {
    for (const CoerciveTerm& t : coercive)
        if (t.a.depends_on_t()) return true;
    for (const DriftTerm& t : drifts)
        if (t.b.depends_on_t()) return true;
    for (const SourceTerm& t : sources)
        if (t.f.depends_on_t()) return true;
    return false;
}

bool HamiltonianSpec::depends_on(int axis_kind) const {
    auto field_dep = [axis_kind](const CoeffField& f) {
        for (const CoeffMode& m : f.modes) {
            if (m.amplitude == 0.0) continue;
            if (axis_kind == 0 && (m.kx[0] != 0 || m.kx[1] != 0)) return true;
            if (axis_kind == 1 && m.ky != 0) return true;
            if (axis_kind == 2 && m.kt != 0) return true;
        }
        return false;
    };
    for (const CoerciveTerm& t : coercive)
        if (field_dep(t.a)) return true;
    for (const DriftTerm& t : drifts)
        if (field_dep(t.b)) return true;
    for (const SourceTerm& t : sources)
        if (field_dep(t.f)) return true;
    return false;
}

namespace {

void hash_bytes(std::uint64_t& h, const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ULL;
    }
}

void hash_double(std::uint64_t& h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    hash_bytes(h, &bits, sizeof bits);
}

void hash_int(std::uint64_t& h, int v) { hash_bytes(h, &v, sizeof v); }

void hash_field(std::uint64_t& h, const CoeffField& f) {
    hash_double(h, f.mean);
    for (const CoeffMode& m : f.modes) {
        hash_int(h, m.kx[0]);
        hash_int(h, m.kx[1]);
        hash_int(h, m.ky);
        hash_int(h, m.kt);
        hash_double(h, m.amplitude);
        hash_double(h, m.phase);
    }
}

} // namespace

std::string HamiltonianSpec::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_int(h, space_dims);
    hash_int(h, has_y ? 1 : 0);
    for (const CoerciveTerm& t : coercive) {
        hash_field(h, t.a);
        hash_double(h, t.beta);
    }
    for (const DriftTerm& t : drifts) {
        hash_field(h, t.b);
        hash_int(h, t.shape == DriftShape::absolute ? 0 : 1);
        hash_double(h, t.offset);
    }
    for (const SourceTerm& t : sources) hash_field(h, t.f);
    hash_double(h, shift_x[0]);
    hash_double(h, shift_x[1]);
    hash_double(h, shift_y);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

HamiltonianSpec lift(const GraphSpec& graph) {
    graph.validate();
    HamiltonianSpec out;
    out.space_dims = graph.space_dims;
    out.has_y = true;
    out.coercive.push_back(CoerciveTerm{graph.c, 1.0});
    out.drifts.push_back(DriftTerm{graph.g, DriftShape::absolute, 0.0});
    out.graph_inner = graph;
    out.validate();
    return out;
}

HamiltonianSpec shift(const HamiltonianSpec& spec, std::span<const double> Px, double Py) {
    if (static_cast<int>(Px.size()) != spec.space_dims)
        throw ConfigError("shift: offset dimension does not match spec");
    HamiltonianSpec out = spec;
    for (int i = 0; i < spec.space_dims; ++i) out.shift_x[i] += Px[i];
    out.shift_y += Py;
    return out;
}

HamiltonianSpec scale_amplitudes(const HamiltonianSpec& spec, double factor) {
    HamiltonianSpec out = spec;
    for (auto& c : out.coercive) c.a = c.a.scaled_amplitudes(factor);
    for (auto& d : out.drifts) d.b = d.b.scaled_amplitudes(factor);
    for (auto& s : out.sources) s.f = s.f.scaled_amplitudes(factor);
    if (out.graph_inner) {
        out.graph_inner->c = out.graph_inner->c.scaled_amplitudes(factor);
        out.graph_inner->g = out.graph_inner->g.scaled_amplitudes(factor);
    }
    out.validate();
    return out;
}

} // namespace hamhom
