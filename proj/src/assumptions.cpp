#include "hamhom/assumptions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "hamhom/errors.hpp"

namespace hamhom {

namespace {

struct SampleLattice {
    std::vector<std::array<double, 2>> xs; // spatial nodes (second entry unused for n=1)
    std::vector<double> ys;
    std::vector<double> ts;
};

// n=2 lattices are thinned so probe cost stays bounded; the constants feed
// bounds with wide margins, not tight estimates.
SampleLattice build_lattice(const HamiltonianSpec& spec, const ProbeConfig& probe, int shrink) {
    SampleLattice lat;
    int cx = std::max(4, probe.cells / shrink);
    if (spec.space_dims == 2) cx = std::max(4, cx / 2);
    double hx = 1.0 / cx;
    if (spec.space_dims == 1) {
        for (int i = 0; i < cx; ++i) lat.xs.push_back({i * hx, 0.0});
    } else {
        for (int i = 0; i < cx; ++i)
            for (int j = 0; j < cx; ++j) lat.xs.push_back({i * hx, j * hx});
    }
    if (spec.has_y) {
        int cy = std::max(4, probe.cells / shrink);
        for (int i = 0; i < cy; ++i) lat.ys.push_back(static_cast<double>(i) / cy);
    } else {
        lat.ys.push_back(0.0);
    }
    if (spec.time_dependent()) {
        int ct = std::max(4, probe.time_samples / shrink);
        for (int i = 0; i < ct; ++i) lat.ts.push_back(static_cast<double>(i) / ct);
    } else {
        lat.ts.push_back(0.0);
    }
    return lat;
}

} // namespace

AssumptionReport estimate_constants(const HamiltonianSpec& spec, const ProbeConfig& probe) {
    spec.validate();
    if (probe.p_max < 2.0) throw ConfigError("probe: p_max must be at least 2");
    if (probe.radial_samples < 4) throw ConfigError("probe: need at least 4 radial samples");

    AssumptionReport rep;
    rep.l = spec.l_effective();
    const int n = spec.space_dims;
    SampleLattice lat = build_lattice(spec, probe, 1);
    SampleLattice dlat = build_lattice(spec, probe, 2);
    long samples = 0;

    std::vector<std::array<double, 2>> dirs;
    if (n == 1) {
        dirs.push_back({1.0, 0.0});
        dirs.push_back({-1.0, 0.0});
    } else {
        for (int k = 0; k < probe.directions; ++k) {
            double a = kTwoPi * k / probe.directions;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
    }

    auto eval = [&](const std::array<double, 2>& x, double y, double t,
                    const std::array<double, 2>& px, double py) {
        return spec.eval(std::span<const double>(x.data(), n), y, t,
                         std::span<const double>(px.data(), n), py);
    };

    // C0 and eta over the zero-gradient lattice.
    double c0 = 0.0;
    double eta = std::numeric_limits<double>::infinity();
    const CoeffField& acoeff = spec.coercive.front().a;
    for (const auto& x : lat.xs)
        for (double y : lat.ys)
            for (double t : lat.ts) {
                c0 = std::max(c0, std::fabs(eval(x, y, t, {0.0, 0.0}, 0.0)));
                eta = std::min(eta, acoeff.eval(std::span<const double>(x.data(), n), y, t));
                ++samples;
            }
    rep.C0 = c0;
    rep.eta = eta;

    // Growth minorant m(r) = min over nodes/times/directions of G at |p_x| = r, p_y = 0.
    // C1 is half the minimal slope over the upper half of the radius range; C2 is the
    // smallest offset making C1|p_x| - C2 a minorant of every sample.
    std::vector<double> radii(probe.radial_samples);
    for (int i = 0; i < probe.radial_samples; ++i)
        radii[i] = 1.0 + (probe.p_max - 1.0) * i / (probe.radial_samples - 1);
    std::vector<double> minor(radii.size(), std::numeric_limits<double>::infinity());
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        for (const auto& d : dirs) {
            std::array<double, 2> px{radii[ri] * d[0], radii[ri] * d[1]};
            for (const auto& x : lat.xs)
                for (double y : lat.ys)
                    for (double t : lat.ts) {
                        minor[ri] = std::min(minor[ri], eval(x, y, t, px, 0.0));
                        ++samples;
                    }
        }
    }
    double min_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = radii.size() / 2; i + 1 < radii.size(); ++i)
        min_slope = std::min(min_slope, (minor[i + 1] - minor[i]) / (radii[i + 1] - radii[i]));
    rep.C1 = 0.5 * min_slope;
    rep.coercive_ok = rep.C1 > 0.0;
    double c2 = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i)
        c2 = std::max(c2, rep.C1 * radii[i] - minor[i]);
    rep.C2 = std::max(0.0, c2);

    // Derivative ratio probes on the thinned lattice. p_y probes are centered
    // on -l so the C3 denominator |p_y + l| stays away from zero.
    std::vector<double> py_list;
    for (double d : {-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0}) py_list.push_back(-rep.l + d);
    py_list.push_back(0.0);
    std::vector<std::array<double, 2>> px_list = {{0.0, 0.0}};
    for (const auto& d : dirs) {
        px_list.push_back({d[0], d[1]});
        px_list.push_back({5.0 * d[0], 5.0 * d[1]});
    }

    const double dh = probe.fd_step;
    double c3 = 0.0, c4 = 0.0, c5 = 0.0;
    bool ratio_ok = true;
    const bool tdep = spec.time_dependent();
    for (const auto& x : dlat.xs)
        for (double y : dlat.ys)
            for (double t : dlat.ts)
                for (const auto& px : px_list)
                    for (double py : py_list) {
                        if (spec.has_y) {
                            double dgy = (eval(x, y + dh, t, px, py) -
                                          eval(x, y - dh, t, px, py)) / (2 * dh);
                            double denom = std::fabs(py + rep.l);
                            if (denom > 1e-9) {
                                double ratio = std::fabs(dgy) / denom;
                                c3 = std::max(c3, ratio);
                                if (ratio > probe.ratio_cap) ratio_ok = false;
                            }
                            double dgpy = (eval(x, y, t, px, py + dh) -
                                           eval(x, y, t, px, py - dh)) / (2 * dh);
                            c5 = std::max(c5, std::fabs(dgpy));
                            if (c5 > probe.ratio_cap) ratio_ok = false;
                        }
                        if (tdep) {
                            double g0 = eval(x, y, t, px, py);
                            double dgt = (eval(x, y, t + dh, px, py) -
                                          eval(x, y, t - dh, px, py)) / (2 * dh);
                            double ratio = std::fabs(dgt) / (1.0 + std::fabs(py) + std::fabs(g0));
                            c4 = std::max(c4, ratio);
                            if (ratio > probe.ratio_cap) ratio_ok = false;
                        }
                        ++samples;
                    }
    rep.C3 = c3;
    rep.C4 = c4;
    rep.C5 = c5;
    rep.lipschitz_ok = ratio_ok;

    // Inner graph data: sampled bound on |grad_p H . p - H|.
    if (spec.graph_inner) {
        const GraphSpec& gs = *spec.graph_inner;
        std::vector<double> us = dlat.ys.size() > 1 ? dlat.ys
                                                    : std::vector<double>{0.0, 0.25, 0.5, 0.75};
        double defect = 0.0;
        for (const auto& x : dlat.xs)
            for (double u : us)
                for (double t : dlat.ts)
                    for (const auto& px : px_list) {
                        double hval = gs.eval(std::span<const double>(x.data(), n), u, t,
                                              std::span<const double>(px.data(), n));
                        double dot = 0.0;
                        for (int k = 0; k < n; ++k) {
                            std::array<double, 2> pp = px, pm = px;
                            pp[k] += dh;
                            pm[k] -= dh;
                            double dk = (gs.eval(std::span<const double>(x.data(), n), u, t,
                                                 std::span<const double>(pp.data(), n)) -
                                         gs.eval(std::span<const double>(x.data(), n), u, t,
                                                 std::span<const double>(pm.data(), n))) / (2 * dh);
                            dot += dk * px[k];
                        }
                        defect = std::max(defect, std::fabs(dot - hval));
                        ++samples;
                    }
        rep.scaling_defect = defect;
        rep.graph_scaling_ok = defect <= probe.ratio_cap;
    }

    rep.samples_used = samples;
    if (!ratio_ok)
        throw ConfigError("spec rejected: sampled derivative ratio exceeds the admission cap");
    if (!rep.coercive_ok)
        throw ConfigError("spec rejected: sampled growth minorant has no positive slope");
    if (!(rep.eta > 0.0))
        throw ConfigError("spec rejected: coercive coefficient reaches " + std::to_string(rep.eta) +
                          " on the sample lattice");
    return rep;
}

double oscillation_bound_K(const AssumptionReport& report, int space_dims) {
    if (!(report.C1 > 0.0))
        throw ConfigError("oscillation bound undefined: C1 must be positive");
    double S = 1.0 + std::sqrt(static_cast<double>(space_dims)) / (2.0 * report.C1);
    return (report.C0 + report.C2) * S + std::fabs(report.l);
}

} // namespace hamhom
