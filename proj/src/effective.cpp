#include "hamhom/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hamhom/parallel.hpp"

namespace hamhom {
namespace {

int slope_dims(const HamiltonianSpec& spec) {
    return spec.space_dims + (spec.has_y ? 1 : 0);
}

HamiltonianSpec shifted_by(const HamiltonianSpec& spec, std::span<const double> P) {
    if (static_cast<int>(P.size()) != slope_dims(spec))
        throw ConfigError("slope vector must list the x-slopes then the y-slope");
    const std::span<const double> px = P.first(static_cast<std::size_t>(spec.space_dims));
    const double py = spec.has_y ? P[static_cast<std::size_t>(spec.space_dims)] : 0.0;
    return shift(spec, px, py);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_point(std::span<const double> P) {
    std::string s = "(";
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (i) s += ", ";
        s += fmt(P[i]);
    }
    return s + ")";
}

// Local slope-derivative bound of the Hamiltonian along one slope axis over
// the segment between two lattice points.
double axis_lipschitz(const HamiltonianSpec& spec, int axis, std::span<const double> Pa,
                      std::span<const double> Pb) {
    if (spec.has_y && axis == spec.space_dims) {
        double sup = 0.0;
        for (const auto& d : spec.drifts) sup += d.b.sup_bound();
        return sup;
    }
    const auto& co = spec.coercive.front();
    auto radius = [&](std::span<const double> P) {
        double r2 = 0.0;
        for (int a = 0; a < spec.space_dims; ++a) {
            const double u = P[static_cast<std::size_t>(a)] + spec.shift_x[a];
            r2 += u * u;
        }
        return std::sqrt(r2);
    };
    const double r = std::max(radius(Pa), radius(Pb));
    const double slope = co.beta == 1.0 ? 1.0 : co.beta * std::pow(r, co.beta - 1.0);
    return co.a.sup_bound() * slope;
}

} // namespace

void PAxis::validate() const {
    if (count < 1) throw ConfigError("slope axis needs at least one point");
    if (count > 1 && !(max > min)) throw ConfigError("slope axis needs max > min");
    if (!std::isfinite(min) || !std::isfinite(max))
        throw ConfigError("slope axis bounds must be finite");
}

std::size_t PGrid::point_count() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.count);
    return n;
}

std::vector<double> PGrid::point(std::size_t flat) const {
    std::vector<double> P(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) {
        P[d] = axes[d].coord(static_cast<int>(flat % static_cast<std::size_t>(axes[d].count)));
        flat /= static_cast<std::size_t>(axes[d].count);
    }
    return P;
}

void PGrid::validate() const {
    if (axes.empty() || axes.size() > 3)
        throw ConfigError("slope lattice needs between one and three axes");
    for (const auto& ax : axes) ax.validate();
}

EffectiveValue effective_at(const HamiltonianSpec& spec, std::span<const double> P,
                            const TorusGrid& grid, const EffectiveConfig& cfg) {
    const HamiltonianSpec shifted = shifted_by(spec, P);
    const ErgodicResult rd = ergodic_discount(shifted, grid, cfg.alphas, cfg.scheme);
    const ErgodicResult rl = ergodic_longtime(shifted, grid, cfg.longtime_T, cfg.scheme);
    EffectiveValue v;
    v.value = rd.lambda;
    v.discount = rd.lambda;
    v.longtime = rl.lambda;
    v.residual = rd.residual;
    v.flagged = std::fabs(rd.lambda - rl.lambda) > cfg.crosscheck_tol;
    return v;
}

EffectiveTable tabulate(const HamiltonianSpec& spec, const PGrid& p_grid,
                        const TorusGrid& grid, const EffectiveConfig& cfg) {
    p_grid.validate();
    if (static_cast<int>(p_grid.axes.size()) != slope_dims(spec))
        throw ConfigError("slope lattice dimension does not match the spec");
    const std::size_t n = p_grid.point_count();

    EffectiveTable t;
    t.p_grid = p_grid;
    t.spec_digest = spec.digest();
    t.values.resize(n);
    t.meta.resize(n);
    std::vector<std::string> bound_warnings(n);

    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const std::vector<double> P = p_grid.point(i);
            const EffectiveValue v = effective_at(spec, P, grid, cfg);
            t.values[i] = v.value;
            t.meta[i] = PointMeta{v.discount, v.longtime, v.residual, v.flagged};

            const auto [lo, hi] = zero_slope_window(shifted_by(spec, P), grid, 128);
            // -G(.,0,0) range [lo, hi] means the frozen-variable range of the
            // Hamiltonian at P is [-hi, -lo], which must bracket the value.
            if (v.value < -hi - 0.05 || v.value > -lo + 0.05)
                bound_warnings[i] = "value " + fmt(v.value) + " at P=" + fmt_point(P) +
                                    " outside range bounds [" + fmt(-hi) + ", " + fmt(-lo) +
                                    "]";
        }
    });

    for (std::size_t i = 0; i < n; ++i) {
        if (!bound_warnings[i].empty()) t.warnings.push_back(bound_warnings[i]);
        if (t.meta[i].flagged)
            t.warnings.push_back("cross-check disagreement at P=" +
                                 fmt_point(p_grid.point(i)) + ": damped " +
                                 fmt(t.meta[i].discount) + " vs long-time " +
                                 fmt(t.meta[i].longtime));
    }

    // Continuity surrogate: adjacent jumps no larger than the local slope
    // bound of the Hamiltonian plus scheme slack.
    std::size_t stride = 1;
    for (std::size_t d = 0; d < p_grid.axes.size(); ++d) {
        const auto& ax = p_grid.axes[d];
        if (ax.count > 1) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t along =
                    (i / stride) % static_cast<std::size_t>(ax.count);
                if (along + 1 == static_cast<std::size_t>(ax.count)) continue;
                const std::size_t j = i + stride;
                const auto Pa = p_grid.point(i);
                const auto Pb = p_grid.point(j);
                const double lip =
                    axis_lipschitz(spec, static_cast<int>(d), Pa, Pb);
                const double jump = std::fabs(t.values[j] - t.values[i]);
                if (jump > lip * ax.spacing() + 0.05)
                    t.warnings.push_back("jump " + fmt(jump) + " between P=" +
                                         fmt_point(Pa) + " and P=" + fmt_point(Pb) +
                                         " exceeds the continuity bound " +
                                         fmt(lip * ax.spacing() + 0.05));
            }
        }
        stride *= static_cast<std::size_t>(ax.count);
    }
    return t;
}

double interpolate(const EffectiveTable& table, std::span<const double> P) {
    const auto& axes = table.p_grid.axes;
    if (P.size() != axes.size())
        throw ConfigError("query dimension does not match the table");
    const std::size_t dims = axes.size();
    std::size_t base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};

    for (std::size_t d = 0; d < dims; ++d) {
        const auto& ax = axes[d];
        const double scale = std::max({1.0, std::fabs(ax.min), std::fabs(ax.max)});
        if (ax.count == 1) {
            if (std::fabs(P[d] - ax.min) > 1e-9 * scale)
                throw RangeError("slope " + fmt_point(P) + " outside the table hull");
            continue;
        }
        double u = (P[d] - ax.min) / ax.spacing();
        const double top = static_cast<double>(ax.count - 1);
        if (u < -1e-9 || u > top + 1e-9)
            throw RangeError("slope " + fmt_point(P) + " outside the table hull");
        u = std::clamp(u, 0.0, top);
        double fl = std::floor(u);
        double fr = u - fl;
        std::size_t i0 = static_cast<std::size_t>(fl);
        if (fr < 1e-9) {
            fr = 0.0;
        } else if (fr > 1.0 - 1e-9) {
            i0 += 1;
            fr = 0.0;
        }
        if (i0 == static_cast<std::size_t>(ax.count - 1) && fr == 0.0) {
            // exact top node
        }
        base[d] = i0;
        frac[d] = fr;
    }

    std::size_t stride[3] = {1, 1, 1};
    for (std::size_t d = 1; d < dims; ++d)
        stride[d] = stride[d - 1] * static_cast<std::size_t>(axes[d - 1].count);

    double acc = 0.0;
    const std::size_t corners = std::size_t{1} << dims;
    for (std::size_t c = 0; c < corners; ++c) {
        double weight = 1.0;
        std::size_t idx = 0;
        for (std::size_t d = 0; d < dims; ++d) {
            const bool hi = (c >> d) & 1u;
            weight *= hi ? frac[d] : 1.0 - frac[d];
            idx += (base[d] + (hi ? 1 : 0)) * stride[d];
        }
        if (weight != 0.0) acc += weight * table.values[idx];
    }
    return acc;
}

HomogeneityReport homogeneity_check(const HamiltonianSpec& spec, const TorusGrid& grid,
                                    const EffectiveConfig& cfg,
                                    std::span<const double> scales,
                                    std::span<const std::vector<double>> samples) {
    if (!spec.graph_inner)
        throw ConfigError("homogeneity probe needs a lifted front-speed spec");
    std::vector<double> sc(scales.begin(), scales.end());
    if (sc.empty()) sc = {0.5, 2.0};
    std::vector<std::vector<double>> ps(samples.begin(), samples.end());
    if (ps.empty()) ps = {{1.0, -1.0}, {-1.0, -1.0}, {0.5, -1.0}};

    HomogeneityReport rep;
    const std::vector<double> zero(static_cast<std::size_t>(slope_dims(spec)), 0.0);
    rep.value_at_zero = effective_at(spec, zero, grid, cfg).value;

    for (const auto& P : ps) {
        const double base = effective_at(spec, P, grid, cfg).value;
        for (double s : sc) {
            std::vector<double> sp(P.size());
            for (std::size_t d = 0; d < P.size(); ++d) sp[d] = s * P[d];
            const double scaled = effective_at(spec, sp, grid, cfg).value;
            const double dev =
                std::fabs(scaled - s * base) / std::max(1.0, s * std::fabs(base));
            rep.max_deviation = std::max(rep.max_deviation, dev);
        }
    }
    return rep;
}

StabilityReport stability_check(const HamiltonianSpec& spec, const TorusGrid& grid,
                                const EffectiveConfig& cfg, std::span<const double> deltas,
                                std::span<const std::vector<double>> samples) {
    if (deltas.empty()) throw ConfigError("stability probe needs perturbation sizes");
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[k] > 0.0)) throw ConfigError("perturbation sizes must be positive");
        if (k > 0 && !(deltas[k] < deltas[k - 1]))
            throw ConfigError("perturbation sizes must decrease");
    }
    std::vector<std::vector<double>> ps(samples.begin(), samples.end());
    const int pd = slope_dims(spec);
    if (ps.empty()) {
        ps.emplace_back(static_cast<std::size_t>(pd), 0.0);
        for (int d = 0; d < pd; ++d) {
            std::vector<double> up(static_cast<std::size_t>(pd), 0.0), dn = up;
            up[static_cast<std::size_t>(d)] = 1.0;
            dn[static_cast<std::size_t>(d)] = -1.0;
            ps.push_back(up);
            ps.push_back(dn);
        }
    }

    std::vector<double> base(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i)
        base[i] = effective_at(spec, ps[i], grid, cfg).value;

    StabilityReport rep;
    rep.deltas.assign(deltas.begin(), deltas.end());
    for (double delta : deltas) {
        const HamiltonianSpec pert = scale_amplitudes(spec, 1.0 + delta);
        double dev = 0.0;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const double v = effective_at(pert, ps[i], grid, cfg).value;
            dev = std::max(dev, std::fabs(v - base[i]));
        }
        rep.deviations.push_back(dev);
        rep.observed_C = std::max(rep.observed_C, dev / delta);
    }
    rep.monotone_decay = true;
    for (std::size_t k = 1; k < rep.deviations.size(); ++k)
        if (rep.deviations[k] > rep.deviations[k - 1] + 0.01) rep.monotone_decay = false;
    return rep;
}

} // namespace hamhom
