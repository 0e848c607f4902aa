#include "hamhom/scheme.hpp"

#include <cmath>
#include <utility>

#include "hamhom/parallel.hpp"
#include "marcher.hpp"

namespace hamhom {

CoeffTable::CoeffTable(const CoeffField& field, const TorusGrid& grid, double coord_scale,
                       double time_scale) {
    const std::size_t n = grid.node_count();
    static_part_.assign(n, field.mean);
    all_zero_ = field.mean == 0.0;
    const int nx = grid.space_dims();
    const bool has_y = grid.has_y_axis();

    for (const auto& m : field.modes) {
        if (m.amplitude == 0.0) continue;
        all_zero_ = false;
        DynMode* dyn = nullptr;
        if (m.kt != 0) {
            modes_.push_back(DynMode{kTwoPi * m.kt * time_scale,
                                     std::vector<double>(n), std::vector<double>(n)});
            dyn = &modes_.back();
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = grid.unravel(i);
            double dot = 0.0;
            for (int a = 0; a < nx; ++a) dot += m.kx[a] * grid.coord(a, idx[a]);
            if (has_y) dot += m.ky * grid.coord(nx, idx[nx]);
            const double sp = kTwoPi * coord_scale * dot + m.phase;
            if (dyn) {
                dyn->cos_part[i] = m.amplitude * std::cos(sp);
                dyn->sin_part[i] = m.amplitude * std::sin(sp);
            } else {
                static_part_[i] += m.amplitude * std::cos(sp);
            }
        }
    }
    values_ = static_part_;
}

void CoeffTable::refresh(double t) {
    if (modes_.empty()) return;
    std::vector<std::pair<double, double>> trig;
    trig.reserve(modes_.size());
    for (const auto& m : modes_)
        trig.emplace_back(std::cos(m.omega * t), std::sin(m.omega * t));
    parallel_for(
        values_.size(),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) values_[i] = static_part_[i];
            for (std::size_t k = 0; k < modes_.size(); ++k) {
                const auto& m = modes_[k];
                const double ct = trig[k].first;
                const double st = trig[k].second;
                for (std::size_t i = b; i < e; ++i)
                    values_[i] += m.cos_part[i] * ct - m.sin_part[i] * st;
            }
        },
        1 << 15);
}

void SchemeConfig::validate(const TorusGrid& grid) const {
    if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("cfl must lie in (0, 1]");
    if (!(residual_tol > 0.0)) throw ConfigError("residual_tol must be positive");
    if (max_steps <= 0) throw ConfigError("max_steps must be positive");
    if (!(gradient_probe_radius > 0.0))
        throw ConfigError("gradient_probe_radius must be positive");
    if (!dissipation_per_axis.empty()) {
        if (static_cast<int>(dissipation_per_axis.size()) != grid.axes())
            throw ConfigError("dissipation_per_axis must cover every grid axis");
        for (double th : dissipation_per_axis)
            if (!(th > 0.0)) throw ConfigError("dissipation entries must be positive");
    }
}

std::vector<double> derive_dissipation(const HamiltonianSpec& spec, const TorusGrid& grid,
                                       double probe_radius) {
    spec.validate();
    if (spec.space_dims != grid.space_dims() || spec.has_y != grid.has_y_axis())
        throw ConfigError("spec and grid disagree on axis layout");
    const auto& co = spec.coercive.front();
    const double shift_norm = spec.space_dims == 2
                                  ? std::hypot(spec.shift_x[0], spec.shift_x[1])
                                  : std::fabs(spec.shift_x[0]);
    const double r_eff = std::max(probe_radius, 1.0) + shift_norm;
    const double slope =
        co.beta == 1.0 ? 1.0 : co.beta * std::pow(r_eff, co.beta - 1.0);
    const double theta_x = 1.1 * co.a.sup_bound() * slope;

    std::vector<double> theta(static_cast<std::size_t>(grid.axes()), theta_x);
    if (grid.has_y_axis()) {
        double drift_sup = 0.0;
        for (const auto& d : spec.drifts) drift_sup += d.b.sup_bound();
        theta[static_cast<std::size_t>(grid.y_axis())] = 1.1 * drift_sup;
    }
    return theta;
}

SpecMarcher::SpecMarcher(const HamiltonianSpec& spec, const TorusGrid& grid,
                         const SchemeConfig& cfg, const MarcherOptions& opt)
    : grid_(grid), opt_(opt) {
    spec.validate();
    cfg.validate(grid);
    if (spec.space_dims != grid.space_dims() || spec.has_y != grid.has_y_axis())
        throw ConfigError("spec and grid disagree on axis layout");

    theta_ = cfg.dissipation_per_axis.empty()
                 ? derive_dissipation(spec, grid, cfg.gradient_probe_radius)
                 : cfg.dissipation_per_axis;

    const auto& co = spec.coercive.front();
    a_ = CoeffTable(co.a, grid, opt.coord_scale, opt.time_scale);

    CoeffField babs, blin, src;
    for (const auto& d : spec.drifts) {
        CoeffField& dst = d.shape == DriftShape::absolute ? babs : blin;
        dst.mean += d.b.mean;
        dst.modes.insert(dst.modes.end(), d.b.modes.begin(), d.b.modes.end());
    }
    for (const auto& s : spec.sources) {
        src.mean += s.f.mean;
        src.modes.insert(src.modes.end(), s.f.modes.begin(), s.f.modes.end());
    }
    babs_ = CoeffTable(babs, grid, opt.coord_scale, opt.time_scale);
    blin_ = CoeffTable(blin, grid, opt.coord_scale, opt.time_scale);
    src_ = CoeffTable(src, grid, opt.coord_scale, opt.time_scale);
    has_babs_ = !babs_.all_zero();
    has_blin_ = !blin_.all_zero();
    has_src_ = !src_.all_zero();

    const int na = grid.axes();
    plan_.naxes = na;
    plan_.n0 = grid.cells(0);
    plan_.cells1 = na > 1 ? grid.cells(1) : 1;
    plan_.cells2 = na > 2 ? grid.cells(2) : 1;
    plan_.stride1 = na > 1 ? grid.stride(1) : 0;
    plan_.stride2 = na > 2 ? grid.stride(2) : 0;
    plan_.n_rows = static_cast<std::size_t>(plan_.cells1) * plan_.cells2;
    for (int a = 0; a < na; ++a) {
        plan_.inv_h[a] = 1.0 / grid.spacing(a);
        plan_.theta_half[a] = 0.5 * theta_[static_cast<std::size_t>(a)];
    }
    plan_.beta = co.beta;
    plan_.beta_case = co.beta == 1.0 ? 1 : (co.beta == 2.0 ? 2 : 0);
    plan_.sx0 = spec.shift_x[0];
    plan_.sx1 = spec.shift_x[1];
    plan_.coercive_dims = spec.space_dims;
    plan_.off_abs = spec.l_effective();
    plan_.off_lin = spec.l_effective();
    plan_.a_vals = a_.data();
    plan_.babs_vals = has_babs_ ? babs_.data() : nullptr;
    plan_.blin_vals = has_blin_ ? blin_.data() : nullptr;
    plan_.src_vals = has_src_ ? src_.data() : nullptr;
    kernel_ = kern::select_step_kernel();
}

double SpecMarcher::dt_monotone_cap() const {
    double denom = opt_.alpha + opt_.lip_u;
    for (int a = 0; a < grid_.axes(); ++a)
        denom += theta_[static_cast<std::size_t>(a)] / grid_.spacing(a);
    if (!(denom > 0.0)) throw NumericsError("no dissipation or damping to bound the step");
    return 1.0 / denom;
}

double SpecMarcher::dt_bound(double cfl) const {
    double dt_cfl = std::numeric_limits<double>::infinity();
    for (int a = 0; a < grid_.axes(); ++a) {
        const double th = theta_[static_cast<std::size_t>(a)];
        if (th > 0.0) dt_cfl = std::min(dt_cfl, cfl * grid_.spacing(a) / th);
    }
    return std::min(dt_cfl, dt_monotone_cap());
}

bool SpecMarcher::time_dependent() const {
    return a_.dynamic() || babs_.dynamic() || blin_.dynamic() || src_.dynamic();
}

void SpecMarcher::step(double t, double dt, const Field& in, Field& out, const double* extra) {
    if (in.size() != grid_.node_count() || out.size() != grid_.node_count())
        throw ConfigError("field size does not match the marching grid");
    if (in.values().data() == out.values().data())
        throw ConfigError("marching step cannot run in place");
    a_.refresh(t);
    babs_.refresh(t);
    blin_.refresh(t);
    src_.refresh(t);
    plan_.dt = dt;
    plan_.dt_alpha = dt * opt_.alpha;
    plan_.extra_vals = extra;
    plan_.v = in.values().data();
    plan_.out = out.values().data();
    const kern::StepPlan& plan = plan_;
    const kern::StepKernelFn fn = kernel_;
    // Rows worth one thread: about 2^15 node updates.
    const std::size_t grain =
        std::max<std::size_t>(1, (std::size_t{1} << 15) / static_cast<std::size_t>(plan_.n0));
    parallel_for(
        plan_.n_rows, [&plan, fn](std::size_t b, std::size_t e) { fn(plan, b, e); }, grain);
}

double numerical_hamiltonian(const HamiltonianSpec& spec, const TorusGrid& grid,
                             std::size_t node, double t,
                             std::span<const double> left_slopes,
                             std::span<const double> right_slopes,
                             std::span<const double> dissipation) {
    const int na = grid.axes();
    if (static_cast<int>(left_slopes.size()) != na ||
        static_cast<int>(right_slopes.size()) != na ||
        static_cast<int>(dissipation.size()) != na)
        throw ConfigError("slope and dissipation spans must cover every axis");
    const auto idx = grid.unravel(node);
    double x[2] = {0.0, 0.0};
    for (int a = 0; a < grid.space_dims(); ++a) x[a] = grid.coord(a, idx[a]);
    const double y =
        grid.has_y_axis() ? grid.coord(grid.y_axis(), idx[grid.y_axis()]) : 0.0;
    double p[kMaxAxes] = {0.0, 0.0, 0.0};
    for (int a = 0; a < na; ++a) p[a] = (left_slopes[a] + right_slopes[a]) * 0.5;
    const double py = grid.has_y_axis() ? p[grid.y_axis()] : 0.0;
    double g = spec.eval({x, static_cast<std::size_t>(grid.space_dims())}, y, t,
                         {p, static_cast<std::size_t>(grid.space_dims())}, py);
    for (int a = 0; a < na; ++a)
        g -= dissipation[a] * 0.5 * (right_slopes[a] - left_slopes[a]);
    return g;
}

namespace {

long step_count(double T, double dt_bound, long max_steps) {
    long n = static_cast<long>(std::ceil(T / dt_bound - 1e-12));
    if (n < 1) n = 1;
    if (n > max_steps)
        throw NumericsError("horizon needs " + std::to_string(n) +
                            " steps, over the configured budget");
    return n;
}

} // namespace

Field evolve(const HamiltonianSpec& spec, const Field& v0, double t0, double T,
             const SchemeConfig& cfg, std::span<const double> sample_times,
             const SampleFn& on_sample) {
    if (T < 0.0) throw ConfigError("marching horizon must be nonnegative");
    SpecMarcher marcher(spec, v0.grid(), cfg);
    if (T == 0.0) return v0;
    const long nsteps = step_count(T, marcher.dt_bound(cfg.cfl), cfg.max_steps);
    const double dt = T / static_cast<double>(nsteps);

    Field cur = v0;
    Field next(v0.grid());
    std::size_t si = 0;
    for (long k = 0; k < nsteps; ++k) {
        marcher.step(t0 + dt * static_cast<double>(k), dt, cur, next);
        std::swap(cur, next);
        if (!cur.all_finite())
            throw NumericsError("marching diverged at step " + std::to_string(k + 1) +
                                " of " + std::to_string(nsteps));
        const double elapsed = dt * static_cast<double>(k + 1);
        while (on_sample && si < sample_times.size() &&
               sample_times[si] <= elapsed + dt * 1e-9) {
            on_sample(t0 + elapsed, cur);
            ++si;
        }
    }
    return cur;
}

bool comparison_probe(const HamiltonianSpec& spec, const Field& u0, const Field& v0,
                      double T, const SchemeConfig& cfg) {
    if (!(u0.grid() == v0.grid()))
        throw ConfigError("comparison probe needs both fields on one grid");
    if (T < 0.0) throw ConfigError("marching horizon must be nonnegative");
    SpecMarcher marcher(spec, u0.grid(), cfg);
    if (T == 0.0) {
        for (std::size_t i = 0; i < u0.size(); ++i)
            if (!(u0[i] <= v0[i])) return false;
        return true;
    }
    const long nsteps = step_count(T, marcher.dt_bound(cfg.cfl), cfg.max_steps);
    const double dt = T / static_cast<double>(nsteps);

    Field cu = u0, cv = v0;
    Field nu(u0.grid()), nv(v0.grid());
    for (long k = 0; k < nsteps; ++k) {
        const double t = dt * static_cast<double>(k);
        marcher.step(t, dt, cu, nu, nullptr);
        marcher.step(t, dt, cv, nv, nullptr);
        std::swap(cu, nu);
        std::swap(cv, nv);
        if (!cu.all_finite() || !cv.all_finite())
            throw NumericsError("marching diverged at step " + std::to_string(k + 1) +
                                " of " + std::to_string(nsteps));
        for (std::size_t i = 0; i < cu.size(); ++i)
            if (!(cu[i] <= cv[i])) return false;
    }
    return true;
}

} // namespace hamhom
