#pragma once

#include <optional>
#include <vector>

#include "hamhom/coeff_field.hpp"
#include "hamhom/grid.hpp"
#include "hamhom/hamiltonian.hpp"
#include "hamhom/scheme.hpp"
#include "kernels/kernels.hpp"

namespace hamhom {

// Nodewise samples of a CoeffField, split so that advancing time is a pure
// multiply-add: value_i(t) = static_i + sum_m (cos_i[m]*cos(w_m t) - sin_i[m]*sin(w_m t)).
class CoeffTable {
public:
    CoeffTable() = default;
    CoeffTable(const CoeffField& field, const TorusGrid& grid, double coord_scale,
               double time_scale);

    void refresh(double t);
    const double* data() const { return values_.data(); }
    bool dynamic() const { return !modes_.empty(); }
    bool all_zero() const { return all_zero_; }

private:
    struct DynMode {
        double omega;
        std::vector<double> cos_part;
        std::vector<double> sin_part;
    };
    std::vector<double> static_part_;
    std::vector<double> values_;
    std::vector<DynMode> modes_;
    bool all_zero_ = true;
    bool refreshed_ = false;
};

struct MarcherOptions {
    double alpha = 0.0;      // damping coefficient added to the update
    double lip_u = 0.0;      // slope budget of value-coupled extra terms
    double coord_scale = 1.0; // coefficients sampled at coord * scale
    double time_scale = 1.0;  // and at t * scale
};

// Owns the sampled coefficient tables and the kernel plan for one spec on one
// grid; callers drive the time loop and own the ping-pong fields.
class SpecMarcher {
public:
    SpecMarcher(const HamiltonianSpec& spec, const TorusGrid& grid, const SchemeConfig& cfg,
                const MarcherOptions& opt = {});

    std::span<const double> theta() const { return theta_; }
    // Largest step keeping every nodewise update monotone, already including
    // the damping and extra-term slope budgets.
    double dt_monotone_cap() const;
    // dt_monotone_cap intersected with the per-axis CFL rule cfl * h / theta.
    double dt_bound(double cfl) const;
    bool time_dependent() const;

    // One forward step from time t: out = update(in). extra, when given, is a
    // nodewise term added to the Hamiltonian (sampled by the caller).
    void step(double t, double dt, const Field& in, Field& out, const double* extra = nullptr);

private:
    const TorusGrid grid_;
    MarcherOptions opt_;
    std::vector<double> theta_;
    CoeffTable a_, babs_, blin_, src_;
    bool has_babs_ = false, has_blin_ = false, has_src_ = false;
    kern::StepPlan plan_{};
    kern::StepKernelFn kernel_;
};

} // namespace hamhom
