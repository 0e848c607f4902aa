#include "hamhom/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hamhom/errors.hpp"

namespace hamhom {

TorusGrid::TorusGrid(int space_dims, bool has_y_axis,
                     std::span<const int> cells_per_axis,
                     std::span<const double> period_per_axis)
    : space_dims_(space_dims), has_y_(has_y_axis) {
    if (space_dims < 1 || space_dims > 2)
        throw ConfigError("grid: space_dims must be 1 or 2, got " + std::to_string(space_dims));
    int na = axes();
    if (static_cast<int>(cells_per_axis.size()) != na)
        throw ConfigError("grid: expected " + std::to_string(na) + " cell counts, got " +
                          std::to_string(cells_per_axis.size()));
    if (!period_per_axis.empty() && static_cast<int>(period_per_axis.size()) != na)
        throw ConfigError("grid: expected " + std::to_string(na) + " periods, got " +
                          std::to_string(period_per_axis.size()));
    nodes_ = 1;
    for (int a = 0; a < na; ++a) {
        int c = cells_per_axis[a];
        if (c < 8)
            throw ConfigError("grid: axis " + std::to_string(a) + " needs at least 8 cells, got " +
                              std::to_string(c));
        double p = period_per_axis.empty() ? 1.0 : period_per_axis[a];
        if (!(p > 0.0) || !std::isfinite(p))
            throw ConfigError("grid: axis " + std::to_string(a) + " period must be positive");
        cells_[a] = c;
        periods_[a] = p;
        strides_[a] = nodes_;
        nodes_ *= static_cast<std::size_t>(c);
    }
}

int TorusGrid::y_axis() const {
    if (!has_y_) throw ConfigError("grid: no y-axis present");
    return space_dims_;
}

int TorusGrid::wrap(int axis, int index) const {
    int c = cells_[axis];
    int m = index % c;
    return m < 0 ? m + c : m;
}

std::array<int, kMaxAxes> TorusGrid::unravel(std::size_t node) const {
    std::array<int, kMaxAxes> idx{};
    for (int a = 0; a < axes(); ++a) {
        idx[a] = static_cast<int>(node % static_cast<std::size_t>(cells_[a]));
        node /= static_cast<std::size_t>(cells_[a]);
    }
    return idx;
}

TorusGrid TorusGrid::without_y() const {
    if (!has_y_) throw ConfigError("grid: no y-axis to drop");
    std::vector<int> c(cells_.begin(), cells_.begin() + space_dims_);
    std::vector<double> p(periods_.begin(), periods_.begin() + space_dims_);
    return TorusGrid(space_dims_, false, c, p);
}

bool TorusGrid::operator==(const TorusGrid& o) const {
    if (space_dims_ != o.space_dims_ || has_y_ != o.has_y_) return false;
    for (int a = 0; a < axes(); ++a)
        if (cells_[a] != o.cells_[a] || periods_[a] != o.periods_[a]) return false;
    return true;
}

Field::Field(const TorusGrid& grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

Field::Field(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw ConfigError("field: value count " + std::to_string(values_.size()) +
                          " does not match grid node count " + std::to_string(grid_.node_count()));
}

bool Field::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

Field reduce_max_over_y(const Field& f) {
    const TorusGrid& g = f.grid();
    int ya = g.y_axis(); // throws when absent
    TorusGrid xg = g.without_y();
    std::size_t sy = g.stride(ya);
    int ny = g.cells(ya);
    Field out(xg);
    auto src = f.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        double m = src[i];
        for (int j = 1; j < ny; ++j) m = std::max(m, src[i + static_cast<std::size_t>(j) * sy]);
        dst[i] = m;
    }
    return out;
}

double field_min(const Field& f) {
    double m = f.values()[0];
    for (double v : f.values()) m = std::min(m, v);
    return m;
}

double field_max(const Field& f) {
    double m = f.values()[0];
    for (double v : f.values()) m = std::max(m, v);
    return m;
}

double field_mean(const Field& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s / static_cast<double>(f.size());
}

double oscillation(const Field& f) { return field_max(f) - field_min(f); }

double sup_abs_diff(const Field& a, const Field& b) {
    if (a.size() != b.size()) throw ConfigError("sup_abs_diff: mismatched field sizes");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace hamhom
