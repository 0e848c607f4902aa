#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace hamhom {

inline constexpr int kMaxAxes = 3;

// Uniform node-centered lattice on a flat torus. Axis order is fixed: the spatial
// x-axes come first (axis 0 varies fastest in memory), the optional y-axis is last
// and slowest. Node i on an axis sits at i*spacing; index arithmetic wraps modulo
// the axis cell count.
class TorusGrid {
public:
    TorusGrid() = default;
    TorusGrid(int space_dims, bool has_y_axis,
              std::span<const int> cells_per_axis,
              std::span<const double> period_per_axis = {});

    int space_dims() const { return space_dims_; }
    bool has_y_axis() const { return has_y_; }
    int axes() const { return space_dims_ + (has_y_ ? 1 : 0); }
    int y_axis() const;                       // index of the y-axis; throws if absent

    int cells(int axis) const { return cells_[axis]; }
    double period(int axis) const { return periods_[axis]; }
    double spacing(int axis) const { return periods_[axis] / cells_[axis]; }
    double coord(int axis, int index) const { return index * spacing(axis); }

    std::size_t node_count() const { return nodes_; }
    std::size_t stride(int axis) const { return strides_[axis]; }
    int wrap(int axis, int index) const;

    // Decomposes a flat node id into per-axis indices.
    std::array<int, kMaxAxes> unravel(std::size_t node) const;

    TorusGrid without_y() const;

    bool operator==(const TorusGrid& o) const;

private:
    int space_dims_ = 0;
    bool has_y_ = false;
    std::array<int, kMaxAxes> cells_{};
    std::array<double, kMaxAxes> periods_{};
    std::array<std::size_t, kMaxAxes> strides_{};
    std::size_t nodes_ = 0;
};

// Grid plus one real value per node, laid out lexicographically (axis 0 fastest).
class Field {
public:
    Field() = default;
    explicit Field(const TorusGrid& grid, double fill = 0.0);
    Field(const TorusGrid& grid, std::vector<double> values);

    const TorusGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    bool all_finite() const;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

// Componentwise max over the y-axis; the result lives on the x-only grid.
// Throws ConfigError when the grid has no y-axis.
Field reduce_max_over_y(const Field& f);

double field_min(const Field& f);
double field_max(const Field& f);
double field_mean(const Field& f);
double oscillation(const Field& f);          // max - min, exact in floating point
double sup_abs_diff(const Field& a, const Field& b);

} // namespace hamhom
