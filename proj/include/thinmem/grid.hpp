#pragma once

#include <string>
#include <vector>

#include "thinmem/params.hpp"

namespace thinmem {

// Discretization of the reference rectangles: lower [l,1-] x [0,2pi),
// upper [1+,2] x [0,2pi).  The membrane is carried by two distinct nodes,
// one per layer; radial nodes are uniform per layer, the angular grid is
// periodic without a duplicated endpoint.
struct ReferenceGrid {
    Scenario scenario;
    int n_rad_lower = 0;
    int n_rad_upper = 0;
    int n_ang = 0;

    int rows() const { return n_rad_lower + n_rad_upper; }
    int membrane_lower_row() const { return n_rad_lower - 1; }
    int membrane_upper_row() const { return n_rad_lower; }

    double lower_left() const { return scenario.lower_left(); }
    double h_lower() const { return (1.0 - lower_left()) / (n_rad_lower - 1); }
    double h_upper() const { return 1.0 / (n_rad_upper - 1); }
    double h_ang() const { return 2.0 * M_PI / n_ang; }

    Side side_of_row(int i) const { return i < n_rad_lower ? Side::Lower : Side::Upper; }

    // Reference radial coordinate of storage row i (lower block first).
    double node(int i) const {
        return i < n_rad_lower ? lower_left() + i * h_lower()
                               : 1.0 + (i - n_rad_lower) * h_upper();
    }
    double angle(int j) const { return j * h_ang(); }

    bool same_layout(const ReferenceGrid& o) const {
        return scenario.kind == o.scenario.kind && n_rad_lower == o.n_rad_lower &&
               n_rad_upper == o.n_rad_upper && n_ang == o.n_ang &&
               lower_left() == o.lower_left();
    }
};

ReferenceGrid build_reference_grid(const Scenario& sc, int n_rad_lower, int n_rad_upper,
                                   int n_ang);

// Scalar function sampled on a ReferenceGrid, two-sided at the membrane.
// Angular periodicity is index arithmetic modulo n_ang.
struct LayerField {
    ReferenceGrid grid;
    std::vector<double> values;  // rows() * n_ang, radial-major

    LayerField() = default;
    explicit LayerField(const ReferenceGrid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.rows()) * g.n_ang, fill) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n_ang + j]; }
    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * grid.n_ang + j];
    }
    // Angular neighbor access with periodic wrap.
    double at_wrap(int i, int j) const {
        int m = grid.n_ang;
        return at(i, ((j % m) + m) % m);
    }
};

// CSV schema: header "varrho,phi,side,value"; side in {lower,upper}; lower
// block then upper block, radial-major; 17 significant digits.
void write_field_csv(const LayerField& f, const std::string& path);
LayerField read_field_csv(const std::string& path, const Scenario& sc);

}  // namespace thinmem
