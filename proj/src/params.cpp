#include "thinmem/params.hpp"

namespace thinmem {

namespace {

void check_reference_coordinate(double varrho, double lo, Side side) {
    const double tol = 1e-12;
    if (side == Side::Lower) {
        if (varrho < lo - tol || varrho > 1.0 + tol)
            throw DomainError("physical_radius: lower-layer coordinate outside [l,1]");
    } else {
        if (varrho < 1.0 - tol || varrho > 2.0 + tol)
            throw DomainError("physical_radius: upper-layer coordinate outside [1,2]");
    }
}

}  // namespace

double radial_map_slope(const Scenario& sc, double gamma, Side side) {
    switch (sc.kind) {
        case ScenarioKind::TwoThin:
            return side == Side::Upper ? gamma * sc.thickness : sc.thickness;
        case ScenarioKind::ThinOverThick:
            return side == Side::Upper ? sc.thickness : 1.0;
        case ScenarioKind::ThinOverFast:
            return side == Side::Upper ? std::sqrt(gamma / sc.thickness) : 1.0;
    }
    return 1.0;
}

double physical_radius(const Scenario& sc, double gamma, double varrho, Side side) {
    check_reference_coordinate(varrho, sc.lower_left(), side);
    const double s = radial_map_slope(sc, gamma, side);
    if (side == Side::Upper) return 1.0 + s * (varrho - 1.0);
    // Lower layer: affine from [l,1] onto [r,1]; identity when l == r.
    if (sc.kind == ScenarioKind::TwoThin) return varrho * sc.thickness + (1.0 - sc.thickness);
    return varrho;
}

}  // namespace thinmem
