#pragma once

#include "thinmem/common.hpp"

namespace thinmem {

// Membrane permeabilities and layer coefficients.
//   alpha  permeability for filtering upper -> lower  (1/length)
//   beta   permeability for filtering lower -> upper  (1/length)
//   kappa  diffusivity multiplier of the lower layer  (> 0)
//   gamma  layer-thickness ratio (two thin layers) or fast-diffusion
//          coupling kappa*(R-1)^2 (thin over fast)    (> 0)
struct TransmissionParams {
    double alpha = 1.0;
    double beta = 1.0;
    double kappa = 1.0;
    double gamma = 1.0;

    void validate() const {
        if (!(alpha >= 0.0)) throw ParameterError("TransmissionParams: alpha must be >= 0");
        if (!(beta >= 0.0)) throw ParameterError("TransmissionParams: beta must be >= 0");
        if (!(kappa > 0.0)) throw ParameterError("TransmissionParams: kappa must be > 0");
        if (!(gamma > 0.0)) throw ParameterError("TransmissionParams: gamma must be > 0");
    }
};

enum class ScenarioKind {
    TwoThin,        // both annuli shrink, r -> 1-, R = 1 + gamma*(1-r)
    ThinOverThick,  // upper annulus shrinks, R -> 1+, lower annulus fixed [r,1]
    ThinOverFast,   // upper shrinks while lower diffusion speeds up, kappa*(R-1)^2 = gamma
};

enum class Side { Lower, Upper };

// A concrete member of one of the three limit families.  `thickness` is the
// scenario parameter: 1-r, R-1, or kappa respectively.
struct Scenario {
    ScenarioKind kind = ScenarioKind::TwoThin;
    double thickness = 0.1;
    double fixed_inner_radius = 0.5;  // r, used by ThinOverThick / ThinOverFast

    static Scenario two_thin(double one_minus_r) {
        if (!(one_minus_r > 0.0 && one_minus_r < 1.0))
            throw ParameterError("Scenario: TwoThin thickness must lie in (0,1)");
        return {ScenarioKind::TwoThin, one_minus_r, 0.0};
    }
    static Scenario thin_over_thick(double R_minus_1, double r) {
        if (!(R_minus_1 > 0.0)) throw ParameterError("Scenario: ThinOverThick thickness must be > 0");
        if (!(r > 0.0 && r < 1.0)) throw ParameterError("Scenario: inner radius must lie in (0,1)");
        return {ScenarioKind::ThinOverThick, R_minus_1, r};
    }
    static Scenario thin_over_fast(double kappa, double r) {
        if (!(kappa > 0.0)) throw ParameterError("Scenario: ThinOverFast kappa must be > 0");
        if (!(r > 0.0 && r < 1.0)) throw ParameterError("Scenario: inner radius must lie in (0,1)");
        return {ScenarioKind::ThinOverFast, kappa, r};
    }

    // Left endpoint of the lower reference interval: 0 for TwoThin, r otherwise.
    double lower_left() const {
        return kind == ScenarioKind::TwoThin ? 0.0 : fixed_inner_radius;
    }

    // Membrane-layer width of the physical geometry this scenario represents.
    double membrane_layer_width(double gamma) const {
        switch (kind) {
            case ScenarioKind::TwoThin: return gamma * thickness;
            case ScenarioKind::ThinOverThick: return thickness;
            case ScenarioKind::ThinOverFast: return std::sqrt(gamma / thickness);
        }
        return 0.0;
    }
};

// Affine map from a reference radial coordinate to the physical radius.
// The two one-sided limits at the membrane both map to 1.
double physical_radius(const Scenario& sc, double gamma, double varrho, Side side);

// Slope d(rho)/d(varrho) of the map on the given layer.
double radial_map_slope(const Scenario& sc, double gamma, Side side);

}  // namespace thinmem
