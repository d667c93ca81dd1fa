#pragma once

#include "thinmem/evolve.hpp"
#include "thinmem/generator.hpp"

namespace thinmem {

// Tagged union over the three limit state spaces: a pair of circle functions,
// a circle function plus a lower-annulus field, or a circle function plus a
// single lumped value.
struct LimitState {
    ScenarioKind scenario = ScenarioKind::TwoThin;
    std::vector<double> g_plus;   // circle function on the periodic angular grid
    std::vector<double> g_minus;  // TwoThin only
    std::vector<double> u_minus;  // ThinOverThick only, n_rad_lower x n_ang radial-major
    double k_minus = 0.0;         // ThinOverFast only

    static LimitState two_circles(std::vector<double> gp, std::vector<double> gm);
    static LimitState circle_annulus(std::vector<double> gp, std::vector<double> um);
    static LimitState circle_point(std::vector<double> gp, double k);
};

// Analytic membrane corrector profile sampled on the radial nodes of a grid,
// together with its exact first and second derivatives.  The endpoint slopes
// come from the closed forms, not from differencing.
struct CorrectorProfile {
    Scenario scenario;
    TransmissionParams params;
    std::vector<double> psi, dpsi, d2psi;  // per radial storage row
    double dpsi_membrane_upper = 0.0;      // psi'(1+)
    double dpsi_membrane_lower = 0.0;      // psi'(1-)
    double dpsi_outer_lower = 0.0;         // psi'(l)
    double dpsi_outer_upper = 0.0;         // psi'(2)
};

// Per-layer radial average (TwoThin), radial average over the membrane layer
// only (ThinOverThick), or radial average plus full area average of the lower
// rectangle (ThinOverFast).  Averages use the trapezoid rule radially and the
// periodic rectangle rule angularly.
LimitState project(const Scenario& sc, const LayerField& u);

// Constant-in-varrho extension of a limit state onto the reference grid.
LayerField lift_limit_state(const LimitState& state, const ReferenceGrid& grid);

CorrectorProfile build_corrector(const Scenario& sc, const TransmissionParams& p,
                                 const ReferenceGrid& grid);

// Corrector-adjusted lift of a limit state into the domain of the rescaled
// generator: plain extension minus the thickness-scaled corrector, followed
// by an exact enforcement of the four discrete condition rows (the outer
// Neumann rows and the two membrane rows), which only touches the four
// special radial entries per column.  Pass enforce_rows = false for the
// purely analytic lift (used when measuring operator convergence, where the
// interior rows are compared and the O(h^2) row residuals are irrelevant).
LayerField corrector_lift(const Scenario& sc, const LimitState& state, double thickness,
                          const TransmissionParams& p, const ReferenceGrid& grid,
                          bool enforce_rows = true);

// The scenario's fast operator: pure radial relaxation per layer (TwoThin),
// radial relaxation in the membrane layer with the lower annulus frozen
// (ThinOverThick), or radial relaxation above plus full reflected polar
// diffusion below (ThinOverFast).
DiscreteGenerator assemble_fast_operator(const Scenario& sc, const TransmissionParams& p,
                                         const ReferenceGrid& grid);

struct FastResidualRow {
    double thickness = 0.0;  // membrane-layer width parameter of the sweep
    double residual = 0.0;   // sup over interior rows of scale * C_theta u_theta - Q u
};

// Fast-scale limit check: for each thickness in the (strictly decreasing)
// sequence, lifts the core element u into the rescaled generator's domain and
// measures || scale(theta) C_theta u_theta - Q u ||_inf over interior rows.
// For ThinOverFast the sweep parameter is the membrane-layer width R-1 and
// kappa = gamma / (R-1)^2 varies along the sweep.
std::vector<FastResidualRow> kurtz_fast_residual(ScenarioKind kind, double inner_radius,
                                                 const TransmissionParams& p,
                                                 const ReferenceGrid& grid,
                                                 const LayerField& u,
                                                 const std::vector<double>& thicknesses);

// Lift used by the fast-scale residual (no condition-row enforcement): the
// analytic corrector with per-column amplitudes read off the sampled field.
LayerField fast_scale_lift(const Scenario& sc, const TransmissionParams& p,
                           const LayerField& u);

// Discretization of the three limit generators.  paper_literal switches the
// lumped-state equation of the ThinOverFast limit to the non-conservative
// form with the unnormalized angular integral.
struct LimitGenerator {
    ScenarioKind kind = ScenarioKind::TwoThin;
    TransmissionParams params;
    ReferenceGrid grid;
    bool paper_literal = false;
    std::vector<RadialOperator> mode_ops;  // n = 0..n_ang/2
};

LimitGenerator assemble_limit_generator(const Scenario& sc, const TransmissionParams& p,
                                        const ReferenceGrid& grid, bool paper_literal = false);

// Generator action in physical space; annulus boundary rows carry condition
// residuals as in apply_generator.
LimitState apply_limit_generator(const LimitGenerator& gen, const LimitState& state);

LimitState evolve_limit(const LimitGenerator& gen, const LimitState& state, double t,
                        double dt, TimeScheme scheme = TimeScheme::ImplicitEuler);

// Action of the intermediate operator (diffusion along the circle plus the
// corrector term) on a limit state, sampled on the reference grid with the
// analytic corrector derivatives.  Projecting the result recovers the limit
// generator up to O(h^2).
LayerField apply_intermediate_operator(const Scenario& sc, const TransmissionParams& p,
                                       const ReferenceGrid& grid, const LimitState& state);

}  // namespace thinmem
