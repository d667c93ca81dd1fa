#pragma once

#include <vector>

#include "thinmem/grid.hpp"
#include "thinmem/rows.hpp"

namespace thinmem {

// Which member of the operator family a DiscreteGenerator realizes.  All
// flavors share the same interior stencils (the polar operator pulled back to
// the reference rectangles through the scenario's radial map); they differ
// only in the scale applied to the membrane transmission rows.  FastScale is
// the scenario's underlying fast operator (pure radial relaxation; full polar
// diffusion on the lower annulus for ThinOverFast).
enum class Flavor {
    Physical,
    RescaledTwoThin,
    RescaledThinOverThick,
    RescaledThinOverFast,
    FastScale,
};

// Per-angular-wavenumber radial system: two tridiagonal blocks coupled by two
// transmission rows, plus two outer Neumann rows.  sigma is the discrete
// symbol of the periodic angular second difference, (2 - 2 cos(n h)) / h^2;
// using the stencil symbol rather than n^2 makes the mode decomposition an
// exact block-diagonalization of the 2D stencils.
struct ModeSystem {
    int mode_n = 0;
    double sigma = 0.0;
    RadialOperator op;
};

struct DiscreteGenerator {
    Scenario scenario;
    Flavor flavor = Flavor::Physical;
    TransmissionParams params;
    ReferenceGrid grid;

    // Interior coefficients per radial row: value = A d2 + B d1 + C dphi2.
    std::vector<double> A, B, C;
    double s_lower = 0.0, s_upper = 0.0;  // transmission row scales
    bool lower_conditions = true, upper_conditions = true;

    RadialOperator radial_op;        // mode-0 system (sigma = 0)
    std::vector<ModeSystem> modes;   // n = 0 .. n_ang/2

    const ModeSystem& mode(int n) const { return modes[n]; }
    int n_modes() const { return static_cast<int>(modes.size()); }
};

DiscreteGenerator assemble_generator(const Scenario& sc, Flavor flavor,
                                     const TransmissionParams& p, const ReferenceGrid& grid);

struct ApplyOptions {
    bool raw = false;       // skip the admissibility check
    double tau_bc = -1.0;   // <0: default 1e-8 * sup|u|
};

// Discrete generator action.  Interior rows carry the stencil value; membrane
// and outer rows carry the condition residuals (zero for admissible fields).
LayerField apply_generator(const DiscreteGenerator& gen, const LayerField& u,
                           const ApplyOptions& opt = {});

// Real angular DFT of a field: cosine/sine radial coefficient vectors per
// wavenumber n = 0..n_ang/2 (sine channels empty at n = 0 and Nyquist).
struct ModeCoefficients {
    int n_ang = 0;
    std::vector<std::vector<double>> cos_part, sin_part;
};

ModeCoefficients mode_transform(const LayerField& u);
LayerField mode_inverse(const ModeCoefficients& mc, const ReferenceGrid& grid);

}  // namespace thinmem
