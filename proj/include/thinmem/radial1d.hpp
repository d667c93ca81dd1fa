#pragma once

#include <vector>

#include "thinmem/params.hpp"
#include "thinmem/rows.hpp"

namespace thinmem {

// Log-coordinate endpoints of the two-sided interval [a,0-] u [0+,b].
struct TwoSidedInterval {
    double a = -1.0;
    double b = 1.0;
    void validate() const {
        if (!(a < 0.0 && b > 0.0)) throw ParameterError("TwoSidedInterval: need a < 0 < b");
    }
};

// Two-sided 1D grid with a membrane double node separating the blocks.
// Nodes are stored explicitly so that log-images of uniform radial grids
// (which are not uniform) are first-class citizens.
struct RadialGrid1D {
    std::vector<double> lower;  // ascending, last entry = membrane- coordinate
    std::vector<double> upper;  // ascending, first entry = membrane+ coordinate

    static RadialGrid1D uniform(double lo, double mid, double hi, int n_lower, int n_upper);

    int size() const { return static_cast<int>(lower.size() + upper.size()); }
    int n_lower() const { return static_cast<int>(lower.size()); }
    int n_upper() const { return static_cast<int>(upper.size()); }
    bool is_lower(int i) const { return i < n_lower(); }
    double node(int i) const {
        return is_lower(i) ? lower[i] : upper[i - n_lower()];
    }

    // Image of this grid under x = ln(rho); maps a V-grid onto a U-grid.
    RadialGrid1D log_image() const;
};

struct RadialProfile {
    RadialGrid1D grid;
    std::vector<double> values;

    RadialProfile() = default;
    explicit RadialProfile(const RadialGrid1D& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    template <typename F>
    static RadialProfile sample(const RadialGrid1D& g, F&& f) {
        RadialProfile p(g);
        for (int i = 0; i < g.size(); ++i) p.values[i] = f(g.node(i));
        return p;
    }

    // Side-aware sampling for functions with a membrane jump: the two
    // membrane nodes share a coordinate but carry the one-sided limits.
    template <typename F>
    static RadialProfile sample_sided(const RadialGrid1D& g, F&& f) {
        RadialProfile p(g);
        for (int i = 0; i < g.size(); ++i) p.values[i] = f(g.node(i), g.is_lower(i));
        return p;
    }
};

// Exact resolvent of the two-sided second-derivative operator on
// [a,0-] u [0+,b]:  A f = f'' on the upper block and kappa f'' on the lower
// block, with f'(a) = f'(b) = 0 and the membrane conditions
//   f'(0+) = alpha [f(0+) - f(0-)],   f'(0-) = beta [f(0+) - f(0-)].
// Returns f with lambda f - A f = g.  The smoothing integrals
//   h(x) = (1/(2 sqrt(lambda D))) Int e^{-sqrt(lambda/D)|x-y|} g(y) dy
// are computed by product integration: the kernel is kept exact and g is
// replaced cell-by-cell by its local cubic interpolant, so the quadrature
// error is fourth order in the sample spacing.  g must carry at least four
// nodes per block.
RadialProfile resolvent_closed_form(double lambda, const RadialProfile& g,
                                    const TransmissionParams& p);

// Main determinant of the 2x2 system fixing the two free constants of the
// resolvent representation; strictly positive for lambda > 0.
double transmission_determinant(double lambda, const TransmissionParams& p,
                                const TwoSidedInterval& iv);

// Pointwise action of the radial operator rho^2 f'' + rho f' (kappa-scaled on
// the lower block) on a V-coordinate profile, by centered second-order
// stencils on the interior.  The four boundary/membrane entries of the result
// carry the condition residuals (zero for admissible f).  Throws
// PreconditionError when a condition residual exceeds tau_bc; pass a larger
// tau_bc for profiles sampled from analytic formulas, whose one-sided
// difference residuals are O(h^2) rather than zero.
std::vector<double> log_conjugate_apply(const RadialProfile& f, const TransmissionParams& p,
                                        double tau_bc = -1.0);

// Row-form discretization of the same operator on a uniform-per-block V-grid:
// interior rows kappa_layer (rho^2 D2 + rho D1), outer Neumann rows, membrane
// transmission rows, all with second-order one-sided differences.
RadialOperator assemble_log_conjugate(const RadialGrid1D& vgrid, const TransmissionParams& p);

// Discrete resolvent of the row-form operator above (banded elimination).
RadialProfile log_conjugate_resolvent(double lambda, const RadialProfile& g,
                                      const TransmissionParams& p);

// State over [r,1-] u {1+}: an annulus radial profile plus the value at the
// isolated circle point.
struct CirclePointProfile {
    std::vector<double> lower_nodes;   // ascending, last = 1 (the 1- node)
    std::vector<double> lower_values;
    double point_value = 0.0;
};

// Resolvent of the circle+point generator:  A f = kappa (rho^2 f'' + rho f')
// on [r,1-] with f'(r) = 0, f'(1-) = beta [f(1+) - f(1-)], and at the point
// A f(1+) = -alpha f(1+) + alpha f(1-).  For alpha = 0 the solution is closed
// form (solved in log coordinates); for alpha > 0 the point coupling is a
// bounded perturbation handled by iterated closed-form solves when
// lambda > 2 alpha and by a direct banded solve of the discretized system
// otherwise.
CirclePointProfile circle_point_resolvent(double lambda, const CirclePointProfile& g,
                                          const TransmissionParams& p);

}  // namespace thinmem
