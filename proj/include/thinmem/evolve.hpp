#pragma once

#include <array>

#include "thinmem/generator.hpp"

namespace thinmem {

// Implicit Euler is the default: it inherits the resolvent's positivity and
// contraction exactly.  Crank-Nicolson is second order and used for accuracy
// studies; it is excluded from the positivity guarantees.
enum class TimeScheme { ImplicitEuler, CrankNicolson };

// One factorized time step of a single per-mode system.  Condition rows are
// enforced algebraically at the new time level.
class ModeStepper {
  public:
    ModeStepper(const RadialOperator& op, double dt, TimeScheme scheme);
    void step(std::vector<double>& x) const;

  private:
    const RadialOperator* op_;
    TimeScheme scheme_;
    double dt_;
    BandedMatrix fact_;
};

// Generic driver shared by the 2D generators and the limit generators: steps
// one coefficient vector to time t with final-step snapping.
void evolve_coefficients(const RadialOperator& op, std::vector<double>& x, double t,
                         double dt, TimeScheme scheme);

// Solves (lambda - L) f = g mode by mode with banded elimination and asserts
// the residual.
LayerField resolvent_solve(const DiscreteGenerator& gen, double lambda, const LayerField& g);

// Implicit time stepping u_{k+1} = (I - dt L)^{-1} u_k (or the Crank-Nicolson
// variant), with a final partial step landing exactly on t.
LayerField evolve(const DiscreteGenerator& gen, const LayerField& u0, double t, double dt,
                  TimeScheme scheme = TimeScheme::ImplicitEuler);

// Closed-form exponential of [[-a, a], [b, -b]] applied to (v_upper, v_lower).
std::array<double, 2> matrix_exponential_2x2(double a, double b, double t,
                                             const std::array<double, 2>& v0);

struct StepOrderResult {
    double order = 0.0;
    bool exact = false;   // all differences at solver-noise level
    double err_coarse = 0.0, err_fine = 0.0;
};

// Richardson triple dt, dt/2, dt/4; implicit Euler is expected near order 1.
StepOrderResult step_order_check(const DiscreteGenerator& gen, const LayerField& u0,
                                 double t, double dt,
                                 TimeScheme scheme = TimeScheme::ImplicitEuler);

}  // namespace thinmem
