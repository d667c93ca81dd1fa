#include "thinmem/evolve.hpp"

#include <cmath>

namespace thinmem {

ModeStepper::ModeStepper(const RadialOperator& op, double dt, TimeScheme scheme)
    : op_(&op), scheme_(scheme), dt_(dt),
      fact_(make_shifted_system(op, 1.0, scheme == TimeScheme::ImplicitEuler ? dt : dt / 2)) {
    fact_.factorize();
}

void ModeStepper::step(std::vector<double>& x) const {
    const int n = op_->size();
    std::vector<double> rhs(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (op_->rows[i].kind != RowKind::Interior) continue;
        rhs[i] = x[i];
        if (scheme_ == TimeScheme::CrankNicolson) rhs[i] += 0.5 * dt_ * op_->apply_row(i, x);
    }
    fact_.solve(rhs);
    x.swap(rhs);
}

void evolve_coefficients(const RadialOperator& op, std::vector<double>& x, double t,
                         double dt, TimeScheme scheme) {
    if (t == 0.0) return;
    const long long n_full = static_cast<long long>(std::floor(t / dt + 1e-12));
    const double rem = t - n_full * dt;
    if (n_full > 0) {
        ModeStepper stepper(op, dt, scheme);
        for (long long k = 0; k < n_full; ++k) stepper.step(x);
    }
    if (rem > 1e-12 * t) {
        ModeStepper last(op, rem, scheme);
        last.step(x);
    }
}

LayerField resolvent_solve(const DiscreteGenerator& gen, double lambda, const LayerField& g) {
    if (!(lambda > 0.0)) throw ParameterError("resolvent_solve: lambda must be > 0");
    if (!g.grid.same_layout(gen.grid)) throw MismatchError("resolvent_solve: grid mismatch");
    ModeCoefficients mc = mode_transform(g);
    const double scale = std::max(1.0, sup_norm(g.values));
    for (int k = 0; k < gen.n_modes(); ++k) {
        const RadialOperator& op = gen.mode(k).op;
        std::vector<std::vector<double>*> channels = {&mc.cos_part[k]};
        if (k != 0 && k != gen.grid.n_ang / 2) channels.push_back(&mc.sin_part[k]);
        for (auto* chan : channels) {
            std::vector<double> rhs = *chan;
            std::vector<double> sol = solve_shifted(op, lambda, rhs);
            // residual check on interior rows
            for (int i = 0; i < op.size(); ++i) {
                if (op.rows[i].kind != RowKind::Interior) continue;
                const double r = lambda * sol[i] - op.apply_row(i, sol) - rhs[i];
                if (std::abs(r) > 1e-9 * scale)
                    throw InternalError("resolvent_solve: residual too large");
            }
            *chan = sol;
        }
    }
    return mode_inverse(mc, gen.grid);
}

LayerField evolve(const DiscreteGenerator& gen, const LayerField& u0, double t, double dt,
                  TimeScheme scheme) {
    if (t < 0.0) throw ParameterError("evolve: t must be >= 0");
    if (!(dt > 0.0)) throw ParameterError("evolve: dt must be > 0");
    if (t > 0.0 && dt > t * (1 + 1e-12)) throw ParameterError("evolve: need dt <= t");
    if (!u0.grid.same_layout(gen.grid)) throw MismatchError("evolve: grid mismatch");
    if (t == 0.0) return u0;

    ModeCoefficients mc = mode_transform(u0);
    for (int k = 0; k < gen.n_modes(); ++k) {
        const RadialOperator& op = gen.mode(k).op;
        evolve_coefficients(op, mc.cos_part[k], t, dt, scheme);
        if (k != 0 && k != gen.grid.n_ang / 2)
            evolve_coefficients(op, mc.sin_part[k], t, dt, scheme);
    }
    return mode_inverse(mc, gen.grid);
}

std::array<double, 2> matrix_exponential_2x2(double a, double b, double t,
                                             const std::array<double, 2>& v0) {
    if (a < 0.0 || b < 0.0) throw ParameterError("matrix_exponential_2x2: rates must be >= 0");
    const double s = a + b;
    if (s == 0.0) return v0;
    const double stat = (b * v0[0] + a * v0[1]) / s;
    const double decay = std::exp(-s * t);
    return {stat + decay * (v0[0] - stat), stat + decay * (v0[1] - stat)};
}

StepOrderResult step_order_check(const DiscreteGenerator& gen, const LayerField& u0,
                                 double t, double dt, TimeScheme scheme) {
    LayerField u1 = evolve(gen, u0, t, dt, scheme);
    LayerField u2 = evolve(gen, u0, t, dt / 2, scheme);
    LayerField u4 = evolve(gen, u0, t, dt / 4, scheme);
    StepOrderResult r;
    r.err_coarse = sup_diff(u1.values, u2.values);
    r.err_fine = sup_diff(u2.values, u4.values);
    if (r.err_coarse <= 1e-10 && r.err_fine <= 1e-10) {
        r.exact = true;
        return r;
    }
    r.order = std::log2(r.err_coarse / r.err_fine);
    return r;
}

}  // namespace thinmem
