#include "thinmem/generator.hpp"

#include <cmath>

namespace thinmem {

namespace {

// The reference grid layout depends only on the scenario kind and the fixed
// inner radius; the thickness parameter may sweep over one common grid.
void check_grid_scenario(const Scenario& sc, const ReferenceGrid& grid) {
    if (grid.scenario.kind != sc.kind || grid.lower_left() != sc.lower_left())
        throw MismatchError("assemble_generator: grid was built for a different scenario");
}

RadialOperator build_radial_rows(const ReferenceGrid& grid, const std::vector<double>& A,
                                 const std::vector<double>& B, const std::vector<double>& C,
                                 double sigma, double s_lower, double s_upper,
                                 bool lower_conditions, bool upper_conditions) {
    const int m = grid.n_rad_lower, n = grid.rows();
    const double hl = grid.h_lower(), hu = grid.h_upper();
    RadialOperator op;
    op.rows.resize(n);

    auto interior = [&](int i, double h) {
        op.rows[i] = {RowKind::Interior, i - 1,
                      {A[i] / (h * h) - B[i] / (2 * h),
                       -2 * A[i] / (h * h) - sigma * C[i],
                       A[i] / (h * h) + B[i] / (2 * h), 0.0, 0.0}};
    };
    for (int i = 1; i + 1 < m; ++i) interior(i, hl);
    for (int i = m + 1; i + 1 < n; ++i) interior(i, hu);

    if (lower_conditions) {
        op.rows[0] = {RowKind::Condition, 0,
                      {-3 / (2 * hl), 4 / (2 * hl), -1 / (2 * hl), 0.0, 0.0}};
        op.rows[m - 1] = {RowKind::Condition, m - 4,
                          {0.0, 1 / (2 * hl), -4 / (2 * hl), 3 / (2 * hl) + s_lower,
                           -s_lower}};
    } else {
        op.rows[0] = {RowKind::Interior, 0, {0, 0, 0, 0, 0}};
        op.rows[m - 1] = {RowKind::Interior, m - 4, {0, 0, 0, 0, 0}};
    }
    if (upper_conditions) {
        op.rows[m] = {RowKind::Condition, m - 1,
                      {s_upper, -3 / (2 * hu) - s_upper, 4 / (2 * hu), -1 / (2 * hu), 0.0}};
        op.rows[n - 1] = {RowKind::Condition, n - 3,
                          {1 / (2 * hu), -4 / (2 * hu), 3 / (2 * hu), 0.0, 0.0}};
    } else {
        op.rows[m] = {RowKind::Interior, m - 1, {0, 0, 0, 0, 0}};
        op.rows[n - 1] = {RowKind::Interior, n - 3, {0, 0, 0, 0, 0}};
    }
    return op;
}

}  // namespace

DiscreteGenerator assemble_generator(const Scenario& sc, Flavor flavor,
                                     const TransmissionParams& p, const ReferenceGrid& grid) {
    p.validate();
    check_grid_scenario(sc, grid);
    if (flavor == Flavor::RescaledTwoThin && sc.kind != ScenarioKind::TwoThin)
        throw ParameterError("assemble_generator: RescaledTwoThin needs a TwoThin scenario");
    if (flavor == Flavor::RescaledThinOverThick && sc.kind != ScenarioKind::ThinOverThick)
        throw ParameterError(
            "assemble_generator: RescaledThinOverThick needs a ThinOverThick scenario");
    if (flavor == Flavor::RescaledThinOverFast && sc.kind != ScenarioKind::ThinOverFast)
        throw ParameterError(
            "assemble_generator: RescaledThinOverFast needs a ThinOverFast scenario");
    if (sc.kind == ScenarioKind::ThinOverFast && flavor != Flavor::FastScale &&
        p.kappa != sc.thickness)
        throw ParameterError(
            "assemble_generator: ThinOverFast requires params.kappa == scenario.thickness");

    DiscreteGenerator gen;
    gen.scenario = sc;
    gen.flavor = flavor;
    gen.params = p;
    gen.grid = grid;

    const int m = grid.n_rad_lower, n = grid.rows();
    const double sl = radial_map_slope(sc, p.gamma, Side::Lower);
    const double su = radial_map_slope(sc, p.gamma, Side::Upper);
    const double theta = sc.thickness;
    gen.A.assign(n, 0.0);
    gen.B.assign(n, 0.0);
    gen.C.assign(n, 0.0);

    if (flavor == Flavor::FastScale) {
        switch (sc.kind) {
            case ScenarioKind::TwoThin:
                for (int i = 0; i < m; ++i) gen.A[i] = p.kappa;
                for (int i = m; i < n; ++i) gen.A[i] = 1.0 / (p.gamma * p.gamma);
                gen.lower_conditions = gen.upper_conditions = true;
                break;
            case ScenarioKind::ThinOverThick:
                // Radial relaxation in the membrane layer only; the lower
                // annulus is frozen (zero rows, no boundary conditions).
                for (int i = m; i < n; ++i) gen.A[i] = 1.0;
                gen.lower_conditions = false;
                gen.upper_conditions = true;
                break;
            case ScenarioKind::ThinOverFast:
                for (int i = 0; i < m; ++i) {
                    const double rho = grid.node(i);
                    gen.A[i] = 1.0;
                    gen.B[i] = 1.0 / rho;
                    gen.C[i] = 1.0 / (rho * rho);
                }
                for (int i = m; i < n; ++i) gen.A[i] = 1.0 / p.gamma;
                gen.lower_conditions = gen.upper_conditions = true;
                break;
        }
        gen.s_lower = gen.s_upper = 0.0;
    } else {
        for (int i = 0; i < n; ++i) {
            const Side side = grid.side_of_row(i);
            const double s = side == Side::Lower ? sl : su;
            const double d = side == Side::Lower ? p.kappa : 1.0;
            const double rho = physical_radius(sc, p.gamma, grid.node(i), side);
            gen.A[i] = d / (s * s);
            gen.B[i] = d / (s * rho);
            gen.C[i] = d / (rho * rho);
        }
        switch (flavor) {
            case Flavor::Physical:
                gen.s_upper = su * p.alpha;
                gen.s_lower = sl * p.beta;
                break;
            case Flavor::RescaledTwoThin:
                gen.s_upper = theta * theta * p.alpha * p.gamma;
                gen.s_lower = theta * theta * p.beta;
                break;
            case Flavor::RescaledThinOverThick:
                gen.s_upper = theta * theta * p.alpha;
                gen.s_lower = p.beta;
                break;
            case Flavor::RescaledThinOverFast:
                gen.s_upper = p.alpha * p.gamma / theta;
                gen.s_lower = p.beta / theta;
                break;
            case Flavor::FastScale:
                break;
        }
    }

    gen.radial_op = build_radial_rows(grid, gen.A, gen.B, gen.C, 0.0, gen.s_lower,
                                      gen.s_upper, gen.lower_conditions, gen.upper_conditions);
    const int n_modes = grid.n_ang / 2 + 1;
    gen.modes.resize(n_modes);
    const double h_ang = grid.h_ang();
    for (int k = 0; k < n_modes; ++k) {
        const double sigma = (2.0 - 2.0 * std::cos(k * h_ang)) / (h_ang * h_ang);
        gen.modes[k].mode_n = k;
        gen.modes[k].sigma = sigma;
        gen.modes[k].op = build_radial_rows(grid, gen.A, gen.B, gen.C, sigma, gen.s_lower,
                                            gen.s_upper, gen.lower_conditions,
                                            gen.upper_conditions);
    }
    return gen;
}

LayerField apply_generator(const DiscreteGenerator& gen, const LayerField& u,
                           const ApplyOptions& opt) {
    if (!u.grid.same_layout(gen.grid)) throw MismatchError("apply_generator: grid mismatch");
    const ReferenceGrid& g = gen.grid;
    const int n = g.rows(), M = g.n_ang;
    const double hphi2 = g.h_ang() * g.h_ang();

    LayerField out(g);
    std::vector<double> column(n);
    double worst_residual = 0.0;
    for (int j = 0; j < M; ++j) {
        for (int i = 0; i < n; ++i) column[i] = u.at(i, j);
        for (int i = 0; i < n; ++i) {
            const double radial = gen.radial_op.apply_row(i, column);
            if (gen.radial_op.rows[i].kind == RowKind::Condition) {
                out.at(i, j) = radial;
                worst_residual = std::max(worst_residual, std::abs(radial));
            } else {
                const double ang =
                    (u.at_wrap(i, j - 1) - 2 * u.at(i, j) + u.at_wrap(i, j + 1)) / hphi2;
                out.at(i, j) = radial + gen.C[i] * ang;
            }
        }
    }
    if (!opt.raw) {
        const double tau = opt.tau_bc >= 0.0 ? opt.tau_bc : 1e-8 * sup_norm(u.values);
        if (worst_residual > tau)
            throw PreconditionError("apply_generator: condition residual " +
                                    std::to_string(worst_residual) +
                                    " exceeds tolerance (use raw mode or pass tau_bc)");
    }
    return out;
}

ModeCoefficients mode_transform(const LayerField& u) {
    const ReferenceGrid& g = u.grid;
    const int n = g.rows(), M = g.n_ang, K = M / 2 + 1;
    ModeCoefficients mc;
    mc.n_ang = M;
    mc.cos_part.assign(K, std::vector<double>(n, 0.0));
    mc.sin_part.assign(K, std::vector<double>(n, 0.0));
    for (int k = 0; k < K; ++k) {
        const double norm = (k == 0 || k == M / 2) ? 1.0 / M : 2.0 / M;
        for (int j = 0; j < M; ++j) {
            const double ang = g.angle(j) * k;
            const double ck = std::cos(ang) * norm, sk = std::sin(ang) * norm;
            for (int i = 0; i < n; ++i) {
                mc.cos_part[k][i] += ck * u.at(i, j);
                if (k != 0 && k != M / 2) mc.sin_part[k][i] += sk * u.at(i, j);
            }
        }
    }
    return mc;
}

LayerField mode_inverse(const ModeCoefficients& mc, const ReferenceGrid& grid) {
    if (mc.n_ang != grid.n_ang) throw MismatchError("mode_inverse: angular count mismatch");
    const int n = grid.rows(), M = grid.n_ang, K = M / 2 + 1;
    LayerField u(grid);
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < M; ++j) {
            const double ang = grid.angle(j) * k;
            const double ck = std::cos(ang), sk = std::sin(ang);
            for (int i = 0; i < n; ++i) {
                double v = mc.cos_part[k][i] * ck;
                if (k != 0 && k != M / 2) v += mc.sin_part[k][i] * sk;
                u.at(i, j) += v;
            }
        }
    }
    return u;
}

}  // namespace thinmem
