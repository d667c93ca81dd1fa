#include "thinmem/limit.hpp"

#include <cmath>

namespace thinmem {

namespace {

void check_field(const Scenario& sc, const LayerField& u) {
    if (u.grid.scenario.kind != sc.kind || u.grid.lower_left() != sc.lower_left())
        throw MismatchError("limit: field grid does not match scenario");
}

std::vector<double> radial_trapezoid_weights(int n, double h) {
    std::vector<double> w(n, h);
    w.front() = h / 2;
    w.back() = h / 2;
    return w;
}

// ---- corrector closed forms ----------------------------------------------

struct CorrectorShape {
    double value, d1, d2;
};

// (amp/pi) (2 - rho) sin(pi rho) on [1,2]: vanishes at both ends, slope -amp
// at the membrane, zero slope at 2.
CorrectorShape upper_bump(double amp, double rho) {
    const double s = std::sin(M_PI * rho), c = std::cos(M_PI * rho);
    CorrectorShape out;
    out.value = amp / M_PI * (2 - rho) * s;
    out.d1 = amp / M_PI * (-s + (2 - rho) * M_PI * c);
    out.d2 = amp / M_PI * (-2 * M_PI * c - (2 - rho) * M_PI * M_PI * s);
    return out;
}

// (amp/pi) rho sin(pi rho) on [0,1]: zero slope at 0, slope -amp at the
// membrane.
CorrectorShape lower_bump_unit(double amp, double rho) {
    const double s = std::sin(M_PI * rho), c = std::cos(M_PI * rho);
    CorrectorShape out;
    out.value = amp / M_PI * rho * s;
    out.d1 = amp / M_PI * (s + rho * M_PI * c);
    out.d2 = amp / M_PI * (2 * M_PI * c - rho * M_PI * M_PI * s);
    return out;
}

// amp (rho - r) sin(pi (rho-r)/w) / pi on [r,1], w = 1-r: membrane slope
// -amp; multiplying amp by w gives the displayed ThinOverFast profile, whose
// membrane slope is -beta(1-r) rather than -beta.
CorrectorShape lower_bump_annulus(double amp, double rho, double r) {
    const double w = 1.0 - r, tau = (rho - r) / w;
    const double s = std::sin(M_PI * tau), c = std::cos(M_PI * tau);
    CorrectorShape out;
    out.value = amp / M_PI * (rho - r) * s;
    out.d1 = amp / M_PI * s + amp * (rho - r) / w * c;
    out.d2 = 2 * amp / w * c - amp * M_PI * (rho - r) / (w * w) * s;
    return out;
}

CorrectorShape corrector_shape(const Scenario& sc, const TransmissionParams& p, double rho,
                               Side side, bool normalize_lower_slope) {
    switch (sc.kind) {
        case ScenarioKind::TwoThin:
            return side == Side::Upper ? upper_bump(p.alpha * p.gamma, rho)
                                       : lower_bump_unit(p.beta, rho);
        case ScenarioKind::ThinOverThick:
            if (side == Side::Upper) return upper_bump(p.alpha, rho);
            return {0.0, 0.0, 0.0};
        case ScenarioKind::ThinOverFast: {
            if (side == Side::Upper) return upper_bump(p.alpha * p.gamma, rho);
            const double r = sc.fixed_inner_radius;
            const double amp = normalize_lower_slope ? p.beta : p.beta * (1.0 - r);
            return lower_bump_annulus(amp, rho, r);
        }
    }
    return {0.0, 0.0, 0.0};
}

// Boundary-layer profile for the frozen lower annulus of ThinOverThick:
// zeta(rho) = eps * eta((1-rho)/eps) * cutoff(rho) with eta(s) = -s e^{-s},
// eps = sqrt(R-1).  Vanishes at the membrane with unit slope there, vanishes
// identically near rho = r, and its sup norm is O(eps).
double boundary_layer_zeta(double rho, double r, double eps) {
    const double w = 1.0 - r;
    const double lo = r + 0.2 * w, hi = r + 0.6 * w;
    double cut;
    if (rho <= lo) {
        cut = 0.0;
    } else if (rho >= hi) {
        cut = 1.0;
    } else {
        const double t = (rho - lo) / (hi - lo);
        cut = t * t * t * (10 + t * (-15 + 6 * t));  // C^2 smoothstep
    }
    const double s = (1.0 - rho) / eps;
    return eps * (-s * std::exp(-s)) * cut;
}

// Enforces the four discrete condition rows of a rescaled generator on a
// lifted field, column by column.  Only the outer values and the two membrane
// values change; the corrections are O(h^2) times the corrector amplitude.
void enforce_condition_rows(LayerField& w, double s_lower, double s_upper) {
    const ReferenceGrid& g = w.grid;
    const int m = g.n_rad_lower, n = g.rows();
    const double hl = g.h_lower(), hu = g.h_upper();
    for (int j = 0; j < g.n_ang; ++j) {
        w.at(0, j) = (4 * w.at(1, j) - w.at(2, j)) / 3.0;
        w.at(n - 1, j) = (4 * w.at(n - 2, j) - w.at(n - 3, j)) / 3.0;
        const double a11 = 3 / (2 * hl) + s_lower, a12 = -s_lower;
        const double a21 = s_upper, a22 = -(3 / (2 * hu) + s_upper);
        const double r1 = -(w.at(m - 3, j) - 4 * w.at(m - 2, j)) / (2 * hl);
        const double r2 = -(4 * w.at(m + 1, j) - w.at(m + 2, j)) / (2 * hu);
        const double det = a11 * a22 - a12 * a21;
        w.at(m - 1, j) = (r1 * a22 - a12 * r2) / det;
        w.at(m, j) = (a11 * r2 - a21 * r1) / det;
    }
}

double transmission_scale(const Scenario& sc, const TransmissionParams& p, Side side) {
    const double th = sc.thickness;
    switch (sc.kind) {
        case ScenarioKind::TwoThin:
            return side == Side::Upper ? th * th * p.alpha * p.gamma : th * th * p.beta;
        case ScenarioKind::ThinOverThick:
            return side == Side::Upper ? th * th * p.alpha : p.beta;
        case ScenarioKind::ThinOverFast:
            return side == Side::Upper ? p.alpha * p.gamma / th : p.beta / th;
    }
    return 0.0;
}

double corrector_amplitude(const Scenario& sc) {
    // Size of the corrector term in the domain lift: theta^2 for the two
    // thin-layer scenarios, kappa^{-1} for ThinOverFast.
    return sc.kind == ScenarioKind::ThinOverFast ? 1.0 / sc.thickness
                                                 : sc.thickness * sc.thickness;
}

Flavor rescaled_flavor(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::TwoThin: return Flavor::RescaledTwoThin;
        case ScenarioKind::ThinOverThick: return Flavor::RescaledThinOverThick;
        case ScenarioKind::ThinOverFast: return Flavor::RescaledThinOverFast;
    }
    return Flavor::RescaledTwoThin;
}

// ---- small circle DFT helpers (used by the limit evolutions) --------------

void circle_dft(const std::vector<double>& g, std::vector<double>& a,
                std::vector<double>& b) {
    const int M = static_cast<int>(g.size()), K = M / 2 + 1;
    a.assign(K, 0.0);
    b.assign(K, 0.0);
    for (int k = 0; k < K; ++k) {
        const double norm = (k == 0 || k == M / 2) ? 1.0 / M : 2.0 / M;
        for (int j = 0; j < M; ++j) {
            const double ang = 2.0 * M_PI * k * j / M;
            a[k] += norm * std::cos(ang) * g[j];
            if (k != 0 && k != M / 2) b[k] += norm * std::sin(ang) * g[j];
        }
    }
}

std::vector<double> circle_idft(const std::vector<double>& a, const std::vector<double>& b,
                                int M) {
    std::vector<double> g(M, 0.0);
    const int K = M / 2 + 1;
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < M; ++j) {
            const double ang = 2.0 * M_PI * k * j / M;
            g[j] += a[k] * std::cos(ang);
            if (k != 0 && k != M / 2) g[j] += b[k] * std::sin(ang);
        }
    return g;
}

}  // namespace

// ---- LimitState ------------------------------------------------------------

LimitState LimitState::two_circles(std::vector<double> gp, std::vector<double> gm) {
    if (gp.size() != gm.size()) throw MismatchError("LimitState: circle sizes differ");
    LimitState s;
    s.scenario = ScenarioKind::TwoThin;
    s.g_plus = std::move(gp);
    s.g_minus = std::move(gm);
    return s;
}

LimitState LimitState::circle_annulus(std::vector<double> gp, std::vector<double> um) {
    LimitState s;
    s.scenario = ScenarioKind::ThinOverThick;
    s.g_plus = std::move(gp);
    s.u_minus = std::move(um);
    if (s.u_minus.size() % s.g_plus.size() != 0)
        throw MismatchError("LimitState: annulus block is not a multiple of n_ang");
    return s;
}

LimitState LimitState::circle_point(std::vector<double> gp, double k) {
    LimitState s;
    s.scenario = ScenarioKind::ThinOverFast;
    s.g_plus = std::move(gp);
    s.k_minus = k;
    return s;
}

// ---- project / lift --------------------------------------------------------

LimitState project(const Scenario& sc, const LayerField& u) {
    check_field(sc, u);
    const ReferenceGrid& g = u.grid;
    const int m = g.n_rad_lower, n = g.rows(), M = g.n_ang;
    const auto wl = radial_trapezoid_weights(m, g.h_lower());
    const auto wu = radial_trapezoid_weights(n - m, g.h_upper());

    std::vector<double> gp(M, 0.0);
    for (int j = 0; j < M; ++j)
        for (int i = m; i < n; ++i) gp[j] += wu[i - m] * u.at(i, j);
    // The upper reference layer always has width 1, so the integral is the
    // average.

    switch (sc.kind) {
        case ScenarioKind::TwoThin: {
            std::vector<double> gm(M, 0.0);
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < m; ++i) gm[j] += wl[i] * u.at(i, j);
            return LimitState::two_circles(std::move(gp), std::move(gm));
        }
        case ScenarioKind::ThinOverThick: {
            std::vector<double> um(static_cast<std::size_t>(m) * M);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < M; ++j) um[static_cast<std::size_t>(i) * M + j] = u.at(i, j);
            return LimitState::circle_annulus(std::move(gp), std::move(um));
        }
        case ScenarioKind::ThinOverFast: {
            const double width = 1.0 - sc.fixed_inner_radius;
            double k = 0.0;
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < m; ++i) k += wl[i] * u.at(i, j);
            k /= (width * M);
            return LimitState::circle_point(std::move(gp), k);
        }
    }
    throw InternalError("project: unreachable");
}

LayerField lift_limit_state(const LimitState& state, const ReferenceGrid& grid) {
    if (state.scenario != grid.scenario.kind)
        throw MismatchError("lift_limit_state: scenario mismatch");
    const int m = grid.n_rad_lower, n = grid.rows(), M = grid.n_ang;
    if (static_cast<int>(state.g_plus.size()) != M)
        throw MismatchError("lift_limit_state: circle function size != n_ang");
    LayerField u(grid);
    for (int i = m; i < n; ++i)
        for (int j = 0; j < M; ++j) u.at(i, j) = state.g_plus[j];
    switch (state.scenario) {
        case ScenarioKind::TwoThin:
            if (static_cast<int>(state.g_minus.size()) != M)
                throw MismatchError("lift_limit_state: lower circle size != n_ang");
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < M; ++j) u.at(i, j) = state.g_minus[j];
            break;
        case ScenarioKind::ThinOverThick:
            if (static_cast<int>(state.u_minus.size()) != m * M)
                throw MismatchError("lift_limit_state: annulus block size mismatch");
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < M; ++j)
                    u.at(i, j) = state.u_minus[static_cast<std::size_t>(i) * M + j];
            break;
        case ScenarioKind::ThinOverFast:
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < M; ++j) u.at(i, j) = state.k_minus;
            break;
    }
    return u;
}

// ---- correctors ------------------------------------------------------------

CorrectorProfile build_corrector(const Scenario& sc, const TransmissionParams& p,
                                 const ReferenceGrid& grid) {
    p.validate();
    CorrectorProfile c;
    c.scenario = sc;
    c.params = p;
    const int n = grid.rows();
    c.psi.resize(n);
    c.dpsi.resize(n);
    c.d2psi.resize(n);
    for (int i = 0; i < n; ++i) {
        const Side side = grid.side_of_row(i);
        const CorrectorShape s = corrector_shape(sc, p, grid.node(i), side, false);
        c.psi[i] = s.value;
        c.dpsi[i] = s.d1;
        c.d2psi[i] = s.d2;
    }
    c.dpsi_membrane_upper =
        corrector_shape(sc, p, 1.0, Side::Upper, false).d1;
    c.dpsi_membrane_lower =
        corrector_shape(sc, p, 1.0, Side::Lower, false).d1;
    c.dpsi_outer_lower = corrector_shape(sc, p, grid.lower_left(), Side::Lower, false).d1;
    c.dpsi_outer_upper = corrector_shape(sc, p, 2.0, Side::Upper, false).d1;
    return c;
}

LayerField corrector_lift(const Scenario& sc, const LimitState& state, double thickness,
                          const TransmissionParams& p, const ReferenceGrid& grid,
                          bool enforce_rows) {
    if (state.scenario != sc.kind) throw MismatchError("corrector_lift: scenario mismatch");
    Scenario sc2 = sc;
    sc2.thickness = thickness;
    LayerField w = lift_limit_state(state, grid);
    const int m = grid.n_rad_lower, n = grid.rows(), M = grid.n_ang;

    // Membrane jump of the limit state, per angle.
    std::vector<double> jump(M);
    for (int j = 0; j < M; ++j) jump[j] = w.at(m, j) - w.at(m - 1, j);

    const double amp = corrector_amplitude(sc2);
    for (int i = 0; i < n; ++i) {
        const Side side = grid.side_of_row(i);
        if (sc.kind == ScenarioKind::ThinOverThick && side == Side::Lower) continue;
        const CorrectorShape s = corrector_shape(sc2, p, grid.node(i), side, true);
        for (int j = 0; j < M; ++j) w.at(i, j) -= amp * s.value * jump[j];
    }
    if (enforce_rows)
        enforce_condition_rows(w, transmission_scale(sc2, p, Side::Lower),
                               transmission_scale(sc2, p, Side::Upper));
    return w;
}

DiscreteGenerator assemble_fast_operator(const Scenario& sc, const TransmissionParams& p,
                                         const ReferenceGrid& grid) {
    return assemble_generator(sc, Flavor::FastScale, p, grid);
}

LayerField fast_scale_lift(const Scenario& sc, const TransmissionParams& p,
                           const LayerField& u) {
    check_field(sc, u);
    const ReferenceGrid& g = u.grid;
    const int m = g.n_rad_lower, n = g.rows(), M = g.n_ang;
    LayerField w = u;

    std::vector<double> jump(M);
    for (int j = 0; j < M; ++j) jump[j] = u.at(m, j) - u.at(m - 1, j);
    const double amp = corrector_amplitude(sc);

    for (int i = 0; i < n; ++i) {
        const Side side = g.side_of_row(i);
        if (sc.kind == ScenarioKind::ThinOverThick && side == Side::Lower) continue;
        const CorrectorShape s = corrector_shape(sc, p, g.node(i), side, true);
        for (int j = 0; j < M; ++j) w.at(i, j) -= amp * s.value * jump[j];
    }

    if (sc.kind == ScenarioKind::ThinOverThick) {
        // Frozen lower annulus: add the boundary-layer profile that bends the
        // membrane trace slope to beta * jump while leaving values in place.
        const double hl = g.h_lower();
        const double r = sc.fixed_inner_radius;
        const double eps = std::sqrt(sc.thickness);
        std::vector<double> zeta(m);
        for (int i = 0; i < m; ++i) zeta[i] = boundary_layer_zeta(g.node(i), r, eps);
        const double dzeta =
            (3 * zeta[m - 1] - 4 * zeta[m - 2] + zeta[m - 3]) / (2 * hl);
        for (int j = 0; j < M; ++j) {
            const double du =
                (3 * u.at(m - 1, j) - 4 * u.at(m - 2, j) + u.at(m - 3, j)) / (2 * hl);
            const double c = (p.beta * jump[j] - du) / dzeta;
            for (int i = 0; i < m; ++i) w.at(i, j) += c * zeta[i];
        }
    }
    return w;
}

std::vector<FastResidualRow> kurtz_fast_residual(ScenarioKind kind, double inner_radius,
                                                 const TransmissionParams& p,
                                                 const ReferenceGrid& grid,
                                                 const LayerField& u,
                                                 const std::vector<double>& thicknesses) {
    if (thicknesses.empty()) throw ParameterError("kurtz_fast_residual: empty sequence");
    for (std::size_t i = 1; i < thicknesses.size(); ++i)
        if (!(thicknesses[i] < thicknesses[i - 1]))
            throw ParameterError("kurtz_fast_residual: sequence must be strictly decreasing");

    auto scenario_at = [&](double th) {
        switch (kind) {
            case ScenarioKind::TwoThin: return Scenario::two_thin(th);
            case ScenarioKind::ThinOverThick:
                return Scenario::thin_over_thick(th, inner_radius);
            case ScenarioKind::ThinOverFast:
                return Scenario::thin_over_fast(p.gamma / (th * th), inner_radius);
        }
        throw InternalError("kurtz_fast_residual: unreachable");
    };

    // The fast operator does not depend on the sweep parameter.
    DiscreteGenerator fast = assemble_fast_operator(scenario_at(thicknesses.front()), p,
                                                    grid);
    LayerField fast_action = apply_generator(fast, u, {true, -1.0});

    const int m = grid.n_rad_lower, n = grid.rows(), M = grid.n_ang;
    std::vector<FastResidualRow> table;
    for (double th : thicknesses) {
        Scenario sc = scenario_at(th);
        TransmissionParams pth = p;
        if (kind == ScenarioKind::ThinOverFast) pth.kappa = sc.thickness;
        const double scale =
            kind == ScenarioKind::ThinOverFast ? 1.0 / sc.thickness : th * th;
        DiscreteGenerator gen = assemble_generator(sc, rescaled_flavor(kind), pth, grid);
        LayerField lifted = fast_scale_lift(sc, pth, u);
        LayerField action = apply_generator(gen, lifted, {true, -1.0});
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == 0 || i == m - 1 || i == m || i == n - 1) continue;
            for (int j = 0; j < M; ++j)
                res = std::max(res,
                               std::abs(scale * action.at(i, j) - fast_action.at(i, j)));
        }
        table.push_back({th, res});
    }
    return table;
}

// ---- limit generators ------------------------------------------------------

LimitGenerator assemble_limit_generator(const Scenario& sc, const TransmissionParams& p,
                                        const ReferenceGrid& grid, bool paper_literal) {
    p.validate();
    if (grid.scenario.kind != sc.kind || grid.lower_left() != sc.lower_left())
        throw MismatchError("assemble_limit_generator: grid/scenario mismatch");
    LimitGenerator gen;
    gen.kind = sc.kind;
    gen.params = p;
    gen.grid = grid;
    gen.paper_literal = paper_literal;

    const int M = grid.n_ang, K = M / 2 + 1, m = grid.n_rad_lower;
    const double h_ang = grid.h_ang();
    gen.mode_ops.resize(K);
    for (int k = 0; k < K; ++k) {
        const double sigma = (2.0 - 2.0 * std::cos(k * h_ang)) / (h_ang * h_ang);
        RadialOperator& op = gen.mode_ops[k];
        switch (sc.kind) {
            case ScenarioKind::TwoThin: {
                const double a = p.alpha / p.gamma, b = p.kappa * p.beta;
                op.rows.resize(2);
                op.rows[0] = {RowKind::Interior, 0, {-sigma - a, a, 0, 0, 0}};
                op.rows[1] = {RowKind::Interior, 0, {b, -p.kappa * sigma - b, 0, 0, 0}};
                break;
            }
            case ScenarioKind::ThinOverThick: {
                // Layout: [u_0 .. u_{m-1}, g]; the annulus block is the polar
                // operator in physical coordinates with a Robin row at 1-.
                const double h = grid.h_lower();
                op.rows.resize(m + 1);
                for (int i = 1; i + 1 < m; ++i) {
                    const double rho = grid.node(i);
                    const double A = p.kappa, B = p.kappa / rho, C = p.kappa / (rho * rho);
                    op.rows[i] = {RowKind::Interior, i - 1,
                                  {A / (h * h) - B / (2 * h), -2 * A / (h * h) - sigma * C,
                                   A / (h * h) + B / (2 * h), 0, 0}};
                }
                op.rows[0] = {RowKind::Condition, 0,
                              {-3 / (2 * h), 4 / (2 * h), -1 / (2 * h), 0, 0}};
                op.rows[m - 1] = {RowKind::Condition, m - 4,
                                  {0.0, 1 / (2 * h), -4 / (2 * h), 3 / (2 * h) + p.beta,
                                   -p.beta}};
                op.rows[m] = {RowKind::Interior, m - 1, {p.alpha, -sigma - p.alpha, 0, 0, 0}};
                break;
            }
            case ScenarioKind::ThinOverFast: {
                const double c = p.beta / p.gamma;
                if (k == 0) {
                    op.rows.resize(2);
                    op.rows[0] = {RowKind::Interior, 0, {-p.alpha, p.alpha, 0, 0, 0}};
                    if (paper_literal)
                        op.rows[1] = {RowKind::Interior, 0, {2 * M_PI * c, -c, 0, 0, 0}};
                    else
                        op.rows[1] = {RowKind::Interior, 0, {c, -c, 0, 0, 0}};
                } else {
                    op.rows.resize(1);
                    op.rows[0] = {RowKind::Interior, 0, {-sigma - p.alpha, 0, 0, 0, 0}};
                }
                break;
            }
        }
    }
    return gen;
}

LimitState apply_limit_generator(const LimitGenerator& gen, const LimitState& state) {
    if (state.scenario != gen.kind) throw MismatchError("apply_limit_generator: mismatch");
    const int M = gen.grid.n_ang, m = gen.grid.n_rad_lower;
    const double h2 = gen.grid.h_ang() * gen.grid.h_ang();
    const TransmissionParams& p = gen.params;
    auto dphi2 = [&](const std::vector<double>& g, int j) {
        return (g[(j + M - 1) % M] - 2 * g[j] + g[(j + 1) % M]) / h2;
    };

    LimitState out = state;
    switch (gen.kind) {
        case ScenarioKind::TwoThin: {
            const double a = p.alpha / p.gamma, b = p.kappa * p.beta;
            for (int j = 0; j < M; ++j) {
                out.g_plus[j] = dphi2(state.g_plus, j) + a * (state.g_minus[j] - state.g_plus[j]);
                out.g_minus[j] = p.kappa * dphi2(state.g_minus, j) +
                                 b * (state.g_plus[j] - state.g_minus[j]);
            }
            return out;
        }
        case ScenarioKind::ThinOverThick: {
            const double h = gen.grid.h_lower();
            auto um = [&](int i, int j) {
                return state.u_minus[static_cast<std::size_t>(i) * M + j];
            };
            for (int j = 0; j < M; ++j) {
                out.g_plus[j] = dphi2(state.g_plus, j) +
                                p.alpha * (um(m - 1, j) - state.g_plus[j]);
                for (int i = 1; i + 1 < m; ++i) {
                    const double rho = gen.grid.node(i);
                    const double d2 = (um(i - 1, j) - 2 * um(i, j) + um(i + 1, j)) / (h * h);
                    const double d1 = (um(i + 1, j) - um(i - 1, j)) / (2 * h);
                    const double ang =
                        (um(i, (j + M - 1) % M) - 2 * um(i, j) + um(i, (j + 1) % M)) / h2;
                    out.u_minus[static_cast<std::size_t>(i) * M + j] =
                        p.kappa * (d2 + d1 / rho + ang / (rho * rho));
                }
                out.u_minus[j] = (-3 * um(0, j) + 4 * um(1, j) - um(2, j)) / (2 * h);
                const double d1m =
                    (3 * um(m - 1, j) - 4 * um(m - 2, j) + um(m - 3, j)) / (2 * h);
                out.u_minus[static_cast<std::size_t>(m - 1) * M + j] =
                    d1m - p.beta * (state.g_plus[j] - um(m - 1, j));
            }
            return out;
        }
        case ScenarioKind::ThinOverFast: {
            const double c = p.beta / p.gamma;
            double mean = 0.0;
            for (int j = 0; j < M; ++j) mean += state.g_plus[j];
            mean /= M;
            for (int j = 0; j < M; ++j)
                out.g_plus[j] = dphi2(state.g_plus, j) + p.alpha * (state.k_minus - state.g_plus[j]);
            out.k_minus = gen.paper_literal
                              ? c * (2 * M_PI * mean - state.k_minus)
                              : c * (mean - state.k_minus);
            return out;
        }
    }
    throw InternalError("apply_limit_generator: unreachable");
}

LimitState evolve_limit(const LimitGenerator& gen, const LimitState& state, double t,
                        double dt, TimeScheme scheme) {
    if (state.scenario != gen.kind) throw MismatchError("evolve_limit: mismatch");
    if (t < 0.0) throw ParameterError("evolve_limit: t must be >= 0");
    if (!(dt > 0.0)) throw ParameterError("evolve_limit: dt must be > 0");
    if (t == 0.0) return state;
    const int M = gen.grid.n_ang, K = M / 2 + 1, m = gen.grid.n_rad_lower;

    std::vector<double> ap, bp;
    circle_dft(state.g_plus, ap, bp);
    LimitState out = state;

    switch (gen.kind) {
        case ScenarioKind::TwoThin: {
            std::vector<double> am, bm;
            circle_dft(state.g_minus, am, bm);
            for (int k = 0; k < K; ++k) {
                std::vector<double> x = {ap[k], am[k]};
                evolve_coefficients(gen.mode_ops[k], x, t, dt, scheme);
                ap[k] = x[0];
                am[k] = x[1];
                if (k != 0 && k != M / 2) {
                    std::vector<double> y = {bp[k], bm[k]};
                    evolve_coefficients(gen.mode_ops[k], y, t, dt, scheme);
                    bp[k] = y[0];
                    bm[k] = y[1];
                }
            }
            out.g_plus = circle_idft(ap, bp, M);
            out.g_minus = circle_idft(am, bm, M);
            return out;
        }
        case ScenarioKind::ThinOverThick: {
            // Mode-transform the annulus block column by column.
            std::vector<std::vector<double>> ua(K, std::vector<double>(m)),
                ub(K, std::vector<double>(m));
            std::vector<double> ga(M), acol, bcol;
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < M; ++j)
                    ga[j] = state.u_minus[static_cast<std::size_t>(i) * M + j];
                circle_dft(ga, acol, bcol);
                for (int k = 0; k < K; ++k) {
                    ua[k][i] = acol[k];
                    ub[k][i] = bcol[k];
                }
            }
            for (int k = 0; k < K; ++k) {
                std::vector<double> x(m + 1);
                for (int i = 0; i < m; ++i) x[i] = ua[k][i];
                x[m] = ap[k];
                evolve_coefficients(gen.mode_ops[k], x, t, dt, scheme);
                for (int i = 0; i < m; ++i) ua[k][i] = x[i];
                ap[k] = x[m];
                if (k != 0 && k != M / 2) {
                    for (int i = 0; i < m; ++i) x[i] = ub[k][i];
                    x[m] = bp[k];
                    evolve_coefficients(gen.mode_ops[k], x, t, dt, scheme);
                    for (int i = 0; i < m; ++i) ub[k][i] = x[i];
                    bp[k] = x[m];
                }
            }
            out.g_plus = circle_idft(ap, bp, M);
            for (int i = 0; i < m; ++i) {
                acol.assign(K, 0.0);
                bcol.assign(K, 0.0);
                for (int k = 0; k < K; ++k) {
                    acol[k] = ua[k][i];
                    bcol[k] = ub[k][i];
                }
                std::vector<double> row = circle_idft(acol, bcol, M);
                for (int j = 0; j < M; ++j)
                    out.u_minus[static_cast<std::size_t>(i) * M + j] = row[j];
            }
            return out;
        }
        case ScenarioKind::ThinOverFast: {
            std::vector<double> x = {ap[0], state.k_minus};
            evolve_coefficients(gen.mode_ops[0], x, t, dt, scheme);
            ap[0] = x[0];
            out.k_minus = x[1];
            for (int k = 1; k < K; ++k) {
                std::vector<double> y = {ap[k]};
                evolve_coefficients(gen.mode_ops[k], y, t, dt, scheme);
                ap[k] = y[0];
                if (k != M / 2) {
                    y = {bp[k]};
                    evolve_coefficients(gen.mode_ops[k], y, t, dt, scheme);
                    bp[k] = y[0];
                }
            }
            out.g_plus = circle_idft(ap, bp, M);
            return out;
        }
    }
    throw InternalError("evolve_limit: unreachable");
}

LayerField apply_intermediate_operator(const Scenario& sc, const TransmissionParams& p,
                                       const ReferenceGrid& grid, const LimitState& state) {
    if (state.scenario != sc.kind)
        throw MismatchError("apply_intermediate_operator: scenario mismatch");
    const int m = grid.n_rad_lower, n = grid.rows(), M = grid.n_ang;
    const double h2 = grid.h_ang() * grid.h_ang();
    auto dphi2 = [&](const std::vector<double>& g, int j) {
        return (g[(j + M - 1) % M] - 2 * g[j] + g[(j + 1) % M]) / h2;
    };
    LayerField out(grid);

    switch (sc.kind) {
        case ScenarioKind::TwoThin: {
            for (int j = 0; j < M; ++j) {
                const double jmp = state.g_plus[j] - state.g_minus[j];
                const double lb_p = dphi2(state.g_plus, j), lb_m = dphi2(state.g_minus, j);
                for (int i = 0; i < n; ++i) {
                    const Side side = grid.side_of_row(i);
                    const CorrectorShape s = corrector_shape(sc, p, grid.node(i), side, true);
                    if (side == Side::Upper)
                        out.at(i, j) = lb_p - s.d2 / (p.gamma * p.gamma) * jmp;
                    else
                        out.at(i, j) = p.kappa * lb_m - p.kappa * s.d2 * jmp;
                }
            }
            return out;
        }
        case ScenarioKind::ThinOverThick: {
            const double h = grid.h_lower();
            auto um = [&](int i, int j) {
                return state.u_minus[static_cast<std::size_t>(i) * M + j];
            };
            for (int j = 0; j < M; ++j) {
                const double jmp = state.g_plus[j] - um(m - 1, j);
                for (int i = m; i < n; ++i) {
                    const CorrectorShape s =
                        corrector_shape(sc, p, grid.node(i), Side::Upper, true);
                    out.at(i, j) = dphi2(state.g_plus, j) - s.d2 * jmp;
                }
                for (int i = 1; i + 1 < m; ++i) {
                    const double rho = grid.node(i);
                    const double d2 = (um(i - 1, j) - 2 * um(i, j) + um(i + 1, j)) / (h * h);
                    const double d1 = (um(i + 1, j) - um(i - 1, j)) / (2 * h);
                    const double ang =
                        (um(i, (j + M - 1) % M) - 2 * um(i, j) + um(i, (j + 1) % M)) / h2;
                    out.at(i, j) = p.kappa * (d2 + d1 / rho + ang / (rho * rho));
                }
            }
            return out;
        }
        case ScenarioKind::ThinOverFast: {
            for (int j = 0; j < M; ++j) {
                const double mj = state.g_plus[j] - state.k_minus;
                const double ang_m = dphi2(state.g_plus, j);  // m'' = g_plus''
                for (int i = 0; i < n; ++i) {
                    const Side side = grid.side_of_row(i);
                    const double rho = grid.node(i);
                    const CorrectorShape s = corrector_shape(sc, p, rho, side, true);
                    if (side == Side::Upper)
                        out.at(i, j) = dphi2(state.g_plus, j) - s.d2 / p.gamma * mj;
                    else
                        out.at(i, j) =
                            -(s.d2 * mj + s.d1 * mj / rho + s.value * ang_m / (rho * rho));
                }
            }
            return out;
        }
    }
    throw InternalError("apply_intermediate_operator: unreachable");
}

}  // namespace thinmem
