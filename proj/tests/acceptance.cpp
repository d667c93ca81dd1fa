// Acceptance suite: one check per shipped guarantee, each printed as a
// PASS/FAIL line with the measured numbers.  Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thinmem/harness.hpp"
#include "thinmem/radial1d.hpp"

using namespace thinmem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.3g", v);
    return b;
}

LayerField smooth_nonneg_field(const ReferenceGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LayerField f(g);
    for (int kr = 0; kr <= 2; ++kr)
        for (int ka = 0; ka <= 4 && ka <= g.n_ang / 2; ++ka) {
            const double ac = u(rng), as = u(rng);
            for (int i = 0; i < g.rows(); ++i) {
                const Side side = g.side_of_row(i);
                const double lo = side == Side::Lower ? g.lower_left() : 1.0;
                const double w = side == Side::Lower ? 1.0 - g.lower_left() : 1.0;
                const double rad = std::cos(kr * M_PI * (g.node(i) - lo) / w);
                for (int j = 0; j < g.n_ang; ++j)
                    f.at(i, j) += rad / ((1 + kr) * (1 + ka)) *
                                  (ac * std::cos(ka * g.angle(j)) +
                                   as * std::sin(ka * g.angle(j)));
            }
        }
    const double m = sup_norm(f.values);
    for (auto& v : f.values) v += m + 0.05;
    return f;
}

struct GeneratorSet {
    std::string name;
    Scenario sc;
    TransmissionParams p;
    Flavor flavor;
};

std::vector<GeneratorSet> all_generator_flavors(double kappa_fast) {
    TransmissionParams pa{1.5, 0.5, 2.0, 1.3};
    TransmissionParams pc{1.5, 0.5, kappa_fast, 1.3};
    Scenario a = Scenario::two_thin(0.1);
    Scenario b = Scenario::thin_over_thick(0.1, 0.5);
    Scenario c = Scenario::thin_over_fast(kappa_fast, 0.5);
    return {
        {"A(a)", a, pa, Flavor::Physical},
        {"C_r", a, pa, Flavor::RescaledTwoThin},
        {"Q(a)", a, pa, Flavor::FastScale},
        {"A(b)", b, pa, Flavor::Physical},
        {"C_R", b, pa, Flavor::RescaledThinOverThick},
        {"Q(b)", b, pa, Flavor::FastScale},
        {"A(c)", c, pc, Flavor::Physical},
        {"C_k", c, pc, Flavor::RescaledThinOverFast},
        {"Q(c)", c, pc, Flavor::FastScale},
    };
}

// ---------------------------------------------------------------------------

Outcome criterion1_oracle() {
    auto t0 = std::chrono::steady_clock::now();
    TransmissionParams p{1.0, 1.0, 2.0, 1.0};
    auto rel = [&](int n) {
        RadialGrid1D vgrid = RadialGrid1D::uniform(0.5, 1.0, 1.5, n, n);
        RadialProfile g = RadialProfile::sample(
            vgrid, [](double rho) { return std::sin(2.0 * rho) + 2.0; });
        RadialProfile discrete = log_conjugate_resolvent(1.0, g, p);
        RadialProfile gx = g;
        gx.grid = vgrid.log_image();
        RadialProfile exact = resolvent_closed_form(1.0, gx, p);
        double err = 0, ref = 0;
        for (int i = 0; i < vgrid.size(); ++i) {
            err = std::max(err, std::abs(discrete.values[i] - exact.values[i]));
            ref = std::max(ref, std::abs(exact.values[i]));
        }
        return err / ref;
    };
    const double e1 = rel(2049), e2 = rel(4097);
    const double ratio = e1 / e2, secs = elapsed_s(t0);
    Outcome o;
    o.pass = e1 <= 1e-4 && ratio >= 3.5 && ratio <= 4.5 && secs < 5.0;
    o.detail = "rel_err(2049)=" + fmt(e1) + " doubling_ratio=" + fmt(ratio) + " time=" +
               fmt(secs) + "s";
    return o;
}

Outcome criterion2_conservativity() {
    Outcome o;
    double worst_apply = 0.0, worst_evolve = 0.0;
    for (const auto& gs : all_generator_flavors(100.0)) {
        ReferenceGrid grid = build_reference_grid(gs.sc, 17, 17, 16);
        DiscreteGenerator gen = assemble_generator(gs.sc, gs.flavor, gs.p, grid);
        LayerField ones(grid, 1.0);
        worst_apply = std::max(worst_apply, sup_norm(apply_generator(gen, ones).values));
        LayerField evolved = evolve(gen, ones, 1.0, 1e-2);
        for (double v : evolved.values)
            worst_evolve = std::max(worst_evolve, std::abs(v - 1.0));
    }
    for (auto kind : {ScenarioKind::TwoThin, ScenarioKind::ThinOverThick,
                      ScenarioKind::ThinOverFast}) {
        Scenario sc = kind == ScenarioKind::TwoThin
                          ? Scenario::two_thin(0.1)
                          : (kind == ScenarioKind::ThinOverThick
                                 ? Scenario::thin_over_thick(0.1, 0.5)
                                 : Scenario::thin_over_fast(100.0, 0.5));
        TransmissionParams p{1.5, 0.5, 2.0, 1.3};
        ReferenceGrid grid = build_reference_grid(sc, 17, 17, 16);
        LimitGenerator gen = assemble_limit_generator(sc, p, grid);
        LimitState ones =
            kind == ScenarioKind::TwoThin
                ? LimitState::two_circles(std::vector<double>(16, 1.0),
                                          std::vector<double>(16, 1.0))
                : (kind == ScenarioKind::ThinOverThick
                       ? LimitState::circle_annulus(std::vector<double>(16, 1.0),
                                                    std::vector<double>(17 * 16, 1.0))
                       : LimitState::circle_point(std::vector<double>(16, 1.0), 1.0));
        LimitState der = apply_limit_generator(gen, ones);
        worst_apply = std::max(worst_apply, sup_norm(der.g_plus));
        if (kind == ScenarioKind::TwoThin)
            worst_apply = std::max(worst_apply, sup_norm(der.g_minus));
        if (kind == ScenarioKind::ThinOverThick)
            worst_apply = std::max(worst_apply, sup_norm(der.u_minus));
        if (kind == ScenarioKind::ThinOverFast)
            worst_apply = std::max(worst_apply, std::abs(der.k_minus));
        LimitState evolved = evolve_limit(gen, ones, 1.0, 1e-2);
        for (double v : evolved.g_plus)
            worst_evolve = std::max(worst_evolve, std::abs(v - 1.0));
    }
    // The non-conservative lumped-state form must fail the same check.
    Scenario sc = Scenario::thin_over_fast(100.0, 0.5);
    TransmissionParams p{1.5, 0.5, 2.0, 1.3};
    ReferenceGrid grid = build_reference_grid(sc, 17, 17, 16);
    LimitGenerator literal = assemble_limit_generator(sc, p, grid, true);
    LimitState ones = LimitState::circle_point(std::vector<double>(16, 1.0), 1.0);
    const double literal_defect =
        std::abs(apply_limit_generator(literal, ones).k_minus);

    o.pass = worst_apply <= 1e-10 && worst_evolve <= 1e-8 && literal_defect > 0.1;
    o.detail = "sup|L1|=" + fmt(worst_apply) + " sup|T(1)1-1|=" + fmt(worst_evolve) +
               " paper_literal_defect=" + fmt(literal_defect) + " (must exceed 0.1)";
    return o;
}

Outcome criterion3_positivity_contraction() {
    Outcome o;
    double worst_min = 0.0, worst_gain = 0.0;
    for (const auto& gs : all_generator_flavors(64.0)) {
        ReferenceGrid grid = build_reference_grid(gs.sc, 17, 17, 16);
        DiscreteGenerator gen = assemble_generator(gs.sc, gs.flavor, gs.p, grid);
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            LayerField u0 = smooth_nonneg_field(grid, seed);
            LayerField ut = evolve(gen, u0, 0.05, 2e-3);
            double mn = 1e300;
            for (double v : ut.values) mn = std::min(mn, v);
            worst_min = std::min(worst_min, mn);
            worst_gain = std::max(worst_gain, sup_norm(ut.values) - sup_norm(u0.values));
        }
    }
    o.pass = worst_min >= -1e-12 && worst_gain <= 1e-10;
    o.detail = "min=" + fmt(worst_min) + " sup_gain=" + fmt(worst_gain) +
               " (50 seeded fields x 9 flavors)";
    return o;
}

Outcome criterion4_kurtz() {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    TransmissionParams p{1.0, 1.0, 1.0, 1.0};
    const std::vector<double> th = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
    std::ostringstream detail;
    for (auto kind : {ScenarioKind::TwoThin, ScenarioKind::ThinOverThick,
                      ScenarioKind::ThinOverFast}) {
        Scenario sc0 = kind == ScenarioKind::TwoThin
                           ? Scenario::two_thin(0.125)
                           : (kind == ScenarioKind::ThinOverThick
                                  ? Scenario::thin_over_thick(0.125, 0.5)
                                  : Scenario::thin_over_fast(64.0, 0.5));
        ReferenceGrid grid = build_reference_grid(sc0, 65, 65, 32);
        LayerField u = canonical_core_element(kind, grid);
        auto rows = kurtz_fast_residual(kind, 0.5, p, grid, u, th);
        bool decreasing = true;
        for (std::size_t i = 1; i < rows.size(); ++i)
            decreasing = decreasing && rows[i].residual < rows[i - 1].residual;
        const double frac = rows.back().residual / rows.front().residual;
        o.pass = o.pass && decreasing && frac <= 0.05;
        detail << (kind == ScenarioKind::TwoThin
                       ? "a"
                       : kind == ScenarioKind::ThinOverThick ? "b" : "c")
               << ":final/initial=" << fmt(frac) << (decreasing ? "" : "(not monotone!)")
               << " ";
    }
    const double secs = elapsed_s(t0);
    o.pass = o.pass && secs < 30.0;
    o.detail = detail.str() + "time=" + fmt(secs) + "s";
    return o;
}

Outcome criterion5_main_convergence() {
    auto t0 = std::chrono::steady_clock::now();
    TransmissionParams p{1.0, 1.0, 1.0, 1.0};
    Scenario sc0 = Scenario::two_thin(0.1);
    ReferenceGrid grid = build_reference_grid(sc0, 65, 65, 64);
    LayerField u0 =
        lift_limit_state(default_limit_state(ScenarioKind::TwoThin, grid), grid);
    auto rows = run_convergence_study(ScenarioKind::TwoThin, p, u0, 0.5,
                                      {0.1, 0.05, 0.025, 0.0125}, 2e-4,
                                      TimeScheme::ImplicitEuler);
    Outcome o;
    std::ostringstream detail;
    detail << "e=[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail << fmt(rows[i].error) << (i + 1 < rows.size() ? "," : "]");
        if (i > 0) {
            o.pass = o.pass && rows[i].error < rows[i - 1].error &&
                     rows[i].ratio >= 1.5;
        }
    }
    const double secs = elapsed_s(t0);
    o.pass = o.pass && secs < 60.0;
    detail << " ratios=[" << fmt(rows[1].ratio) << "," << fmt(rows[2].ratio) << ","
           << fmt(rows[3].ratio) << "] time=" << fmt(secs) << "s";
    o.detail = detail.str();
    return o;
}

Outcome criterion6_lumped_limit() {
    Outcome o;
    TransmissionParams p{1.0, 1.0, 100.0, 1.0};
    Scenario sc = Scenario::thin_over_fast(100.0, 0.5);
    ReferenceGrid grid = build_reference_grid(sc, 9, 9, 64);
    LimitGenerator gen = assemble_limit_generator(sc, p, grid);
    LimitState v0 = LimitState::circle_point(std::vector<double>(64, 1.0), 0.0);
    LimitState vt = evolve_limit(gen, v0, 1.0, 1e-4, TimeScheme::CrankNicolson);
    auto want = matrix_exponential_2x2(p.alpha, p.beta / p.gamma, 1.0, {1.0, 0.0});
    double worst = std::abs(vt.k_minus - want[1]);
    for (double v : vt.g_plus) worst = std::max(worst, std::abs(v - want[0]));

    double worst_rate = 0.0;
    for (int n = 1; n <= 2; ++n) {
        std::vector<double> g(64);
        for (int j = 0; j < 64; ++j) g[j] = std::cos(n * (2.0 * M_PI * j / 64));
        LimitState s0 = LimitState::circle_point(g, 0.0);
        LimitState s1 = evolve_limit(gen, s0, 0.25, 1e-4, TimeScheme::CrankNicolson);
        LimitState s2 = evolve_limit(gen, s0, 0.50, 1e-4, TimeScheme::CrankNicolson);
        double a1 = 0, a2 = 0;
        for (int j = 0; j < 64; ++j) {
            a1 += s1.g_plus[j] * std::cos(n * (2.0 * M_PI * j / 64));
            a2 += s2.g_plus[j] * std::cos(n * (2.0 * M_PI * j / 64));
        }
        const double rate = std::log(a1 / a2) / 0.25;
        worst_rate = std::max(worst_rate,
                              std::abs(rate - (n * n + p.alpha)) / (n * n + p.alpha));
    }
    o.pass = worst <= 1e-8 && worst_rate <= 0.01;
    o.detail = "|evolve-matexp|=" + fmt(worst) + " worst_mode_rate_rel=" + fmt(worst_rate);
    return o;
}

Outcome criterion7_annulus_limit() {
    Outcome o;
    // (i) beta = 0: the annulus block evolves independently of the circle.
    {
        TransmissionParams p{1.0, 0.0, 1.0, 1.0};
        Scenario sc = Scenario::thin_over_thick(0.1, 0.5);
        ReferenceGrid grid = build_reference_grid(sc, 33, 33, 32);
        LimitGenerator gen = assemble_limit_generator(sc, p, grid);
        const int m = grid.n_rad_lower, M = grid.n_ang;
        std::vector<double> um(static_cast<std::size_t>(m) * M);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < M; ++j)
                um[static_cast<std::size_t>(i) * M + j] =
                    std::cos(2.0 * M_PI * (grid.node(i) - 0.5)) * std::cos(grid.angle(j));
        std::vector<double> g1(M), g2(M);
        for (int j = 0; j < M; ++j) {
            g1[j] = std::cos(grid.angle(j));
            g2[j] = 2.0 + std::sin(3.0 * grid.angle(j));
        }
        LimitState e1 = evolve_limit(gen, LimitState::circle_annulus(g1, um), 0.1, 1e-3);
        LimitState e2 = evolve_limit(gen, LimitState::circle_annulus(g2, um), 0.1, 1e-3);
        const double oneway = sup_diff(e1.u_minus, e2.u_minus);
        o.pass = o.pass && oneway <= 1e-12;
        o.detail += "one_way_defect=" + fmt(oneway);
    }
    // (ii) alpha = 0: the circle equation is pure diffusion; compare against
    // the periodic heat kernel at two angular resolutions.
    {
        TransmissionParams p{0.0, 1.0, 1.0, 1.0};
        auto err_at = [&](int nang) {
            Scenario sc = Scenario::thin_over_thick(0.1, 0.5);
            ReferenceGrid grid = build_reference_grid(sc, 17, 17, nang);
            LimitGenerator gen = assemble_limit_generator(sc, p, grid);
            const int m = grid.n_rad_lower, M = grid.n_ang;
            std::vector<double> g0(M), um(static_cast<std::size_t>(m) * M, 0.0);
            for (int j = 0; j < M; ++j)
                g0[j] = std::cos(grid.angle(j)) + 0.5 * std::cos(3.0 * grid.angle(j));
            LimitState st =
                evolve_limit(gen, LimitState::circle_annulus(g0, um), 0.25, 1e-4,
                             TimeScheme::CrankNicolson);
            double err = 0.0;
            for (int j = 0; j < M; ++j) {
                const double want = std::exp(-0.25) * std::cos(grid.angle(j)) +
                                    0.5 * std::exp(-9.0 * 0.25) *
                                        std::cos(3.0 * grid.angle(j));
                err = std::max(err, std::abs(st.g_plus[j] - want));
            }
            return err;
        };
        const double e32 = err_at(32), e64 = err_at(64);
        const double ratio = e32 / e64;
        o.pass = o.pass && e64 <= 0.01 && ratio >= 3.0 && ratio <= 5.0;
        o.detail += " heat_kernel_err(64)=" + fmt(e64) + " doubling_ratio=" + fmt(ratio);
    }
    return o;
}

Outcome criterion8_mc_stationarity() {
    auto t0 = std::chrono::steady_clock::now();
    TransmissionParams p{1.0, 1.0, 2.0, 1.0};  // rates: down 1, up 2
    McOptions opt;
    opt.init = McInit::PointUpper;
    EmpiricalSummary s = simulate_limit_jump_diffusion(ScenarioKind::TwoThin, p, 100000,
                                                       50.0, 1.0, 777, opt);
    const double frac = s.frac_upper(s.times.size() - 1);
    const double sigma = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / 100000.0);
    const double secs = elapsed_s(t0);
    Outcome o;
    o.pass = std::abs(frac - 2.0 / 3.0) <= 3.0 * sigma && secs < 60.0;
    o.detail = "frac=" + fmt(frac) + " |frac-2/3|=" + fmt(std::abs(frac - 2.0 / 3.0)) +
               " 3sigma=" + fmt(3.0 * sigma) + " time=" + fmt(secs) + "s";
    return o;
}

Outcome criterion9_mc_pde() {
    Config defaults;  // carries the shipped calibration
    TransmissionParams p{1.0, 1.0, 1.0, 1.0};
    std::vector<double> times;
    for (double t = 0.0; t <= 1.0 + 1e-9; t += 0.02) times.push_back(t);
    auto pde = pde_layer_mass_curve(p, 0.5, 1.5, 129, 1e-3, times);
    McOptions opt;
    opt.init = McInit::UniformUpper;
    opt.record_dt = 0.02;
    opt.threads = 2;
    opt.crossing_cal_upper = defaults.mc_cal_upper;
    opt.crossing_cal_lower = defaults.mc_cal_lower;
    EmpiricalSummary s = simulate_membrane_bm(p, 0.5, 1.5, 100000, 1.0, 1e-3, 12345, opt);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size() && k < s.times.size(); ++k)
        worst = std::max(worst, std::abs(s.frac_upper(k) - pde[k]));
    Outcome o;
    o.pass = worst <= 0.02;
    o.detail = "sup|mc-pde|=" + fmt(worst) + " cal=" + fmt(defaults.mc_cal_upper) +
               " cal_residual=" + fmt(defaults.mc_cal_residual);
    return o;
}

Outcome criterion10_corrector_identities() {
    Outcome o;
    double worst = 0.0;
    Scenario sc = Scenario::two_thin(0.1);
    ReferenceGrid grid = build_reference_grid(sc, 9, 9, 8);
    for (double alpha : {0.0, 1.0, 2.0})
        for (double beta : {0.0, 1.0, 2.0})
            for (double gamma : {0.5, 1.0, 2.0}) {
                TransmissionParams p{alpha, beta, 1.0, gamma};
                CorrectorProfile c = build_corrector(sc, p, grid);
                // Integrals of psi'' per layer from the analytic endpoint
                // slopes.
                const double int_lower = c.dpsi_membrane_lower - c.dpsi_outer_lower;
                const double int_upper = c.dpsi_outer_upper - c.dpsi_membrane_upper;
                worst = std::max(worst, std::abs(int_lower + beta));
                worst = std::max(worst, std::abs(int_upper - alpha * gamma));
            }
    o.pass = worst <= 1e-12;
    o.detail = "worst_identity_defect=" + fmt(worst) + " over 3x3x3 lattice";
    return o;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> entries = {
        {1, "appendix oracle equivalence", criterion1_oracle},
        {2, "conservativity of every generator", criterion2_conservativity},
        {3, "positivity and sup-norm contraction", criterion3_positivity_contraction},
        {4, "fast-scale limits under thickness halving", criterion4_kurtz},
        {5, "two-thin-layer convergence to the circle pair", criterion5_main_convergence},
        {6, "lumped-state limit vs closed-form exponential", criterion6_lumped_limit},
        {7, "circle+annulus limit structure", criterion7_annulus_limit},
        {8, "jump-diffusion stationarity", criterion8_mc_stationarity},
        {9, "particle vs mode-0 layer mass", criterion9_mc_pde},
        {10, "corrector endpoint identities", criterion10_corrector_identities},
    };
    int failures = 0;
    for (const auto& e : entries) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = e.run();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", e.id, e.name,
                    o.detail.c_str(), elapsed_s(t0));
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", entries.size());
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures;
}
