#include <doctest.h>

#include <cmath>

#include "thinmem/montecarlo.hpp"

using namespace thinmem;

TEST_CASE("identical seeds give bit-identical summaries; particles are conserved") {
    TransmissionParams p{1.0, 1.0, 1.0, 1.0};
    McOptions opt;
    opt.init = McInit::UniformBoth;
    opt.record_dt = 0.05;
    EmpiricalSummary a = simulate_membrane_bm(p, 0.5, 1.5, 500, 0.2, 1e-3, 31337, opt);
    opt.threads = 2;  // chunking must not change anything
    EmpiricalSummary b = simulate_membrane_bm(p, 0.5, 1.5, 500, 0.2, 1e-3, 31337, opt);
    CHECK(a.upper_counts == b.upper_counts);
    CHECK(a.hist_upper == b.hist_upper);
    CHECK(a.hist_lower == b.hist_lower);

    std::int64_t mass = 0;
    for (int k = 0; k < a.n_bins; ++k) mass += a.hist_upper[k] + a.hist_lower[k];
    CHECK(mass == 500);
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        CHECK(a.upper_counts[k] >= 0);
        CHECK(a.upper_counts[k] <= 500);
    }

    CHECK_THROWS_AS(simulate_membrane_bm(p, 0.5, 1.5, 10, 1.0, 0.1, 1, opt),
                    ParameterError);  // dt too large for the layer widths
}

TEST_CASE("impermeable membrane: no crossings ever") {
    TransmissionParams p{0.0, 0.0, 2.0, 1.0};
    McOptions opt;
    opt.init = McInit::UniformUpper;
    opt.record_dt = 0.05;
    EmpiricalSummary s = simulate_membrane_bm(p, 0.5, 1.5, 400, 0.3, 5e-4, 11, opt);
    for (std::size_t k = 0; k < s.times.size(); ++k) CHECK(s.upper_counts[k] == 400);
    std::int64_t lower = 0;
    for (int b = 0; b < s.n_bins; ++b) lower += s.hist_lower[b];
    CHECK(lower == 0);
}

TEST_CASE("mirrored dynamics produce mirrored histograms") {
    TransmissionParams p{1.0, 0.5, 1.5, 1.0};
    McOptions opt;
    opt.init = McInit::PointUpper;
    opt.init_rho = 1.25;
    opt.init_phi = 0.7;
    opt.record_dt = 0.1;
    EmpiricalSummary a = simulate_membrane_bm(p, 0.5, 1.5, 800, 0.4, 1e-3, 5, opt);
    McOptions mopt = opt;
    mopt.mirror = true;
    EmpiricalSummary b = simulate_membrane_bm(p, 0.5, 1.5, 800, 0.4, 1e-3, 5, mopt);
    // phi -> 2 pi - phi maps bin k to bin n-1-k.
    for (int k = 0; k < a.n_bins; ++k) {
        CHECK(a.hist_upper[k] == b.hist_upper[a.n_bins - 1 - k]);
        CHECK(a.hist_lower[k] == b.hist_lower[a.n_bins - 1 - k]);
    }
    CHECK(a.upper_counts == b.upper_counts);

    // Same property for the limit jump-diffusion.
    McOptions ja;
    ja.init = McInit::PointUpper;
    ja.init_phi = 0.7;
    EmpiricalSummary la =
        simulate_limit_jump_diffusion(ScenarioKind::TwoThin, p, 800, 2.0, 0.5, 5, ja);
    McOptions jb = ja;
    jb.mirror = true;
    EmpiricalSummary lb =
        simulate_limit_jump_diffusion(ScenarioKind::TwoThin, p, 800, 2.0, 0.5, 5, jb);
    for (int k = 0; k < la.n_bins; ++k) {
        CHECK(la.hist_upper[k] == lb.hist_upper[la.n_bins - 1 - k]);
        CHECK(la.hist_lower[k] == lb.hist_lower[la.n_bins - 1 - k]);
    }
}

TEST_CASE("two-circle jump diffusion: stationarity and angular uniformity") {
    // Rates alpha/gamma = 1 and kappa beta = 2: stationary upper share 2/3.
    TransmissionParams p{1.0, 1.0, 2.0, 1.0};
    McOptions opt;
    opt.init = McInit::PointUpper;
    EmpiricalSummary s =
        simulate_limit_jump_diffusion(ScenarioKind::TwoThin, p, 20000, 30.0, 0.5, 99, opt);
    const double frac = s.frac_upper(s.times.size() - 1);
    const double sigma = std::sqrt(2.0 / 9.0 / 20000.0);
    CHECK(std::abs(frac - 2.0 / 3.0) <= 3.0 * sigma);

    // Angular marginal at t >> 1 is uniform: chi-square over 16 bins, 5% level.
    double chi2 = 0.0;
    const double expected = 20000.0 / 16.0;
    for (int b = 0; b < 16; ++b) {
        const double o =
            static_cast<double>(s.hist_upper[b]) + static_cast<double>(s.hist_lower[b]);
        chi2 += (o - expected) * (o - expected) / expected;
    }
    CHECK(chi2 < 24.9958);  // chi^2_{0.95,15}
}

TEST_CASE("circle+point jump diffusion: alpha=0 keeps circle particles on the circle") {
    TransmissionParams p{0.0, 1.0, 1.0, 2.0};
    McOptions opt;
    opt.init = McInit::PointUpper;
    EmpiricalSummary s = simulate_limit_jump_diffusion(ScenarioKind::ThinOverFast, p, 300,
                                                       5.0, 0.5, 17, opt);
    for (std::size_t k = 0; k < s.times.size(); ++k) CHECK(s.upper_counts[k] == 300);
}

TEST_CASE("membrane BM with symmetric permeability relaxes to the area ratio") {
    TransmissionParams p{1.0, 1.0, 1.0, 1.0};
    McOptions opt;
    opt.init = McInit::UniformBoth;
    opt.record_dt = 0.5;
    opt.threads = 2;
    EmpiricalSummary s = simulate_membrane_bm(p, 0.5, 1.5, 15000, 4.0, 5e-4, 7, opt);
    const double area_frac = (1.5 * 1.5 - 1.0) / (1.5 * 1.5 - 0.25);
    const double sigma = std::sqrt(area_frac * (1 - area_frac) / 15000.0);
    CHECK(std::abs(s.frac_upper(s.times.size() - 1) - area_frac) <= 3.0 * sigma);
}

TEST_CASE("thin layers approach the limit jump diffusion in total variation") {
    TransmissionParams p{1.0, 1.0, 1.0, 1.0};
    const std::int64_t n = 20000;
    McOptions lopt;
    lopt.init = McInit::PointUpper;
    lopt.init_phi = 0.0;
    lopt.record_dt = 0.25;
    EmpiricalSummary lim =
        simulate_limit_jump_diffusion(ScenarioKind::TwoThin, p, n, 0.5, 0.25, 4242, lopt);
    double prev_tv = 1e9;
    for (double theta : {0.4, 0.2, 0.1}) {
        // Physical permeabilities scale with the layer width.
        TransmissionParams pp{theta, theta, 1.0, 1.0};
        McOptions opt;
        opt.init = McInit::PointUpper;
        opt.init_rho = 1.0 + theta / 2;
        opt.init_phi = 0.0;
        opt.record_dt = 0.25;
        opt.threads = 2;
        EmpiricalSummary bm = simulate_membrane_bm(pp, 1.0 - theta, 1.0 + theta, n, 0.5,
                                                   theta * theta / 40.0, 4242, opt);
        double tv = 0.0;
        for (int b = 0; b < 16; ++b) {
            tv += std::abs(static_cast<double>(bm.hist_upper[b] - lim.hist_upper[b]));
            tv += std::abs(static_cast<double>(bm.hist_lower[b] - lim.hist_lower[b]));
        }
        tv /= 2.0 * n;
        CHECK(tv < prev_tv);
        prev_tv = tv;
    }
    CHECK(prev_tv < 0.04);  // frozen from the seeded run (0.031)
}
