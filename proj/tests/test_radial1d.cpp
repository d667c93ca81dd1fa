#include <doctest.h>

#include <cmath>
#include <functional>

#include "thinmem/radial1d.hpp"

using namespace thinmem;

namespace {

// Independent single-interval Neumann resolvent oracle: solves
// lambda f - D f'' = g on [lo,hi] with f'(lo) = f'(hi) = 0, using the
// explicit kernel representation and Simpson quadrature on an analytic g.
double neumann_resolvent_oracle(double lambda, double D, double lo, double hi,
                                const std::function<double(double)>& g, double x) {
    const double s = std::sqrt(lambda / D);
    auto simpson = [&](double a, double b, const std::function<double(double)>& f) {
        const int n = 2000;
        const double h = (b - a) / n;
        double acc = f(a) + f(b);
        for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    auto h_of = [&](double xx) {
        auto kern = [&](double y) { return std::exp(-s * std::abs(xx - y)) * g(y); };
        return (simpson(lo, xx, kern) + simpson(xx, hi, kern)) / (2.0 * std::sqrt(D * lambda));
    };
    const double sh = std::sinh(s * (hi - lo));
    return (h_of(hi) * std::cosh(s * (x - lo)) + h_of(lo) * std::cosh(s * (hi - x))) / sh +
           h_of(x);
}

RadialGrid1D u_grid(double a, double b, int n) {
    return RadialGrid1D::uniform(a, 0.0, b, n, n);
}

}  // namespace

TEST_CASE("closed-form resolvent maps constants to 1/lambda") {
    for (double lambda : {0.5, 1.0, 4.0}) {
        for (double kappa : {0.5, 1.0, 2.0}) {
            TransmissionParams p{1.3, 0.7, kappa, 1.0};
            RadialProfile g = RadialProfile::sample(u_grid(-0.8, 0.6, 21),
                                                    [](double) { return 1.0; });
            RadialProfile f = resolvent_closed_form(lambda, g, p);
            for (double v : f.values) CHECK(v == doctest::Approx(1.0 / lambda).epsilon(1e-13));
        }
    }
}

TEST_CASE("alpha=beta=0 decouples into two independent Neumann resolvents") {
    const double lambda = 2.0, kappa = 3.0, a = -0.9, b = 0.7;
    TransmissionParams p{0.0, 0.0, kappa, 1.0};
    auto gfun = [](double x) { return std::cos(3.0 * x) + x * x + 2.0; };
    RadialProfile g = RadialProfile::sample(u_grid(a, b, 101), gfun);
    RadialProfile f = resolvent_closed_form(lambda, g, p);
    for (int i = 0; i < f.grid.size(); i += 7) {
        const double x = f.grid.node(i);
        const double want = f.grid.is_lower(i)
                                ? neumann_resolvent_oracle(lambda, kappa, a, 0.0, gfun, x)
                                : neumann_resolvent_oracle(lambda, 1.0, 0.0, b, gfun, x);
        CHECK(f.values[i] == doctest::Approx(want).epsilon(1e-7));
    }
}

TEST_CASE("resolvent satisfies lambda f - A f = g to O(h^2), including conditions") {
    const double lambda = 1.0, kappa = 2.0;
    const double a = -std::log(2.0), b = std::log(1.5);
    TransmissionParams p{1.0, 1.0, kappa, 1.0};
    auto gfun = [](double x) { return x; };

    auto interior_residual = [&](int n) {
        RadialProfile g = RadialProfile::sample(u_grid(a, b, n), gfun);
        RadialProfile f = resolvent_closed_form(lambda, g, p);
        double worst = 0.0;
        auto second = [&](int i, double h) {
            return (f.values[i - 1] - 2 * f.values[i] + f.values[i + 1]) / (h * h);
        };
        const double hl = (0.0 - a) / (n - 1), hu = (b - 0.0) / (n - 1);
        for (int i = 1; i + 1 < n; ++i)
            worst = std::max(worst,
                             std::abs(lambda * f.values[i] - kappa * second(i, hl) - gfun(f.grid.node(i))));
        for (int i = n + 1; i + 1 < 2 * n; ++i)
            worst = std::max(worst,
                             std::abs(lambda * f.values[i] - second(i, hu) - gfun(f.grid.node(i))));
        return worst;
    };
    const double r1 = interior_residual(101), r2 = interior_residual(201);
    CHECK(r1 < 1e-3);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);

    // Membrane and outer conditions hold for the analytic solution.
    RadialProfile g = RadialProfile::sample(u_grid(a, b, 401), gfun);
    RadialProfile f = resolvent_closed_form(lambda, g, p);
    const int n = 401;
    const double hl = -a / (n - 1), hu = b / (n - 1);
    const double jump = f.values[n] - f.values[n - 1];
    const double d1m =
        (3 * f.values[n - 1] - 4 * f.values[n - 2] + f.values[n - 3]) / (2 * hl);
    const double d1p = (-3 * f.values[n] + 4 * f.values[n + 1] - f.values[n + 2]) / (2 * hu);
    const double d_a = (-3 * f.values[0] + 4 * f.values[1] - f.values[2]) / (2 * hl);
    const double d_b =
        (3 * f.values[2 * n - 1] - 4 * f.values[2 * n - 2] + f.values[2 * n - 3]) / (2 * hu);
    CHECK(d1m == doctest::Approx(p.beta * jump).epsilon(1e-4));
    CHECK(d1p == doctest::Approx(p.alpha * jump).epsilon(1e-4));
    CHECK(std::abs(d_a) < 1e-5);
    CHECK(std::abs(d_b) < 1e-5);
}

TEST_CASE("transmission determinant: closed values, positivity, monotonicity") {
    TwoSidedInterval iv{-1.0, 1.0};
    TransmissionParams p0{0.0, 0.0, 1.0, 1.0};
    const double s1 = std::sinh(1.0);
    CHECK(transmission_determinant(1.0, p0, iv) == doctest::Approx(s1 * s1).epsilon(1e-14));

    for (double alpha : {0.0, 0.5, 2.0})
        for (double beta : {0.0, 1.0, 3.0})
            for (double kappa : {0.25, 1.0, 4.0}) {
                TransmissionParams p{alpha, beta, kappa, 1.0};
                for (double lambda : {0.1, 1.0, 10.0})
                    CHECK(transmission_determinant(lambda, p, iv) > 0.0);
            }

    TransmissionParams p{1.0, 2.0, 2.0, 1.0};
    double prev = 0.0;
    for (double lambda : {1.0, 2.0, 4.0, 8.0}) {
        const double det = transmission_determinant(lambda, p, {-0.7, 0.4});
        CHECK(det > prev);
        prev = det;
    }
    CHECK_THROWS_AS(transmission_determinant(-1.0, p, iv), ParameterError);
    CHECK_THROWS_AS(transmission_determinant(1.0, p, TwoSidedInterval{0.5, 1.0}),
                    ParameterError);
}

TEST_CASE("resolvent positivity and contraction on a parameter lattice") {
    auto gfun = [](double x) { return 1.5 + std::sin(5.0 * x); };  // nonnegative
    for (double alpha : {0.0, 1.0, 4.0})
        for (double beta : {0.0, 0.5, 2.0})
            for (double kappa : {0.5, 1.0, 2.0}) {
                TransmissionParams p{alpha, beta, kappa, 1.0};
                for (double lambda : {0.5, 1.0, 2.0}) {
                    RadialProfile g =
                        RadialProfile::sample(u_grid(-1.0, 0.8, 41), gfun);
                    RadialProfile f = resolvent_closed_form(lambda, g, p);
                    for (double v : f.values) {
                        CHECK(v >= -1e-12);
                        CHECK(lambda * v <= sup_norm(g.values) * (1 + 1e-10));
                    }
                }
            }
}

TEST_CASE("resolvent identity R(1) - R(2) = R(1) R(2)") {
    TransmissionParams p{1.0, 0.5, 2.0, 1.0};
    RadialGrid1D grid = u_grid(-0.6, 0.9, 161);
    RadialProfile g =
        RadialProfile::sample(grid, [](double x) { return std::cos(2.0 * x) + 0.3 * x; });
    RadialProfile r1 = resolvent_closed_form(1.0, g, p);
    RadialProfile r2 = resolvent_closed_form(2.0, g, p);
    RadialProfile r12 = resolvent_closed_form(1.0, r2, p);
    for (int i = 0; i < grid.size(); ++i)
        CHECK(r1.values[i] - r2.values[i] == doctest::Approx(r12.values[i]).epsilon(1e-8));
}

TEST_CASE("log-coordinate operator: kernel, boundary guard, pullback consistency") {
    TransmissionParams p{0.0, 0.0, 1.0, 1.0};
    RadialGrid1D vgrid = RadialGrid1D::uniform(0.5, 1.0, 1.5, 33, 33);

    RadialProfile c = RadialProfile::sample(vgrid, [](double) { return 3.7; });
    auto out = log_conjugate_apply(c, p);
    for (double v : out) CHECK(std::abs(v) < 1e-10);

    RadialProfile lnr = RadialProfile::sample(vgrid, [](double rho) { return std::log(rho); });
    CHECK_THROWS_AS(log_conjugate_apply(lnr, p), PreconditionError);

    // A^I (I g) sampled at rho equals (A g)(ln rho): g built to satisfy the
    // Neumann conditions of the alpha=beta=0 domain; it jumps at the
    // membrane, so sampling must respect the side.
    const double a = std::log(0.5), b = std::log(1.5);
    auto g_u = [&](double x, bool lower) {
        return lower ? std::cos(M_PI * (x - a) / (0.0 - a)) : 2.0 + std::cos(M_PI * x / b);
    };
    auto g_u_dd = [&](double x, bool lower) {
        const double wl = -a, wu = b;
        return lower ? -std::pow(M_PI / wl, 2) * std::cos(M_PI * (x - a) / wl)
                     : -std::pow(M_PI / wu, 2) * std::cos(M_PI * x / wu);
    };
    auto check_at = [&](int n) {
        RadialGrid1D vg = RadialGrid1D::uniform(0.5, 1.0, 1.5, n, n);
        RadialProfile f = RadialProfile::sample_sided(
            vg, [&](double rho, bool lower) { return g_u(std::log(rho), lower); });
        auto av = log_conjugate_apply(f, p, 1.0);  // analytic samples: O(h^2) residuals
        double worst = 0.0;
        for (int i = 0; i < vg.size(); ++i) {
            if (i == 0 || i == n - 1 || i == n || i == 2 * n - 1) continue;
            worst = std::max(worst, std::abs(av[i] - g_u_dd(std::log(vg.node(i)), i < n)));
        }
        return worst;
    };
    const double w1 = check_at(41), w2 = check_at(81);
    CHECK(w1 < 0.05);
    CHECK(w1 / w2 > 3.0);
    CHECK(w1 / w2 < 5.0);
}

TEST_CASE("circle+point resolvent: trivial, decoupled, and residual-checked") {
    // Constants map to 1/lambda through both the perturbation path and the
    // closed form.
    for (double alpha : {0.0, 1.0}) {
        TransmissionParams p{alpha, 1.0, 1.0, 1.0};
        CirclePointProfile g;
        const int n = 41;
        for (int i = 0; i < n; ++i) {
            g.lower_nodes.push_back(0.5 + 0.5 * i / (n - 1.0));
            g.lower_values.push_back(1.0);
        }
        g.point_value = 1.0;
        CirclePointProfile f = circle_point_resolvent(5.0, g, p);
        CHECK(f.point_value == doctest::Approx(0.2).epsilon(1e-12));
        for (double v : f.lower_values) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
    }

    // alpha = beta = 0: point and profile decouple completely.
    {
        TransmissionParams p{0.0, 0.0, 2.0, 1.0};
        CirclePointProfile g;
        const int n = 81;
        for (int i = 0; i < n; ++i) {
            const double rho = 0.5 + 0.5 * i / (n - 1.0);
            g.lower_nodes.push_back(rho);
            g.lower_values.push_back(std::sin(2.0 * rho));
        }
        g.point_value = 2.0;
        CirclePointProfile f = circle_point_resolvent(3.0, g, p);
        CHECK(f.point_value == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
        // Profile equals the pure Neumann resolvent in log coordinates.
        auto gfun = [](double x) { return std::sin(2.0 * std::exp(x)); };
        for (int i = 0; i < n; i += 16) {
            const double x = std::log(g.lower_nodes[i]);
            const double want =
                neumann_resolvent_oracle(3.0, 2.0, std::log(0.5), 0.0, gfun, x);
            CHECK(f.lower_values[i] == doctest::Approx(want).epsilon(1e-6));
        }
    }

    CirclePointProfile g;
    for (int i = 0; i < 4; ++i) {
        g.lower_nodes.push_back(0.7 + 0.1 * i);
        g.lower_values.push_back(1.0);
    }
    TransmissionParams p{1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(circle_point_resolvent(-2.0, g, p), ParameterError);
}

TEST_CASE("circle+point resolvent identity across solver paths") {
    // lambda = 1 <= 2 alpha exercises the direct banded fallback; lambda = 5
    // the perturbation series.  The resolvent identity ties them together.
    TransmissionParams p{1.0, 1.0, 1.0, 1.0};
    CirclePointProfile g;
    const int n = 201;
    for (int i = 0; i < n; ++i) {
        const double rho = 0.5 + 0.5 * i / (n - 1.0);
        g.lower_nodes.push_back(rho);
        g.lower_values.push_back(rho);  // g(x) = x ramp
    }
    g.point_value = 2.0;
    CirclePointProfile r1 = circle_point_resolvent(1.0, g, p);
    CirclePointProfile r5 = circle_point_resolvent(5.0, g, p);
    CirclePointProfile r15 = circle_point_resolvent(1.0, r5, p);
    CHECK(r1.point_value - r5.point_value ==
          doctest::Approx(4.0 * r15.point_value).epsilon(5e-4));
    for (int i = 0; i < n; i += 25)
        CHECK(r1.lower_values[i] - r5.lower_values[i] ==
              doctest::Approx(4.0 * r15.lower_values[i]).epsilon(5e-4));
}
