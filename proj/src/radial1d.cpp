#include "thinmem/radial1d.hpp"

#include <algorithm>
#include <cmath>

namespace thinmem {

namespace {

// E_k = Int_0^delta e^{sigma u} u^k du for k = 0..3.  Series branch for small
// |sigma delta| (the closed form cancels catastrophically there), upward
// recurrence otherwise.
std::array<double, 4> exp_moments(double sigma, double delta) {
    std::array<double, 4> E{};
    const double x = sigma * delta;
    if (std::abs(x) < 1.0) {
        for (int k = 0; k < 4; ++k) {
            // E_k = delta^{k+1} sum_m x^m / (m! (k+m+1))
            double acc = 0.0, t = 1.0;
            for (int m = 0; m < 40; ++m) {
                acc += t / (k + m + 1);
                t *= x / (m + 1);
                if (std::abs(t) < 1e-22) break;
            }
            E[k] = std::pow(delta, k + 1) * acc;
        }
        return E;
    }
    const double e = std::exp(x);
    E[0] = (e - 1.0) / sigma;
    double dk = 1.0;
    for (int k = 1; k < 4; ++k) {
        dk *= delta;
        E[k] = (dk * e - k * E[k - 1]) / sigma;
    }
    return E;
}

// Monomial coefficients (about u = y - y[j]) of the cubic through four
// consecutive samples chosen around cell j of a block with n nodes.
std::array<double, 4> cell_cubic(const double* y, const double* v, int n, int j) {
    int j0 = std::clamp(j - 1, 0, n - 4);
    double t[4], d[4];
    for (int k = 0; k < 4; ++k) {
        t[k] = y[j0 + k] - y[j];
        d[k] = v[j0 + k];
    }
    // Divided differences in place.
    for (int level = 1; level < 4; ++level)
        for (int k = 3; k >= level; --k) d[k] = (d[k] - d[k - 1]) / (t[k] - t[k - level]);
    // Expand the Newton form to monomials.
    std::array<double, 4> c{d[0], 0.0, 0.0, 0.0};
    std::array<double, 4> w{1.0, 0.0, 0.0, 0.0};  // product (u - t0)...(u - t_{level-1})
    for (int level = 1; level < 4; ++level) {
        for (int k = 3; k >= 1; --k) w[k] = w[k - 1] - t[level - 1] * w[k];
        w[0] = -t[level - 1] * w[0];
        for (int k = 0; k < 4; ++k) c[k] += d[level] * w[k];
    }
    return c;
}

// h values at the nodes of one block:
//   h(x_i) = pre * Int_block e^{-sigma |x_i - y|} g(y) dy
// with the kernel exact and g replaced by its local cubic per cell.  The two
// sweeps keep every factor bounded by 1, so no large exponentials appear.
std::vector<double> smoothing_integrals(const std::vector<double>& y,
                                        const std::vector<double>& g, double sigma,
                                        double pre) {
    const int n = static_cast<int>(y.size());
    if (n < 4) throw ParameterError("resolvent_closed_form: need >= 4 nodes per block");
    std::vector<double> L(n, 0.0), R(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double delta = y[i + 1] - y[i];
        if (!(delta > 0.0)) throw ParameterError("resolvent_closed_form: nodes not ascending");
        const auto c = cell_cubic(y.data(), g.data(), n, i);
        const double decay = std::exp(-sigma * delta);
        const auto Ep = exp_moments(sigma, delta);
        double cellL = 0.0;
        for (int k = 0; k < 4; ++k) cellL += c[k] * Ep[k];
        L[i + 1] = decay * L[i] + decay * cellL;
        const auto Em = exp_moments(-sigma, delta);
        double cellR = 0.0;
        for (int k = 0; k < 4; ++k) cellR += c[k] * Em[k];
        R[i] = cellR;  // neighbor contribution added in the backward sweep
    }
    for (int i = n - 2; i >= 0; --i) {
        const double delta = y[i + 1] - y[i];
        R[i] += std::exp(-sigma * delta) * R[i + 1];
    }
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = pre * (L[i] + R[i]);
    return h;
}

struct ClosedFormPieces {
    std::vector<double> h_lower, h_upper;
    double s, q;
};

ClosedFormPieces smoothing_two_sided(double lambda, const RadialProfile& g,
                                     const TransmissionParams& p) {
    ClosedFormPieces out;
    out.s = std::sqrt(lambda);
    out.q = std::sqrt(lambda / p.kappa);
    const auto& grid = g.grid;
    std::vector<double> gl(g.values.begin(), g.values.begin() + grid.n_lower());
    std::vector<double> gu(g.values.begin() + grid.n_lower(), g.values.end());
    out.h_lower =
        smoothing_integrals(grid.lower, gl, out.q, 1.0 / (2.0 * p.kappa * out.q));
    out.h_upper = smoothing_integrals(grid.upper, gu, out.s, 1.0 / (2.0 * out.s));
    return out;
}

void require_uniform_block(const std::vector<double>& y, const char* what) {
    const double h = y[1] - y[0];
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (std::abs((y[i + 1] - y[i]) - h) > 1e-12 * std::abs(h))
            throw ParameterError(std::string(what) + ": block grid must be uniform");
}

}  // namespace

RadialGrid1D RadialGrid1D::uniform(double lo, double mid, double hi, int n_lower,
                                   int n_upper) {
    if (n_lower < 2 || n_upper < 2) throw ParameterError("RadialGrid1D: need >= 2 nodes");
    if (!(lo < mid && mid < hi)) throw ParameterError("RadialGrid1D: need lo < mid < hi");
    RadialGrid1D g;
    g.lower.resize(n_lower);
    g.upper.resize(n_upper);
    for (int i = 0; i < n_lower; ++i)
        g.lower[i] = lo + (mid - lo) * i / static_cast<double>(n_lower - 1);
    for (int i = 0; i < n_upper; ++i)
        g.upper[i] = mid + (hi - mid) * i / static_cast<double>(n_upper - 1);
    g.lower.back() = mid;
    g.upper.front() = mid;
    return g;
}

RadialGrid1D RadialGrid1D::log_image() const {
    RadialGrid1D g = *this;
    for (double& x : g.lower) {
        if (!(x > 0.0)) throw DomainError("RadialGrid1D::log_image: nodes must be positive");
        x = std::log(x);
    }
    for (double& x : g.upper) x = std::log(x);
    return g;
}

RadialProfile resolvent_closed_form(double lambda, const RadialProfile& g,
                                    const TransmissionParams& p) {
    if (!(lambda > 0.0)) throw ParameterError("resolvent_closed_form: lambda must be > 0");
    p.validate();
    const auto& grid = g.grid;
    const double a = grid.lower.front(), b = grid.upper.back();
    TwoSidedInterval iv{a, b};
    iv.validate();
    if (std::abs(grid.lower.back()) > 1e-14 || std::abs(grid.upper.front()) > 1e-14)
        throw ParameterError("resolvent_closed_form: membrane must sit at 0");

    const auto pieces = smoothing_two_sided(lambda, g, p);
    const double s = pieces.s, q = pieces.q;
    const double ha = pieces.h_lower.front(), h0m = pieces.h_lower.back();
    const double h0p = pieces.h_upper.front(), hb = pieces.h_upper.back();
    const double A0 = -a;
    const double Sa = std::sinh(q * A0), Ca = std::cosh(q * A0);
    const double Sb = std::sinh(s * b), Cb = std::cosh(s * b);
    const double alpha = p.alpha, beta = p.beta;

    const double m11 = q * Sa + beta * Ca, m12 = -beta * Cb;
    const double m21 = -alpha * Ca, m22 = s * Sb + alpha * Cb;
    const double det = m11 * m22 - m12 * m21;
    if (!(det > 0.0))
        throw InternalError("resolvent_closed_form: non-positive transmission determinant");
    const double r1 =
        q * ha * Ca + q * h0m + beta * (-hb * Sb + h0p + ha * Sa - h0m);
    const double r2 =
        s * hb * Cb + s * h0p + alpha * (hb * Sb - h0p - ha * Sa + h0m);
    const double c1 = (r1 * m22 - m12 * r2) / det;
    const double c2 = (m11 * r2 - m21 * r1) / det;

    RadialProfile f(grid);
    for (int i = 0; i < grid.n_lower(); ++i) {
        const double x = grid.lower[i];
        f.values[i] = c1 * std::cosh(q * (x - a)) - ha * std::sinh(q * (x - a)) +
                      pieces.h_lower[i];
    }
    for (int i = 0; i < grid.n_upper(); ++i) {
        const double x = grid.upper[i];
        f.values[grid.n_lower() + i] =
            c2 * std::cosh(s * (b - x)) - hb * std::sinh(s * (b - x)) + pieces.h_upper[i];
    }
    return f;
}

double transmission_determinant(double lambda, const TransmissionParams& p,
                                const TwoSidedInterval& iv) {
    if (!(lambda > 0.0)) throw ParameterError("transmission_determinant: lambda must be > 0");
    p.validate();
    iv.validate();
    const double s = std::sqrt(lambda), q = std::sqrt(lambda / p.kappa);
    const double Sa = std::sinh(-q * iv.a), Ca = std::cosh(q * iv.a);
    const double Sb = std::sinh(s * iv.b), Cb = std::cosh(s * iv.b);
    return (q * Sa + p.beta * Ca) * (s * Sb + p.alpha * Cb) - p.alpha * p.beta * Ca * Cb;
}

std::vector<double> log_conjugate_apply(const RadialProfile& f, const TransmissionParams& p,
                                        double tau_bc) {
    p.validate();
    const auto& grid = f.grid;
    const int nl = grid.n_lower(), nu = grid.n_upper(), n = grid.size();
    if (nl < 4 || nu < 4) throw ParameterError("log_conjugate_apply: need >= 4 nodes per block");
    require_uniform_block(grid.lower, "log_conjugate_apply");
    require_uniform_block(grid.upper, "log_conjugate_apply");
    const double hl = grid.lower[1] - grid.lower[0];
    const double hu = grid.upper[1] - grid.upper[0];
    const auto& v = f.values;

    const double jump = v[nl] - v[nl - 1];
    const double d_r = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * hl);
    const double d_1m = (3 * v[nl - 1] - 4 * v[nl - 2] + v[nl - 3]) / (2 * hl);
    const double d_1p = (-3 * v[nl] + 4 * v[nl + 1] - v[nl + 2]) / (2 * hu);
    const double d_R = (3 * v[n - 1] - 4 * v[n - 2] + v[n - 3]) / (2 * hu);
    const double res_r = d_r;
    const double res_1m = d_1m - p.beta * jump;
    const double res_1p = d_1p - p.alpha * jump;
    const double res_R = d_R;

    const double tau = tau_bc >= 0.0 ? tau_bc : 1e-8 * sup_norm(v);
    const double worst = std::max(std::max(std::abs(res_r), std::abs(res_1m)),
                                  std::max(std::abs(res_1p), std::abs(res_R)));
    if (worst > tau)
        throw PreconditionError("log_conjugate_apply: boundary/transmission residual " +
                                std::to_string(worst) + " exceeds tolerance");

    std::vector<double> out(n, 0.0);
    for (int i = 1; i + 1 < nl; ++i) {
        const double rho = grid.lower[i];
        const double d2 = (v[i - 1] - 2 * v[i] + v[i + 1]) / (hl * hl);
        const double d1 = (v[i + 1] - v[i - 1]) / (2 * hl);
        out[i] = p.kappa * (rho * rho * d2 + rho * d1);
    }
    for (int i = nl + 1; i + 1 < n; ++i) {
        const double rho = grid.upper[i - nl];
        const double d2 = (v[i - 1] - 2 * v[i] + v[i + 1]) / (hu * hu);
        const double d1 = (v[i + 1] - v[i - 1]) / (2 * hu);
        out[i] = rho * rho * d2 + rho * d1;
    }
    out[0] = res_r;
    out[nl - 1] = res_1m;
    out[nl] = res_1p;
    out[n - 1] = res_R;
    return out;
}

RadialOperator assemble_log_conjugate(const RadialGrid1D& vgrid, const TransmissionParams& p) {
    p.validate();
    const int nl = vgrid.n_lower(), nu = vgrid.n_upper(), n = vgrid.size();
    if (nl < 4 || nu < 4)
        throw ParameterError("assemble_log_conjugate: need >= 4 nodes per block");
    require_uniform_block(vgrid.lower, "assemble_log_conjugate");
    require_uniform_block(vgrid.upper, "assemble_log_conjugate");
    const double hl = vgrid.lower[1] - vgrid.lower[0];
    const double hu = vgrid.upper[1] - vgrid.upper[0];

    RadialOperator op;
    op.rows.resize(n);
    for (int i = 1; i + 1 < nl; ++i) {
        const double rho = vgrid.lower[i];
        const double A = p.kappa * rho * rho, B = p.kappa * rho;
        op.rows[i] = {RowKind::Interior, i - 1,
                      {A / (hl * hl) - B / (2 * hl), -2 * A / (hl * hl),
                       A / (hl * hl) + B / (2 * hl), 0.0, 0.0}};
    }
    for (int i = nl + 1; i + 1 < n; ++i) {
        const double rho = vgrid.upper[i - nl];
        const double A = rho * rho, B = rho;
        op.rows[i] = {RowKind::Interior, i - 1,
                      {A / (hu * hu) - B / (2 * hu), -2 * A / (hu * hu),
                       A / (hu * hu) + B / (2 * hu), 0.0, 0.0}};
    }
    op.rows[0] = {RowKind::Condition, 0,
                  {-3 / (2 * hl), 4 / (2 * hl), -1 / (2 * hl), 0.0, 0.0}};
    op.rows[nl - 1] = {RowKind::Condition, nl - 4,
                       {0.0, 1 / (2 * hl), -4 / (2 * hl), 3 / (2 * hl) + p.beta, -p.beta}};
    op.rows[nl] = {RowKind::Condition, nl - 1,
                   {p.alpha, -3 / (2 * hu) - p.alpha, 4 / (2 * hu), -1 / (2 * hu), 0.0}};
    op.rows[n - 1] = {RowKind::Condition, n - 3,
                      {1 / (2 * hu), -4 / (2 * hu), 3 / (2 * hu), 0.0, 0.0}};
    return op;
}

RadialProfile log_conjugate_resolvent(double lambda, const RadialProfile& g,
                                      const TransmissionParams& p) {
    if (!(lambda > 0.0)) throw ParameterError("log_conjugate_resolvent: lambda must be > 0");
    RadialOperator op = assemble_log_conjugate(g.grid, p);
    RadialProfile f(g.grid);
    f.values = solve_shifted(op, lambda, g.values);
    return f;
}

namespace {

// alpha = 0 branch of the circle+point resolvent, in log coordinates
// x = ln rho on [a, 0-] with the point at 0+.  The solution ansatz
//   f(x) = C cosh(q(x-a)) - h(a) sinh(q(x-a)) + h(x),   f(0+) = g(0+)/lambda
// satisfies lambda f - kappa f'' = g and f'(a) = 0 for every C.  Imposing the
// remaining condition f'(0-) = beta (f(0+) - f(0-)) and using
// h'(0-) = -q h(0-) gives
//   C (q sinh(q|a|) + beta cosh(q|a|)) =
//       q h(a) cosh(q|a|) + q h(0-) + beta (g(0+)/lambda + h(a) sinh(q|a|) - h(0-)),
// whose right-hand side is the functional of g fixing C; the bracket on the
// left is strictly positive.
void circle_point_solve_alpha0(double lambda, const std::vector<double>& x,
                               const std::vector<double>& gl, double gp,
                               const TransmissionParams& p, std::vector<double>& fl,
                               double& fp) {
    const double q = std::sqrt(lambda / p.kappa);
    const auto h = smoothing_integrals(x, gl, q, 1.0 / (2.0 * p.kappa * q));
    const double a = x.front(), A0 = -a;
    const double Sa = std::sinh(q * A0), Ca = std::cosh(q * A0);
    fp = gp / lambda;
    const double functional =
        q * h.front() * Ca + q * h.back() + p.beta * (fp + h.front() * Sa - h.back());
    const double C = functional / (q * Sa + p.beta * Ca);
    fl.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        fl[i] = C * std::cosh(q * (x[i] - a)) - h.front() * std::sinh(q * (x[i] - a)) + h[i];
}

}  // namespace

CirclePointProfile circle_point_resolvent(double lambda, const CirclePointProfile& g,
                                          const TransmissionParams& p) {
    if (!(lambda > 0.0)) throw ParameterError("circle_point_resolvent: lambda must be > 0");
    p.validate();
    const int n = static_cast<int>(g.lower_nodes.size());
    if (n < 4) throw ParameterError("circle_point_resolvent: need >= 4 lower nodes");
    if (std::abs(g.lower_nodes.back() - 1.0) > 1e-14)
        throw ParameterError("circle_point_resolvent: lower block must end at 1");
    if (!(g.lower_nodes.front() > 0.0 && g.lower_nodes.front() < 1.0))
        throw ParameterError("circle_point_resolvent: inner radius must lie in (0,1)");

    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = std::log(g.lower_nodes[i]);

    CirclePointProfile f;
    f.lower_nodes = g.lower_nodes;
    if (p.alpha == 0.0) {
        circle_point_solve_alpha0(lambda, x, g.lower_values, g.point_value, p,
                                  f.lower_values, f.point_value);
        return f;
    }

    if (lambda > 2.0 * p.alpha) {
        // Bounded-perturbation iteration: f_{k+1} = R0(lambda)(g + B f_k) with
        // B f supported at the point; contraction factor 2 alpha / lambda.
        std::vector<double> fl(n, 0.0), fl_new;
        double fp = 0.0, fp_new = 0.0;
        const double scale = std::max(1.0, std::max(sup_norm(g.lower_values),
                                                    std::abs(g.point_value)));
        for (int it = 0; it < 400; ++it) {
            const double forced_point = g.point_value - p.alpha * fp + p.alpha * fl.back();
            circle_point_solve_alpha0(lambda, x, g.lower_values, forced_point, p, fl_new,
                                      fp_new);
            double incr = std::abs(fp_new - fp);
            for (int i = 0; i < n; ++i) incr = std::max(incr, std::abs(fl_new[i] - fl[i]));
            fl.swap(fl_new);
            fp = fp_new;
            if (2.0 * p.alpha * incr <= 1e-12 * scale) {
                f.lower_values = fl;
                f.point_value = fp;
                return f;
            }
        }
        throw InternalError("circle_point_resolvent: perturbation iteration stalled");
    }

    // lambda <= 2 alpha: direct banded solve of the discretized system on the
    // physical grid (uniform spacing required).
    require_uniform_block(g.lower_nodes, "circle_point_resolvent");
    const double h = g.lower_nodes[1] - g.lower_nodes[0];
    RadialOperator op;
    op.rows.resize(n + 1);
    for (int i = 1; i + 1 < n; ++i) {
        const double rho = g.lower_nodes[i];
        const double A = p.kappa * rho * rho, B = p.kappa * rho;
        op.rows[i] = {RowKind::Interior, i - 1,
                      {A / (h * h) - B / (2 * h), -2 * A / (h * h), A / (h * h) + B / (2 * h),
                       0.0, 0.0}};
    }
    op.rows[0] = {RowKind::Condition, 0, {-3 / (2 * h), 4 / (2 * h), -1 / (2 * h), 0.0, 0.0}};
    op.rows[n - 1] = {RowKind::Condition, n - 4,
                      {0.0, 1 / (2 * h), -4 / (2 * h), 3 / (2 * h) + p.beta, -p.beta}};
    op.rows[n] = {RowKind::Interior, n - 1, {p.alpha, -p.alpha, 0.0, 0.0, 0.0}};

    std::vector<double> rhs(n + 1);
    for (int i = 0; i < n; ++i) rhs[i] = g.lower_values[i];
    rhs[n] = g.point_value;
    std::vector<double> sol = solve_shifted(op, lambda, rhs);
    f.lower_values.assign(sol.begin(), sol.begin() + n);
    f.point_value = sol[n];
    return f;
}

}  // namespace thinmem
