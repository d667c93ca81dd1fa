#include "thinmem/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace thinmem {

using nlohmann::json;

namespace {

void locate(const std::string& text, std::size_t byte, int& line, int& col) {
    line = 1;
    col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

template <typename T>
bool take(const json& j, const char* key, T& dst) {
    auto it = j.find(key);
    if (it == j.end()) return false;
    dst = it->get<T>();
    return true;
}

void apply_json(Config& c, const json& j, std::vector<std::string>* warnings) {
    static const char* known[] = {
        "alpha",       "beta",          "kappa",      "gamma",        "r",
        "nrad",        "nang",          "t",          "dt",           "thicknesses",
        "seed",        "out",           "paper_literal", "format",    "scheme",
        "mc_particles", "mc_t_end",     "mc_dt",      "mc_record_dt", "mc_bins",
        "mc_cal_upper", "mc_cal_lower", "mc_cal_residual"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok && warnings)
            warnings->push_back("config: unknown key '" + it.key() + "' ignored");
    }
    take(j, "alpha", c.alpha);
    take(j, "beta", c.beta);
    take(j, "kappa", c.kappa);
    take(j, "gamma", c.gamma);
    take(j, "r", c.r);
    take(j, "nrad", c.nrad);
    take(j, "nang", c.nang);
    take(j, "t", c.t);
    take(j, "dt", c.dt);
    take(j, "thicknesses", c.thicknesses);
    take(j, "seed", c.seed);
    take(j, "out", c.out);
    take(j, "paper_literal", c.paper_literal);
    take(j, "format", c.format);
    take(j, "scheme", c.scheme);
    take(j, "mc_particles", c.mc_particles);
    take(j, "mc_t_end", c.mc_t_end);
    take(j, "mc_dt", c.mc_dt);
    take(j, "mc_record_dt", c.mc_record_dt);
    take(j, "mc_bins", c.mc_bins);
    take(j, "mc_cal_upper", c.mc_cal_upper);
    take(j, "mc_cal_lower", c.mc_cal_lower);
    take(j, "mc_cal_residual", c.mc_cal_residual);
}

json config_json(const Config& c) {
    json j;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["kappa"] = c.kappa;
    j["gamma"] = c.gamma;
    j["r"] = c.r;
    j["nrad"] = c.nrad;
    j["nang"] = c.nang;
    j["t"] = c.t;
    j["dt"] = c.dt;
    j["thicknesses"] = c.thicknesses;
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["paper_literal"] = c.paper_literal;
    j["format"] = c.format;
    j["scheme"] = c.scheme;
    j["mc_particles"] = c.mc_particles;
    j["mc_t_end"] = c.mc_t_end;
    j["mc_dt"] = c.mc_dt;
    j["mc_record_dt"] = c.mc_record_dt;
    j["mc_bins"] = c.mc_bins;
    j["mc_cal_upper"] = c.mc_cal_upper;
    j["mc_cal_lower"] = c.mc_cal_lower;
    j["mc_cal_residual"] = c.mc_cal_residual;
    return j;
}

Scenario scenario_at(ScenarioKind kind, double th, double r, double gamma) {
    switch (kind) {
        case ScenarioKind::TwoThin: return Scenario::two_thin(th);
        case ScenarioKind::ThinOverThick: return Scenario::thin_over_thick(th, r);
        case ScenarioKind::ThinOverFast:
            return Scenario::thin_over_fast(gamma / (th * th), r);
    }
    throw InternalError("scenario_at: unreachable");
}

Flavor rescaled_flavor_of(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::TwoThin: return Flavor::RescaledTwoThin;
        case ScenarioKind::ThinOverThick: return Flavor::RescaledThinOverThick;
        case ScenarioKind::ThinOverFast: return Flavor::RescaledThinOverFast;
    }
    throw InternalError("rescaled_flavor_of: unreachable");
}

}  // namespace

Config load_config(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ParameterError("load_config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        int line, col;
        locate(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
        throw ParameterError("load_config: " + path + ":" + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + e.what());
    }
    if (!j.is_object()) throw ParameterError("load_config: top level must be an object");
    // A run manifest is accepted directly: its "config" object is the spec.
    if (j.contains("config") && j["config"].is_object()) j = j["config"];
    Config c;
    apply_json(c, j, warnings);
    return c;
}

std::string config_to_json_string(const Config& c) { return config_json(c).dump(2); }

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ParameterError("write_text_atomic: cannot open " + tmp);
        out << content;
        if (!out) throw InternalError("write_text_atomic: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_manifest(const std::string& dir, const Config& c, const std::string& subcommand) {
    std::filesystem::create_directories(dir);
    json j;
    j["subcommand"] = subcommand;
    j["version"] = kVersion;
    j["seed"] = c.seed;
    j["grid"] = {{"n_rad_lower", c.nrad}, {"n_rad_upper", c.nrad}, {"n_ang", c.nang}};
    j["config"] = config_json(c);
    j["tolerances"] = {{"solver_residual", 1e-10},
                       {"tau_bc", "1e-8 * sup|u|"},
                       {"conservativity", 1e-10},
                       {"positivity", -1e-12},
                       {"contraction_slack", 1e-10},
                       {"quadrature_rel", 1e-10}};
    write_text_atomic(dir + "/manifest.json", j.dump(2) + "\n");
}

std::vector<ConvergenceRow> run_convergence_study(ScenarioKind kind,
                                                  const TransmissionParams& p,
                                                  const LayerField& u0, double t,
                                                  const std::vector<double>& thicknesses,
                                                  double dt, TimeScheme scheme) {
    if (thicknesses.empty()) throw ParameterError("run_convergence_study: empty sequence");
    for (std::size_t i = 1; i < thicknesses.size(); ++i)
        if (!(thicknesses[i] < thicknesses[i - 1]))
            throw ParameterError("run_convergence_study: sequence must be strictly decreasing");

    const ReferenceGrid& grid = u0.grid;
    const double r = grid.scenario.fixed_inner_radius;
    Scenario sc0 = scenario_at(kind, thicknesses.front(), r, p.gamma);

    LimitGenerator limit_gen = assemble_limit_generator(sc0, p, grid);
    LimitState projected = project(sc0, u0);
    LimitState evolved = evolve_limit(limit_gen, projected, t, dt);
    LayerField reference = lift_limit_state(evolved, grid);

    std::vector<ConvergenceRow> rows;
    for (double th : thicknesses) {
        Scenario sc = scenario_at(kind, th, r, p.gamma);
        TransmissionParams pth = p;
        if (kind == ScenarioKind::ThinOverFast) pth.kappa = sc.thickness;
        DiscreteGenerator gen = assemble_generator(sc, rescaled_flavor_of(kind), pth, grid);
        LayerField ut = evolve(gen, u0, t, dt, scheme);
        ConvergenceRow row;
        row.thickness = th;
        row.error = sup_diff(ut.values, reference.values);
        row.ratio = rows.empty() ? 0.0 : rows.back().error / row.error;
        rows.push_back(row);
    }
    return rows;
}

KurtzReport run_kurtz_suite(ScenarioKind kind, const TransmissionParams& p,
                            const ReferenceGrid& grid, const LayerField& core_element,
                            const LimitState& state_element,
                            const std::vector<double>& thicknesses) {
    KurtzReport report;
    const double r = grid.scenario.fixed_inner_radius;
    report.fast = kurtz_fast_residual(kind, r, p, grid, core_element, thicknesses);

    const int m = grid.n_rad_lower, n = grid.rows(), M = grid.n_ang;
    LayerField plain = lift_limit_state(state_element, grid);
    for (double th : thicknesses) {
        Scenario sc = scenario_at(kind, th, r, p.gamma);
        TransmissionParams pth = p;
        if (kind == ScenarioKind::ThinOverFast) pth.kappa = sc.thickness;
        LayerField lifted =
            corrector_lift(sc, state_element, sc.thickness, pth, grid, false);
        LayerField inter = apply_intermediate_operator(sc, pth, grid, state_element);
        DiscreteGenerator gen = assemble_generator(sc, rescaled_flavor_of(kind), pth, grid);
        LayerField action = apply_generator(gen, lifted, {true, -1.0});
        KurtzConditionARow row;
        row.thickness = th;
        row.lift_error = sup_diff(lifted.values, plain.values);
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == 0 || i == m - 1 || i == m || i == n - 1) continue;
            for (int j = 0; j < M; ++j)
                err = std::max(err, std::abs(action.at(i, j) - inter.at(i, j)));
        }
        row.op_error = err;
        report.cond_a.push_back(row);
    }
    return report;
}

LimitState default_limit_state(ScenarioKind kind, const ReferenceGrid& grid) {
    const int M = grid.n_ang, m = grid.n_rad_lower;
    std::vector<double> g(M);
    for (int j = 0; j < M; ++j) g[j] = std::cos(grid.angle(j));
    switch (kind) {
        case ScenarioKind::TwoThin:
            return LimitState::two_circles(g, std::vector<double>(M, 0.0));
        case ScenarioKind::ThinOverThick:
            return LimitState::circle_annulus(
                g, std::vector<double>(static_cast<std::size_t>(m) * M, 0.0));
        case ScenarioKind::ThinOverFast: return LimitState::circle_point(g, 0.0);
    }
    throw InternalError("default_limit_state: unreachable");
}

LimitState condition_a_state(ScenarioKind kind, const ReferenceGrid& grid,
                             const TransmissionParams& p) {
    if (kind != ScenarioKind::ThinOverThick) return default_limit_state(kind, grid);
    const int M = grid.n_ang, m = grid.n_rad_lower;
    const double r = grid.lower_left(), w = 1.0 - r;
    // u_minus = q(varrho) cos(phi) with q'(r) = 0 and the membrane trace
    // condition q'(1) = beta (1 - q(1)) for g_plus = cos(phi):
    //   q = A + B (varrho - r)^2,  2 B w = beta (1 - A - B w^2).
    const double B = 0.3;
    const double A = 1.0 - B * w * w - (p.beta > 0.0 ? 2.0 * B * w / p.beta : 0.0);
    std::vector<double> g(M), um(static_cast<std::size_t>(m) * M);
    for (int j = 0; j < M; ++j) g[j] = std::cos(grid.angle(j));
    for (int i = 0; i < m; ++i) {
        const double d = grid.node(i) - r;
        const double q = p.beta > 0.0 ? A + B * d * d : 0.4;
        for (int j = 0; j < M; ++j) um[static_cast<std::size_t>(i) * M + j] = q * g[j];
    }
    return LimitState::circle_annulus(g, um);
}

LayerField canonical_core_element(ScenarioKind kind, const ReferenceGrid& grid) {
    const int m = grid.n_rad_lower, n = grid.rows(), M = grid.n_ang;
    const double l = grid.lower_left(), w = 1.0 - l;
    LayerField u(grid);
    for (int i = 0; i < n; ++i) {
        const double rho = grid.node(i);
        double f;
        switch (kind) {
            case ScenarioKind::TwoThin:
                // Small radial ripple per layer, zero slope at all four radial
                // boundaries, membrane jump 1.1.
                f = i < m ? 1.0 + 0.05 * std::cos(M_PI * rho)
                          : 2.0 + 0.05 * std::cos(M_PI * (rho - 1.0));
                break;
            case ScenarioKind::ThinOverThick:
                f = i < m ? 1.0 + 0.5 * std::cos(M_PI * (rho - l) / w) : 2.0;
                break;
            case ScenarioKind::ThinOverFast:
                f = i < m ? 2.0 + std::cos(M_PI * (rho - l) / w) : 1.0;
                break;
            default: f = 0.0;
        }
        for (int j = 0; j < M; ++j) u.at(i, j) = f * std::cos(grid.angle(j));
    }
    // An angular-independent offset keeps the element generic.
    for (auto& v : u.values) v += 1.0;
    return u;
}

std::vector<double> pde_layer_mass_curve(const TransmissionParams& p, double r, double R,
                                         int nrad, double dt,
                                         const std::vector<double>& times) {
    Scenario sc = Scenario::thin_over_thick(R - 1.0, r);
    ReferenceGrid grid = build_reference_grid(sc, nrad, nrad, 4);
    DiscreteGenerator gen = assemble_generator(sc, Flavor::Physical, p, grid);
    const RadialOperator& op = gen.mode(0).op;
    const int m = grid.n_rad_lower, n = grid.rows();

    std::vector<double> u(n, 0.0);
    for (int i = m; i < n; ++i) u[i] = 1.0;

    // Physical-area weights on the membrane layer.
    const double su = radial_map_slope(sc, p.gamma, Side::Upper);
    std::vector<double> wts(n - m, grid.h_upper());
    wts.front() /= 2;
    wts.back() /= 2;
    auto mass = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (int i = m; i < n; ++i)
            s += wts[i - m] * physical_radius(sc, p.gamma, grid.node(i), Side::Upper) * v[i];
        return 2.0 * su * s / (R * R - 1.0);
    };

    std::vector<double> out;
    out.reserve(times.size());
    ModeStepper stepper(op, dt, TimeScheme::ImplicitEuler);
    double t = 0.0;
    std::size_t k = 0;
    while (k < times.size()) {
        if (times[k] <= t + dt * 1e-6) {
            out.push_back(mass(u));
            ++k;
            continue;
        }
        stepper.step(u);
        t += dt;
    }
    return out;
}

CalibrationResult calibrate_crossing(const TransmissionParams& p, double r, double R,
                                     double dt, std::int64_t n_particles, double t_end,
                                     std::uint64_t seed) {
    std::vector<double> times;
    for (double t = 0.0; t <= t_end + 1e-9; t += 0.02) times.push_back(t);
    const std::vector<double> pde = pde_layer_mass_curve(p, r, R, 129, 1e-3, times);

    McOptions opt;
    opt.init = McInit::UniformUpper;
    opt.record_dt = 0.02;
    opt.threads = 2;

    auto objective = [&](double cal) {
        McOptions o = opt;
        o.crossing_cal_upper = cal;
        o.crossing_cal_lower = cal;
        EmpiricalSummary s = simulate_membrane_bm(p, r, R, n_particles, t_end, dt, seed, o);
        double worst = 0.0;
        for (std::size_t k = 0; k < times.size() && k < s.times.size(); ++k)
            worst = std::max(worst, std::abs(s.frac_upper(k) - pde[k]));
        return worst;
    };

    // Golden-section search on [0.7, 1.3].
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.7, b = 1.3;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = objective(c1), f2 = objective(c2);
    for (int it = 0; it < 14; ++it) {
        if (f1 < f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = objective(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = objective(c2);
        }
    }
    CalibrationResult res;
    res.cal = 0.5 * (a + b);
    res.residual = objective(res.cal);
    return res;
}

}  // namespace thinmem
