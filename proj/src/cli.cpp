#include "thinmem/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "thinmem/harness.hpp"
#include "thinmem/radial1d.hpp"

namespace thinmem {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ScenarioKind parse_scenario(const std::string& s) {
    if (s == "a") return ScenarioKind::TwoThin;
    if (s == "b") return ScenarioKind::ThinOverThick;
    if (s == "c") return ScenarioKind::ThinOverFast;
    throw ParameterError("scenario must be one of a|b|c");
}

Scenario scenario_from(ScenarioKind kind, double th, double r, double gamma) {
    switch (kind) {
        case ScenarioKind::TwoThin: return Scenario::two_thin(th);
        case ScenarioKind::ThinOverThick: return Scenario::thin_over_thick(th, r);
        case ScenarioKind::ThinOverFast:
            return Scenario::thin_over_fast(gamma / (th * th), r);
    }
    throw InternalError("scenario_from: unreachable");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw ParameterError("empty thickness list");
    return out;
}

// Writes a numeric table in the configured format ("csv" or "json").
void write_table(const std::string& dir, const std::string& name,
                 const std::vector<std::string>& cols,
                 const std::vector<std::vector<double>>& rows, const std::string& format) {
    std::filesystem::create_directories(dir);
    if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json o;
            for (std::size_t c = 0; c < cols.size(); ++c) o[cols[c]] = r[c];
            j.push_back(o);
        }
        write_text_atomic(dir + "/" + name + ".json", j.dump(2) + "\n");
        return;
    }
    std::string text;
    for (std::size_t c = 0; c < cols.size(); ++c)
        text += cols[c] + (c + 1 < cols.size() ? "," : "\n");
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c)
            text += fmt17(r[c]) + (c + 1 < r.size() ? "," : "\n");
    }
    write_text_atomic(dir + "/" + name + ".csv", text);
}

void check_strictly_decreasing(const std::vector<double>& values, const std::string& what) {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] < values[i - 1]))
            throw InternalError(what + ": expected strictly decreasing values, got " +
                                fmt17(values[i - 1]) + " -> " + fmt17(values[i]) +
                                " at row " + std::to_string(i));
}

int cmd_oracle(const Config& cfg, double lambda) {
    const double r = cfg.r, R = 1.0 + cfg.thicknesses.front();
    TransmissionParams p = cfg.params();
    auto run_at = [&](int n_per_layer) {
        RadialGrid1D vgrid = RadialGrid1D::uniform(r, 1.0, R, n_per_layer, n_per_layer);
        RadialProfile g = RadialProfile::sample(
            vgrid, [](double rho) { return std::sin(2.0 * rho) + 2.0; });
        RadialProfile discrete = log_conjugate_resolvent(lambda, g, p);
        RadialProfile gx = g;
        gx.grid = vgrid.log_image();
        RadialProfile exact = resolvent_closed_form(lambda, gx, p);
        double abs_err = 0.0, ref = 0.0;
        for (int i = 0; i < vgrid.size(); ++i) {
            abs_err = std::max(abs_err, std::abs(discrete.values[i] - exact.values[i]));
            ref = std::max(ref, std::abs(exact.values[i]));
        }
        return std::pair<double, double>(abs_err, abs_err / ref);
    };
    const int n1 = cfg.nrad, n2 = 2 * cfg.nrad - 1;
    auto [e1, rel1] = run_at(n1);
    auto [e2, rel2] = run_at(n2);
    const double order = std::log2(e1 / e2);
    std::vector<std::vector<double>> rows = {{double(n1), e1, rel1},
                                             {double(n2), e2, rel2}};
    write_table(cfg.out, "oracle", {"n_per_layer", "sup_abs_err", "sup_rel_err"}, rows,
                cfg.format);
    write_manifest(cfg.out, cfg, "oracle");
    std::cout << "oracle: lambda=" << lambda << " r=" << r << " R=" << R << "\n";
    std::cout << "  n=" << n1 << "  rel_err=" << fmt17(rel1) << "\n";
    std::cout << "  n=" << n2 << "  rel_err=" << fmt17(rel2) << "\n";
    std::cout << "  observed order = " << fmt17(order) << "\n";
    return 0;
}

int cmd_solve(const Config& cfg, ScenarioKind kind, const std::string& input) {
    Scenario sc = scenario_from(kind, cfg.thicknesses.front(), cfg.r, cfg.gamma);
    TransmissionParams p = cfg.params();
    if (kind == ScenarioKind::ThinOverFast) p.kappa = sc.thickness;
    ReferenceGrid grid = build_reference_grid(sc, cfg.nrad, cfg.nrad, cfg.nang);
    LayerField u0 = input.empty() ? lift_limit_state(default_limit_state(kind, grid), grid)
                                  : read_field_csv(input, sc);
    DiscreteGenerator gen = assemble_generator(sc, Flavor::Physical, p, grid);
    LayerField ut = cfg.t == 0.0 ? u0 : evolve(gen, u0, cfg.t, cfg.dt, cfg.time_scheme());
    std::filesystem::create_directories(cfg.out);
    write_field_csv(ut, cfg.out + "/field.csv");
    write_manifest(cfg.out, cfg, "solve");
    std::cout << "solve: wrote " << cfg.out << "/field.csv\n";
    return 0;
}

int cmd_converge(const Config& cfg, ScenarioKind kind, bool gamma_sweep) {
    TransmissionParams p = cfg.params();
    Scenario sc0 = scenario_from(kind, cfg.thicknesses.front(), cfg.r, cfg.gamma);
    ReferenceGrid grid = build_reference_grid(sc0, cfg.nrad, cfg.nrad, cfg.nang);
    LayerField u0 = lift_limit_state(default_limit_state(kind, grid), grid);
    auto rows = run_convergence_study(kind, p, u0, cfg.t, cfg.thicknesses, cfg.dt,
                                      cfg.time_scheme());
    std::vector<std::vector<double>> table;
    std::vector<double> errs;
    for (const auto& r : rows) {
        table.push_back({r.thickness, r.error, r.ratio});
        errs.push_back(r.error);
    }
    write_table(cfg.out, "converge", {"thickness", "error", "ratio"}, table, cfg.format);
    write_manifest(cfg.out, cfg, "converge");
    for (const auto& r : rows)
        std::cout << "theta=" << fmt17(r.thickness) << "  e=" << fmt17(r.error)
                  << "  ratio=" << fmt17(r.ratio) << "\n";

    if (gamma_sweep) {
        // Lumped occupancy dynamics of the TwoThin limit at several gamma:
        // the leave-upper rate is alpha/gamma, so thicker membrane layers
        // jump less often.
        std::vector<std::vector<double>> occ;
        for (double tt = 0.0; tt <= cfg.t + 1e-12; tt += cfg.t / 50.0) {
            std::vector<double> row = {tt};
            for (double gm : {0.5, 1.0, 2.0}) {
                const double a = cfg.alpha / gm, b = cfg.kappa * cfg.beta;
                const double stat = b / (a + b);
                row.push_back(stat + std::exp(-(a + b) * tt) * (1.0 - stat));
            }
            occ.push_back(row);
        }
        write_table(cfg.out, "gamma_sweep",
                    {"t", "occ_upper_gamma_0.5", "occ_upper_gamma_1", "occ_upper_gamma_2"},
                    occ, cfg.format);
    }
    check_strictly_decreasing(errs, "converge");
    return 0;
}

int cmd_kurtz(const Config& cfg, ScenarioKind kind) {
    TransmissionParams p = cfg.params();
    Scenario sc0 = scenario_from(kind, cfg.thicknesses.front(), cfg.r, cfg.gamma);
    ReferenceGrid grid = build_reference_grid(sc0, cfg.nrad, cfg.nrad, cfg.nang);
    LayerField core = canonical_core_element(kind, grid);
    LimitState state = condition_a_state(kind, grid, p);
    KurtzReport rep = run_kurtz_suite(kind, p, grid, core, state, cfg.thicknesses);

    std::vector<std::vector<double>> table;
    std::vector<double> fast;
    for (std::size_t i = 0; i < rep.fast.size(); ++i) {
        table.push_back({rep.fast[i].thickness, rep.fast[i].residual,
                         rep.cond_a[i].lift_error, rep.cond_a[i].op_error});
        fast.push_back(rep.fast[i].residual);
    }
    write_table(cfg.out, "kurtz",
                {"thickness", "fast_residual", "lift_error", "op_error"}, table,
                cfg.format);
    write_manifest(cfg.out, cfg, "kurtz");
    for (const auto& r : table)
        std::cout << "theta=" << fmt17(r[0]) << "  fast=" << fmt17(r[1])
                  << "  lift=" << fmt17(r[2]) << "  op=" << fmt17(r[3]) << "\n";
    check_strictly_decreasing(fast, "kurtz fast residual");
    return 0;
}

int cmd_mc(const Config& cfg, const std::string& mode) {
    McOptions opt;
    opt.n_bins = cfg.mc_bins;
    opt.record_dt = cfg.mc_record_dt;
    opt.threads = 2;
    opt.crossing_cal_upper = cfg.mc_cal_upper;
    opt.crossing_cal_lower = cfg.mc_cal_lower;
    EmpiricalSummary s;
    if (mode == "membrane") {
        opt.init = McInit::UniformUpper;
        const double R = 1.0 + cfg.thicknesses.front();
        s = simulate_membrane_bm(cfg.params(), cfg.r, R, cfg.mc_particles, cfg.mc_t_end,
                                 cfg.mc_dt, cfg.seed, opt);
    } else if (mode == "limit-a" || mode == "limit-c") {
        opt.init = McInit::PointUpper;
        s = simulate_limit_jump_diffusion(
            mode == "limit-a" ? ScenarioKind::TwoThin : ScenarioKind::ThinOverFast,
            cfg.params(), cfg.mc_particles, cfg.mc_t_end, cfg.mc_record_dt, cfg.seed, opt);
    } else {
        throw ParameterError("mc: mode must be membrane|limit-a|limit-c");
    }
    std::filesystem::create_directories(cfg.out);
    write_occupancy_csv(s, cfg.out + "/occupancy.csv");
    write_histogram_csv(s, cfg.out + "/histogram.csv");
    write_manifest(cfg.out, cfg, "mc");
    std::cout << "mc: final upper fraction = " << fmt17(s.frac_upper(s.times.size() - 1))
              << "\n";
    return 0;
}

int cmd_calibrate(Config cfg) {
    const double R = 1.0 + cfg.thicknesses.front();
    CalibrationResult res = calibrate_crossing(cfg.params(), cfg.r, R, cfg.mc_dt,
                                               cfg.mc_particles, cfg.mc_t_end, cfg.seed);
    cfg.mc_cal_upper = res.cal;
    cfg.mc_cal_lower = res.cal;
    cfg.mc_cal_residual = res.residual;
    write_manifest(cfg.out, cfg, "calibrate-mc");
    std::cout << "calibrate-mc: cal=" << fmt17(res.cal)
              << "  residual=" << fmt17(res.residual) << "\n";
    std::cout << "  (stored in " << cfg.out << "/manifest.json)\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    try {
        Config cfg;
        // The config file is applied first so that explicit flags override it.
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                std::vector<std::string> warnings;
                cfg = load_config(args[i + 1], &warnings);
                for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            }
        }

        CLI::App app{"Diffusion across a semi-permeable membrane in thin annular layers: "
                     "deterministic solvers, thin-layer limits, and particle checks"};
        app.require_subcommand(1);
        std::string config_path, thick_str, format = cfg.format, scheme = cfg.scheme;
        app.add_option("--config", config_path, "JSON config or run manifest");

        auto add_common = [&](CLI::App* sub) {
            sub->add_option("--alpha", cfg.alpha, "permeability upper->lower");
            sub->add_option("--beta", cfg.beta, "permeability lower->upper");
            sub->add_option("--kappa", cfg.kappa, "lower-layer diffusivity");
            sub->add_option("--gamma", cfg.gamma, "thickness ratio / fast coupling");
            sub->add_option("--r", cfg.r, "inner radius");
            sub->add_option("--thicknesses", thick_str, "comma-separated decreasing list");
            sub->add_option("--t", cfg.t, "final time");
            sub->add_option("--dt", cfg.dt, "time step");
            sub->add_option("--nrad", cfg.nrad, "radial points per layer");
            sub->add_option("--nang", cfg.nang, "angular points");
            sub->add_option("--seed", cfg.seed, "RNG seed");
            sub->add_option("--out", cfg.out, "output directory");
            sub->add_flag("--paper-literal", cfg.paper_literal,
                          "non-conservative lumped-state coupling");
            sub->add_option("--format", format, "csv|json");
            sub->add_option("--scheme", scheme, "ie|cn");
            sub->add_option("--config", config_path, "JSON config or run manifest")
                ->configurable(false);
        };

        double lambda = 1.0;
        std::string scenario_str = "a", solve_input, mc_mode = "membrane";
        bool gamma_sweep = false;

        CLI::App* oracle = app.add_subcommand("oracle", "closed form vs discrete resolvent");
        add_common(oracle);
        oracle->add_option("--lambda", lambda, "resolvent parameter");

        CLI::App* solve = app.add_subcommand("solve", "single evolve run");
        add_common(solve);
        solve->add_option("--scenario", scenario_str, "a|b|c");
        solve->add_option("--in", solve_input, "input field CSV");

        CLI::App* converge = app.add_subcommand("converge", "thin-layer convergence table");
        add_common(converge);
        converge->add_option("--scenario", scenario_str, "a|b|c");
        converge->add_flag("--gamma-sweep", gamma_sweep,
                           "emit limit occupancy curves for gamma in {0.5,1,2}");

        CLI::App* kurtz = app.add_subcommand("kurtz", "fast-scale residual tables");
        add_common(kurtz);
        kurtz->add_option("--scenario", scenario_str, "a|b|c");

        CLI::App* mc = app.add_subcommand("mc", "particle simulations");
        add_common(mc);
        mc->add_option("--mc-mode", mc_mode, "membrane|limit-a|limit-c");
        mc->add_option("--mc-particles", cfg.mc_particles, "particle count");
        mc->add_option("--mc-t-end", cfg.mc_t_end, "simulation end time");
        mc->add_option("--mc-dt", cfg.mc_dt, "Euler-Maruyama step");
        mc->add_option("--mc-bins", cfg.mc_bins, "angular histogram bins");

        CLI::App* cal = app.add_subcommand("calibrate-mc", "fit the crossing multiplier");
        add_common(cal);
        cal->add_option("--mc-particles", cfg.mc_particles, "particle count");
        cal->add_option("--mc-t-end", cfg.mc_t_end, "curve end time");
        cal->add_option("--mc-dt", cfg.mc_dt, "Euler-Maruyama step");

        std::vector<std::string> argv_rev(args.rbegin(), args.rend());
        try {
            app.parse(argv_rev);
        } catch (const CLI::CallForHelp& e) {
            std::cout << app.help() << "\n";
            return 0;
        } catch (const CLI::ParseError& e) {
            std::cerr << "error: " << e.what() << "\n" << app.help() << "\n";
            return 1;
        }
        if (!thick_str.empty()) cfg.thicknesses = parse_list(thick_str);
        cfg.format = format;
        cfg.scheme = scheme;
        if (cfg.format != "csv" && cfg.format != "json")
            throw ParameterError("--format must be csv or json");
        if (cfg.scheme != "ie" && cfg.scheme != "cn")
            throw ParameterError("--scheme must be ie or cn");

        if (oracle->parsed()) return cmd_oracle(cfg, lambda);
        if (solve->parsed()) return cmd_solve(cfg, parse_scenario(scenario_str), solve_input);
        if (converge->parsed())
            return cmd_converge(cfg, parse_scenario(scenario_str), gamma_sweep);
        if (kurtz->parsed()) return cmd_kurtz(cfg, parse_scenario(scenario_str));
        if (mc->parsed()) return cmd_mc(cfg, mc_mode);
        if (cal->parsed()) return cmd_calibrate(cfg);
        return 1;
    } catch (const InternalError& e) {
        std::cerr << "internal assertion failed: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace thinmem
