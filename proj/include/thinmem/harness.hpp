#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinmem/limit.hpp"
#include "thinmem/montecarlo.hpp"

namespace thinmem {

inline constexpr const char* kVersion = "0.1.0";

// Full run specification; mirrors the CLI flags.  File values override the
// defaults, CLI flags override file values.
struct Config {
    double alpha = 1.0, beta = 1.0, kappa = 1.0, gamma = 1.0;
    double r = 0.5;
    int nrad = 65, nang = 64;
    double t = 0.5, dt = 1e-3;
    std::vector<double> thicknesses = {0.1, 0.05, 0.025, 0.0125};
    std::uint64_t seed = 12345;
    std::string out = "runs";
    bool paper_literal = false;
    std::string format = "csv";
    std::string scheme = "ie";  // "ie" or "cn"

    std::int64_t mc_particles = 100000;
    double mc_t_end = 1.0, mc_dt = 1e-3, mc_record_dt = 0.02;
    int mc_bins = 16;
    // Per-contact crossing-probability multipliers, calibrated once against
    // the mode-0 solve (see calibrate-mc); the shipped values were obtained
    // at dt = 1e-3, n = 2e4, seed 12345 on the r=0.5, R=1.5 geometry with
    // alpha = beta = kappa = 1.
    double mc_cal_upper = 0.909310, mc_cal_lower = 0.909310;
    double mc_cal_residual = 0.008910;

    TransmissionParams params() const { return {alpha, beta, kappa, gamma}; }
    TimeScheme time_scheme() const {
        return scheme == "cn" ? TimeScheme::CrankNicolson : TimeScheme::ImplicitEuler;
    }
};

// Reads a JSON config (or a run manifest, whose "config" object is then
// used).  Unknown keys produce warnings, malformed JSON a ParameterError
// carrying line/column diagnostics.
Config load_config(const std::string& path, std::vector<std::string>* warnings = nullptr);

std::string config_to_json_string(const Config& c);

// Writes the run manifest (effective config, seed, grid sizes, version, and
// the pinned tolerances) into dir/manifest.json atomically.
void write_manifest(const std::string& dir, const Config& c, const std::string& subcommand);

// Atomic text-file write (temp file + rename).
void write_text_atomic(const std::string& path, const std::string& content);

struct ConvergenceRow {
    double thickness = 0.0;
    double error = 0.0;
    double ratio = 0.0;  // previous error / this error; 0 for the first row
};

// Thin-layer convergence study: for each thickness, compares the evolved
// rescaled generator against the lifted evolved limit state on one common
// reference grid.  For ThinOverFast the sweep parameter is R-1 and
// kappa = gamma/(R-1)^2.
std::vector<ConvergenceRow> run_convergence_study(ScenarioKind kind,
                                                  const TransmissionParams& p,
                                                  const LayerField& u0, double t,
                                                  const std::vector<double>& thicknesses,
                                                  double dt, TimeScheme scheme);

struct KurtzConditionARow {
    double thickness = 0.0;
    double lift_error = 0.0;  // || lift_theta(u) - lift(u) ||
    double op_error = 0.0;    // || C_theta lift_theta(u) - O u || over interior rows
};

struct KurtzReport {
    std::vector<FastResidualRow> fast;        // fast-scale residual, core element
    std::vector<KurtzConditionARow> cond_a;   // limit-state element
};

KurtzReport run_kurtz_suite(ScenarioKind kind, const TransmissionParams& p,
                            const ReferenceGrid& grid, const LayerField& core_element,
                            const LimitState& state_element,
                            const std::vector<double>& thicknesses);

// The standard initial data of the experiments: cos(phi) on the membrane
// layer, zero (or the zero state) below.
LimitState default_limit_state(ScenarioKind kind, const ReferenceGrid& grid);

// A limit state inside the limit generator's domain.  For ThinOverThick the
// annulus component must satisfy the coupled flux condition at the membrane
// trace and the outer Neumann condition; the other scenarios have no
// compatibility constraint and reuse the default state.
LimitState condition_a_state(ScenarioKind kind, const ReferenceGrid& grid,
                             const TransmissionParams& p);

// Canonical core elements for the fast-scale checks; smooth, with a nonzero
// membrane jump, chosen so that the fast-scale residual is quadratic in the
// membrane-layer width.
LayerField canonical_core_element(ScenarioKind kind, const ReferenceGrid& grid);

// Occupancy curve of the backward mode-0 solve started from the indicator of
// the membrane layer, with mass measured in physical polar area; the particle
// simulation started uniformly in the membrane layer estimates this curve.
std::vector<double> pde_layer_mass_curve(const TransmissionParams& p, double r, double R,
                                         int nrad, double dt,
                                         const std::vector<double>& times);

struct CalibrationResult {
    double cal = 1.0;
    double residual = 0.0;
};

// Fits the shared crossing-probability multiplier by golden-section search on
// the sup distance between the particle and mode-0 layer-mass curves.
CalibrationResult calibrate_crossing(const TransmissionParams& p, double r, double R,
                                     double dt, std::int64_t n_particles, double t_end,
                                     std::uint64_t seed);

}  // namespace thinmem
