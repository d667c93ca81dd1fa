#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinmem/params.hpp"

namespace thinmem {

// Counter-based stream (Philox4x32-10), one stream per particle: results are
// bit-identical for any particle chunking or thread count.
class ParticleRng {
  public:
    ParticleRng(std::uint64_t seed, std::uint32_t particle)
        : seed_(seed), particle_(particle) {}

    double uniform();      // (0,1)
    double normal();
    double exponential(double rate);

  private:
    void refill();
    std::uint64_t seed_;
    std::uint32_t particle_;
    std::uint64_t counter_ = 0;
    std::uint32_t buf_[4]{};
    int avail_ = 0;
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

enum class McInit { UniformBoth, UniformUpper, PointUpper, PointLower };

struct McOptions {
    int n_bins = 16;
    double record_dt = 0.01;
    bool mirror = false;  // reflect the dynamics through phi -> 2*pi - phi
    int threads = 1;
    McInit init = McInit::UniformBoth;
    double init_rho = 0.0, init_phi = 0.0;  // for the point initial conditions
    double crossing_cal_upper = 1.0;        // calibration multipliers for the
    double crossing_cal_lower = 1.0;        // per-contact crossing probability
};

struct EmpiricalSummary {
    std::uint64_t seed = 0;
    std::int64_t n_particles = 0;
    int n_bins = 0;
    std::vector<double> times;
    std::vector<std::int64_t> upper_counts;            // occupancy time series
    std::vector<std::int64_t> hist_upper, hist_lower;  // angular histogram at t_end

    double frac_upper(std::size_t k) const {
        return static_cast<double>(upper_counts[k]) / static_cast<double>(n_particles);
    }
};

// CSV writers for the summary: "t,frac_upper,frac_lower" and
// "bin_phi,side,count".
void write_occupancy_csv(const EmpiricalSummary& s, const std::string& path);
void write_histogram_csv(const EmpiricalSummary& s, const std::string& path);

// Euler-Maruyama reflected Brownian motion in the two physical annuli
// [r,1] u [1,R] with membrane filtering at rho = 1: a contact from side s
// crosses with probability cal_s * c_s * sqrt(pi dt / D_s) (c = alpha from
// above, beta from below; D = 1 above, kappa below), otherwise the radius is
// mirrored.  Outer walls reflect.  dt must satisfy
// sqrt(2 max(1,kappa) dt) < min(1-r, R-1)/4.
EmpiricalSummary simulate_membrane_bm(const TransmissionParams& p, double r, double R,
                                      std::int64_t n_particles, double t_end, double dt,
                                      std::uint64_t seed, const McOptions& opt = {});

// Limit jump-diffusions with exact exponential clocks (dt is only the
// occupancy recording resolution).  TwoThin: Brownian motion on two circles
// (diffusivity 1 above, kappa below) with jump rates alpha/gamma down and
// kappa*beta up.  ThinOverFast: circle plus lumped point, rates alpha to the
// point and beta/gamma back, relanding uniformly.
EmpiricalSummary simulate_limit_jump_diffusion(ScenarioKind kind,
                                               const TransmissionParams& p,
                                               std::int64_t n_particles, double t_end,
                                               double dt, std::uint64_t seed,
                                               const McOptions& opt = {});

}  // namespace thinmem
