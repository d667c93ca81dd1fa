#include "thinmem/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace thinmem {

namespace {

struct U4 {
    std::uint32_t v[4];
};

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

U4 philox4x32(U4 ctr, std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, ctr.v[0], hi0, lo0);
        mulhilo(M1, ctr.v[2], hi1, lo1);
        ctr = U4{{hi1 ^ ctr.v[1] ^ k0, lo1, hi0 ^ ctr.v[3] ^ k1, lo0}};
        k0 += W0;
        k1 += W1;
    }
    return ctr;
}

}  // namespace

void ParticleRng::refill() {
    U4 ctr{{particle_, static_cast<std::uint32_t>(counter_),
            static_cast<std::uint32_t>(counter_ >> 32), 0x746D6331u}};
    ++counter_;
    U4 out = philox4x32(ctr, static_cast<std::uint32_t>(seed_),
                        static_cast<std::uint32_t>(seed_ >> 32));
    for (int i = 0; i < 4; ++i) buf_[i] = out.v[i];
    avail_ = 4;
}

double ParticleRng::uniform() {
    if (avail_ < 2) refill();
    const std::uint64_t x =
        (static_cast<std::uint64_t>(buf_[avail_ - 1]) << 32) | buf_[avail_ - 2];
    avail_ -= 2;
    // 52 random bits, centered: strictly inside (0,1)
    return (static_cast<double>(x >> 12) + 0.5) * (1.0 / 4503599627370496.0);
}

double ParticleRng::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    cached_normal_ = rad * std::sin(2.0 * M_PI * u2);
    have_cached_normal_ = true;
    return rad * std::cos(2.0 * M_PI * u2);
}

double ParticleRng::exponential(double rate) {
    if (!(rate > 0.0)) throw ParameterError("ParticleRng::exponential: rate must be > 0");
    return -std::log(uniform()) / rate;
}

void write_occupancy_csv(const EmpiricalSummary& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParameterError("write_occupancy_csv: cannot open " + path);
    out << "t,frac_upper,frac_lower\n";
    char buf[96];
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const double f = s.frac_upper(k);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.times[k], f, 1.0 - f);
        out << buf;
    }
}

void write_histogram_csv(const EmpiricalSummary& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParameterError("write_histogram_csv: cannot open " + path);
    out << "bin_phi,side,count\n";
    for (int b = 0; b < s.n_bins; ++b)
        out << b << ",upper," << s.hist_upper[b] << "\n";
    for (int b = 0; b < s.n_bins; ++b)
        out << b << ",lower," << s.hist_lower[b] << "\n";
}

EmpiricalSummary simulate_membrane_bm(const TransmissionParams& p, double r, double R,
                                      std::int64_t n_particles, double t_end, double dt,
                                      std::uint64_t seed, const McOptions& opt) {
    p.validate();
    if (!(r > 0.0 && r < 1.0 && R > 1.0))
        throw ParameterError("simulate_membrane_bm: need 0 < r < 1 < R");
    if (!(dt > 0.0 && t_end > 0.0))
        throw ParameterError("simulate_membrane_bm: need dt > 0 and t_end > 0");
    const double min_width = std::min(1.0 - r, R - 1.0);
    if (std::sqrt(2.0 * std::max(1.0, p.kappa) * dt) >= min_width / 4.0)
        throw ParameterError("simulate_membrane_bm: dt too large for the layer widths");

    const long long n_steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
    const long long rec_every =
        std::max(1LL, static_cast<long long>(std::llround(opt.record_dt / dt)));
    const std::size_t n_rec = static_cast<std::size_t>(n_steps / rec_every) + 1;

    const double p_cross_up =
        std::min(1.0, opt.crossing_cal_upper * p.alpha * std::sqrt(M_PI * dt / 1.0));
    const double p_cross_lo =
        std::min(1.0, opt.crossing_cal_lower * p.beta * std::sqrt(M_PI * dt / p.kappa));
    const double step_up = std::sqrt(2.0 * dt);
    const double step_lo = std::sqrt(2.0 * p.kappa * dt);
    const double ysign = opt.mirror ? -1.0 : 1.0;

    EmpiricalSummary sum;
    sum.seed = seed;
    sum.n_particles = n_particles;
    sum.n_bins = opt.n_bins;
    sum.times.resize(n_rec);
    for (std::size_t k = 0; k < n_rec; ++k) sum.times[k] = static_cast<double>(k) * rec_every * dt;

    const int n_threads = std::max(1, opt.threads);
    std::vector<std::vector<std::int64_t>> occ(n_threads,
                                               std::vector<std::int64_t>(n_rec, 0));
    std::vector<std::vector<std::int64_t>> hu(n_threads,
                                              std::vector<std::int64_t>(opt.n_bins, 0)),
        hl(n_threads, std::vector<std::int64_t>(opt.n_bins, 0));

    auto worker = [&](int tid, std::int64_t lo_particle, std::int64_t hi_particle) {
        for (std::int64_t q = lo_particle; q < hi_particle; ++q) {
            ParticleRng rng(seed, static_cast<std::uint32_t>(q));
            double x = 0.0, y = 0.0;
            bool upper = true;
            switch (opt.init) {
                case McInit::UniformBoth: {
                    const double rho =
                        std::sqrt(r * r + rng.uniform() * (R * R - r * r));
                    const double phi = 2.0 * M_PI * rng.uniform();
                    x = rho * std::cos(phi);
                    y = ysign * rho * std::sin(phi);
                    upper = rho > 1.0;
                    break;
                }
                case McInit::UniformUpper: {
                    const double rho = std::sqrt(1.0 + rng.uniform() * (R * R - 1.0));
                    const double phi = 2.0 * M_PI * rng.uniform();
                    x = rho * std::cos(phi);
                    y = ysign * rho * std::sin(phi);
                    upper = true;
                    break;
                }
                case McInit::PointUpper:
                case McInit::PointLower: {
                    x = opt.init_rho * std::cos(opt.init_phi);
                    y = ysign * opt.init_rho * std::sin(opt.init_phi);
                    upper = opt.init == McInit::PointUpper;
                    break;
                }
            }
            std::size_t rec = 0;
            for (long long s = 0; s <= n_steps; ++s) {
                if (s % rec_every == 0 && rec < n_rec) {
                    if (upper) ++occ[tid][rec];
                    ++rec;
                }
                if (s == n_steps) break;
                const double step = upper ? step_up : step_lo;
                x += step * rng.normal();
                y += ysign * step * rng.normal();
                double rho = std::hypot(x, y);
                if (upper) {
                    if (rho > R) {
                        const double rho2 = 2.0 * R - rho;
                        x *= rho2 / rho;
                        y *= rho2 / rho;
                        rho = rho2;
                    }
                    if (rho < 1.0) {
                        if (rng.uniform() < p_cross_up) {
                            upper = false;
                            if (rho < r) {
                                const double rho2 = 2.0 * r - rho;
                                x *= rho2 / rho;
                                y *= rho2 / rho;
                            }
                        } else {
                            const double rho2 = 2.0 - rho;
                            x *= rho2 / rho;
                            y *= rho2 / rho;
                        }
                    }
                } else {
                    if (rho < r) {
                        const double rho2 = 2.0 * r - rho;
                        x *= rho2 / rho;
                        y *= rho2 / rho;
                        rho = rho2;
                    }
                    if (rho > 1.0) {
                        if (rng.uniform() < p_cross_lo) {
                            upper = true;
                            if (rho > R) {
                                const double rho2 = 2.0 * R - rho;
                                x *= rho2 / rho;
                                y *= rho2 / rho;
                            }
                        } else {
                            const double rho2 = 2.0 - rho;
                            x *= rho2 / rho;
                            y *= rho2 / rho;
                        }
                    }
                }
            }
            double phi = std::atan2(y, x);
            if (phi < 0.0) phi += 2.0 * M_PI;
            int bin = std::min(opt.n_bins - 1,
                               static_cast<int>(phi / (2.0 * M_PI) * opt.n_bins));
            if (upper)
                ++hu[tid][bin];
            else
                ++hl[tid][bin];
        }
    };

    if (n_threads == 1) {
        worker(0, 0, n_particles);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (n_particles + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(worker, t, std::min<std::int64_t>(t * chunk, n_particles),
                              std::min<std::int64_t>((t + 1) * chunk, n_particles));
        for (auto& th : pool) th.join();
    }

    sum.upper_counts.assign(n_rec, 0);
    sum.hist_upper.assign(opt.n_bins, 0);
    sum.hist_lower.assign(opt.n_bins, 0);
    for (int t = 0; t < n_threads; ++t) {
        for (std::size_t k = 0; k < n_rec; ++k) sum.upper_counts[k] += occ[t][k];
        for (int b = 0; b < opt.n_bins; ++b) {
            sum.hist_upper[b] += hu[t][b];
            sum.hist_lower[b] += hl[t][b];
        }
    }
    return sum;
}

EmpiricalSummary simulate_limit_jump_diffusion(ScenarioKind kind,
                                               const TransmissionParams& p,
                                               std::int64_t n_particles, double t_end,
                                               double dt, std::uint64_t seed,
                                               const McOptions& opt) {
    p.validate();
    if (kind == ScenarioKind::ThinOverThick)
        throw ParameterError(
            "simulate_limit_jump_diffusion: only the TwoThin and ThinOverFast limits are "
            "particle processes on a circle");
    if (!(dt > 0.0 && t_end > 0.0))
        throw ParameterError("simulate_limit_jump_diffusion: need dt > 0 and t_end > 0");

    const bool two_circles = kind == ScenarioKind::TwoThin;
    const double rate_up = two_circles ? p.alpha / p.gamma : p.alpha;          // leave upper
    const double rate_lo = two_circles ? p.kappa * p.beta : p.beta / p.gamma;  // leave lower
    const double diff_up = 1.0, diff_lo = two_circles ? p.kappa : 0.0;
    const double ysign = opt.mirror ? -1.0 : 1.0;

    const std::size_t n_rec = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
    EmpiricalSummary sum;
    sum.seed = seed;
    sum.n_particles = n_particles;
    sum.n_bins = opt.n_bins;
    sum.times.resize(n_rec);
    for (std::size_t k = 0; k < n_rec; ++k) sum.times[k] = static_cast<double>(k) * dt;
    sum.upper_counts.assign(n_rec, 0);
    sum.hist_upper.assign(opt.n_bins, 0);
    sum.hist_lower.assign(opt.n_bins, 0);

    auto wrap = [](double phi) {
        phi = std::fmod(phi, 2.0 * M_PI);
        if (phi < 0.0) phi += 2.0 * M_PI;
        return phi;
    };

    for (std::int64_t q = 0; q < n_particles; ++q) {
        ParticleRng rng(seed, static_cast<std::uint32_t>(q));
        bool upper = opt.init != McInit::PointLower;
        double phi = wrap(ysign * opt.init_phi);
        double t = 0.0;
        std::size_t rec = 0;
        while (true) {
            const double rate = upper ? rate_up : rate_lo;
            const double stay = rate > 0.0 ? rng.exponential(rate) : 2.0 * t_end + 1.0;
            const double t_next = std::min(t + stay, t_end);
            while (rec < n_rec && sum.times[rec] < t_next - 1e-15) {
                if (upper) ++sum.upper_counts[rec];
                ++rec;
            }
            const double diff = upper ? diff_up : diff_lo;
            if (diff > 0.0)
                phi = wrap(phi + ysign * std::sqrt(2.0 * diff * (t_next - t)) * rng.normal());
            if (t_next >= t_end) break;
            t = t_next;
            if (!two_circles && !upper) phi = wrap(ysign * 2.0 * M_PI * rng.uniform());
            upper = !upper;
        }
        if (rec < n_rec && upper) ++sum.upper_counts[rec];
        if (rec < n_rec) ++rec;
        int bin =
            std::min(opt.n_bins - 1, static_cast<int>(phi / (2.0 * M_PI) * opt.n_bins));
        if (upper)
            ++sum.hist_upper[bin];
        else if (two_circles)
            ++sum.hist_lower[bin];
        else
            ++sum.hist_lower[0];  // the lumped point has no angle
    }
    return sum;
}

}  // namespace thinmem
