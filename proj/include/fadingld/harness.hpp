#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "minimizer.hpp"
#include "sampler.hpp"
#include "sir.hpp"

namespace fadingld {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

// P(Poisson(mean) > threshold), summing pmf terms in log space on the smaller side.
inline double poisson_tail(double mean, double threshold) {
    if (!(mean > 0)) throw ParameterError("poisson tail needs a positive mean");
    if (threshold < 0) return 1.0;
    const long long k = static_cast<long long>(std::floor(threshold));
    auto logpmf = [&](long long j) { return -mean + j * std::log(mean) - std::lgamma(double(j) + 1.0); };
    CompensatedSum s;
    if (static_cast<double>(k) + 1.0 > mean) {
        for (long long j = k + 1;; ++j) {
            double t = std::exp(logpmf(j));
            s += t;
            if (t < 1e-300 || (t < 1e-20 * s.value() && j > mean)) break;
        }
        return s.value();
    }
    for (long long j = 0; j <= k; ++j) s += std::exp(logpmf(j));
    return std::max(0.0, 1.0 - s.value());
}

struct Interval {
    double lo = 0, hi = 0;
};

// Wilson score interval at 95%.
inline Interval wilson_interval(long long hits, long long n, double z = 1.959963984540054) {
    if (n <= 0) return {0.0, 1.0};
    double p = double(hits) / double(n), nn = double(n), z2 = z * z;
    double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    // the endpoints are exact at 0 and n hits; the formula only reaches them up to rounding
    return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == n ? 1.0 : std::min(1.0, centre + half)};
}

// ---------------------------------------------------------------------------------------------
// a-priori frustration curve

namespace detail {

// Integral of fn(|x|) mu(dx) with extra radial kinks.
template <class F>
double radial_integral(const NetworkModel& model, F&& fn, std::vector<double> breaks) {
    const Window& w = model.window();
    auto pb = model.path_loss().breakpoints();
    breaks.insert(breaks.end(), pb.begin(), pb.end());
    if (w.shape() == Window::Shape::Disk2D) {
        PiecewiseLinear q = model.intensity().radial_density(w);
        breaks.insert(breaks.end(), q.xs().begin(), q.xs().end());
        return integrate([&](double s) { return fn(s) * q(s); }, 0.0, w.r(), breaks, 4);
    }
    const double r = w.r();
    std::function<double(int, double)> box = [&](int d, double s2) -> double {
        if (d == 0) return fn(std::sqrt(s2));
        std::vector<double> cuts;
        for (double b : breaks)
            if (b * b > s2) {
                double t = std::sqrt(b * b - s2);
                cuts.push_back(t);
                cuts.push_back(-t);
            }
        return integrate([&](double t) { return box(d - 1, s2 + t * t); }, -r, r, cuts, d == 3 ? 1 : 2);
    };
    return model.intensity().total_mass() / w.volume() * box(w.dim(), 0.0);
}

}  // namespace detail

struct CurveOptions {
    GridResolution grid{48, 48, 24};  // used for the relayed modes and direct downlink
};

// p(c) = G(mu', tau_c, mode)(W) / mu'(W). Direct uplink is computed by quadrature,
// the other modes on the grid mu'.
inline std::vector<std::pair<double, double>> frustration_curve(const NetworkModel& model, Mode mode,
                                                                const std::vector<double>& cs,
                                                                const CurveOptions& opt = {}) {
    for (double c : cs) check_threshold(model, c);
    const double M = model.intensity().total_mass();
    if (!(M > 0)) throw ModelError("frustration curve of an empty model");
    std::vector<std::pair<double, double>> out;
    if (mode == Mode::UpDir) {
        const double i0 = updir_interference(model);
        const PathLoss& pl = model.path_loss();
        const FadingLaw& f = model.fading();
        const double rmax = model.window().max_radius();
        for (double c : cs) {
            double xc = model.qos().sir_threshold(c);
            double level = xc * i0;
            // kinks where l(s) u = level for u at a fading breakpoint
            std::vector<double> br, us = f.breakpoints();
            us.push_back(f.fmin());
            us.push_back(f.fmax());
            if (!f.continuous()) us.insert(us.end(), f.atom_values().begin(), f.atom_values().end());
            for (double u : us) {
                double target = level / u;
                double l0 = pl.value(0.0), l1 = pl.value(rmax);
                if (target < l0 && target > l1) br.push_back(bisect([&](double s) { return pl.value(s) - target; }, 0.0, rmax));
            }
            double v = std::isinf(level) ? M
                                         : detail::radial_integral(
                                               model, [&](double s) { return f.cdf_below(level / pl.value(s)); }, br);
            out.emplace_back(c, std::clamp(v / M, 0.0, 1.0));
        }
        return out;
    }
    MarkedMeasure mu = product_intensity(model, opt.grid);
    auto q = mode_qos_all(model, mode, mu, model.base_fading());
    const double total = mu.total_mass();
    for (double c : cs) {
        CompensatedSum s;
        for (std::size_t i = 0; i < q.size(); ++i)
            if (q[i] < c) s += mu.points()[i].w;
        out.emplace_back(c, std::clamp(s.value() / total, 0.0, 1.0));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// rare-event Monte Carlo

struct McConfig {
    double lambda = 50.0;
    long long samples = 1000;
    double c = 1.1;
    double b = 0.9875;
    bool absolute = false;              // G(L_lambda)(W) > b instead of a fraction of the users
    Mode mode = Mode::UpDir;
    std::uint64_t seed = 1;
    long long count_threshold = 80;     // conditioning level N > threshold
    int threads = 0;                    // 0: hardware concurrency
};

struct HitRecord {
    long long sample = 0;
    long long n_users = 0;
    double mean_fading = 0.0;
};

struct ExperimentReport {
    std::string scenario_hash;
    SeedRecord seed;
    McConfig config;
    long long samples = 0;
    long long hits = 0;
    Interval ci;
    long long total_users = 0;
    double mean_count = 0.0;  // lambda mu(W)
    std::vector<HitRecord> hit_records;
    // samples with N > count_threshold
    long long high_count = 0;
    std::vector<double> high_count_fadings;  // per-sample mean fading, in sample order
    long long hits_in_high_count = 0;
    double wall_seconds = 0.0;

    double frequency() const { return samples ? double(hits) / double(samples) : 0.0; }
    double mean_hit_fading() const {
        if (hit_records.empty()) return NAN;
        CompensatedSum s;
        for (const auto& h : hit_records) s += h.mean_fading;
        return s.value() / double(hit_records.size());
    }
    double high_count_mean_fading() const {
        if (high_count_fadings.empty()) return NAN;
        CompensatedSum s;
        for (double v : high_count_fadings) s += v;
        return s.value() / double(high_count_fadings.size());
    }
    double fraction_hits_at_least(long long n) const {
        if (hit_records.empty()) return NAN;
        long long k = 0;
        for (const auto& h : hit_records) k += h.n_users >= n;
        return double(k) / double(hit_records.size());
    }
    double containment() const { return hits ? double(hits_in_high_count) / double(hits) : 1.0; }
};

namespace detail {

struct McShard {
    long long hits = 0, users = 0, high = 0, hits_high = 0;
    std::vector<HitRecord> records;
    std::vector<std::pair<long long, double>> high_fadings;
};

inline long long frustrated_count(const NetworkModel& model, Mode mode, const std::vector<MarkedAtom>& users,
                                  double lambda, double c, double fo) {
    const PathLoss& pl = model.path_loss();
    const QosFunction& g = model.qos();
    if (mode == Mode::UpDir) {
        double i0 = 0.0;
        for (const auto& a : users) i0 += pl.value(norm(a.x)) * a.u;
        i0 /= lambda;
        long long k = 0;
        for (const auto& a : users) k += g(pl.value(norm(a.x)) * a.u / i0) < c;
        return k;
    }
    std::vector<MarkedAtom> scaled(users);
    for (auto& a : scaled) a.w = 1.0 / lambda;
    MarkedMeasure nu = MarkedMeasure::from_atoms(model.dim(), std::move(scaled));
    auto q = mode_qos_all(model, mode, nu, fo);
    long long k = 0;
    for (double v : q) k += v < c;
    return k;
}

}  // namespace detail

// Sample i always uses stream i of the seed, so the report does not depend on the thread count.
inline ExperimentReport rare_event_mc(const NetworkModel& model, const McConfig& cfg,
                                      const std::string& scenario_text = "") {
    if (cfg.samples < 1) throw ParameterError("need at least one sample");
    if (!(cfg.lambda > 0)) throw ParameterError("lambda must be positive");
    check_threshold(model, cfg.c);
    auto t0 = std::chrono::steady_clock::now();
    const FadingKernel kernel = FadingKernel::iid(model.fading());
    std::optional<PiecewiseLinear> radial;
    if (model.intensity().form() == SpatialIntensity::Form::Radial2D)
        radial = model.intensity().radial_density(model.window());
    int threads = cfg.threads > 0 ? cfg.threads : int(std::max(1u, std::thread::hardware_concurrency()));
    threads = int(std::min<long long>(threads, cfg.samples));
    std::vector<detail::McShard> shards(threads);
    auto work = [&](int t) {
        detail::McShard& sh = shards[t];
        std::vector<MarkedAtom> users;
        long long lo = cfg.samples * t / threads, hi = cfg.samples * (t + 1) / threads;
        for (long long i = lo; i < hi; ++i) {
            SplitMix64 rng(cfg.seed, static_cast<std::uint64_t>(i));
            draw_users(model, kernel, cfg.lambda, rng, users, radial ? &*radial : nullptr);
            double fo = model.base().is_random() ? model.base().law().quantile(uniform01(rng)) : model.base_fading();
            const long long n = static_cast<long long>(users.size());
            sh.users += n;
            double mf = 0.0;
            if (n > 0) {
                CompensatedSum s;
                for (const auto& a : users) s += a.u;
                mf = s.value() / double(n);
            }
            bool high = n > cfg.count_threshold;
            if (high) {
                ++sh.high;
                sh.high_fadings.emplace_back(i, mf);
            }
            if (n == 0) continue;
            long long k = detail::frustrated_count(model, cfg.mode, users, cfg.lambda, cfg.c, fo);
            bool hit = cfg.absolute ? double(k) / cfg.lambda > cfg.b : double(k) / double(n) > cfg.b;
            if (hit) {
                ++sh.hits;
                sh.hits_high += high;
                sh.records.push_back({i, n, mf});
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    ExperimentReport r;
    r.scenario_hash = hex64(fnv1a(scenario_text));
    r.seed = {cfg.seed, 0, SplitMix64::name};
    r.config = cfg;
    r.samples = cfg.samples;
    r.mean_count = cfg.lambda * model.intensity().total_mass();
    for (auto& sh : shards) {
        r.hits += sh.hits;
        r.total_users += sh.users;
        r.high_count += sh.high;
        r.hits_in_high_count += sh.hits_high;
        r.hit_records.insert(r.hit_records.end(), sh.records.begin(), sh.records.end());
        for (auto& [i, v] : sh.high_fadings) r.high_count_fadings.push_back(v);
    }
    r.ci = wilson_interval(r.hits, r.samples);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// Statistics over {N > count_threshold} and the hits inside it.
inline ExperimentReport conditioned_stats(const NetworkModel& model, double lambda, long long samples,
                                          long long count_threshold, double c, double b_fraction,
                                          std::uint64_t seed = 1, Mode mode = Mode::UpDir) {
    McConfig cfg;
    cfg.lambda = lambda;
    cfg.samples = samples;
    cfg.count_threshold = count_threshold;
    cfg.c = c;
    cfg.b = b_fraction;
    cfg.seed = seed;
    cfg.mode = mode;
    return rare_event_mc(model, cfg);
}

// ---------------------------------------------------------------------------------------------
// file emission

inline std::ostream& full_precision(std::ostream& os) { return os << std::setprecision(17); }

inline void write_sample_csv(std::ostream& os, const Sample& s) {
    full_precision(os);
    os << "# lambda=" << s.lambda << ", seed=" << s.seed.seed << ", base_fading=" << s.base_fading_draw << "\n";
    os << "# generator=" << s.seed.generator << ", stream=" << s.seed.stream << "\n";
    const int d = s.users.dim();
    for (int k = 0; k < d; ++k) os << 'x' << k << ',';
    os << "fading\n";
    for (const auto& a : s.users.points()) {
        for (int k = 0; k < d; ++k) os << a.x[k] << ',';
        os << a.u << "\n";
    }
}

inline void write_curve_csv(std::ostream& os, const std::vector<std::pair<double, double>>& curve) {
    full_precision(os);
    os << "c,p\n";
    for (auto [c, p] : curve) os << c << ',' << p << "\n";
}

// Wall-clock time is left out so that a fixed seed reproduces the file byte for byte.
inline void write_report_csv(std::ostream& os, const ExperimentReport& r) {
    full_precision(os);
    const McConfig& c = r.config;
    os << "# generator=" << r.seed.generator << ", seed=" << r.seed.seed << ", stream=sample_index\n";
    os << "# scenario_hash=" << r.scenario_hash << "\n";
    os << "# lambda=" << c.lambda << ", mode=" << to_string(c.mode) << ", c=" << c.c << ", b=" << c.b
       << ", criterion=" << (c.absolute ? "absolute" : "fraction") << "\n";
    os << "stat,value\n";
    os << "samples," << r.samples << "\n";
    os << "hits," << r.hits << "\n";
    os << "frequency," << r.frequency() << "\n";
    os << "wilson_lo," << r.ci.lo << "\n";
    os << "wilson_hi," << r.ci.hi << "\n";
    os << "mean_users," << double(r.total_users) / double(r.samples) << "\n";
    os << "count_threshold," << c.count_threshold << "\n";
    os << "high_count_samples," << r.high_count << "\n";
    os << "high_count_mean_fading," << r.high_count_mean_fading() << "\n";
    os << "poisson_tail_reference," << poisson_tail(r.mean_count, double(c.count_threshold)) << "\n";
    os << "hits_in_high_count," << r.hits_in_high_count << "\n";
    os << "containment," << r.containment() << "\n";
    os << "mean_hit_fading," << r.mean_hit_fading() << "\n";
    os << "\nhit_id,n_users,mean_fading\n";
    for (const auto& h : r.hit_records) os << h.sample << ',' << h.n_users << ',' << h.mean_fading << "\n";
}

// Density table of a minimizer on an (s, u) grid of cell midpoints.
inline void write_solution_csv(std::ostream& os, const MinimizerSolution& sol, double r, double fmin, double fmax,
                               int ns = 40, int nu = 20) {
    full_precision(os);
    os << "# alpha_min=" << sol.alpha_min << ", beta=" << sol.beta << ", delta=" << sol.delta
       << ", entropy=" << sol.entropy << "\n";
    os << "# gamma=" << sol.gamma << ", residual_interference=" << sol.residual_interference
       << ", residual_mass=" << sol.residual_mass << ", prior=" << (sol.prior ? 1 : 0) << "\n";
    if (!sol.note.empty()) os << "# note=" << sol.note << "\n";
    os << "s,u,density\n";
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nu; ++j) {
            double s = (i + 0.5) * r / ns, u = fmin + (j + 0.5) * (fmax - fmin) / nu;
            os << s << ',' << u << ',' << sol.density(s, u) << "\n";
        }
}

}  // namespace fadingld
