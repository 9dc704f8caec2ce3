#include "cvsense/qec_codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cvsense/phase_space.hpp"

namespace cvsense {

namespace {

constexpr double kS = kGkpPeriod;

double norm_pdf(double x, double var) {
    return std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

double norm_cdf(double x, double sd) { return 0.5 * std::erfc(-x / (sd * M_SQRT2)); }

struct PairAccum {
    MomentAccum q, p;
    void merge(const PairAccum& o) {
        q.merge(o.q);
        p.merge(o.p);
    }
};

}  // namespace

std::pair<double, double> wrap_moments(double tau) {
    if (tau <= 0.0) return {0.0, 0.0};
    int kmax = static_cast<int>(std::ceil(9.0 * tau / kS)) + 1;
    double var = tau * tau;
    double er2 = 0.0, eur = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        double a = (k - 0.5) * kS, b = (k + 0.5) * kS;
        double fa = norm_pdf(a, var), fb = norm_pdf(b, var);
        double pk = norm_cdf(b, tau) - norm_cdf(a, tau);
        double m1 = var * (fa - fb);
        double m2 = var * pk + var * (a * fa - b * fb);
        er2 += m2 - 2.0 * k * kS * m1 + (k * kS) * (k * kS) * pk;
        eur += m2 - k * kS * m1;
    }
    return {er2, eur};
}

double tms_correction_coefficient(double sigma, double gain, double ancilla_delta) {
    if (gain < 1.0) throw std::invalid_argument("two-mode squeezing gain must be >= 1");
    if (gain == 1.0 || sigma <= 0.0) return 0.0;
    double cov_vu = -2.0 * std::sqrt(gain * (gain - 1.0)) * sigma * sigma;
    double tau2 = (2.0 * gain - 1.0) * sigma * sigma;
    double vm = tau2 + 0.5 * ancilla_delta * ancilla_delta;
    auto [er2, emr] = wrap_moments(std::sqrt(vm));
    if (er2 <= 0.0) return 0.0;
    return (cov_vu / vm) * emr / er2;
}

double tms_logical_rms(double sigma, double gain, double ancilla_delta) {
    if (gain < 1.0) throw std::invalid_argument("two-mode squeezing gain must be >= 1");
    if (sigma < 0.0) throw std::invalid_argument("physical noise rms must be >= 0");
    if (gain == 1.0 || sigma == 0.0) return sigma;
    double var_v = (2.0 * gain - 1.0) * sigma * sigma;
    double cov_vu = -2.0 * std::sqrt(gain * (gain - 1.0)) * sigma * sigma;
    double vm = var_v + 0.5 * ancilla_delta * ancilla_delta;
    auto [er2, emr] = wrap_moments(std::sqrt(vm));
    if (er2 <= 0.0) return std::sqrt(var_v);
    double cov_vr = (cov_vu / vm) * emr;
    double res = var_v - cov_vr * cov_vr / er2;
    return std::sqrt(std::max(res, 0.0));
}

TmsSampler::TmsSampler(const TmsCodeConfig& cfg) : cfg_(cfg) {
    if (cfg.gain < 1.0) throw std::invalid_argument("two-mode squeezing gain must be >= 1");
    if (cfg.sigma < 0.0) throw std::invalid_argument("physical noise rms must be >= 0");
    c_ = std::sqrt(cfg.gain);
    s_ = std::sqrt(cfg.gain - 1.0);
    fuzz_ = std::sqrt(0.5 * cfg.ancilla_delta * cfg.ancilla_delta);
    if (cfg.wrap) {
        coeff_q_ = tms_correction_coefficient(cfg.sigma, cfg.gain, cfg.ancilla_delta);
    } else {
        double vm = (2.0 * cfg.gain - 1.0) * cfg.sigma * cfg.sigma +
                    0.5 * cfg.ancilla_delta * cfg.ancilla_delta;
        coeff_q_ = vm > 0.0
                       ? -2.0 * std::sqrt(cfg.gain * (cfg.gain - 1.0)) * cfg.sigma * cfg.sigma / vm
                       : 0.0;
    }
}

std::pair<double, double> TmsSampler::sample(RngStream& rng) const {
    double e1q = rng.gaussian(cfg_.sigma), e1p = rng.gaussian(cfg_.sigma);
    double e2q = rng.gaussian(cfg_.sigma), e2p = rng.gaussian(cfg_.sigma);
    // decoded noise, T(G)^{-1} action
    double vq = c_ * e1q - s_ * e2q;
    double vp = c_ * e1p + s_ * e2p;
    double uq = -s_ * e1q + c_ * e2q;
    double up = s_ * e1p + c_ * e2p;
    double mq = uq + rng.gaussian(fuzz_);
    double mp = up + rng.gaussian(fuzz_);
    if (cfg_.wrap) {
        mq = modulo_reduce(mq, kS);
        mp = modulo_reduce(mp, kS);
    }
    return {vq - coeff_q_ * mq, vp + coeff_q_ * mp};
}

LogicalNoise tms_logical_noise(const TmsCodeConfig& cfg, long shots, const RngStream& rng,
                               ExecPolicy policy) {
    if (shots < 10000) throw std::invalid_argument("tms_logical_noise needs shots >= 1e4");
    TmsSampler sampler(cfg);
    auto states = mc_chunks<PairAccum>(shots, rng, policy, [&](RngStream& r, long count) {
        PairAccum acc;
        for (long i = 0; i < count; ++i) {
            auto [zq, zp] = sampler.sample(r);
            acc.q.add(zq);
            acc.p.add(zp);
        }
        return acc;
    });
    PairAccum total = merge_states(states);
    return {total.q.rms(), total.p.rms(), std::nullopt, std::nullopt};
}

std::pair<double, LogicalNoise> tms_optimize_gain(double sigma, std::span<const double> gains,
                                                  long shots, const RngStream& rng,
                                                  ExecPolicy policy) {
    if (gains.empty()) throw std::invalid_argument("gain grid must be nonempty");
    double best_gain = gains[0];
    LogicalNoise best{};
    double best_metric = std::numeric_limits<double>::infinity();
    for (double g : gains) {
        TmsCodeConfig cfg{g, 0.0, sigma, true};
        // same base stream per gain: paired comparison across the grid
        LogicalNoise ln = tms_logical_noise(cfg, shots, rng, policy);
        double metric = std::max(ln.sigma_q, ln.sigma_p);
        if (metric < best_metric) {
            best_metric = metric;
            best_gain = g;
            best = ln;
        }
    }
    return {best_gain, best};
}

std::pair<double, double> tms_optimize_gain_quadrature(double sigma,
                                                       std::span<const double> gains) {
    if (gains.empty()) throw std::invalid_argument("gain grid must be nonempty");
    double best_gain = gains[0];
    double best_rms = std::numeric_limits<double>::infinity();
    for (double g : gains) {
        double r = tms_logical_rms(sigma, g);
        if (r < best_rms) {
            best_rms = r;
            best_gain = g;
        }
    }
    return {best_gain, best_rms};
}

Eigen::Matrix4d stabilizer_decoded_covariance(double sigma, const LogicalNoise& prev,
                                              int level, double lam) {
    if (!std::isfinite(prev.sigma_q) || !std::isfinite(prev.sigma_p))
        throw std::invalid_argument("previous logical noise must be finite");
    Eigen::Matrix4d v0 = Eigen::Matrix4d::Zero();
    v0(0, 0) = v0(1, 1) = sigma * sigma;
    v0(2, 2) = prev.sigma_q * prev.sigma_q;
    v0(3, 3) = prev.sigma_p * prev.sigma_p;
    Eigen::Matrix4d sinv = stabilizer_encoder(level, lam).inverse().matrix();
    return sinv * v0 * sinv.transpose();
}

std::pair<double, double> stabilizer_mmse_coeffs(const Eigen::Matrix4d& v_ed) {
    if (!(v_ed(2, 2) > 0.0) || !(v_ed(3, 3) > 0.0))
        throw std::invalid_argument("degenerate decoded covariance: zero measured variance");
    return {v_ed(0, 2) / v_ed(2, 2), v_ed(1, 3) / v_ed(3, 3)};
}

PdfGrid stabilizer_recursion_step(const PdfGrid& p0, const PdfGrid& p_prev, double coeff,
                                  ExecPolicy policy) {
    if (p_prev.step() > kS / 16.0)
        throw std::invalid_argument("pdf grid too coarse for the modulo period");
    int n_out = p0.size();
    double zr_lo = p0.lo() - std::abs(coeff) * 0.5 * kS;
    double zr_hi = p0.hi() + std::abs(coeff) * 0.5 * kS;
    double step = (zr_hi - zr_lo) / (n_out - 1);

    int n_prev = p_prev.size();
    std::vector<double> shifted(static_cast<std::size_t>(n_prev));
    for (int k = 0; k < n_prev; ++k)
        shifted[static_cast<std::size_t>(k)] = coeff * modulo_reduce(p_prev.node(k), kS);

    std::vector<double> w(static_cast<std::size_t>(n_out), 0.0);
    const auto& pw = p_prev.weights();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
#endif
    for (int i = 0; i < n_out; ++i) {
        double z = zr_lo + step * i;
        double acc = 0.0;
        for (int k = 0; k < n_prev; ++k) {
            double tw = (k == 0 || k == n_prev - 1) ? 0.5 : 1.0;
            acc += tw * pw[static_cast<std::size_t>(k)] *
                   p0.value_at(z - shifted[static_cast<std::size_t>(k)]);
        }
        w[static_cast<std::size_t>(i)] = acc * p_prev.step();
    }
    return PdfGrid(zr_lo, zr_hi, std::move(w));
}

namespace {

// Wrap cells carrying less probability than this are truncated from the
// level transforms; keeps the fixed grid resolving the peak instead of
// chasing empty far cells. Well below every sampling oracle in the suite and
// the 1e-6 normalization budget.
constexpr double kCellMassFloor = 1e-8;

// One decode level as a density transform. The output variable is
//   Z = Ab * b + Bm * m + D * nstar(m) (+ independent Gaussian of extra_var),
// where b ~ pb is the chain noise and the measured value m given b is
// N(cb * b, vm). Everything the level does (conjugation, modulo readout,
// counter-displacement) is folded into these five constants.
struct StepParams {
    double Ab;
    double Bm;
    double D;
    double cb;
    double vm;
    double extra_var;
};

PdfGrid faithful_step_integral(const PdfGrid& pb, const StepParams& sp, int n_points,
                               ExecPolicy policy) {
    auto [mb, vb] = pdf_moments(pb);
    (void)mb;
    double su = std::sqrt(sp.vm + sp.cb * sp.cb * vb);
    double U = 8.5 * su;
    int jmax = static_cast<int>(std::floor(U / kS + 0.5));
    double bmax = std::max(std::abs(pb.lo()), std::abs(pb.hi()));
    double a_prime = sp.Ab + sp.Bm * sp.cb;  // b coefficient at fixed w

    // Wrap cells enter the output range only above the mass floor; a
    // reachable cell of vanishing probability would stretch the grid by |D|
    // and starve the peak of resolution.
    int jrange = 0;
    if (jmax > 0) {
        double sd = std::sqrt(sp.vm);
        const auto& pw = pb.weights();
        for (int j = 1; j <= jmax; ++j) {
            double mass = 0.0;
            for (int k = 0; k < pb.size(); ++k) {
                double tw = (k == 0 || k == pb.size() - 1) ? 0.5 : 1.0;
                double mu = sp.cb * pb.node(k);
                double hi = ((j + 0.5) * kS - mu) / sd;
                double lo = ((j - 0.5) * kS - mu) / sd;
                double cell = 0.5 * (std::erfc(lo / M_SQRT2) - std::erfc(hi / M_SQRT2));
                // both signs of the symmetric density
                double hi2 = ((-j + 0.5) * kS - mu) / sd;
                double lo2 = ((-j - 0.5) * kS - mu) / sd;
                cell += 0.5 * (std::erfc(lo2 / M_SQRT2) - std::erfc(hi2 / M_SQRT2));
                mass += tw * pw[static_cast<std::size_t>(k)] * cell;
            }
            mass *= pb.step();
            if (mass >= kCellMassFloor) jrange = j;
        }
    }
    double zr = std::abs(a_prime) * bmax + 8.5 * std::abs(sp.Bm) * std::sqrt(sp.vm) +
                std::abs(sp.D) * jrange + 8.5 * std::sqrt(sp.extra_var);

    int n_u = 2048;
    double du = 2.0 * U / (n_u - 1);
    std::vector<double> u_nodes(static_cast<std::size_t>(n_u));
    std::vector<double> u_wrap(static_cast<std::size_t>(n_u));
    for (int k = 0; k < n_u; ++k) {
        double u = -U + du * k;
        u_nodes[static_cast<std::size_t>(k)] = u;
        u_wrap[static_cast<std::size_t>(k)] = sp.D * std::nearbyint(u / kS);
    }

    double step = 2.0 * zr / (n_points - 1);
    std::vector<double> w(static_cast<std::size_t>(n_points), 0.0);
    double norm = du / (std::sqrt(2.0 * M_PI * sp.vm) * sp.Ab);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
#endif
    for (int i = 0; i < n_points; ++i) {
        double z = -zr + step * i;
        double acc = 0.0;
        for (int k = 0; k < n_u; ++k) {
            double u = u_nodes[static_cast<std::size_t>(k)];
            double b = (z - u_wrap[static_cast<std::size_t>(k)] - sp.Bm * u) / sp.Ab;
            double pbv = pb.value_at(b);
            if (pbv == 0.0) continue;
            double wdev = u - sp.cb * b;
            acc += pbv * std::exp(-wdev * wdev / (2.0 * sp.vm));
        }
        w[static_cast<std::size_t>(i)] = acc * norm;
    }

    PdfGrid out(-zr, zr, std::move(w));
    if (sp.extra_var > 0.0) {
        // direct convolution with the independent Gaussian remainder
        double sd = std::sqrt(sp.extra_var);
        int hw = static_cast<int>(std::ceil(8.5 * sd / out.step()));
        std::vector<double> kern(static_cast<std::size_t>(2 * hw + 1));
        double ks = 0.0;
        for (int k = -hw; k <= hw; ++k) {
            double v = norm_pdf(k * out.step(), sp.extra_var);
            kern[static_cast<std::size_t>(k + hw)] = v;
            ks += v;
        }
        for (auto& v : kern) v /= ks;
        int n = out.size();
        std::vector<double> conv(static_cast<std::size_t>(n), 0.0);
        const auto& src = out.weights();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
#endif
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int k = -hw; k <= hw; ++k) {
                int j = i - k;
                if (j < 0 || j >= n) continue;
                acc += src[static_cast<std::size_t>(j)] * kern[static_cast<std::size_t>(k + hw)];
            }
            conv[static_cast<std::size_t>(i)] = acc;
        }
        return PdfGrid(out.lo(), out.hi(), std::move(conv));
    }
    return out;
}

// Exact path for a noiseless readout (vm = 0): m = cb * b, so the output is a
// mixture over wrap cells of b with Gaussian blur extra_var and per-cell
// affine means. Requires extra_var > 0.
PdfGrid faithful_step_offsets(const PdfGrid& pb, const StepParams& sp, int n_points) {
    double a_prime = sp.Ab + sp.Bm * sp.cb;
    double bmax = std::max(std::abs(pb.lo()), std::abs(pb.hi()));
    int jmax = static_cast<int>(std::floor(std::abs(sp.cb) * bmax / kS + 0.5)) + 1;

    const auto& pw = pb.weights();
    double h = pb.step();
    struct Cell {
        double mass = 0.0, m1 = 0.0, m2 = 0.0;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(2 * jmax + 1));
    for (int k = 0; k + 1 < pb.size(); ++k) {
        // trapezoid panel [x0, x1]; wrap cell taken at the panel midpoint
        double x0 = pb.node(k), x1 = pb.node(k + 1);
        double xm = 0.5 * (x0 + x1);
        int j = static_cast<int>(std::nearbyint(sp.cb * xm / kS));
        j = std::clamp(j, -jmax, jmax);
        double mass = 0.5 * (pw[static_cast<std::size_t>(k)] + pw[static_cast<std::size_t>(k + 1)]) * h;
        double m1 = 0.5 * (pw[static_cast<std::size_t>(k)] * x0 + pw[static_cast<std::size_t>(k + 1)] * x1) * h;
        double m2 = 0.5 * (pw[static_cast<std::size_t>(k)] * x0 * x0 +
                           pw[static_cast<std::size_t>(k + 1)] * x1 * x1) * h;
        auto& c = cells[static_cast<std::size_t>(j + jmax)];
        c.mass += mass;
        c.m1 += m1;
        c.m2 += m2;
    }

    // cells below the mass floor are dropped so the grid stays on the peak
    std::vector<double> means(cells.size()), vars(cells.size());
    double zr = 0.0;
    std::vector<bool> keep(cells.size(), false);
    for (int j = -jmax; j <= jmax; ++j) {
        auto idx = static_cast<std::size_t>(j + jmax);
        const auto& c = cells[idx];
        if (c.mass < kCellMassFloor) continue;
        means[idx] = sp.D * j + a_prime * (c.m1 / c.mass);
        vars[idx] = a_prime * a_prime *
                        std::max(c.m2 / c.mass - (c.m1 / c.mass) * (c.m1 / c.mass), 0.0) +
                    sp.extra_var;
        keep[idx] = true;
        zr = std::max(zr, std::abs(means[idx]) + 8.5 * std::sqrt(vars[idx]));
    }
    double step = 2.0 * zr / (n_points - 1);
    std::vector<double> w(static_cast<std::size_t>(n_points), 0.0);
    for (int j = -jmax; j <= jmax; ++j) {
        auto idx = static_cast<std::size_t>(j + jmax);
        if (!keep[idx]) continue;
        for (int i = 0; i < n_points; ++i) {
            double z = -zr + step * i;
            w[static_cast<std::size_t>(i)] += cells[idx].mass * norm_pdf(z - means[idx], vars[idx]);
        }
    }
    return PdfGrid(-zr, zr, std::move(w));
}

PdfGrid faithful_step(const PdfGrid& pb, const StepParams& sp, int n_points, ExecPolicy policy) {
    if (sp.vm > 0.0) return faithful_step_integral(pb, sp, n_points, policy);
    if (!(sp.extra_var > 0.0))
        throw std::invalid_argument("noiseless readout step requires a Gaussian remainder");
    return faithful_step_offsets(pb, sp, n_points);
}

}  // namespace

LogicalNoise stabilizer_logical_noise(const StabilizerCodeConfig& cfg, ExecPolicy policy,
                                      StabilizerSchedule* schedule_out) {
    if (cfg.levels < 2 || cfg.levels > kMaxStabilizerLevels)
        throw std::invalid_argument("stabilizer levels must lie in [2, 8]");
    if (cfg.lam <= 1.0) throw std::invalid_argument("squeeze factor must exceed 1");
    if (!(cfg.sigma > 0.0)) throw std::invalid_argument("physical noise rms must be positive");
    if (cfg.grid_points < 256) throw std::invalid_argument("grid too coarse");

    double sigma = cfg.sigma, lam = cfg.lam, delta = cfg.ancilla_delta;
    PdfGrid pq = PdfGrid::gaussian(0.0, sigma, cfg.grid_points);
    PdfGrid pp = pq;
    StabilizerSchedule sched;

    for (int k = 2; k <= cfg.levels; ++k) {
        auto [mq, vq] = pdf_moments(pq);
        auto [mp, vp] = pdf_moments(pp);
        (void)mq;
        (void)mp;
        LogicalNoise prev{std::sqrt(vq), std::sqrt(vp), std::nullopt, std::nullopt};
        Eigen::Matrix4d v_ed = stabilizer_decoded_covariance(sigma, prev, k, lam);
        auto [c_q, c_p] = stabilizer_mmse_coeffs(v_ed);
        sched.c_q.push_back(c_q);
        sched.c_p.push_back(c_p);

        double lk2 = std::pow(lam, k - 2);
        double vm_q = lam * lam * sigma * sigma + 0.5 * delta * delta;
        double rho = (0.5 * delta * delta) / vm_q;
        StepParams qp{};
        qp.Ab = (1.0 - rho) / lam;
        qp.Bm = -(lk2 + c_q) + lk2 * rho;
        qp.D = c_q * kS;
        qp.cb = std::pow(lam, 1 - k);
        qp.vm = vm_q;
        qp.extra_var = lk2 * lk2 * (0.5 * delta * delta) * (lam * lam * sigma * sigma) / vm_q;
        pq = faithful_step(pq, qp, cfg.grid_points, policy);

        StepParams ppar{};
        ppar.Ab = lam;
        ppar.Bm = -c_p;
        ppar.D = c_p * kS;
        ppar.cb = std::pow(lam, k - 1);
        ppar.vm = 0.5 * delta * delta;
        ppar.extra_var = std::pow(lam, 2 - 2 * k) * sigma * sigma;
        pp = faithful_step(pp, ppar, cfg.grid_points, policy);
    }

    auto [mq, vq] = pdf_moments(pq);
    auto [mp, vp] = pdf_moments(pp);
    if (!std::isfinite(vq) || !std::isfinite(vp) || std::abs(mq) > 1e6 || std::abs(mp) > 1e6)
        throw std::runtime_error("stabilizer recursion lost numerical precision");
    if (schedule_out) *schedule_out = sched;
    return {std::sqrt(vq), std::sqrt(vp), std::move(pq), std::move(pp)};
}

std::pair<double, double> ideal_noise_evolution(double sigma, double lam, int levels) {
    if (lam <= 1.0) throw std::invalid_argument("squeeze factor must exceed 1");
    if (levels < 2) throw std::invalid_argument("levels must be >= 2");
    if (sigma == 0.0) return {0.0, 0.0};
    double vq = sigma * sigma;
    for (int k = 2; k <= levels; ++k)
        vq = vq / (lam * lam * (1.0 + std::pow(lam, -2 * k) * vq / (sigma * sigma)));
    double sp = std::pow(lam, 1 - levels) * sigma;
    return {std::sqrt(vq), sp};
}

ThresholdResult code_threshold_tms(std::span<const double> sigma_grid,
                                   std::span<const double> gain_grid) {
    if (sigma_grid.empty()) throw std::invalid_argument("sigma grid must be nonempty");
    if (gain_grid.empty()) throw std::invalid_argument("gain grid must be nonempty");
    for (std::size_t i = 1; i < sigma_grid.size(); ++i)
        if (sigma_grid[i] <= sigma_grid[i - 1])
            throw std::invalid_argument("sigma grid must be ascending");
    ThresholdResult out;
    for (double s : sigma_grid) {
        auto [g, rms] = tms_optimize_gain_quadrature(s, gain_grid);
        (void)g;
        if (rms < s) {
            out.found = true;
            out.sigma_crit = s;
        }
    }
    return out;
}

ThresholdResult code_threshold_stabilizer(const StabilizerCodeConfig& base,
                                          std::span<const double> sigma_grid,
                                          ExecPolicy policy) {
    if (sigma_grid.empty()) throw std::invalid_argument("sigma grid must be nonempty");
    for (std::size_t i = 1; i < sigma_grid.size(); ++i)
        if (sigma_grid[i] <= sigma_grid[i - 1])
            throw std::invalid_argument("sigma grid must be ascending");
    ThresholdResult out;
    for (double s : sigma_grid) {
        StabilizerCodeConfig cfg = base;
        cfg.sigma = s;
        LogicalNoise ln = stabilizer_logical_noise(cfg, policy);
        if (std::max(ln.sigma_q, ln.sigma_p) < s) {
            out.found = true;
            out.sigma_crit = s;
        }
    }
    return out;
}

StabilizerSampler::StabilizerSampler(const StabilizerCodeConfig& cfg, StabilizerSchedule schedule)
    : cfg_(cfg), sched_(std::move(schedule)) {
    if (static_cast<int>(sched_.c_q.size()) != cfg.levels - 1 ||
        static_cast<int>(sched_.c_p.size()) != cfg.levels - 1)
        throw std::invalid_argument("schedule size does not match levels");
}

std::pair<double, double> StabilizerSampler::sample(RngStream& rng) const {
    double sigma = cfg_.sigma, lam = cfg_.lam;
    double fuzz = std::sqrt(0.5 * cfg_.ancilla_delta * cfg_.ancilla_delta);
    double zq = rng.gaussian(sigma);
    double zp = rng.gaussian(sigma);
    for (int k = 2; k <= cfg_.levels; ++k) {
        double c_q = sched_.c_q[static_cast<std::size_t>(k - 2)];
        double c_p = sched_.c_p[static_cast<std::size_t>(k - 2)];
        double aq = rng.gaussian(sigma);
        double ap = rng.gaussian(sigma);
        double mq = modulo_reduce(-lam * aq + std::pow(lam, 1 - k) * zq + rng.gaussian(fuzz), kS);
        double mp = modulo_reduce(std::pow(lam, k - 1) * zp + rng.gaussian(fuzz), kS);
        zq = std::pow(lam, k - 1) * aq - c_q * mq;
        zp = std::pow(lam, 1 - k) * ap + lam * zp - c_p * mp;
    }
    return {zq, zp};
}

}  // namespace cvsense
