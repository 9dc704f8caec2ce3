// Acceptance suite: one line per criterion, PASS or FAIL, with the measured
// numbers. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "cvsense/gkp.hpp"
#include "cvsense/qec_codes.hpp"
#include "cvsense/sensing.hpp"

using namespace cvsense;

namespace {

int failures = 0;

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void report(int id, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return std::string(buf);
}

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> g;
    long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) g.push_back(lo + step * static_cast<double>(i));
    return g;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. Two-mode-squeezing code break-even at sigma = 0.558 +- 0.015 from the
//    optimized-gain sweep; Monte Carlo at 1e5 shots/point validates the
//    quadrature curve that locates it.
void criterion_1() {
    double t0 = now_s();
    auto sigmas = grid(0.40, 0.70, 0.005);
    auto gains = grid(1.0, 4.0, 0.02);
    RngStream base(20260810, 1);

    double crit = 0.0;
    bool found = false;
    int mc_ok = 0, mc_total = 0;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        double s = sigmas[i];
        auto [g_opt, rms] = tms_optimize_gain_quadrature(s, gains);
        if (rms < s) {
            found = true;
            crit = s;
        }
        TmsCodeConfig cfg{g_opt, 0.0, s, true};
        TmsSampler sampler(cfg);
        RngStream rng = base.substream(i);
        MomentAccum q, p;
        for (long shot = 0; shot < 100000; ++shot) {
            auto [zq, zp] = sampler.sample(rng);
            q.add(zq);
            p.add(zp);
        }
        ++mc_total;
        if (std::abs(q.rms() - rms) <= 4.0 * q.rms_stderr() &&
            std::abs(p.rms() - rms) <= 4.0 * p.rms_stderr())
            ++mc_ok;
    }
    bool in_window = found && crit >= 0.558 - 0.015 && crit <= 0.558 + 0.015;
    bool mc_pass = mc_ok == mc_total;
    double dt = now_s() - t0;
    report(1, in_window && mc_pass && dt < 300.0,
           fmt("tms break-even sigma_crit = %.3f (target 0.558 +- 0.015), mc agreement %d/%d, "
               "%.1f s",
               crit, mc_ok, mc_total, dt));
}

// 2. Stabilizer small-noise law: sigma = 1e-3, lambda in {1.5, 2.05}, n = 7;
//    PDF recursion within 5% of lambda^{1-n} sigma on both quadratures.
void criterion_2() {
    double t0 = now_s();
    bool pass = true;
    std::string detail;
    for (double lam : {1.5, 2.05}) {
        StabilizerCodeConfig cfg{7, lam, 1e-3, 0.0, 4096};
        LogicalNoise ln = stabilizer_logical_noise(cfg);
        double target = std::pow(lam, -6) * 1e-3;
        double dq = ln.sigma_q / target - 1.0;
        double dp = ln.sigma_p / target - 1.0;
        auto [iq, ip] = ideal_noise_evolution(1e-3, lam, 7);
        double dq_ideal = ln.sigma_q / iq - 1.0;
        double dp_ideal = ln.sigma_p / ip - 1.0;
        pass = pass && std::abs(dq) <= 0.05 && std::abs(dp) <= 0.05;
        detail += fmt("lambda=%.2f: q %+0.1f%%, p %+0.1f%% of lambda^-6 sigma "
                      "(vs displayed recursion: q %+0.2f%%, p %+0.2f%%); ",
                      lam, 100 * dq, 100 * dp, 100 * dq_ideal, 100 * dp_ideal);
    }
    double dt = now_s() - t0;
    report(2, pass && dt < 120.0, detail + fmt("%.1f s", dt));
}

// 3. Stabilizer curve termination at lambda = 2.05: some sigma_crit < 0.558
//    beyond which the logical rms stops beating the channel.
void criterion_3() {
    std::vector<double> sigmas = {0.02, 0.05, 0.08, 0.10, 0.15, 0.20, 0.30, 0.45, 0.55};
    StabilizerCodeConfig base{7, 2.05, 0.1, 0.0, 4096};
    double last_help = 0.0, first_fail = 0.0;
    bool fail_seen = false, help_seen = false;
    for (double s : sigmas) {
        StabilizerCodeConfig cfg = base;
        cfg.sigma = s;
        double rms = 0.0;
        try {
            LogicalNoise ln = stabilizer_logical_noise(cfg);
            rms = std::max(ln.sigma_q, ln.sigma_p);
        } catch (const std::exception&) {
            rms = s;  // recursion out of precision: counts as no longer helping
        }
        if (rms < s && !fail_seen) {
            help_seen = true;
            last_help = s;
        } else if (rms >= s) {
            if (!fail_seen) first_fail = s;
            fail_seen = true;
        }
    }
    bool pass = help_seen && fail_seen && first_fail < 0.558;
    report(3, pass,
           fmt("lambda=2.05 helps through sigma = %.3f, stops by sigma = %.3f (< 0.558)",
               last_help, first_fail));
}

// 4. Heisenberg versus standard-quantum-limit scaling of the closed forms.
void criterion_4() {
    std::vector<double> lx, le, ls;
    for (int m : {4, 16, 64, 256}) {
        lx.push_back(std::log(static_cast<double>(m)));
        le.push_back(std::log(entangled_precision_uniform(m, m, 1.0)));
        ls.push_back(std::log(separable_precision_uniform(m, m, 1.0)));
    }
    double se = fit_slope(lx, le), ss = fit_slope(lx, ls);
    bool pass = std::abs(se + 1.0) <= 0.05 && std::abs(ss + 0.5) <= 0.05;
    report(4, pass, fmt("entangled slope %.3f (want -1.00 +- 0.05), separable %.3f "
                        "(want -0.50 +- 0.05)", se, ss));
}

// 5. Monte Carlo protocol against the weighted closed form, five random
//    mixed-weight configurations.
void criterion_5() {
    double t0 = now_s();
    RngStream rng(424242, 0);
    int ok = 0;
    std::string detail;
    for (int trial = 0; trial < 5; ++trial) {
        int m = 2 + static_cast<int>(rng.uniform() * 7);
        SensorNetworkConfig cfg;
        cfg.nodes = m;
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            cfg.weights.push_back(0.2 + rng.uniform());
            sum += cfg.weights.back();
        }
        for (auto& w : cfg.weights) w /= sum;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cfg.weights.size(); ++i) acc += cfg.weights[i];
        cfg.weights.back() = 1.0 - acc;
        for (int i = 0; i < m; ++i) cfg.etas.push_back(0.7 + 0.3 * rng.uniform());
        cfg.total_photons = 1.0 + 7.0 * rng.uniform();
        std::vector<double> field;
        for (int i = 0; i < m; ++i) field.push_back(-0.5 + rng.uniform());

        ProtocolResult res =
            mc_single_quadrature(cfg, field, NoCode{}, 100000, rng.substream(trial));
        double dev = std::abs(res.rms - res.analytic) / res.rms_stderr;
        if (dev <= 4.0) ++ok;
        detail += fmt("%.1fse ", dev);
    }
    double dt = now_s() - t0;
    report(5, ok == 5 && dt < 180.0,
           fmt("5 random configs, |mc - formula| = { %s} (all <= 4 se), %.1f s", detail.c_str(),
               dt));
}

// 6. Error-corrected crossover at eta = 0.95 with the level-7 stabilizer code
//    and the best lambda from the 1.05:0.1:2.05 grid: corrected precision
//    within 1.5x of lossless up to M = 100, while the uncorrected curve
//    exceeds that envelope.
void criterion_6() {
    double sigma = loss_equivalent_awgn_sigma(0.95);
    double best_metric = 1e300, best_q = 1e300, best_lam = 0.0;
    for (double lam = 1.05; lam <= 2.051; lam += 0.1) {
        try {
            StabilizerCodeConfig cfg{7, lam, sigma, 0.0, 4096};
            LogicalNoise ln = stabilizer_logical_noise(cfg);
            double metric = std::max(ln.sigma_q, ln.sigma_p);
            if (metric < best_metric) {
                best_metric = metric;
                best_q = ln.sigma_q;
                best_lam = lam;
            }
        } catch (const std::exception&) {
            continue;
        }
    }

    bool factor_ok = true;
    bool ordering_ok = true;   // corrected beats uncoded at every M
    bool uncoded_departs = false;  // the uncoded curve leaves the 1.5x envelope by M = 100
    int factor_good_to = 0;
    for (int m : {4, 9, 16, 25, 36, 49, 64, 81, 100}) {
        double ns = static_cast<double>(m);
        double lossless = entangled_precision_uniform(m, ns, 1.0);
        double corrected = ec_sensing_precision(m, ns, best_q);
        double uncoded = entangled_precision_uniform(m, ns, 0.95);
        if (corrected <= 1.5 * lossless) factor_good_to = m;
        else factor_ok = false;
        if (uncoded <= corrected) ordering_ok = false;
        if (uncoded > 1.5 * lossless) uncoded_departs = true;
    }
    report(6, factor_ok && ordering_ok && uncoded_departs,
           fmt("best lambda %.2f, sigma_ec(q) = %.4f; corrected within 1.5x of lossless up to "
               "M = %d (need 100)%s; corrected < uncoded at every M: %s; uncoded departs the "
               "envelope: %s",
               best_lam, best_q, factor_good_to, factor_ok ? "" : " -> factor bound FAILS",
               ordering_ok ? "yes" : "no", uncoded_departs ? "yes" : "no"));
}

// 7. Complex-displacement scaling: dq within 25% of 1/(2 M sqrt(n_S)) with
//    log-log slope -1 +- 0.1, and the sampled protocol agreeing with the
//    quadrature values within 4 standard errors at 1e5 shots.
void criterion_7() {
    double t0 = now_s();
    double n_s = 4.0, k_prior = 1.0;
    std::vector<double> lx, ly;
    bool near = true, mc_pass = true;
    std::string detail;
    RngStream rng(777, 0);
    for (int m : {4, 16, 64}) {
        PriorModel prior = PriorModel::from_k(k_prior, m, n_s);
        double delta2 = 1.0 / (2.0 * m * n_s);
        double outcome_var = delta2 / (2.0 * m);
        double c_m = kGkpPeriod / m;
        int k_max =
            static_cast<int>(std::ceil(6.0 * (prior.sigma_prior + std::sqrt(outcome_var)) / c_m)) +
            2;
        V1V2 v = compute_v1_v2(prior, outcome_var, c_m, k_max);
        CombinedStats st = combined_estimator_stats(v.v1, v.v2, prior.sigma_prior);
        double target = 1.0 / (2.0 * m * std::sqrt(n_s));
        near = near && std::abs(st.dq_gkp - target) <= 0.25 * target;
        lx.push_back(std::log(static_cast<double>(m)));
        ly.push_back(std::log(st.dq_gkp));

        ComplexProtocolResult mc =
            mc_complex_protocol(m, n_s, {0.0, 0.0}, prior, 100000, rng.substream(m));
        double dev_re = std::abs(mc.dq_re - st.dq_gkp) / mc.dq_re_stderr;
        double dev_im = std::abs(mc.dq_im - st.dq_gkp) / mc.dq_im_stderr;
        mc_pass = mc_pass && dev_re <= 4.0 && dev_im <= 4.0;
        detail += fmt("M=%d: dq=%.5f (target %.5f, mc %.1f/%.1f se) ", m, st.dq_gkp, target,
                      dev_re, dev_im);
    }
    double slope = fit_slope(lx, ly);
    bool slope_ok = std::abs(slope + 1.0) <= 0.1;
    double dt = now_s() - t0;
    report(7, near && slope_ok && mc_pass,
           detail + fmt("slope %.3f (want -1 +- 0.1), %.1f s", slope, dt));
}

// 8. Channel identities: amplify-then-lose equals the additive channel, and
//    both weighted-channel decompositions, by first and second moments.
void criterion_8() {
    RngStream rng(888, 0);
    long n = 100000;
    bool pass = true;
    std::string detail;

    auto moment_check = [&](auto&& sample_pair, double want_var) {
        MomentAccum acc;
        for (long i = 0; i < n; ++i) acc.add(sample_pair());
        double m2 = acc.raw2();
        double dm = std::abs(acc.mean()) / std::sqrt(m2 / acc.count);
        double dv = std::abs(m2 - want_var) /
                    std::sqrt(std::max(acc.sum4 / acc.count - m2 * m2, 1e-300) / acc.count);
        pass = pass && dm <= 4.0 && dv <= 4.0;
        return std::pair<double, double>{dm, dv};
    };

    for (double eta : {0.7, 0.8, 0.9, 0.99}) {
        GaussianChannel amp = GaussianChannel::amp(1.0 / eta);
        GaussianChannel loss = GaussianChannel::loss(eta);
        double sig = loss_equivalent_awgn_sigma(eta);
        auto [dm, dv] = moment_check(
            [&] {
                double q = 0.4 + rng.gaussian(std::sqrt(kVacuumVariance));
                double p = rng.gaussian(std::sqrt(kVacuumVariance));
                apply_channel_sample(amp, q, p, rng);
                apply_channel_sample(loss, q, p, rng);
                return q - 0.4;
            },
            kVacuumVariance + sig * sig);
        detail += fmt("eta=%.2f: %.1f/%.1f ", eta, dm, dv);
    }
    for (double k : {2.0, 0.5}) {
        ChannelDecomposition dec = weighted_channel_decomposition(k);
        double alpha = 0.3;
        auto [dm, dv] = moment_check(
            [&] {
                double q = rng.gaussian(std::sqrt(kVacuumVariance));
                double p = rng.gaussian(std::sqrt(kVacuumVariance));
                apply_channel_sample(dec.pre, q, p, rng);
                q += M_SQRT2 * alpha;
                apply_channel_sample(dec.post, q, p, rng);
                return q - M_SQRT2 * k * alpha;
            },
            kVacuumVariance + dec.excess_variance);
        detail += fmt("k=%.1f: %.1f/%.1f ", k, dm, dv);
    }
    report(8, pass, "moment deviations in se (mean/var, all <= 4): " + detail);
}

// 9. Property suites: form preservation, modulo arithmetic, density
//    normalization, estimator unbiasedness; no heavy sampling.
void criterion_9() {
    bool pass = true;

    RngStream rng(999, 0);
    for (int i = 0; i < 10; ++i) {
        SymplecticMap s = two_mode_squeezer(1.0 + 2.0 * rng.uniform()) * sum_gate() *
                          single_mode_squeezer(0, 0.4 + rng.uniform(), 2);
        pass = pass && s.form_defect() <= 1e-10;
    }

    for (int i = 0; i < 500; ++i) {
        double z = (rng.uniform() - 0.5) * 30.0;
        double r = modulo_reduce(z, kGkpPeriod);
        pass = pass && modulo_reduce(r, kGkpPeriod) == r;
        int k = static_cast<int>(rng.uniform() * 5) - 2;
        pass = pass && std::abs(modulo_reduce(z + k * kGkpPeriod, kGkpPeriod) - r) <= 1e-12;
    }

    PdfGrid p = PdfGrid::gaussian(0.0, 1.3, 4096);
    pass = pass && std::abs(fold_modulo(p, kGkpPeriod).total() - 1.0) <= 1e-6;
    PdfGrid step = stabilizer_recursion_step(PdfGrid::gaussian(0.0, 0.2, 2048),
                                             PdfGrid::gaussian(0.0, 0.8, 2048), 0.5);
    pass = pass && std::abs(step.total() - 1.0) <= 1e-6;

    SensorNetworkConfig cfg = SensorNetworkConfig::uniform(4, 4.0, 0.9);
    std::vector<double> field = {0.1, -0.2, 0.3, 0.05};
    ProtocolResult res = mc_single_quadrature(cfg, field, NoCode{}, 20000, RngStream(999, 1));
    double target = 0.25 * (0.1 - 0.2 + 0.3 + 0.05);
    pass = pass &&
           std::abs(res.mean - target) <= 4.0 * res.rms / std::sqrt(static_cast<double>(res.shots));

    report(9, pass, "symplectic form, modulo arithmetic, pdf normalization, unbiasedness");
}

}  // namespace

int main() {
    double t0 = now_s();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%d of 9 criteria failed; total %.1f s\n", failures, now_s() - t0);
    return failures;
}
