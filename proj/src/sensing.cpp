#include "cvsense/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvsense/gkp.hpp"

namespace cvsense {

namespace {

constexpr double kS = kGkpPeriod;

double squeezed_factor(double photons) {
    // e^{2r} with sinh^2 r = N_S
    double t = std::sqrt(photons + 1.0) + std::sqrt(photons);
    return t * t;
}

double norm_pdf(double x, double var) {
    return std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

double norm_cdf(double x, double sd) { return 0.5 * std::erfc(-x / (sd * M_SQRT2)); }

}  // namespace

SensorNetworkConfig SensorNetworkConfig::uniform(int nodes, double total_photons, double eta) {
    SensorNetworkConfig cfg;
    cfg.nodes = nodes;
    cfg.weights.assign(static_cast<std::size_t>(nodes), 1.0 / nodes);
    cfg.etas.assign(static_cast<std::size_t>(nodes), eta);
    cfg.total_photons = total_photons;
    cfg.validate();
    return cfg;
}

void SensorNetworkConfig::validate() const {
    if (nodes < 1) throw std::invalid_argument("node count must be >= 1");
    if (static_cast<int>(weights.size()) != nodes || static_cast<int>(etas.size()) != nodes)
        throw std::invalid_argument("weights/etas must have one entry per node");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
    for (double e : etas)
        if (!(e > 0.0) || e > 1.0)
            throw std::invalid_argument("transmissivities must lie in (0, 1]");
    if (total_photons < 0.0) throw std::invalid_argument("photon budget must be >= 0");
}

double SensorNetworkConfig::w_bar() const {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return std::sqrt(s);
}

double SensorNetworkConfig::eta_bar() const {
    double num = 0.0, den = 0.0;
    for (int m = 0; m < nodes; ++m) {
        num += weights[static_cast<std::size_t>(m)] * weights[static_cast<std::size_t>(m)] *
               etas[static_cast<std::size_t>(m)];
        den += weights[static_cast<std::size_t>(m)] * weights[static_cast<std::size_t>(m)];
    }
    return num / den;
}

double SensorNetworkConfig::cap_w_bar() const {
    double s = 0.0;
    for (int m = 0; m < nodes; ++m)
        s += weights[static_cast<std::size_t>(m)] * weights[static_cast<std::size_t>(m)] *
             etas[static_cast<std::size_t>(m)];
    return std::sqrt(s);
}

double entangled_precision_weighted(const SensorNetworkConfig& cfg) {
    cfg.validate();
    double wb = cfg.w_bar();
    double eb = cfg.eta_bar();
    return 0.5 * wb * std::sqrt(eb / squeezed_factor(cfg.total_photons) + 1.0 - eb);
}

double entangled_precision_uniform(int nodes, double total_photons, double eta) {
    if (nodes < 1) throw std::invalid_argument("node count must be >= 1");
    return 0.5 * std::sqrt(eta / (nodes * squeezed_factor(total_photons)) +
                           (1.0 - eta) / nodes);
}

double separable_precision_uniform(int nodes, double total_photons, double eta) {
    if (nodes < 1) throw std::invalid_argument("node count must be >= 1");
    return 0.5 * std::sqrt(eta / (nodes * squeezed_factor(total_photons / nodes)) +
                           (1.0 - eta) / nodes);
}

double ec_sensing_precision(int nodes, double total_photons, double sigma_ec) {
    if (nodes < 1) throw std::invalid_argument("node count must be >= 1");
    if (sigma_ec < 0.0) throw std::invalid_argument("corrected noise rms must be >= 0");
    return 0.5 * std::sqrt(1.0 / (nodes * squeezed_factor(total_photons)) +
                           2.0 * sigma_ec * sigma_ec / nodes);
}

Eigen::MatrixXd orthogonal_with_first_row(const Eigen::VectorXd& first_row) {
    int n = static_cast<int>(first_row.size());
    double norm = first_row.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("first row must be nonzero");
    Eigen::MatrixXd o = Eigen::MatrixXd::Zero(n, n);
    o.row(0) = first_row.transpose() / norm;
    int filled = 1;
    for (int j = 0; j < n && filled < n; ++j) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
        for (int r = 0; r < filled; ++r) v -= o.row(r).dot(v) * o.row(r).transpose();
        double vn = v.norm();
        if (vn > 1e-10) {
            o.row(filled) = v.transpose() / vn;
            ++filled;
        }
    }
    if (filled != n) throw std::runtime_error("orthogonal completion failed");
    return o;
}

Eigen::MatrixXd balanced_orthogonal(int nodes) {
    return orthogonal_with_first_row(Eigen::VectorXd::Constant(nodes, 1.0));
}

namespace {

struct NodeCodeRuntime {
    // one sampler per node; null entries mean the bare loss channel
    std::vector<std::optional<TmsSampler>> tms;
    std::vector<std::optional<StabilizerSampler>> stab;
    bool any_code = false;
};

NodeCodeRuntime build_codes(const SensorNetworkConfig& cfg, const NodeCode& code) {
    NodeCodeRuntime rt;
    rt.tms.resize(static_cast<std::size_t>(cfg.nodes));
    rt.stab.resize(static_cast<std::size_t>(cfg.nodes));
    if (std::holds_alternative<NoCode>(code)) return rt;
    rt.any_code = true;
    if (const auto* t = std::get_if<TmsCodeConfig>(&code)) {
        for (int m = 0; m < cfg.nodes; ++m) {
            TmsCodeConfig node_cfg = *t;
            node_cfg.sigma = loss_equivalent_awgn_sigma(cfg.etas[static_cast<std::size_t>(m)]);
            rt.tms[static_cast<std::size_t>(m)].emplace(node_cfg);
        }
        return rt;
    }
    const auto& s = std::get<StabilizerCodeConfig>(code);
    // schedule per distinct channel noise
    std::vector<std::pair<double, StabilizerSchedule>> cache;
    for (int m = 0; m < cfg.nodes; ++m) {
        double sig = loss_equivalent_awgn_sigma(cfg.etas[static_cast<std::size_t>(m)]);
        StabilizerCodeConfig node_cfg = s;
        node_cfg.sigma = sig;
        const StabilizerSchedule* found = nullptr;
        for (const auto& [key, sched] : cache)
            if (key == sig) found = &sched;
        if (!found) {
            StabilizerSchedule sched;
            stabilizer_logical_noise(node_cfg, ExecPolicy::parallel, &sched);
            cache.emplace_back(sig, std::move(sched));
            found = &cache.back().second;
        }
        rt.stab[static_cast<std::size_t>(m)].emplace(node_cfg, *found);
    }
    return rt;
}

ProtocolResult run_single_quadrature(const SensorNetworkConfig& cfg,
                                     const std::vector<double>& field, const NodeCode& code,
                                     long shots, const RngStream& rng, ExecPolicy policy,
                                     bool modulo_decode) {
    cfg.validate();
    if (static_cast<int>(field.size()) != cfg.nodes)
        throw std::invalid_argument("field must have one displacement per node");
    if (shots < 10000) throw std::invalid_argument("protocol simulation needs shots >= 1e4");
    if (modulo_decode)
        for (double a : field)
            if (!(std::abs(a) < kS))
                throw std::invalid_argument("modulo decoding requires |alpha_m| < sqrt(2pi)");

    int n = cfg.nodes;
    Eigen::VectorXd row(n);
    for (int m = 0; m < n; ++m)
        row(m) = cfg.weights[static_cast<std::size_t>(m)] *
                 std::sqrt(cfg.etas[static_cast<std::size_t>(m)]);
    Eigen::MatrixXd ot = orthogonal_with_first_row(row).transpose();  // a = O^T b

    double target = 0.0;
    for (int m = 0; m < n; ++m) target += cfg.weights[static_cast<std::size_t>(m)] * field[static_cast<std::size_t>(m)];

    double sq_std = std::sqrt(0.5 / squeezed_factor(cfg.total_photons));
    double vac_std = std::sqrt(kVacuumVariance);
    NodeCodeRuntime rt = build_codes(cfg, code);

    auto states = mc_chunks<MomentAccum>(shots, rng, policy, [&](RngStream& r, long count) {
        MomentAccum acc;
        Eigen::VectorXd qb(n), qa(n);
        for (long i = 0; i < count; ++i) {
            qb(0) = r.gaussian(sq_std);
            for (int m = 1; m < n; ++m) qb(m) = r.gaussian(vac_std);
            qa.noalias() = ot * qb;
            double est = 0.0;
            for (int m = 0; m < n; ++m) {
                auto mu = static_cast<std::size_t>(m);
                double out;
                if (!rt.any_code) {
                    double eta = cfg.etas[mu];
                    out = std::sqrt(eta) * qa(m) + std::sqrt(1.0 - eta) * r.gaussian(vac_std);
                } else {
                    double zq = rt.tms[mu] ? rt.tms[mu]->sample(r).first
                                           : rt.stab[mu]->sample(r).first;
                    out = qa(m) + zq;
                }
                out += M_SQRT2 * field[mu];
                if (modulo_decode) out = modulo_reduce(out, kS);
                est += cfg.weights[mu] * out;
            }
            acc.add(est / M_SQRT2 - target);
        }
        return acc;
    });
    MomentAccum total = merge_states(states);

    ProtocolResult res;
    res.rms = total.rms();
    res.rms_stderr = total.rms_stderr();
    res.mean = total.mean() + target;
    res.shots = shots;
    if (!rt.any_code) res.analytic = entangled_precision_weighted(cfg);
    return res;
}

}  // namespace

ProtocolResult mc_single_quadrature(const SensorNetworkConfig& cfg,
                                    const std::vector<double>& field, const NodeCode& code,
                                    long shots, const RngStream& rng, ExecPolicy policy) {
    return run_single_quadrature(cfg, field, code, shots, rng, policy, false);
}

ProtocolResult mc_single_quadrature_modulo_decode(const SensorNetworkConfig& cfg,
                                                  const std::vector<double>& field,
                                                  const NodeCode& code, long shots,
                                                  const RngStream& rng, ExecPolicy policy) {
    return run_single_quadrature(cfg, field, code, shots, rng, policy, true);
}

std::pair<double, double> complex_estimates(std::span<const double> q_outcomes,
                                            std::span<const double> p_outcomes) {
    if (q_outcomes.empty() || q_outcomes.size() != p_outcomes.size())
        throw std::invalid_argument("need one q and one p outcome per node");
    auto m = static_cast<double>(q_outcomes.size());
    double mq = 0.0, mp = 0.0;
    for (double v : q_outcomes) mq += v;
    for (double v : p_outcomes) mp += v;
    mq /= m;
    mp /= m;
    double period = kS / m;
    return {modulo_reduce(mq, period) / M_SQRT2, modulo_reduce(mp, period) / M_SQRT2};
}

PriorModel PriorModel::from_k(double k_prior, int nodes, double photons_per_node) {
    if (!(k_prior > 0.0)) throw std::invalid_argument("k_prior must be positive");
    double m = nodes;
    return {std::sqrt(k_prior / (4.0 * m * m * photons_per_node))};
}

V1V2 compute_v1_v2(const PriorModel& prior, double outcome_variance, double period_over_m,
                   int k_max) {
    double sp = prior.sigma_prior;
    if (!(sp > 0.0)) throw std::invalid_argument("prior rms must be positive");
    if (!(outcome_variance > 0.0)) throw std::invalid_argument("outcome variance must be positive");
    double c_m = period_over_m;
    int need = static_cast<int>(std::ceil(6.0 * (sp + std::sqrt(outcome_variance)) / c_m));
    if (k_max < need) throw std::invalid_argument("k_max below the required truncation range");

    // outer integral over the prior by Gauss-Legendre panels; inner bin
    // integrals in closed form
    auto evaluate = [&](int panels) {
        // 16-point Gauss-Legendre nodes on [0,1] halves folded symmetric
        static const double gx[8] = {0.0950125098376374, 0.2816035507792589,
                                     0.4580167776572274, 0.6178762444026438,
                                     0.7554044083550030, 0.8656312023878318,
                                     0.9445750230732326, 0.9894009349916499};
        static const double gw[8] = {0.1894506104550685, 0.1826034150449236,
                                     0.1691565193950025, 0.1495959888165767,
                                     0.1246289712555339, 0.0951585116824928,
                                     0.0622535239386479, 0.0271524594117541};
        double lim = 8.5 * sp;
        double v1 = 0.0, v2 = 0.0;
        double sd = std::sqrt(outcome_variance);
        for (int p = 0; p < panels; ++p) {
            double a = -lim + 2.0 * lim * p / panels;
            double b = a + 2.0 * lim / panels;
            double half = 0.5 * (b - a), mid = 0.5 * (a + b);
            for (int gi = 0; gi < 16; ++gi) {
                double x = gi < 8 ? mid - half * gx[gi] : mid + half * gx[gi - 8];
                double wq = half * gw[gi % 8] * norm_pdf(x, sp * sp);
                double mu = -x;
                double t1 = 0.0, t2 = 0.0;
                for (int k = -k_max; k <= k_max; ++k) {
                    double lo = (k - 0.5) * c_m, hi = (k + 0.5) * c_m;
                    double fa = norm_pdf(lo - mu, outcome_variance);
                    double fb = norm_pdf(hi - mu, outcome_variance);
                    double p0 = norm_cdf(hi - mu, sd) - norm_cdf(lo - mu, sd);
                    double dk = mu - k * c_m;
                    double i1 = outcome_variance * (fa - fb) + dk * p0;
                    double i2 = outcome_variance * p0 +
                                outcome_variance * ((lo - mu) * fa - (hi - mu) * fb) +
                                2.0 * dk * outcome_variance * (fa - fb) + dk * dk * p0;
                    t1 += i2;
                    t2 += i1;
                }
                v1 += wq * t1;
                v2 += wq * x * t2;
            }
        }
        return std::pair<double, double>{v1, v2};
    };

    auto [v1a, v2a] = evaluate(24);
    auto [v1b, v2b] = evaluate(48);
    V1V2 out;
    out.v1 = v1b;
    out.v2 = v2b;
    if (std::abs(v1b - v1a) > 1e-9 * std::abs(v1b) + 1e-300 ||
        std::abs(v2b - v2a) > 1e-9 * std::abs(v2b) + 1e-300) {
        auto [v1c, v2c] = evaluate(96);
        out.v1 = v1c;
        out.v2 = v2c;
    }
    // tail mass of the marginal outcome beyond the truncation window
    double marg_sd = std::sqrt(sp * sp + outcome_variance);
    double tail = 2.0 * norm_cdf(-(k_max + 0.5) * c_m, marg_sd);
    out.truncation_ok = tail <= 1e-8;
    return out;
}

CombinedStats combined_estimator_stats(double v1, double v2, double sigma_prior) {
    if (!(v1 > 0.0)) throw std::invalid_argument("outcome variance V1 must be positive");
    CombinedStats out;
    out.zeta_star = -v2 / v1;
    double gain = v2 * v2 / v1;
    out.min_variance = sigma_prior * sigma_prior - gain;
    if (v2 == 0.0 || gain <= 0.0) {
        out.dq_gkp = std::numeric_limits<double>::infinity();
        return out;
    }
    double ratio = sigma_prior * sigma_prior / gain - 1.0;
    out.dq_gkp = sigma_prior * std::sqrt(std::max(ratio, 0.0));
    return out;
}

namespace {

struct ComplexAccum {
    // per quadrature: moments of (g = R(mean), prior deviation d)
    double n = 0.0;
    double g1 = 0.0, g2 = 0.0, g4 = 0.0;
    double gd = 0.0, g2d2 = 0.0, g3d = 0.0;
    void add(double g, double d) {
        n += 1.0;
        g1 += g;
        g2 += g * g;
        g4 += g * g * g * g;
        gd += g * d;
        g2d2 += g * g * d * d;
        g3d += g * g * g * d;
    }
    void merge(const ComplexAccum& o) {
        n += o.n;
        g1 += o.g1;
        g2 += o.g2;
        g4 += o.g4;
        gd += o.gd;
        g2d2 += o.g2d2;
        g3d += o.g3d;
    }
};

struct ComplexPairAccum {
    ComplexAccum re, im;
    void merge(const ComplexPairAccum& o) {
        re.merge(o.re);
        im.merge(o.im);
    }
};

// delta-method standard error of dq(v1, v2) from the sampling covariance of
// the empirical (V1, V2)
double dq_stderr(const ComplexAccum& a, double sigma_prior) {
    double n = a.n;
    double v1 = a.g2 / n, v2 = a.gd / n;
    double var_v1 = (a.g4 / n - v1 * v1) / n;
    double var_v2 = (a.g2d2 / n - v2 * v2) / n;
    double cov12 = (a.g3d / n - v1 * v2) / n;
    auto dq = [&](double x1, double x2) {
        return combined_estimator_stats(x1, x2, sigma_prior).dq_gkp;
    };
    double f0 = dq(v1, v2);
    if (!std::isfinite(f0)) return std::numeric_limits<double>::infinity();
    double h1 = std::max(std::abs(v1) * 1e-6, 1e-300);
    double h2 = std::max(std::abs(v2) * 1e-6, 1e-300);
    double d1 = (dq(v1 + h1, v2) - dq(v1 - h1, v2)) / (2.0 * h1);
    double d2 = (dq(v1, v2 + h2) - dq(v1, v2 - h2)) / (2.0 * h2);
    double var = d1 * d1 * var_v1 + d2 * d2 * var_v2 + 2.0 * d1 * d2 * cov12;
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace

ComplexProtocolResult mc_complex_protocol(int nodes, double photons_per_node,
                                          std::complex<double> alpha, const PriorModel& prior,
                                          long shots, const RngStream& rng, ExecPolicy policy,
                                          bool use_prior) {
    int j = static_cast<int>(std::lround(std::sqrt(static_cast<double>(nodes))));
    if (nodes < 1 || j * j != nodes)
        throw std::invalid_argument("node count must be a perfect square");
    if (!(photons_per_node > 0.0))
        throw std::invalid_argument("photon number per node must be positive");
    if (shots < 10000) throw std::invalid_argument("protocol simulation needs shots >= 1e4");

    double m = nodes;
    double total_photons = m * photons_per_node;
    GkpParams source = GkpParams::from_mean_photons(total_photons);  // Delta^2 = 1/(2 M n_S)
    Eigen::MatrixXd ot = balanced_orthogonal(nodes).transpose();
    double c_m = kS / m;
    double vac_std = std::sqrt(kVacuumVariance);
    double t_re = M_SQRT2 * alpha.real();
    double t_im = M_SQRT2 * alpha.imag();
    double sp = prior.sigma_prior;
    if (use_prior && !(sp > 0.0)) throw std::invalid_argument("prior rms must be positive");

    auto states = mc_chunks<ComplexPairAccum>(shots, rng, policy, [&](RngStream& r, long count) {
        ComplexPairAccum acc;
        Eigen::VectorXd qb(nodes), pb(nodes), qa(nodes), pa(nodes);
        for (long i = 0; i < count; ++i) {
            qb(0) = sample_grid_quadrature(source, r);
            pb(0) = sample_grid_quadrature(source, r);
            for (int k = 1; k < nodes; ++k) {
                qb(k) = r.gaussian(vac_std);
                pb(k) = r.gaussian(vac_std);
            }
            qa.noalias() = ot * qb;
            pa.noalias() = ot * pb;
            double dq_prior = use_prior ? r.gaussian(sp) : 0.0;  // q_prior - sqrt(2) Re(alpha)
            double dp_prior = use_prior ? r.gaussian(sp) : 0.0;
            // field displacement, then the counter-displacement by the
            // full prior value when the prior step is on
            double shift_q = use_prior ? -dq_prior : t_re;
            double shift_p = use_prior ? -dp_prior : t_im;
            double mq = 0.0, mp = 0.0;
            for (int k = 0; k < nodes; ++k) {
                mq += modulo_reduce(qa(k) + shift_q, kS);
                mp += modulo_reduce(pa(k) + shift_p, kS);
            }
            double g_re = modulo_reduce(mq / m, c_m);
            double g_im = modulo_reduce(mp / m, c_m);
            acc.re.add(g_re, dq_prior);
            acc.im.add(g_im, dp_prior);
        }
        return acc;
    });
    ComplexPairAccum total = merge_states(states);

    ComplexProtocolResult res;
    res.shots = shots;
    res.v1_re = total.re.g2 / total.re.n;
    res.v2_re = total.re.gd / total.re.n;
    res.v1_im = total.im.g2 / total.im.n;
    res.v2_im = total.im.gd / total.im.n;
    res.est_mean_re = total.re.g1 / total.re.n / M_SQRT2;
    res.est_mean_im = total.im.g1 / total.im.n / M_SQRT2;
    if (use_prior) {
        CombinedStats cre = combined_estimator_stats(res.v1_re, res.v2_re, sp);
        CombinedStats cim = combined_estimator_stats(res.v1_im, res.v2_im, sp);
        res.dq_re = cre.dq_gkp;
        res.dq_im = cim.dq_gkp;
        res.dq_re_stderr = dq_stderr(total.re, sp);
        res.dq_im_stderr = dq_stderr(total.im, sp);
        res.combined_rms_re = std::sqrt(std::max(cre.min_variance, 0.0));
        res.combined_rms_im = std::sqrt(std::max(cim.min_variance, 0.0));
    } else {
        res.dq_re = res.dq_im = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

ChannelDecomposition weighted_channel_decomposition(double k_m) {
    if (!(k_m > 0.0)) throw std::invalid_argument("rescaled weight must be positive");
    if (k_m == 1.0)
        return {GaussianChannel::awgn(0.0), GaussianChannel::awgn(0.0), 0.0};
    if (k_m > 1.0)
        return {GaussianChannel::loss(1.0 / (k_m * k_m)), GaussianChannel::amp(k_m * k_m),
                k_m * k_m - 1.0};
    return {GaussianChannel::amp(1.0 / (k_m * k_m)), GaussianChannel::loss(k_m * k_m),
            1.0 - k_m * k_m};
}

double weighted_network_excess(std::span<const double> k_values) {
    if (k_values.empty()) throw std::invalid_argument("need at least one weight");
    double s = 0.0;
    for (double k : k_values) s += std::abs(k * k - 1.0);
    return s / static_cast<double>(k_values.size());
}

}  // namespace cvsense
