#include "cvsense/gkp.hpp"

#include <cmath>
#include <stdexcept>

namespace cvsense {

GkpParams GkpParams::from_mean_photons(double n) {
    if (!(n > 0.0)) throw std::invalid_argument("mean photon number must be positive");
    return {std::sqrt(1.0 / (2.0 * n))};
}

double modulo_reduce(double z, double period) {
    if (!(period > 0.0)) throw std::invalid_argument("modulo period must be positive");
    double n = std::nearbyint(z / period);  // round-half-even under default rounding
    double r = z - n * period;
    // guard against representatives pushed past the half-period by rounding
    if (r > 0.5 * period) r -= period;
    else if (r < -0.5 * period) r += period;
    return r;
}

std::pair<double, double> measure_both_quadratures(double shift_q, double shift_p,
                                                   const GkpParams& params, RngStream& rng) {
    if (params.delta < 0.0) throw std::invalid_argument("peak width must be >= 0");
    double fuzz = std::sqrt(params.peak_variance());
    double q = modulo_reduce(shift_q + rng.gaussian(fuzz), kGkpPeriod);
    double p = modulo_reduce(shift_p + rng.gaussian(fuzz), kGkpPeriod);
    return {q, p};
}

double sample_grid_quadrature(const GkpParams& params, RngStream& rng) {
    if (!(params.delta > 0.0))
        throw std::invalid_argument("grid sampling requires a positive peak width");
    double d2 = params.delta * params.delta;
    // envelope weight exp(-2 pi d^2 k^2) over lattice points k*sqrt(2pi)
    double sigma_env = 1.0 / (std::sqrt(2.0) * params.delta);
    int kmax = static_cast<int>(std::ceil(8.5 * sigma_env / kGkpPeriod)) + 1;
    double total = 0.0;
    for (int k = -kmax; k <= kmax; ++k) total += std::exp(-2.0 * M_PI * d2 * k * k);
    double target = rng.uniform() * total;
    int pick = kmax;
    double acc = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        acc += std::exp(-2.0 * M_PI * d2 * k * k);
        if (acc >= target) {
            pick = k;
            break;
        }
    }
    return pick * kGkpPeriod + rng.gaussian(std::sqrt(params.peak_variance()));
}

PdfGrid::PdfGrid(double lo, double hi, std::vector<double> weights)
    : lo_(lo), hi_(hi), w_(std::move(weights)) {
    if (w_.size() < 2) throw std::invalid_argument("pdf grid needs at least two points");
    if (!(hi_ > lo_)) throw std::invalid_argument("pdf grid range is empty");
    step_ = (hi_ - lo_) / static_cast<double>(w_.size() - 1);
    double tot = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) {
        if (w_[i] < 0.0) {
            if (w_[i] < -1e-12) throw std::invalid_argument("pdf weights must be non-negative");
            w_[i] = 0.0;
        }
    }
    tot = total();
    if (!(tot > 0.0) || !std::isfinite(tot))
        throw std::runtime_error("pdf normalization failed: non-positive total");
    for (auto& w : w_) w /= tot;
}

PdfGrid PdfGrid::gaussian(double mean, double sigma, int points, double span) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian pdf requires sigma > 0");
    std::vector<double> w(static_cast<std::size_t>(points));
    double lo = mean - span * sigma;
    double hi = mean + span * sigma;
    double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        double x = lo + step * i - mean;
        w[static_cast<std::size_t>(i)] = std::exp(-x * x / (2.0 * sigma * sigma));
    }
    return PdfGrid(lo, hi, std::move(w));
}

double PdfGrid::value_at(double x) const {
    if (x < lo_ || x > hi_) return 0.0;
    double t = (x - lo_) / step_;
    auto i = static_cast<std::size_t>(t);
    if (i + 1 >= w_.size()) return w_.back();
    double f = t - static_cast<double>(i);
    return w_[i] * (1.0 - f) + w_[i + 1] * f;
}

double PdfGrid::total() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < w_.size(); ++i) s += 0.5 * (w_[i] + w_[i + 1]);
    return s * step_;
}

void PdfGrid::write_csv(std::ostream& out) const {
    out << "x,density\n";
    char buf[96];
    for (int i = 0; i < size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", node(i), w_[static_cast<std::size_t>(i)]);
        out << buf;
    }
}

std::pair<double, double> pdf_moments(const PdfGrid& p) {
    double m = 0.0, tot = 0.0;
    const auto& w = p.weights();
    for (int i = 0; i + 1 < p.size(); ++i) {
        double x0 = p.node(i), x1 = p.node(i + 1);
        tot += 0.5 * (w[i] + w[i + 1]);
        m += 0.5 * (w[i] * x0 + w[i + 1] * x1);
    }
    m /= tot;
    double v = 0.0;
    for (int i = 0; i + 1 < p.size(); ++i) {
        double d0 = p.node(i) - m, d1 = p.node(i + 1) - m;
        v += 0.5 * (w[i] * d0 * d0 + w[i + 1] * d1 * d1);
    }
    return {m, v / tot};
}

PdfGrid fold_modulo(const PdfGrid& p, double period, ExecPolicy policy) {
    if (!(period > 0.0)) throw std::invalid_argument("modulo period must be positive");
    if (p.step() > period / 16.0)
        throw std::invalid_argument("pdf grid too coarse for the requested period");
    int n_out = p.size();
    double lo = -0.5 * period, hi = 0.5 * period;
    double step = (hi - lo) / (n_out - 1);
    int n_lo = static_cast<int>(std::floor((p.lo() - hi) / period));
    int n_hi = static_cast<int>(std::ceil((p.hi() - lo) / period));
    std::vector<double> w(static_cast<std::size_t>(n_out), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
#endif
    for (int i = 0; i < n_out; ++i) {
        double y = lo + step * i;
        double acc = 0.0;
        for (int n = n_lo; n <= n_hi; ++n) acc += p.value_at(y + n * period);
        w[static_cast<std::size_t>(i)] = acc;
    }
    return PdfGrid(lo, hi, std::move(w));
}

}  // namespace cvsense
