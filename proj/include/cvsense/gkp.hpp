#ifndef CVSENSE_GKP_HPP
#define CVSENSE_GKP_HPP

#include <ostream>
#include <utility>
#include <vector>

#include "cvsense/exec.hpp"
#include "cvsense/rng.hpp"

namespace cvsense {

// grid spacing sqrt(2*pi)
inline constexpr double kGkpPeriod = 2.5066282746310002;

// Grid-state quality: peak width delta, per-quadrature peak variance
// delta^2/2, mean photon number ~ 1/(2 delta^2). delta = 0 denotes the ideal
// code where helpers allow it.
struct GkpParams {
    double delta = 0.0;

    static GkpParams from_mean_photons(double n);
    double peak_variance() const { return 0.5 * delta * delta; }
    double mean_photons() const { return 1.0 / (2.0 * delta * delta); }
};

// Generalized modulo: z minus the nearest integer multiple of the period,
// result in [-period/2, period/2]. Ties at half-period break toward the
// round-half-even multiple. Exactly idempotent.
double modulo_reduce(double z, double period);

// Simultaneous readout of both quadrature shifts modulo the grid period; a
// finite-width state adds Gaussian fuzz of variance delta^2/2 to each.
std::pair<double, double> measure_both_quadratures(double shift_q, double shift_p,
                                                   const GkpParams& params, RngStream& rng);

// One quadrature of the grid state: lattice point k*sqrt(2pi) weighted by the
// Gaussian envelope of variance 1/(2 delta^2), plus peak noise of variance
// delta^2/2. Uses one uniform and one Gaussian draw.
double sample_grid_quadrature(const GkpParams& params, RngStream& rng);

// Discretized probability density over one quadrature on a uniform grid.
// Weights are non-negative and trapezoid-normalized to 1.
class PdfGrid {
public:
    PdfGrid(double lo, double hi, std::vector<double> weights);

    static PdfGrid gaussian(double mean, double sigma, int points = 4096, double span = 8.5);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double step() const { return step_; }
    int size() const { return static_cast<int>(w_.size()); }
    const std::vector<double>& weights() const { return w_; }
    double node(int i) const { return lo_ + step_ * i; }

    // linear interpolation; zero outside the grid
    double value_at(double x) const;

    // trapezoid integral of the stored weights (1 after construction)
    double total() const;

    // writes "x,density" rows
    void write_csv(std::ostream& out) const;

private:
    double lo_, hi_, step_;
    std::vector<double> w_;
};

// (mean, variance) by the trapezoid rule.
std::pair<double, double> pdf_moments(const PdfGrid& p);

// Density of modulo_reduce(Z, period) for Z ~ p, on [-period/2, period/2].
// Rejects grids coarser than period/16.
PdfGrid fold_modulo(const PdfGrid& p, double period, ExecPolicy policy = ExecPolicy::parallel);

}  // namespace cvsense

#endif
