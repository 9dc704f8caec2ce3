#ifndef CVSENSE_QEC_CODES_HPP
#define CVSENSE_QEC_CODES_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cvsense/exec.hpp"
#include "cvsense/gkp.hpp"
#include "cvsense/rng.hpp"

namespace cvsense {

struct TmsCodeConfig {
    double gain = 1.0;           // two-mode squeezing gain, >= 1
    double ancilla_delta = 0.0;  // 0 = ideal grid-state ancilla
    double sigma = 0.0;          // physical noise rms per quadrature
    bool wrap = true;            // false disables the modulo readout (testing)
};

struct StabilizerCodeConfig {
    int levels = 2;              // 2..8
    double lam = 2.0;            // squeeze factor > 1
    double sigma = 0.0;
    double ancilla_delta = 0.0;
    int grid_points = 4096;
};

inline constexpr int kMaxStabilizerLevels = 8;

// Residual per-quadrature rms after encode/noise/decode/correct, with the
// full densities when the PDF pipeline produced them.
struct LogicalNoise {
    double sigma_q = 0.0;
    double sigma_p = 0.0;
    std::optional<PdfGrid> pdf_q;
    std::optional<PdfGrid> pdf_p;
};

// E[R(u)^2] and E[u R(u)] for u ~ N(0, tau^2) and the sqrt(2pi) period;
// closed forms used by the deterministic code analysis.
std::pair<double, double> wrap_moments(double tau);

// Counter-displacement coefficient for the two-mode-squeezing code: the
// linear least-squares coefficient of the decoded signal noise against the
// modulo-reduced ancilla readout. Reduces to 2 sqrt(G(G-1)) / (2G - 1) when
// the readout never wraps. Returned with the q-quadrature sign (negative);
// the p coefficient is its negation.
double tms_correction_coefficient(double sigma, double gain, double ancilla_delta = 0.0);

// Deterministic residual rms of the two-mode-squeezing code (1-D quadrature,
// no sampling). Gain 1 returns sigma exactly.
double tms_logical_rms(double sigma, double gain, double ancilla_delta = 0.0);

// Monte Carlo estimate of the residual noise; needs shots >= 1e4.
LogicalNoise tms_logical_noise(const TmsCodeConfig& cfg, long shots, const RngStream& rng,
                               ExecPolicy policy = ExecPolicy::parallel);

// Gain on the grid minimizing max(sigma_q, sigma_p), with the noise at it.
// Uses common random numbers across grid points.
std::pair<double, LogicalNoise> tms_optimize_gain(double sigma, std::span<const double> gains,
                                                  long shots, const RngStream& rng,
                                                  ExecPolicy policy = ExecPolicy::parallel);

// Deterministic variant of the gain optimization (quadrature rms).
std::pair<double, double> tms_optimize_gain_quadrature(double sigma,
                                                       std::span<const double> gains);

// Covariance of the decoded 4-mode noise: conjugates
// diag(sigma^2, sigma^2, prev_q^2, prev_p^2) by the level encoder's inverse.
Eigen::Matrix4d stabilizer_decoded_covariance(double sigma, const LogicalNoise& prev,
                                              int level, double lam);

// (C_q, C_p) = (V(1,3)/V(3,3), V(2,4)/V(4,4)) in 1-based index notation.
std::pair<double, double> stabilizer_mmse_coeffs(const Eigen::Matrix4d& v_ed);

// Density of Z = Z0 - C * R_sqrt(2pi)(Z_prev) for independent Z0 ~ p0 and
// Z_prev ~ p_prev, by the binned integral over wrap cells.
PdfGrid stabilizer_recursion_step(const PdfGrid& p0, const PdfGrid& p_prev, double coeff,
                                  ExecPolicy policy = ExecPolicy::parallel);

// Per-level correction coefficients used by a stabilizer decode chain.
struct StabilizerSchedule {
    std::vector<double> c_q;  // levels 2..n
    std::vector<double> c_p;
};

// Full logical-noise PDFs of the iterated code, level by level. Each level
// conjugates the fresh and chain noise through the level encoder, reads the
// chain mode modulo sqrt(2pi), and applies the MMSE counter-displacement;
// densities are propagated by exact 1-D integrals over the wrap cells.
LogicalNoise stabilizer_logical_noise(const StabilizerCodeConfig& cfg,
                                      ExecPolicy policy = ExecPolicy::parallel,
                                      StabilizerSchedule* schedule_out = nullptr);

// Noise evolution with perfect (wrap-free) measurements:
// sigma_q,n^2 = sigma_q,n-1^2 / (lambda^2 (1 + lambda^{-2n} sigma_q,n-1^2 / sigma^2)),
// sigma_p,n^2 = lambda^{2-2n} sigma^2.
std::pair<double, double> ideal_noise_evolution(double sigma, double lam, int levels);

struct ThresholdResult {
    bool found = false;
    double sigma_crit = 0.0;
};

// Largest sigma in the ascending grid where the optimized code still beats
// the bare channel. Deterministic (quadrature) for the TMS code.
ThresholdResult code_threshold_tms(std::span<const double> sigma_grid,
                                   std::span<const double> gain_grid);

ThresholdResult code_threshold_stabilizer(const StabilizerCodeConfig& base,
                                          std::span<const double> sigma_grid,
                                          ExecPolicy policy = ExecPolicy::parallel);

// Shot samplers used by the sensing protocols; both mirror the decode chains
// the analysis paths model, with a fixed rng draw count per sample.
class TmsSampler {
public:
    explicit TmsSampler(const TmsCodeConfig& cfg);
    std::pair<double, double> sample(RngStream& rng) const;  // residual (z_q, z_p)

private:
    TmsCodeConfig cfg_;
    double c_, s_, coeff_q_, fuzz_;
};

class StabilizerSampler {
public:
    StabilizerSampler(const StabilizerCodeConfig& cfg, StabilizerSchedule schedule);
    std::pair<double, double> sample(RngStream& rng) const;

private:
    StabilizerCodeConfig cfg_;
    StabilizerSchedule sched_;
};

}  // namespace cvsense

#endif
