#ifndef CVSENSE_SENSING_HPP
#define CVSENSE_SENSING_HPP

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "cvsense/exec.hpp"
#include "cvsense/phase_space.hpp"
#include "cvsense/qec_codes.hpp"
#include "cvsense/rng.hpp"

namespace cvsense {

// Network of M sensor nodes sharing one photon budget. Weights are
// non-negative and sum to one; each node sees an independent loss channel.
struct SensorNetworkConfig {
    int nodes = 1;
    std::vector<double> weights;
    std::vector<double> etas;
    double total_photons = 0.0;

    static SensorNetworkConfig uniform(int nodes, double total_photons, double eta);
    void validate() const;

    double w_bar() const;    // sqrt(sum w^2)
    double eta_bar() const;  // sum w^2 eta / w_bar^2
    double cap_w_bar() const;  // sqrt(sum w^2 eta)
};

// rms error of the entangled protocol's weighted-average estimator.
double entangled_precision_weighted(const SensorNetworkConfig& cfg);

// Equal-weight, equal-loss closed forms.
double entangled_precision_uniform(int nodes, double total_photons, double eta);
double separable_precision_uniform(int nodes, double total_photons, double eta);

// Precision after the amplify/correct pipeline reduced the channel noise to
// sigma_ec per quadrature.
double ec_sensing_precision(int nodes, double total_photons, double sigma_ec);

// Code applied per node in the distributed protocol.
struct NoCode {};
using NodeCode = std::variant<NoCode, TmsCodeConfig, StabilizerCodeConfig>;

struct ProtocolResult {
    double rms = 0.0;       // empirical rms of the estimator about the target
    double rms_stderr = 0.0;
    double mean = 0.0;
    double analytic = std::numeric_limits<double>::quiet_NaN();
    long shots = 0;
};

// Squeezed-vacuum distributed protocol for real displacements: beamsplitter
// array, per-node channel (raw loss, or the amplified channel plus decode
// when a code is selected), displacement, homodyne, weighted estimator.
ProtocolResult mc_single_quadrature(const SensorNetworkConfig& cfg,
                                    const std::vector<double>& field, const NodeCode& code,
                                    long shots, const RngStream& rng,
                                    ExecPolicy policy = ExecPolicy::parallel);

// Same protocol with each homodyne outcome reduced modulo sqrt(2pi) before
// weighting; requires |alpha_m| < sqrt(2pi).
ProtocolResult mc_single_quadrature_modulo_decode(const SensorNetworkConfig& cfg,
                                                  const std::vector<double>& field,
                                                  const NodeCode& code, long shots,
                                                  const RngStream& rng,
                                                  ExecPolicy policy = ExecPolicy::parallel);

// Estimators for both displacement quadratures from per-node outcomes:
// R_{sqrt(2pi)/M}(mean outcome) / sqrt(2).
std::pair<double, double> complex_estimates(std::span<const double> q_outcomes,
                                            std::span<const double> p_outcomes);

struct PriorModel {
    double sigma_prior = 0.0;
    static PriorModel from_k(double k_prior, int nodes, double photons_per_node);
};

struct V1V2 {
    double v1 = 0.0;  // outcome variance sum_k <(x - k c_M)^2>_k
    double v2 = 0.0;  // cross correlation sum_k <(x - k c_M) q_prior>_k
    bool truncation_ok = true;
};

// Binned Gaussian double integrals over |k| <= k_max; outcome_variance is the
// per-measurement variance around the prior-shifted mean.
V1V2 compute_v1_v2(const PriorModel& prior, double outcome_variance, double period_over_m,
                   int k_max);

struct CombinedStats {
    double zeta_star = 0.0;
    double min_variance = 0.0;
    double dq_gkp = 0.0;  // infinity when the measurement adds no information
};

CombinedStats combined_estimator_stats(double v1, double v2, double sigma_prior);

struct ComplexProtocolResult {
    double v1_re = 0.0, v2_re = 0.0;
    double v1_im = 0.0, v2_im = 0.0;
    double dq_re = 0.0, dq_im = 0.0;
    double dq_re_stderr = 0.0, dq_im_stderr = 0.0;
    double combined_rms_re = 0.0, combined_rms_im = 0.0;
    double est_mean_re = 0.0, est_mean_im = 0.0;  // plain estimator mean
    long shots = 0;
};

// Grid-state distributed protocol for complex displacements with the
// prior-combined estimator. nodes must be a perfect square.
ComplexProtocolResult mc_complex_protocol(int nodes, double photons_per_node,
                                          std::complex<double> alpha, const PriorModel& prior,
                                          long shots, const RngStream& rng,
                                          ExecPolicy policy = ExecPolicy::parallel,
                                          bool use_prior = true);

struct ChannelDecomposition {
    GaussianChannel pre;
    GaussianChannel post;
    double excess_variance = 0.0;  // |k^2 - 1|
};

// Loss/gain sandwich realizing a rescaled weight k_m around a displacement.
ChannelDecomposition weighted_channel_decomposition(double k_m);

// Mean excess-noise variance of a rescaled-weight network: sum |k^2 - 1| / M.
double weighted_network_excess(std::span<const double> k_values);

// Deterministic orthogonal completion of a given unit first row.
Eigen::MatrixXd orthogonal_with_first_row(const Eigen::VectorXd& first_row);
Eigen::MatrixXd balanced_orthogonal(int nodes);

}  // namespace cvsense

#endif
