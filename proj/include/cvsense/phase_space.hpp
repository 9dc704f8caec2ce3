#ifndef CVSENSE_PHASE_SPACE_HPP
#define CVSENSE_PHASE_SPACE_HPP

#include <Eigen/Dense>

#include "cvsense/rng.hpp"

namespace cvsense {

// Quadrature ordering is (q1, p1, ..., qn, pn); vacuum variance is 1/2 per
// quadrature throughout.
using QuadVec = Eigen::VectorXd;

inline constexpr double kVacuumVariance = 0.5;

// Standard symplectic form for the (q1,p1,...) ordering.
Eigen::MatrixXd symplectic_form(int n_modes);

// Linear quadrature map with S * Omega * S^T = Omega. The constructor rejects
// matrices violating the form beyond 1e-10 per entry.
class SymplecticMap {
public:
    explicit SymplecticMap(Eigen::MatrixXd m);

    static SymplecticMap identity(int n_modes);

    int n_modes() const { return static_cast<int>(m_.rows()) / 2; }
    const Eigen::MatrixXd& matrix() const { return m_; }

    // max |S Omega S^T - Omega| entry
    double form_defect() const;

    // symplectic inverse, -Omega * S^T * Omega
    SymplecticMap inverse() const;

    SymplecticMap operator*(const SymplecticMap& rhs) const;
    QuadVec apply(const QuadVec& x) const { return m_ * x; }

private:
    struct unchecked_t {};
    SymplecticMap(Eigen::MatrixXd m, unchecked_t) : m_(std::move(m)) {}
    Eigen::MatrixXd m_;
};

// Two-mode squeezer T(G): q1 -> sqrt(G) q1 + sqrt(G-1) q2,
// p1 -> sqrt(G) p1 - sqrt(G-1) p2, and symmetrically for mode 2.
SymplecticMap two_mode_squeezer(double gain);

// (q1,p1,q2,p2) -> (q1, p1 - p2, q1 + q2, p2)
SymplecticMap sum_gate();

// q_mode -> factor * q_mode, p_mode -> p_mode / factor; identity elsewhere.
SymplecticMap single_mode_squeezer(int mode, double factor, int n_modes);

// Encoder for the iterated squeezing/SUM code at the given level (>= 2),
// squeeze factor > 1. 4x4, acts on (protected mode, ancilla chain).
SymplecticMap stabilizer_encoder(int level, double lam);

// Passive array: q -> O q and p -> O p for an orthogonal O.
SymplecticMap beamsplitter_array(const Eigen::MatrixXd& orthogonal);

// Noise displacement conjugated through a Gaussian unitary: S^{-1} eps.
QuadVec conjugate_noise(const SymplecticMap& s, const QuadVec& eps);

// Loss (transmissivity eta in (0,1]), amplifier (gain >= 1), or additive
// Gaussian noise (rms sigma >= 0 per quadrature; sigma = 0 is the identity).
struct GaussianChannel {
    enum class Kind { loss, amp, awgn };

    Kind kind;
    double param;

    static GaussianChannel loss(double eta);
    static GaussianChannel amp(double gain);
    static GaussianChannel awgn(double sigma);

    double amplitude_scale() const;
    double added_variance() const;  // per quadrature
};

// Mode-local covariance update; cross covariances scale with the channel's
// amplitude factor.
Eigen::MatrixXd apply_channel_cov(const Eigen::MatrixXd& cov, const GaussianChannel& ch,
                                  int mode);

// Sampling semantics for a single mode: scales the point and adds the
// channel's Gaussian noise to both quadratures.
void apply_channel_sample(const GaussianChannel& ch, double& q, double& p, RngStream& rng);

// iid zero-mean Gaussian displacement of rms sigma on all 2*n_modes entries.
QuadVec sample_awgn(double sigma, int n_modes, RngStream& rng);

// Noise of the amplify-then-lose reduction of a loss channel: sqrt(1 - eta).
double loss_equivalent_awgn_sigma(double eta);

// Checks V + i Omega / 2 >= 0 (all eigenvalues >= -tol).
bool satisfies_uncertainty(const Eigen::MatrixXd& cov, double tol = 1e-9);

}  // namespace cvsense

#endif
