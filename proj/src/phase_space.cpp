#include "cvsense/phase_space.hpp"

#include <cmath>
#include <stdexcept>

namespace cvsense {

namespace {
constexpr double kFormTol = 1e-10;
}

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0;
        omega(2 * m + 1, 2 * m) = -1.0;
    }
    return omega;
}

SymplecticMap::SymplecticMap(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0)
        throw std::invalid_argument("symplectic map must be square with even dimension");
    if (form_defect() > kFormTol)
        throw std::invalid_argument("matrix does not preserve the symplectic form");
}

SymplecticMap SymplecticMap::identity(int n_modes) {
    return SymplecticMap(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes), unchecked_t{});
}

double SymplecticMap::form_defect() const {
    Eigen::MatrixXd omega = symplectic_form(n_modes());
    return (m_ * omega * m_.transpose() - omega).cwiseAbs().maxCoeff();
}

SymplecticMap SymplecticMap::inverse() const {
    Eigen::MatrixXd omega = symplectic_form(n_modes());
    return SymplecticMap(-omega * m_.transpose() * omega, unchecked_t{});
}

SymplecticMap SymplecticMap::operator*(const SymplecticMap& rhs) const {
    if (n_modes() != rhs.n_modes())
        throw std::invalid_argument("mode count mismatch in symplectic composition");
    return SymplecticMap(m_ * rhs.m_, unchecked_t{});
}

SymplecticMap two_mode_squeezer(double gain) {
    if (gain < 1.0) throw std::invalid_argument("two-mode squeezer requires gain >= 1");
    double c = std::sqrt(gain);
    double s = std::sqrt(gain - 1.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 0) = c;  m(0, 2) = s;
    m(1, 1) = c;  m(1, 3) = -s;
    m(2, 2) = c;  m(2, 0) = s;
    m(3, 3) = c;  m(3, 1) = -s;
    return SymplecticMap(m);
}

SymplecticMap sum_gate() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(1, 3) = -1.0;
    m(2, 0) = 1.0;
    return SymplecticMap(m);
}

SymplecticMap single_mode_squeezer(int mode, double factor, int n_modes) {
    if (factor <= 0.0) throw std::invalid_argument("squeeze factor must be positive");
    if (mode < 0 || mode >= n_modes) throw std::invalid_argument("squeezer mode out of range");
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    m(2 * mode, 2 * mode) = factor;
    m(2 * mode + 1, 2 * mode + 1) = 1.0 / factor;
    return SymplecticMap(m);
}

SymplecticMap stabilizer_encoder(int level, double lam) {
    if (level < 2) throw std::invalid_argument("stabilizer encoder requires level >= 2");
    if (lam <= 1.0) throw std::invalid_argument("stabilizer encoder requires squeeze factor > 1");
    double ln1 = std::pow(lam, 1 - level);   // lambda^{1-n}
    double ln = std::pow(lam, level - 1);    // lambda^{n-1}
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 0) = ln1;
    m(1, 1) = ln;  m(1, 3) = -lam;
    m(2, 0) = lam; m(2, 2) = ln;
    m(3, 3) = ln1;
    return SymplecticMap(m);
}

SymplecticMap beamsplitter_array(const Eigen::MatrixXd& orthogonal) {
    int n = static_cast<int>(orthogonal.rows());
    if (orthogonal.cols() != n) throw std::invalid_argument("beamsplitter array must be square");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m(2 * i, 2 * j) = orthogonal(i, j);
            m(2 * i + 1, 2 * j + 1) = orthogonal(i, j);
        }
    return SymplecticMap(m);
}

QuadVec conjugate_noise(const SymplecticMap& s, const QuadVec& eps) {
    if (eps.size() != s.matrix().rows())
        throw std::invalid_argument("noise vector dimension does not match map");
    return s.inverse().matrix() * eps;
}

GaussianChannel GaussianChannel::loss(double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("loss transmissivity must lie in (0, 1]");
    return {Kind::loss, eta};
}

GaussianChannel GaussianChannel::amp(double gain) {
    if (gain < 1.0) throw std::invalid_argument("amplifier gain must be >= 1");
    return {Kind::amp, gain};
}

GaussianChannel GaussianChannel::awgn(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("additive noise rms must be >= 0");
    return {Kind::awgn, sigma};
}

double GaussianChannel::amplitude_scale() const {
    switch (kind) {
        case Kind::loss: return std::sqrt(param);
        case Kind::amp: return std::sqrt(param);
        case Kind::awgn: return 1.0;
    }
    return 1.0;
}

double GaussianChannel::added_variance() const {
    switch (kind) {
        case Kind::loss: return (1.0 - param) * kVacuumVariance;
        case Kind::amp: return (param - 1.0) * kVacuumVariance;
        case Kind::awgn: return param * param;
    }
    return 0.0;
}

Eigen::MatrixXd apply_channel_cov(const Eigen::MatrixXd& cov, const GaussianChannel& ch,
                                  int mode) {
    int dim = static_cast<int>(cov.rows());
    if (cov.cols() != dim || dim % 2 != 0)
        throw std::invalid_argument("covariance must be square with even dimension");
    if (mode < 0 || 2 * mode + 1 >= dim) throw std::invalid_argument("channel mode out of range");
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(dim);
    scale(2 * mode) = scale(2 * mode + 1) = ch.amplitude_scale();
    Eigen::MatrixXd out = scale.asDiagonal() * cov * scale.asDiagonal();
    out(2 * mode, 2 * mode) += ch.added_variance();
    out(2 * mode + 1, 2 * mode + 1) += ch.added_variance();
    return out;
}

void apply_channel_sample(const GaussianChannel& ch, double& q, double& p, RngStream& rng) {
    double a = ch.amplitude_scale();
    double s = std::sqrt(ch.added_variance());
    q = a * q + rng.gaussian(s);
    p = a * p + rng.gaussian(s);
}

QuadVec sample_awgn(double sigma, int n_modes, RngStream& rng) {
    if (sigma < 0.0) throw std::invalid_argument("awgn rms must be >= 0");
    QuadVec v(2 * n_modes);
    for (int i = 0; i < 2 * n_modes; ++i) v(i) = rng.gaussian(sigma);
    return v;
}

double loss_equivalent_awgn_sigma(double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("loss transmissivity must lie in (0, 1]");
    return std::sqrt(1.0 - eta);
}

bool satisfies_uncertainty(const Eigen::MatrixXd& cov, double tol) {
    int n = static_cast<int>(cov.rows()) / 2;
    Eigen::MatrixXcd h = cov.cast<std::complex<double>>();
    h += std::complex<double>(0.0, 0.5) * symplectic_form(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace cvsense
