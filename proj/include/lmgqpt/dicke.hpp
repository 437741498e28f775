#pragma once

/**
 * @file dicke.hpp
 * @brief Collective-spin algebra in the maximal Dicke sector |S, m>, S = N/2.
 *
 * Basis vectors are ordered by ascending m (index 0 is m = -S). Spin quantum
 * numbers are carried as the integers 2S and 2m so half-integer spins are exact.
 */

#include <lmgqpt/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace lmgqpt {

using cplx = std::complex<double>;
using StateVector = Eigen::VectorXcd;

class DickeSpace {
public:
    explicit DickeSpace(int n_qubits) : n_qubits_(n_qubits) {
        detail::require(n_qubits >= 1, "DickeSpace: n_qubits must be >= 1");
    }

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    /// 2S, which equals N.
    [[nodiscard]] int two_spin() const noexcept { return n_qubits_; }
    [[nodiscard]] double total_spin() const noexcept { return 0.5 * n_qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept {
        return static_cast<std::size_t>(n_qubits_) + 1;
    }
    /// 2m for basis index i.
    [[nodiscard]] int two_m(std::size_t index) const noexcept {
        return 2 * static_cast<int>(index) - n_qubits_;
    }
    [[nodiscard]] double m(std::size_t index) const noexcept { return 0.5 * two_m(index); }

    /// <m+1|S_+|m> for the basis state at `index` (zero at m = +S).
    [[nodiscard]] double raising_element(std::size_t index) const noexcept {
        const long long s2 = n_qubits_;
        const long long m2 = two_m(index);
        // S(S+1) - m(m+1) = [2S(2S+2) - 2m(2m+2)] / 4, exact in integers
        const long long num = s2 * (s2 + 2) - m2 * (m2 + 2);
        return num > 0 ? 0.5 * std::sqrt(static_cast<double>(num)) : 0.0;
    }

    /// S(S+1) - m^2 at `index`, exact.
    [[nodiscard]] double casimir_minus_m2(std::size_t index) const noexcept {
        const long long s2 = n_qubits_;
        const long long m2 = two_m(index);
        return static_cast<double>(s2 * (s2 + 2) - m2 * m2) / 4.0;
    }

    friend bool operator==(const DickeSpace&, const DickeSpace&) = default;

private:
    int n_qubits_;
};

/**
 * Hermitian operator stored by its main diagonal and upper off-diagonals.
 *
 * Band k holds the elements (i, i+k) for i in [0, dim-k). Lower bands are the
 * complex conjugates. The imaginary part is allocated only when an operator
 * actually needs it (S_y); the main band is always real.
 */
class BandedHermitianOperator {
public:
    BandedHermitianOperator(std::size_t dimension, std::size_t bandwidth)
        : dimension_(dimension), real_(bandwidth + 1) {
        detail::require(dimension >= 1, "BandedHermitianOperator: dimension must be >= 1");
        for (std::size_t k = 0; k <= bandwidth; ++k)
            real_[k].assign(k < dimension ? dimension - k : 0, 0.0);
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t bandwidth() const noexcept { return real_.size() - 1; }
    [[nodiscard]] bool has_imaginary() const noexcept { return !imag_.empty(); }

    [[nodiscard]] std::span<const double> real_band(std::size_t k) const { return real_.at(k); }
    [[nodiscard]] std::span<double> real_band(std::size_t k) { return real_.at(k); }

    /// Imaginary part of band k; empty for purely real operators.
    [[nodiscard]] std::span<const double> imag_band(std::size_t k) const {
        if (imag_.empty()) return {};
        return imag_.at(k);
    }

    /// Mutable imaginary band k (k >= 1), allocating the imaginary part on first use.
    [[nodiscard]] std::span<double> imag_band_mut(std::size_t k) {
        detail::require(k >= 1, "BandedHermitianOperator: the main band must stay real");
        ensure_imaginary();
        return imag_.at(k);
    }

    /// Element (i, i+k) of the upper triangle.
    [[nodiscard]] cplx upper(std::size_t i, std::size_t k) const {
        const double im = imag_.empty() ? 0.0 : imag_[k][i];
        return {real_[k][i], im};
    }

    /// Element (row, col) of the full matrix; zero outside the band.
    [[nodiscard]] cplx at(std::size_t row, std::size_t col) const {
        if (row <= col) {
            const std::size_t k = col - row;
            return k <= bandwidth() ? upper(row, k) : cplx{};
        }
        const std::size_t k = row - col;
        return k <= bandwidth() ? std::conj(upper(col, k)) : cplx{};
    }

    BandedHermitianOperator& add_scaled(const BandedHermitianOperator& other, double factor) {
        detail::require(other.dimension_ == dimension_,
                        "BandedHermitianOperator: dimension mismatch in add_scaled");
        if (other.bandwidth() > bandwidth()) {
            const std::size_t old = real_.size();
            real_.resize(other.bandwidth() + 1);
            for (std::size_t k = old; k < real_.size(); ++k)
                real_[k].assign(k < dimension_ ? dimension_ - k : 0, 0.0);
            if (!imag_.empty()) {
                imag_.resize(real_.size());
                for (std::size_t k = old; k < imag_.size(); ++k) imag_[k].assign(real_[k].size(), 0.0);
            }
        }
        if (other.has_imaginary()) ensure_imaginary();
        for (std::size_t k = 0; k <= other.bandwidth(); ++k) {
            for (std::size_t i = 0; i < other.real_[k].size(); ++i) {
                real_[k][i] += factor * other.real_[k][i];
                if (other.has_imaginary()) imag_[k][i] += factor * other.imag_[k][i];
            }
        }
        return *this;
    }

    BandedHermitianOperator& scale(double factor) {
        for (auto& band : real_)
            for (double& v : band) v *= factor;
        for (auto& band : imag_)
            for (double& v : band) v *= factor;
        return *this;
    }

    /// Adds `value` times the identity.
    BandedHermitianOperator& shift(double value) {
        for (double& v : real_[0]) v += value;
        return *this;
    }

    /// out = A * in. Works for real or complex Eigen vectors (real input requires a real operator).
    template <typename Scalar>
    void apply(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& in,
               Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> out) const {
        detail::require(static_cast<std::size_t>(in.size()) == dimension_ &&
                            static_cast<std::size_t>(out.size()) == dimension_,
                        "BandedHermitianOperator::apply: dimension mismatch");
        constexpr bool is_complex = !std::is_same_v<Scalar, double>;
        if constexpr (!is_complex) {
            detail::require(imag_.empty(),
                            "BandedHermitianOperator::apply: complex operator on a real vector");
        }
        const auto& diag = real_[0];
        for (std::size_t i = 0; i < dimension_; ++i) out[i] = diag[i] * in[i];
        for (std::size_t k = 1; k < real_.size(); ++k) {
            const auto& re = real_[k];
            if constexpr (is_complex) {
                if (!imag_.empty()) {
                    const auto& im = imag_[k];
                    for (std::size_t i = 0; i < re.size(); ++i) {
                        const cplx a{re[i], im[i]};
                        out[i] += a * in[i + k];
                        out[i + k] += std::conj(a) * in[i];
                    }
                    continue;
                }
            }
            for (std::size_t i = 0; i < re.size(); ++i) {
                out[i] += re[i] * in[i + k];
                out[i + k] += re[i] * in[i];
            }
        }
    }

    [[nodiscard]] StateVector operator*(const StateVector& v) const {
        StateVector out(v.size());
        apply<cplx>(v, out);
        return out;
    }

    [[nodiscard]] Eigen::VectorXd operator*(const Eigen::VectorXd& v) const {
        Eigen::VectorXd out(v.size());
        apply<double>(v, out);
        return out;
    }

    [[nodiscard]] Eigen::MatrixXcd dense() const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dimension_),
                                                    static_cast<Eigen::Index>(dimension_));
        for (std::size_t k = 0; k < real_.size(); ++k) {
            for (std::size_t i = 0; i < real_[k].size(); ++i) {
                const cplx a = upper(i, k);
                m(i, i + k) = a;
                m(i + k, i) = std::conj(a);
            }
        }
        return m;
    }

    /// Max absolute row sum; an upper bound on the spectral norm.
    [[nodiscard]] double norm_bound() const {
        std::vector<double> rows(dimension_, 0.0);
        for (std::size_t k = 0; k < real_.size(); ++k) {
            for (std::size_t i = 0; i < real_[k].size(); ++i) {
                const double a = std::abs(upper(i, k));
                rows[i] += a;
                if (k > 0) rows[i + k] += a;
            }
        }
        double best = 0.0;
        for (double r : rows) best = std::max(best, r);
        return best;
    }

private:
    void ensure_imaginary() {
        if (!imag_.empty()) return;
        imag_.resize(real_.size());
        for (std::size_t k = 0; k < real_.size(); ++k) imag_[k].assign(real_[k].size(), 0.0);
    }

    std::size_t dimension_;
    std::vector<std::vector<double>> real_;
    std::vector<std::vector<double>> imag_;
};

enum class CollectiveOp { Sz, Sx, Sy, Sx2, Sy2 };

/// Parses "Sz", "Sx", "Sy", "Sx2", "Sy2".
inline CollectiveOp parse_collective_op(std::string_view tag) {
    if (tag == "Sz") return CollectiveOp::Sz;
    if (tag == "Sx") return CollectiveOp::Sx;
    if (tag == "Sy") return CollectiveOp::Sy;
    if (tag == "Sx2") return CollectiveOp::Sx2;
    if (tag == "Sy2") return CollectiveOp::Sy2;
    throw std::invalid_argument("unknown collective operator tag '" + std::string(tag) + "'");
}

/**
 * Matrix of S_z, S_x, S_y, S_x^2 or S_y^2 in the Dicke basis.
 *
 * The squares come from closed-form matrix elements, so they are exactly
 * pentadiagonal: diagonal [S(S+1) - m^2]/2 and second band +-a_m a_{m+1}/4,
 * with a_m = <m+1|S_+|m>.
 */
inline BandedHermitianOperator build_collective_operator(const DickeSpace& space, CollectiveOp which) {
    const std::size_t dim = space.dimension();
    switch (which) {
        case CollectiveOp::Sz: {
            BandedHermitianOperator op(dim, 0);
            auto d = op.real_band(0);
            for (std::size_t i = 0; i < dim; ++i) d[i] = space.m(i);
            return op;
        }
        case CollectiveOp::Sx:
        case CollectiveOp::Sy: {
            BandedHermitianOperator op(dim, 1);
            if (dim < 2) return op;
            if (which == CollectiveOp::Sx) {
                auto b = op.real_band(1);
                for (std::size_t i = 0; i + 1 < dim; ++i) b[i] = 0.5 * space.raising_element(i);
            } else {
                // <m|S_y|m+1> = <m|S_-|m+1> * (-1/2i) = +i a_m / 2
                auto b = op.imag_band_mut(1);
                for (std::size_t i = 0; i + 1 < dim; ++i) b[i] = 0.5 * space.raising_element(i);
            }
            return op;
        }
        case CollectiveOp::Sx2:
        case CollectiveOp::Sy2: {
            BandedHermitianOperator op(dim, 2);
            auto d = op.real_band(0);
            for (std::size_t i = 0; i < dim; ++i) d[i] = 0.5 * space.casimir_minus_m2(i);
            const double sign = which == CollectiveOp::Sx2 ? 1.0 : -1.0;
            if (dim >= 3) {
                auto b = op.real_band(2);
                for (std::size_t i = 0; i + 2 < dim; ++i)
                    b[i] = sign * 0.25 * space.raising_element(i) * space.raising_element(i + 1);
            }
            return op;
        }
    }
    throw std::invalid_argument("unknown collective operator");
}

inline BandedHermitianOperator build_collective_operator(const DickeSpace& space, std::string_view tag) {
    return build_collective_operator(space, parse_collective_op(tag));
}

/// <state|op|state>. The state must be normalized to 1e-8.
inline double expectation(const BandedHermitianOperator& op, const StateVector& state) {
    detail::require(static_cast<std::size_t>(state.size()) == op.dimension(),
                    "expectation: state dimension " + std::to_string(state.size()) +
                        " does not match operator dimension " + std::to_string(op.dimension()));
    const double norm2 = state.squaredNorm();
    detail::require(std::abs(norm2 - 1.0) <= 1e-8, "expectation: state is not normalized");
    const cplx value = state.dot(op * state);
    if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real())))
        throw NumericError("expectation: imaginary part " + std::to_string(value.imag()) +
                           " on a Hermitian operator");
    return value.real();
}

struct SpinCoherentState {
    double theta = 0.0;
    double phi = 0.0;
    StateVector amplitudes;
};

/**
 * <S,m|theta,phi> = sqrt(C(2S, S+m)) cos^{S+m}(theta/2) sin^{S-m}(theta/2) e^{-i(S-m)phi}.
 *
 * Magnitudes are assembled as exp of a log-space sum so large N cannot overflow.
 */
inline SpinCoherentState coherent_amplitudes(const DickeSpace& space, double theta, double phi) {
    detail::require(theta >= 0.0 && theta <= std::numbers::pi,
                    "coherent_amplitudes: theta must lie in [0, pi]");
    const std::size_t dim = space.dimension();
    const int two_s = space.two_spin();
    const double log_c = std::log(std::cos(0.5 * theta));
    const double log_s = std::log(std::sin(0.5 * theta));
    const double lg_total = std::lgamma(two_s + 1.0);

    SpinCoherentState out;
    out.theta = theta;
    out.phi = std::fmod(phi, 2.0 * std::numbers::pi);
    if (out.phi < 0.0) out.phi += 2.0 * std::numbers::pi;
    out.amplitudes.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const int up = static_cast<int>(i);   // S + m
        const int down = two_s - up;          // S - m
        double log_mag = 0.5 * (lg_total - std::lgamma(up + 1.0) - std::lgamma(down + 1.0));
        // 0 * log(0) is the empty power, i.e. a factor of one
        if (up > 0) log_mag += up * log_c;
        if (down > 0) log_mag += down * log_s;
        const double mag = std::exp(log_mag);
        out.amplitudes[static_cast<Eigen::Index>(i)] = std::polar(mag, -down * phi);
    }
    // lgamma roundoff grows with N
    out.amplitudes.normalize();
    return out;
}

}  // namespace lmgqpt
