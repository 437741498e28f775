#pragma once

// Lowest eigenpairs of real symmetric banded matrices. LAPACK does the work;
// this header only packs the band storage and checks return codes.

#include <lmgqpt/dicke.hpp>
#include <lmgqpt/errors.hpp>

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace lmgqpt {

struct LowestEigenpairs {
    std::vector<double> values;  ///< ascending
    Eigen::MatrixXd vectors;     ///< one column per value
};

enum class EigenMethod {
    Banded,        ///< LAPACK dsbevx on the band storage
    Dense,         ///< Eigen self-adjoint solver on the densified matrix
    ParityBlocks,  ///< two tridiagonal blocks; valid only when odd bands vanish
};

namespace detail {

inline void require_real(const BandedHermitianOperator& op, const char* who) {
    if (op.has_imaginary()) {
        for (std::size_t k = 1; k <= op.bandwidth(); ++k)
            for (double v : op.imag_band(k))
                if (v != 0.0)
                    throw PreconditionError(std::string(who) + ": operator is not real symmetric");
    }
}

inline LowestEigenpairs lowest_banded(const BandedHermitianOperator& op, std::size_t count) {
    const auto n = static_cast<lapack_int>(op.dimension());
    const auto kd = static_cast<lapack_int>(std::min<std::size_t>(op.bandwidth(), op.dimension() - 1));
    const lapack_int ldab = kd + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
    // upper storage: A(i, j) -> ab[kd + i - j + j * ldab]
    for (lapack_int k = 0; k <= kd; ++k) {
        auto band = op.real_band(static_cast<std::size_t>(k));
        for (lapack_int i = 0; i + k < n; ++i) {
            const lapack_int j = i + k;
            ab[static_cast<std::size_t>(kd + i - j + j * ldab)] = band[static_cast<std::size_t>(i)];
        }
    }
    const auto want = static_cast<lapack_int>(std::min<std::size_t>(count, op.dimension()));
    std::vector<double> q(static_cast<std::size_t>(n) * n);
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) * want);
    std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
    lapack_int found = 0;
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info =
        LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, kd, ab.data(), ldab, q.data(), n, 0.0, 0.0, 1,
                       want, abstol, &found, w.data(), z.data(), n, ifail.data());
    if (info != 0 || found != want)
        throw NumericError("dsbevx failed (info=" + std::to_string(info) + ", dimension=" +
                           std::to_string(n) + ")");
    LowestEigenpairs out;
    out.values.assign(w.begin(), w.begin() + want);
    out.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), n, want);
    return out;
}

inline LowestEigenpairs lowest_tridiagonal(std::vector<double> diag, std::vector<double> off,
                                           std::size_t count) {
    const auto n = static_cast<lapack_int>(diag.size());
    const auto want = static_cast<lapack_int>(std::min<std::size_t>(count, diag.size()));
    std::vector<double> w(diag.size());
    std::vector<double> z(diag.size() * static_cast<std::size_t>(want));
    std::vector<lapack_int> ifail(diag.size());
    lapack_int found = 0;
    if (off.empty()) off.push_back(0.0);
    const lapack_int info =
        LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0, 1, want,
                       2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), n, ifail.data());
    if (info != 0 || found != want)
        throw NumericError("dstevx failed (info=" + std::to_string(info) + ", dimension=" +
                           std::to_string(n) + ")");
    LowestEigenpairs out;
    out.values.assign(w.begin(), w.begin() + want);
    out.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), n, want);
    return out;
}

inline LowestEigenpairs lowest_dense(const BandedHermitianOperator& op, std::size_t count) {
    const Eigen::MatrixXd dense = op.dense().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success)
        throw NumericError("dense eigensolver did not converge (dimension=" +
                           std::to_string(op.dimension()) + ")");
    const auto want = static_cast<Eigen::Index>(std::min<std::size_t>(count, op.dimension()));
    LowestEigenpairs out;
    for (Eigen::Index i = 0; i < want; ++i) out.values.push_back(solver.eigenvalues()[i]);
    out.vectors = solver.eigenvectors().leftCols(want);
    return out;
}

/// Splits a bandwidth-2 operator with zero first band into even/odd index blocks.
inline LowestEigenpairs lowest_parity_blocks(const BandedHermitianOperator& op, std::size_t count) {
    for (double v : op.real_band(1))
        if (v != 0.0) throw PreconditionError("parity-block solve needs a vanishing first band");
    if (op.bandwidth() > 2) throw PreconditionError("parity-block solve needs bandwidth <= 2");
    const std::size_t n = op.dimension();
    auto main = op.real_band(0);
    std::vector<double> second;
    if (op.bandwidth() == 2) second.assign(op.real_band(2).begin(), op.real_band(2).end());

    LowestEigenpairs merged;
    std::vector<std::pair<double, Eigen::VectorXd>> candidates;
    for (std::size_t parity = 0; parity < 2 && parity < n; ++parity) {
        std::vector<double> d;
        std::vector<double> e;
        for (std::size_t i = parity; i < n; i += 2) {
            d.push_back(main[i]);
            if (i + 2 < n) e.push_back(second.empty() ? 0.0 : second[i]);
        }
        const LowestEigenpairs block = lowest_tridiagonal(d, e, count);
        for (std::size_t c = 0; c < block.values.size(); ++c) {
            Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
            for (std::size_t b = 0; b < d.size(); ++b)
                full[static_cast<Eigen::Index>(parity + 2 * b)] = block.vectors(static_cast<Eigen::Index>(b),
                                                                               static_cast<Eigen::Index>(c));
            candidates.emplace_back(block.values[c], std::move(full));
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t want = std::min(count, candidates.size());
    merged.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(want));
    for (std::size_t c = 0; c < want; ++c) {
        merged.values.push_back(candidates[c].first);
        merged.vectors.col(static_cast<Eigen::Index>(c)) = candidates[c].second;
    }
    return merged;
}

}  // namespace detail

/// The `count` lowest eigenpairs of a real symmetric banded operator.
inline LowestEigenpairs lowest_eigenpairs(const BandedHermitianOperator& op, std::size_t count,
                                          EigenMethod method = EigenMethod::Banded) {
    detail::require(count >= 1, "lowest_eigenpairs: count must be >= 1");
    detail::require_real(op, "lowest_eigenpairs");
    switch (method) {
        case EigenMethod::Banded: return detail::lowest_banded(op, count);
        case EigenMethod::Dense: return detail::lowest_dense(op, count);
        case EigenMethod::ParityBlocks: return detail::lowest_parity_blocks(op, count);
    }
    throw PreconditionError("lowest_eigenpairs: unknown method");
}

}  // namespace lmgqpt
