#pragma once

// Dense complex linear algebra kernel shared by every other module.
// Decompositions are delegated to Eigen; everything here is a pure function
// of its arguments and all randomness flows through explicit seeds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "realpos/errors.hpp"

namespace realpos {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

struct Tolerances {
    double eq_tol = 1e-9;    // equality residuals
    double psd_tol = 1e-9;   // eigenvalue nonnegativity
    double conv_tol = 1e-10; // series / iteration convergence

    void validate() const {
        if (!(eq_tol >= 0) || !(psd_tol >= 0) || !(conv_tol >= 0)) {
            throw InputError("tolerances must be nonnegative");
        }
    }
};

// ---------------------------------------------------------------------------
// validation

inline bool all_finite(const CMatrix& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (!std::isfinite(x(i, j).real()) || !std::isfinite(x(i, j).imag())) return false;
        }
    }
    return true;
}

inline void require_square(const CMatrix& x, const char* what = "matrix") {
    if (x.rows() == 0 || x.rows() != x.cols()) {
        std::ostringstream os;
        os << what << " must be a nonempty square matrix, got " << x.rows() << "x" << x.cols();
        throw InputError(os.str());
    }
    if (!all_finite(x)) throw InputError(std::string(what) + " has non-finite entries");
}

inline void require_same_dim(const CMatrix& a, const CMatrix& b) {
    require_square(a);
    require_square(b);
    if (a.rows() != b.rows()) {
        std::ostringstream os;
        os << "dimension mismatch: " << a.rows() << " vs " << b.rows();
        throw InputError(os.str());
    }
}

// ---------------------------------------------------------------------------
// norms and parts

/// Largest singular value.
inline double operator_norm(const CMatrix& x) {
    require_square(x);
    Eigen::JacobiSVD<CMatrix> svd(x);
    return svd.singularValues()(0);
}

/// Operator norm without the square check (rectangular blocks, internal use).
inline double spectral_norm(const CMatrix& x) {
    if (x.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(x);
    return svd.singularValues()(0);
}

inline CMatrix herm_part(const CMatrix& x) {
    require_square(x);
    return (x + x.adjoint()) * 0.5;
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

/// Eigenvalues of a Hermitian matrix, ascending. Only the Hermitian part of
/// the argument is read.
inline RVector herm_eigenvalues(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
    return es.eigenvalues();
}

inline double herm_min_eig(const CMatrix& h) { return herm_eigenvalues(h)(0); }

/// Top eigenpair of a Hermitian matrix.
struct TopEigen {
    double value;
    CVector vector;
};

inline TopEigen herm_top_eigen(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
    const auto last = h.rows() - 1;
    return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

inline bool is_hermitian(const CMatrix& x, double tol) {
    return (x - x.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// exponential, inverse, conditioning

/// Matrix exponential (Padé scaling and squaring). Throws NumericError when
/// the norm is large enough for the result to overflow.
inline CMatrix matrix_exp(const CMatrix& x) {
    require_square(x);
    const double nrm = operator_norm(x);
    if (nrm > 700.0) {
        std::ostringstream os;
        os << "matrix_exp: norm " << nrm << " too large, result would overflow";
        throw NumericError(os.str());
    }
    CMatrix e = x.exp();
    if (!all_finite(e)) {
        std::ostringstream os;
        os << "matrix_exp: overflow (norm " << nrm << ")";
        throw NumericError(os.str());
    }
    return e;
}

inline double condition_number(const CMatrix& x) {
    Eigen::JacobiSVD<CMatrix> svd(x);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

/// Inverse with a conditioning guard.
inline CMatrix inverse(const CMatrix& x, double max_cond = 1e14) {
    require_square(x);
    const double c = condition_number(x);
    if (!(c <= max_cond)) {
        std::ostringstream os;
        os << "matrix is singular to working precision (condition number " << c << ")";
        throw NumericError(os.str());
    }
    return x.partialPivLu().inverse();
}

// ---------------------------------------------------------------------------
// spectra

/// Schur form x = Q T Q* together with the eigenvalues (diagonal of T).
struct SpectrumResult {
    CVector eigenvalues;
    CMatrix q;  // unitary
    CMatrix t;  // upper triangular
};

inline SpectrumResult spectrum(const CMatrix& x) {
    require_square(x);
    Eigen::ComplexSchur<CMatrix> schur(x);
    if (schur.info() != Eigen::Success) throw NumericError("Schur decomposition failed");
    SpectrumResult r;
    r.q = schur.matrixU();
    r.t = schur.matrixT();
    r.eigenvalues = r.t.diagonal();
    return r;
}

/// Orthonormal splitting of C^n into ker(x) and its complement.
/// Columns [0, kernel_dim) of `basis` span the numerical kernel of x.
struct KernelSplit {
    CMatrix basis;  // unitary
    Eigen::Index kernel_dim = 0;
    double smallest_kept = 0.0;  // smallest singular value treated as nonzero
};

/// Singular values at or below rel_tol * max(1, ||x||) are treated as zero.
inline KernelSplit kernel_split(const CMatrix& x, double rel_tol = 1e-10) {
    const auto n = x.rows();
    Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double thresh = rel_tol * std::max(1.0, s(0));
    Eigen::Index kept = 0;
    while (kept < n && s(kept) > thresh) ++kept;
    KernelSplit ks;
    ks.kernel_dim = n - kept;
    ks.smallest_kept = kept > 0 ? s(kept - 1) : 0.0;
    // V columns are ordered by decreasing singular value; put the kernel first.
    ks.basis.resize(n, n);
    const CMatrix& v = svd.matrixV();
    ks.basis.leftCols(n - kept) = v.rightCols(n - kept);
    ks.basis.rightCols(kept) = v.leftCols(kept);
    return ks;
}

// ---------------------------------------------------------------------------
// seeded generators

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = cplx(re, im);
        }
    }
    return m;
}

inline CMatrix random_hermitian(Eigen::Index n, Rng& rng) {
    CMatrix g = gaussian_matrix(n, n, rng);
    return (g + g.adjoint()) * (0.5 / std::sqrt(static_cast<double>(n)));
}

inline CMatrix random_unitary(Eigen::Index n, Rng& rng) {
    CMatrix g = gaussian_matrix(n, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx d = r(i, i);
        const double a = std::abs(d);
        if (a > 0) q.col(i) *= d / a;
    }
    return q;
}

/// Positive square root of a Hermitian positive semidefinite matrix.
inline CMatrix psd_sqrt(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Unconstrained complex Gaussian matrix with entries of variance 1/n.
inline CMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
    if (n <= 0) throw InputError("dimension must be positive");
    Rng rng = make_rng(seed);
    return gaussian_matrix(n, n, rng) / std::sqrt(2.0 * static_cast<double>(n));
}

/// H + iK with H positive semidefinite and -tan(cap) H <= K <= tan(cap) H,
/// so the numerical range lies in the sector of half-angle angle_cap.
inline CMatrix random_accretive(Eigen::Index n, std::uint64_t seed, double angle_cap = pi / 2) {
    if (n <= 0) throw InputError("dimension must be positive");
    if (!(angle_cap > 0.0) || angle_cap > pi / 2) {
        throw InputError("angle_cap must lie in (0, pi/2]");
    }
    Rng rng = make_rng(seed);
    CMatrix b = gaussian_matrix(n, n, rng);
    CMatrix h = b * b.adjoint() / (2.0 * static_cast<double>(n));
    h = (h + h.adjoint()) * 0.5;
    CMatrix k;
    if (angle_cap >= pi / 2) {
        k = random_hermitian(n, rng);
    } else {
        CMatrix c = random_hermitian(n, rng);
        const double cn = spectral_norm(c);
        if (cn > 0) c *= uniform(rng) / cn;
        CMatrix r = psd_sqrt(h);
        k = std::tan(angle_cap) * (r * c * r);
        k = (k + k.adjoint()) * 0.5;
    }
    return h + cplx(0.0, 1.0) * k;
}

/// Accretive matrix with a kernel of the given dimension: U (0 + x') U*.
inline CMatrix random_accretive_singular(Eigen::Index n, Eigen::Index kernel_dim, std::uint64_t seed) {
    if (kernel_dim < 0 || kernel_dim > n) throw InputError("kernel dimension out of range");
    Rng rng = make_rng(seed);
    const auto m = n - kernel_dim;
    CMatrix core = CMatrix::Zero(n, n);
    if (m > 0) core.bottomRightCorner(m, m) = random_accretive(m, rng());
    CMatrix u = random_unitary(n, rng);
    return u * core * u.adjoint();
}

/// Random matrix rescaled to the given operator norm.
inline CMatrix random_contraction(Eigen::Index n, std::uint64_t seed, double norm = 1.0) {
    CMatrix x = random_matrix(n, seed);
    const double nx = operator_norm(x);
    return nx > 0 ? CMatrix(x * (norm / nx)) : x;
}

/// S P S^{-1} for a random Hermitian projection P and a random similarity S
/// with condition number at most max_cond.
inline CMatrix random_idempotent(Eigen::Index n, std::uint64_t seed, double max_cond = 1e3) {
    if (n <= 0) throw InputError("dimension must be positive");
    if (!(max_cond >= 1.0)) throw InputError("max_cond must be >= 1");
    Rng rng = make_rng(seed);
    const auto rank = static_cast<Eigen::Index>(std::uniform_int_distribution<int>(0, static_cast<int>(n))(rng));
    CMatrix p = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < rank; ++i) p(i, i) = 1.0;
    CMatrix u = random_unitary(n, rng);
    CMatrix v = random_unitary(n, rng);
    const double log_cond = uniform(rng, 0.0, std::log(max_cond));
    RVector s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s(i) = n == 1 ? 1.0 : std::exp(log_cond * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    CMatrix sim = u * s.cast<cplx>().asDiagonal() * v.adjoint();
    CMatrix sim_inv = v * s.cwiseInverse().cast<cplx>().asDiagonal() * u.adjoint();
    return sim * p * sim_inv;
}

// ---------------------------------------------------------------------------
// misc

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Principal branch z^r (arg in (-pi, pi]); 0^r = 0 for r > 0.
inline cplx principal_pow(cplx z, double r) {
    if (z == cplx(0.0, 0.0)) return r > 0 ? cplx(0.0, 0.0) : cplx(1.0, 0.0);
    return std::polar(std::pow(std::abs(z), r), r * std::arg(z));
}

/// Matrix units E_ij of size n.
inline CMatrix matrix_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
    CMatrix e = CMatrix::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

}  // namespace realpos
