#pragma once

// Membership in the cones F = {x : ||e - x|| <= 1} and r = {x : Re W(x) >= 0}
// relative to an explicit unital ambient, plus the order structure x <= y iff
// y - x is accretive.

#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "realpos/linalg.hpp"
#include "realpos/numrange.hpp"
#include "realpos/report.hpp"

namespace realpos {

/// The unital algebra in which norms, numerical ranges and cones are taken:
/// either all n x n matrices, or the corner e M_n e of a Hermitian projection e.
class AmbientContext {
public:
    enum class Mode { full, corner };

    static AmbientContext full(Eigen::Index n) {
        if (n <= 0) throw InputError("ambient dimension must be positive");
        AmbientContext c;
        c.mode_ = Mode::full;
        c.unit_ = identity(n);
        c.frame_ = identity(n);
        return c;
    }

    /// Corner ambient with unit e; e must be a Hermitian projection.
    static AmbientContext corner(const CMatrix& e, double tol = 1e-9) {
        require_square(e, "corner unit");
        const double idem = (e * e - e).cwiseAbs().maxCoeff();
        if (idem > tol) {
            std::ostringstream os;
            os << "corner unit is not idempotent (||e^2 - e||_max = " << idem << ")";
            throw InputError(os.str());
        }
        if (!is_hermitian(e, tol)) throw InputError("corner unit must be a Hermitian projection");
        AmbientContext c;
        c.mode_ = Mode::corner;
        c.unit_ = (e + e.adjoint()) * 0.5;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(c.unit_);
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < e.rows(); ++i) k += es.eigenvalues()(i) > 0.5 ? 1 : 0;
        c.frame_ = es.eigenvectors().rightCols(k);
        return c;
    }

    [[nodiscard]] Mode mode() const { return mode_; }
    [[nodiscard]] Eigen::Index n() const { return unit_.rows(); }
    [[nodiscard]] Eigen::Index corner_dim() const { return frame_.cols(); }
    [[nodiscard]] const CMatrix& unit() const { return unit_; }

    /// Residual max(||e x - x||, ||x e - x||); zero in full mode.
    [[nodiscard]] double corner_residual(const CMatrix& x) const {
        if (mode_ == Mode::full) return 0.0;
        return std::max((unit_ * x - x).cwiseAbs().maxCoeff(), (x * unit_ - x).cwiseAbs().maxCoeff());
    }

    /// Restriction of x to the range of e (k x k); validates the corner condition.
    [[nodiscard]] CMatrix compress(const CMatrix& x, double tol = 1e-9) const {
        require_square(x);
        if (x.rows() != n()) {
            std::ostringstream os;
            os << "element has dimension " << x.rows() << " but the ambient has dimension " << n();
            throw InputError(os.str());
        }
        if (mode_ == Mode::full) return x;
        const double res = corner_residual(x);
        if (res > tol * std::max(1.0, x.cwiseAbs().maxCoeff())) {
            std::ostringstream os;
            os << "element does not lie in the corner eMe (residual " << res << ")";
            throw InputError(os.str());
        }
        return frame_.adjoint() * x * frame_;
    }

    /// Inverse of compress: embeds a k x k matrix back into the n x n ambient.
    [[nodiscard]] CMatrix expand(const CMatrix& y) const {
        if (mode_ == Mode::full) return y;
        return frame_ * y * frame_.adjoint();
    }

private:
    AmbientContext() = default;

    Mode mode_ = Mode::full;
    CMatrix unit_;
    CMatrix frame_;  // orthonormal basis of range(e), n x k
};

struct ConeMembership {
    bool in_F = false;
    bool in_r = false;
    double F_residual = 0.0;  // ||e - x|| - 1
    double r_residual = 0.0;  // -abscissa(x)
    double F_tolerance = 0.0;
    double r_tolerance = 0.0;
    bool F_boundary = false;  // |F_residual| < tolerance
    bool r_boundary = false;
};

inline ConeMembership membership(const CMatrix& x, const AmbientContext& ctx, const Tolerances& tol = {}) {
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    const auto k = xc.rows();
    ConeMembership m;
    m.F_residual = spectral_norm(identity(k) - xc) - 1.0;
    m.r_residual = -abscissa(xc);
    m.F_tolerance = tol.eq_tol;
    m.r_tolerance = tol.psd_tol;
    m.in_F = m.F_residual <= tol.eq_tol;
    m.in_r = m.r_residual <= tol.psd_tol;
    m.F_boundary = std::abs(m.F_residual) < tol.eq_tol;
    m.r_boundary = std::abs(m.r_residual) < tol.psd_tol;
    return m;
}

inline ConeMembership in_F(const CMatrix& x, const AmbientContext& ctx, const Tolerances& tol = {}) {
    return membership(x, ctx, tol);
}

inline ConeMembership in_r(const CMatrix& x, const AmbientContext& ctx, const Tolerances& tol = {}) {
    return membership(x, ctx, tol);
}

inline void require_accretive(const CMatrix& x, const AmbientContext& ctx, const Tolerances& tol,
                              const char* op) {
    const auto m = membership(x, ctx, tol);
    if (!m.in_r) {
        std::ostringstream os;
        os << op << ": argument is not accretive (not in cone r; abscissa " << -m.r_residual << ")";
        throw PreconditionError(os.str());
    }
}

inline std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        g[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
    }
    return g;
}

/// Evaluates the five equivalent characterisations of accretivity on a grid:
///   (1) W(x) in the closed right half-plane
///   (2) ||1 - tx|| <= 1 + t^2 ||x||^2
///   (3) ||exp(-tx)|| <= 1
///   (4) ||(t + x)^{-1}|| <= 1/t
///   (5) ||1 - tx|| <= ||1 - t^2 x^2||
/// The report passes iff the five verdicts agree.
inline VerificationReport chaccr_verify(const CMatrix& x, const AmbientContext& ctx,
                                        const std::vector<double>& t_grid, const Tolerances& tol = {}) {
    if (t_grid.empty()) throw InputError("chaccr_verify: t grid is empty");
    for (double t : t_grid) {
        if (!(t > 0)) throw InputError("chaccr_verify: grid points must be positive");
    }
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    const auto k = xc.rows();
    const CMatrix one = identity(k);
    const double nx = spectral_norm(xc);
    const CMatrix x2 = xc * xc;

    VerificationReport rep;
    rep.suite = "chaccr";
    rep.inputs_digest = digest(x);

    const double alpha = abscissa(xc);
    const bool c1 = alpha >= -tol.psd_tol;
    rep.values["abscissa"] = alpha;
    rep.values["norm"] = nx;

    // Worst normalised excess over the grid; <= 0 means the condition holds.
    double w2 = -1e300, w3 = -1e300, w4 = -1e300, w5 = -1e300;
    std::string note3, note4;
    for (double t : t_grid) {
        const double slack = tol.eq_tol * (1.0 + nx * nx * t * t);
        const double n1tx = spectral_norm(one - t * xc);
        w2 = std::max(w2, n1tx - (1.0 + t * t * nx * nx) - slack);
        w5 = std::max(w5, n1tx - spectral_norm(one - t * t * x2) - slack);
        try {
            w3 = std::max(w3, spectral_norm(matrix_exp(-t * xc)) - 1.0 - slack);
        } catch (const NumericError& e) {
            w3 = std::max(w3, 1e300);
            note3 = "overflow at t=" + std::to_string(t);
        }
        const CMatrix shifted = t * one + xc;
        const double cond = condition_number(shifted);
        if (!(cond < 1e15)) {
            w4 = std::max(w4, 1e300);
            note4 = "singular resolvent at t=" + std::to_string(t);
        } else {
            const CMatrix inv = shifted.partialPivLu().inverse();
            w4 = std::max(w4, t * spectral_norm(inv) - 1.0 - slack);
        }
    }
    const bool c2 = w2 <= 0, c3 = w3 <= 0, c4 = w4 <= 0, c5 = w5 <= 0;
    rep.info("(1) numerical range in right half-plane", c1, -alpha, tol.psd_tol);
    rep.info("(2) ||1-tx|| <= 1+t^2||x||^2", c2, w2, 0.0);
    rep.info("(3) ||exp(-tx)|| <= 1", c3, w3, 0.0, note3);
    rep.info("(4) ||(t+x)^-1|| <= 1/t", c4, w4, 0.0, note4);
    rep.info("(5) ||1-tx|| <= ||1-t^2x^2||", c5, w5, 0.0);
    const int yes = int(c1) + int(c2) + int(c3) + int(c4) + int(c5);
    rep.check_true("five conditions agree", yes == 0 || yes == 5);
    rep.values["accretive"] = c1 ? 1.0 : 0.0;
    return rep;
}

struct ScaleIntoF {
    double c = 0.0;
    CMatrix y;
    double certificate = 0.0;  // F residual of y
};

/// x + eps e lies in C F with C = eps + ||x||^2 / eps; returns y = (x + eps e)/C.
inline ScaleIntoF scale_into_F(const CMatrix& x, const AmbientContext& ctx, double eps, const Tolerances& tol = {}) {
    if (!(eps > 0)) throw InputError("scale_into_F: eps must be positive");
    require_accretive(x, ctx, tol, "scale_into_F");
    const double nx = spectral_norm(ctx.compress(x, tol.eq_tol));
    ScaleIntoF s;
    s.c = eps + nx * nx / eps;
    s.y = (x + eps * ctx.unit()) / s.c;
    s.certificate = membership(s.y, ctx, tol).F_residual;
    return s;
}

/// a_t = x (e + t x)^{-1}; t a_t lies in F and ||a_t - x|| <= t ||x||^2.
inline CMatrix approximate_from_F(const CMatrix& x, const AmbientContext& ctx, double t, const Tolerances& tol = {}) {
    if (!(t > 0)) throw InputError("approximate_from_F: t must be positive");
    require_accretive(x, ctx, tol, "approximate_from_F");
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    const CMatrix res = identity(xc.rows()) + t * xc;
    const CMatrix at = res.transpose().partialPivLu().solve(xc.transpose()).transpose();  // x (e + tx)^{-1}
    return ctx.expand(at);
}

/// b <= a iff a - b is accretive.
inline bool order_leq(const CMatrix& b, const CMatrix& a, double psd_tol = 1e-9) {
    require_same_dim(a, b);
    return abscissa(a - b) >= -psd_tol;
}

struct HalfFDecomposition {
    CMatrix x;
    CMatrix y;
    double reconstruction_error = 0.0;  // max |(x - y) - b| entrywise, in floating point
    double rounding_bound = 0.0;        // what two roundings of e +- b can contribute
    double x_F_residual = 0.0;          // ||e - 2x|| - 1
    double y_F_residual = 0.0;
};

/// b = x - y with x = (e + b)/2 and y = (e - b)/2 in F/2. Requires ||b|| < 1.
inline HalfFDecomposition decompose_halfF(const CMatrix& b, const AmbientContext& ctx, const Tolerances& tol = {}) {
    const CMatrix bc = ctx.compress(b, tol.eq_tol);
    const double nb = spectral_norm(bc);
    if (!(nb < 1.0)) {
        std::ostringstream os;
        os << "decompose_halfF: requires ||b|| < 1, got " << nb;
        throw PreconditionError(os.str());
    }
    const CMatrix& e = ctx.unit();
    HalfFDecomposition d;
    d.x = (e + b) * 0.5;
    d.y = (e - b) * 0.5;
    const CMatrix diff = d.x - d.y;
    d.reconstruction_error = (diff - b).cwiseAbs().maxCoeff();
    d.rounding_bound = std::numeric_limits<double>::epsilon() * (e.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff());
    d.x_F_residual = membership(2.0 * d.x, ctx, tol).F_residual;
    d.y_F_residual = membership(2.0 * d.y, ctx, tol).F_residual;
    return d;
}

/// Common upper bound in F/2 for two strict contractions: the unit e.
struct UpperBound {
    CMatrix a;
    double x_margin = 0.0;  // abscissa(a - x)
    double y_margin = 0.0;
    double F_residual = 0.0;  // ||e - 2a|| - 1
};

inline UpperBound upper_bound_pair(const CMatrix& x, const CMatrix& y, const AmbientContext& ctx,
                                   const Tolerances& tol = {}) {
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    const CMatrix yc = ctx.compress(y, tol.eq_tol);
    const double nx = spectral_norm(xc), ny = spectral_norm(yc);
    if (!(nx < 1.0) || !(ny < 1.0)) {
        std::ostringstream os;
        os << "upper_bound_pair: requires ||x||, ||y|| < 1, got " << nx << ", " << ny;
        throw PreconditionError(os.str());
    }
    UpperBound u;
    u.a = ctx.unit();
    const CMatrix one = identity(xc.rows());
    u.x_margin = abscissa(one - xc);
    u.y_margin = abscissa(one - yc);
    u.F_residual = spectral_norm(one - 2.0 * one) - 1.0;
    if (u.x_margin < -tol.psd_tol || u.y_margin < -tol.psd_tol) {
        throw NumericError("upper_bound_pair: order certificate failed");
    }
    return u;
}

}  // namespace realpos
