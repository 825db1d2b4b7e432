#pragma once

// Explicit matrix subalgebras: spans, the generated algebra ba(x), support
// idempotents s(x), and the pseudo-invertibility / ideal / HSA suites.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "realpos/calculus.hpp"
#include "realpos/cones.hpp"
#include "realpos/linalg.hpp"
#include "realpos/report.hpp"

namespace realpos {

inline CVector vectorize(const CMatrix& a) { return Eigen::Map<const CVector>(a.data(), a.size()); }

inline CMatrix unvectorize(const CVector& v, Eigen::Index n) { return Eigen::Map<const CMatrix>(v.data(), n, n); }

/// Linear span of n x n matrices, kept as an orthonormal frame in C^{n^2}.
struct Span {
    Eigen::Index n = 0;
    CMatrix frame;  // n^2 x dim, orthonormal columns

    [[nodiscard]] Eigen::Index dim() const { return frame.cols(); }

    /// ||a - proj(a)||_F / ||a||_F (0 for a = 0).
    [[nodiscard]] double residual(const CMatrix& a) const {
        const CVector v = vectorize(a);
        const double nv = v.norm();
        if (nv == 0.0) return 0.0;
        if (dim() == 0) return 1.0;
        return (v - frame * (frame.adjoint() * v)).norm() / nv;
    }

    [[nodiscard]] CMatrix project(const CMatrix& a) const {
        if (dim() == 0) return CMatrix::Zero(n, n);
        return unvectorize(frame * (frame.adjoint() * vectorize(a)), n);
    }

    [[nodiscard]] std::vector<CMatrix> matrices() const {
        std::vector<CMatrix> out;
        for (Eigen::Index j = 0; j < dim(); ++j) out.push_back(unvectorize(frame.col(j), n));
        return out;
    }
};

/// Span of the given matrices; singular values below rel_tol * max are dropped.
inline Span span_of(const std::vector<CMatrix>& mats, Eigen::Index n, double rel_tol = 1e-8) {
    Span s;
    s.n = n;
    s.frame.resize(n * n, 0);
    if (mats.empty()) return s;
    CMatrix stacked(n * n, static_cast<Eigen::Index>(mats.size()));
    for (std::size_t j = 0; j < mats.size(); ++j) {
        if (mats[j].rows() != n || mats[j].cols() != n) throw InputError("span_of: dimension mismatch");
        stacked.col(static_cast<Eigen::Index>(j)) = vectorize(mats[j]);
    }
    Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (!sv.allFinite() || !svd.matrixU().allFinite()) throw NumericError("span_of: SVD produced non-finite values");
    if (sv.size() == 0 || sv(0) == 0.0) return s;
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > rel_tol * sv(0)) ++r;
    s.frame = svd.matrixU().leftCols(r);
    return s;
}

/// Largest relative residual of a frame vector of `inner` against `outer`.
inline double containment_residual(const Span& outer, const Span& inner) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < inner.dim(); ++j) {
        const CVector v = inner.frame.col(j);
        const CVector p = outer.dim() > 0 ? CVector(outer.frame * (outer.frame.adjoint() * v)) : CVector::Zero(v.size());
        worst = std::max(worst, (v - p).norm());
    }
    return worst;
}

inline bool span_contains(const Span& outer, const Span& inner, double tol = 1e-8) {
    return inner.dim() <= outer.dim() && containment_residual(outer, inner) <= tol;
}

inline bool span_equal(const Span& a, const Span& b, double tol = 1e-8) {
    return a.dim() == b.dim() && span_contains(a, b, tol) && span_contains(b, a, tol);
}

/// A linear subspace of the ambient matrices closed under multiplication,
/// given by a linearly independent basis.
class SubalgebraBasis {
public:
    /// Validates independence and multiplicative closure; finds the unit of A
    /// when none is supplied.
    static SubalgebraBasis make(const AmbientContext& ctx, std::vector<CMatrix> basis,
                                std::optional<CMatrix> unit = std::nullopt, const Tolerances& tol = {},
                                bool check_closure = true) {
        SubalgebraBasis a(ctx);
        const auto n = ctx.n();
        for (const auto& b : basis) {
            require_square(b, "basis element");
            if (b.rows() != n) throw InputError("basis element dimension does not match the ambient");
            if (!all_finite(b)) throw InputError("basis element has non-finite entries");
        }
        a.basis_ = std::move(basis);
        const auto d = static_cast<Eigen::Index>(a.basis_.size());
        a.stacked_.resize(n * n, d);
        for (Eigen::Index j = 0; j < d; ++j) a.stacked_.col(j) = vectorize(a.basis_[static_cast<std::size_t>(j)]);
        if (d > 0) {
            Eigen::JacobiSVD<CMatrix> svd(a.stacked_);
            const auto& sv = svd.singularValues();
            if (!(sv(d - 1) > 1e-10 * sv(0))) {
                std::ostringstream os;
                os << "basis is not linearly independent (singular value ratio " << sv(d - 1) / sv(0) << ")";
                throw InputError(os.str());
            }
        }
        if (d > 0) a.qr_ = Eigen::ColPivHouseholderQR<CMatrix>(a.stacked_);
        a.span_ = span_of(a.basis_, n, 1e-10);
        if (check_closure) {
            for (const auto& x : a.basis_) {
                for (const auto& y : a.basis_) {
                    const CMatrix p = x * y;
                    const double scale = std::max(1.0, x.norm() * y.norm());
                    a.closure_residual_ = std::max(a.closure_residual_, a.span_.residual(p) * p.norm() / scale);
                }
            }
            if (a.closure_residual_ > tol.eq_tol) {
                std::ostringstream os;
                os << "basis does not span an algebra (closure residual " << a.closure_residual_ << ")";
                throw InputError(os.str());
            }
        }
        if (unit) {
            const double r = a.unit_residual(*unit);
            if (r > tol.eq_tol || a.membership_residual(*unit) > tol.eq_tol) {
                std::ostringstream os;
                os << "supplied unit does not act as a unit of the algebra (residual " << r << ")";
                throw InputError(os.str());
            }
            a.unit_ = *unit;
        } else {
            a.unit_ = a.find_unit(tol.eq_tol);
        }
        return a;
    }

    static SubalgebraBasis full(Eigen::Index n) {
        std::vector<CMatrix> b;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) b.push_back(matrix_unit(n, i, j));
        }
        return make(AmbientContext::full(n), std::move(b), identity(n), {}, false);
    }

    static SubalgebraBasis diagonal(Eigen::Index n) {
        std::vector<CMatrix> b;
        for (Eigen::Index i = 0; i < n; ++i) b.push_back(matrix_unit(n, i, i));
        return make(AmbientContext::full(n), std::move(b), identity(n), {}, false);
    }

    static SubalgebraBasis upper_triangular(Eigen::Index n) {
        std::vector<CMatrix> b;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i; j < n; ++j) b.push_back(matrix_unit(n, i, j));
        }
        return make(AmbientContext::full(n), std::move(b), identity(n), {}, false);
    }

    /// M_{k1} (+) M_{k2} (+) ... along the diagonal.
    static SubalgebraBasis block_diagonal(const std::vector<Eigen::Index>& sizes) {
        Eigen::Index n = 0;
        for (auto k : sizes) {
            if (k <= 0) throw InputError("block sizes must be positive");
            n += k;
        }
        std::vector<CMatrix> b;
        Eigen::Index off = 0;
        for (auto k : sizes) {
            for (Eigen::Index i = 0; i < k; ++i) {
                for (Eigen::Index j = 0; j < k; ++j) b.push_back(matrix_unit(n, off + i, off + j));
            }
            off += k;
        }
        return make(AmbientContext::full(n), std::move(b), identity(n), {}, false);
    }

    [[nodiscard]] const AmbientContext& ambient() const { return ctx_; }
    [[nodiscard]] Eigen::Index n() const { return ctx_.n(); }
    [[nodiscard]] Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }
    [[nodiscard]] const std::vector<CMatrix>& basis() const { return basis_; }
    [[nodiscard]] const std::optional<CMatrix>& unit() const { return unit_; }
    [[nodiscard]] double closure_residual() const { return closure_residual_; }
    [[nodiscard]] const Span& span() const { return span_; }

    /// The unit of A if present, otherwise the ambient unit.
    [[nodiscard]] CMatrix unit_or_ambient() const { return unit_ ? *unit_ : ctx_.unit(); }

    /// Least-squares coordinates of a in the basis.
    [[nodiscard]] CVector coords(const CMatrix& a) const {
        if (dim() == 0) return CVector(0);
        return qr_.solve(vectorize(a));
    }

    [[nodiscard]] CMatrix from_coords(const CVector& c) const {
        if (c.size() != dim()) throw InputError("coordinate vector has the wrong length");
        if (dim() == 0) return CMatrix::Zero(n(), n());
        return unvectorize(stacked_ * c, n());
    }

    /// Relative distance from a to span(A).
    [[nodiscard]] double membership_residual(const CMatrix& a) const { return span_.residual(a); }

    [[nodiscard]] bool contains(const CMatrix& a, double tol = 1e-8) const { return membership_residual(a) <= tol; }

    [[nodiscard]] double unit_residual(const CMatrix& e) const {
        double r = 0.0;
        for (const auto& b : basis_) {
            const double s = std::max(1.0, b.norm());
            r = std::max({r, (e * b - b).norm() / s, (b * e - b).norm() / s});
        }
        return r;
    }

private:
    explicit SubalgebraBasis(AmbientContext ctx) : ctx_(std::move(ctx)) {}

    /// Solves e b = b e = b for e in span(A) by least squares.
    std::optional<CMatrix> find_unit(double tol) const {
        const auto d = dim();
        if (d == 0) return std::nullopt;
        const auto n2 = n() * n();
        CMatrix sys(2 * d * n2, d);
        CVector rhs(2 * d * n2);
        for (Eigen::Index i = 0; i < d; ++i) {
            const CMatrix& b = basis_[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < d; ++j) {
                const CMatrix& e = basis_[static_cast<std::size_t>(j)];
                sys.block(2 * i * n2, j, n2, 1) = vectorize(e * b);
                sys.block((2 * i + 1) * n2, j, n2, 1) = vectorize(b * e);
            }
            rhs.segment(2 * i * n2, n2) = vectorize(b);
            rhs.segment((2 * i + 1) * n2, n2) = vectorize(b);
        }
        const CVector c = sys.completeOrthogonalDecomposition().solve(rhs);
        const CMatrix e = from_coords(c);
        if (unit_residual(e) > tol) return std::nullopt;
        return e;
    }

    AmbientContext ctx_;
    std::vector<CMatrix> basis_;
    CMatrix stacked_;
    Eigen::ColPivHouseholderQR<CMatrix> qr_;
    Span span_;
    std::optional<CMatrix> unit_;
    double closure_residual_ = 0.0;
};

/// Span of the products {l b r : b in basis(A)}; either side may be omitted.
inline Span product_span(const std::optional<CMatrix>& left, const SubalgebraBasis& a,
                         const std::optional<CMatrix>& right, double rel_tol = 1e-8) {
    std::vector<CMatrix> prods;
    for (const auto& b : a.basis()) {
        CMatrix p = b;
        if (left) p = *left * p;
        if (right) p = p * *right;
        prods.push_back(std::move(p));
    }
    return span_of(prods, a.n(), rel_tol);
}

/// Closed algebra generated by x: span{x, x^2, ...} by Arnoldi orthogonalisation.
inline SubalgebraBasis ba(const CMatrix& x, const AmbientContext& ctx, double rel_tol = 1e-10) {
    require_square(x);
    if (x.rows() != ctx.n()) throw InputError("ba: element dimension does not match the ambient");
    const auto n = x.rows();
    const double nx = spectral_norm(x);
    std::vector<CMatrix> q;
    if (nx > 0.0) {
        q.push_back(x / x.norm());
        for (Eigen::Index k = 1; k <= n * n; ++k) {
            CMatrix w = x * q.back();
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& b : q) w -= vectorize(b).dot(vectorize(w)) * b;
            }
            const double r = w.norm() / nx;
            if (r <= rel_tol) break;
            if (r < 10.0 * rel_tol) {
                std::ostringstream os;
                os << "ba: rank decision is ambiguous (residual " << r << " within 10x of tolerance " << rel_tol
                   << "); override the rank tolerance";
                throw NumericError(os.str());
            }
            q.push_back(w / w.norm());
        }
    }
    return SubalgebraBasis::make(ctx, std::move(q));
}

struct SupportIdempotent {
    enum class Method { riesz, root_limit };

    CMatrix s;
    Method method = Method::riesz;
    double agreement_residual = 0.0;  // ||s_riesz - s_root_limit||
    CMatrix riesz;
    CMatrix root_limit;
};

namespace detail {

/// Spectral idempotent complementary to the eigenvalue-0 Riesz projection,
/// by the trapezoidal rule on |z| = rho in the Schur basis.
inline CMatrix riesz_support(const CMatrix& xc, int nodes = 128) {
    const auto n = xc.rows();
    const KernelSplit ks = kernel_split(xc);
    if (ks.kernel_dim == 0) return identity(n);
    if (ks.kernel_dim == n) return CMatrix::Zero(n, n);
    const SpectrumResult sp = spectrum(xc);
    std::vector<double> mods;
    for (Eigen::Index i = 0; i < n; ++i) mods.push_back(std::abs(sp.eigenvalues(i)));
    std::sort(mods.begin(), mods.end());
    const double rho = 0.5 * mods[static_cast<std::size_t>(ks.kernel_dim)];
    CMatrix p0 = CMatrix::Zero(n, n);
    const CMatrix one = identity(n);
    for (int j = 0; j < nodes; ++j) {
        const cplx z = std::polar(rho, 2 * pi * (j + 0.5) / nodes);
        CMatrix a = z * one - sp.t;
        p0 += z * a.triangularView<Eigen::Upper>().solve(one);
    }
    p0 /= static_cast<double>(nodes);
    return sp.q * (one - p0) * sp.q.adjoint();
}

}  // namespace detail

/// s(x) for accretive x: the Riesz construction checked against lim x^{1/n}.
inline SupportIdempotent support_idem(const CMatrix& x, const AmbientContext& ctx, const Tolerances& tol = {}) {
    require_accretive(x, ctx, tol, "support_idem");
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    SupportIdempotent out;
    out.riesz = ctx.expand(detail::riesz_support(xc));
    if (spectral_norm(xc) == 0.0) {
        out.root_limit = out.riesz;
    } else {
        out.root_limit = root_limit(x, ctx, 1024, tol).limit;
    }
    out.agreement_residual = spectral_norm(out.riesz - out.root_limit);
    out.s = out.riesz;
    if (!(out.agreement_residual < 1e-6)) {
        std::ostringstream os;
        os << "support_idem: Riesz projection and root limit disagree (" << out.agreement_residual << ")";
        throw MethodDisagreementError(os.str(), {{"riesz", out.riesz}, {"root_limit", out.root_limit}});
    }
    return out;
}

/// Pseudo-invertibility equivalences for accretive x in A.
inline VerificationReport ws_suite(const CMatrix& x, const SubalgebraBasis& a, const Tolerances& tol = {}) {
    const AmbientContext& ctx = a.ambient();
    require_accretive(x, ctx, tol, "ws_suite");
    const double mres = a.membership_residual(x);
    if (mres > std::max(tol.eq_tol, 1e-8)) {
        std::ostringstream os;
        os << "ws_suite: x is not in span(A) (residual " << mres << ")";
        throw PreconditionError(os.str());
    }
    VerificationReport rep;
    rep.suite = "ws";
    rep.inputs_digest = digest(x);
    const double nx = spectral_norm(x);

    // (i) s(x) in A
    const SupportIdempotent s = support_idem(x, ctx, tol);
    const double r1 = a.membership_residual(s.s);
    const bool v1 = r1 <= 1e-8;

    // (iv) x y x = x for some y in A
    const auto d = a.dim();
    const auto n2 = a.n() * a.n();
    CMatrix sys(n2, d);
    for (Eigen::Index i = 0; i < d; ++i) sys.col(i) = vectorize(x * a.basis()[static_cast<std::size_t>(i)] * x);
    const CVector yc = sys.completeOrthogonalDecomposition().solve(vectorize(x));
    const CMatrix y = a.from_coords(yc);
    const double r4 = spectral_norm(x * y * x - x);
    const bool v4 = r4 <= 1e-8 * (1.0 + nx);

    // (v) x invertible in ba(x)
    const SubalgebraBasis b = ba(x, ctx);
    bool v5 = false;
    double r5 = std::numeric_limits<double>::infinity();
    if (b.unit() && b.dim() > 0) {
        const CMatrix& e = *b.unit();
        CMatrix sys5(2 * n2, b.dim());
        for (Eigen::Index i = 0; i < b.dim(); ++i) {
            const CMatrix& bi = b.basis()[static_cast<std::size_t>(i)];
            sys5.block(0, i, n2, 1) = vectorize(x * bi);
            sys5.block(n2, i, n2, 1) = vectorize(bi * x);
        }
        CVector rhs(2 * n2);
        rhs << vectorize(e), vectorize(e);
        const CMatrix z = b.from_coords(sys5.completeOrthogonalDecomposition().solve(rhs));
        r5 = std::max(spectral_norm(x * z - e), spectral_norm(z * x - e));
        v5 = r5 <= 1e-8 * (1.0 + spectral_norm(z));
    } else if (nx == 0.0) {
        // x = 0 is invertible in ba(0) = {0}, whose unit is 0.
        r5 = 0.0;
        v5 = true;
    }

    // (vi) 0 isolated in or absent from the spectrum
    const SpectrumResult sp = spectrum(ctx.compress(x, tol.eq_tol));
    const KernelSplit ks = kernel_split(ctx.compress(x, tol.eq_tol));
    std::vector<double> mods;
    for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) mods.push_back(std::abs(sp.eigenvalues(i)));
    std::sort(mods.begin(), mods.end());
    const auto kd = static_cast<std::size_t>(ks.kernel_dim);
    const double gap = kd < mods.size() ? mods[kd] : std::numeric_limits<double>::infinity();
    const bool v6 = gap > 1e-8;

    rep.info("(i) s(x) in A", v1, r1, 1e-8);
    rep.info("(ii) xA closed", true, 0.0, 0.0, "automatic in finite dimension");
    rep.info("(iii) Ax closed", true, 0.0, 0.0, "automatic in finite dimension");
    rep.info("(iv) x pseudo-invertible in A", v4, r4, 1e-8 * (1.0 + nx));
    rep.info("(v) x invertible in ba(x)", v5, r5, 1e-8);
    rep.info("(vi) 0 isolated or absent in Sp(x)", v6, gap, 1e-8);
    rep.check_true("(i) <=> (iv) <=> (v)", v1 == v4 && v4 == v5);
    rep.check_true("(i) => (vi)", !v1 || v6);
    rep.values["kernel_dim"] = static_cast<double>(ks.kernel_dim);
    rep.values["spectral_gap"] = std::isfinite(gap) ? gap : -1.0;
    rep.values["ba_dim"] = static_cast<double>(b.dim());
    return rep;
}

struct HsaResult {
    Span J, D, K;
    VerificationReport report;
};

/// J = zA, D = zAz, K = Az for z in F; D is an inner ideal (a HSA).
inline HsaResult hsa_from_z(const CMatrix& z, const SubalgebraBasis& a, const Tolerances& tol = {}) {
    const AmbientContext& ctx = a.ambient();
    const double mres = a.membership_residual(z);
    if (mres > std::max(tol.eq_tol, 1e-8)) {
        std::ostringstream os;
        os << "hsa_from_z: z is not in span(A) (residual " << mres << ")";
        throw PreconditionError(os.str());
    }
    const auto m = membership(z, ctx, tol);
    if (!m.in_F) {
        std::ostringstream os;
        os << "hsa_from_z: z is not in cone F (||e - z|| - 1 = " << m.F_residual << ")";
        throw PreconditionError(os.str());
    }
    HsaResult out;
    out.J = product_span(z, a, std::nullopt);
    out.D = product_span(z, a, z);
    out.K = product_span(std::nullopt, a, z);
    auto& rep = out.report;
    rep.suite = "hsa";
    rep.inputs_digest = digest(z);

    const auto Jm = out.J.matrices(), Dm = out.D.matrices(), Km = out.K.matrices();
    double rj = 0.0, rk = 0.0, rd = 0.0, runit = 0.0;
    for (const auto& b : a.basis()) {
        for (const auto& j : Jm) rj = std::max(rj, out.J.residual(j * b) * (j * b).norm() / std::max(1.0, b.norm()));
        for (const auto& k : Km) rk = std::max(rk, out.K.residual(b * k) * (b * k).norm() / std::max(1.0, b.norm()));
        for (const auto& d1 : Dm) {
            for (const auto& d2 : Dm) {
                const CMatrix p = d1 * b * d2;
                rd = std::max(rd, out.D.residual(p) * p.norm() / std::max(1.0, b.norm()));
            }
        }
    }
    rep.check("J = zA is a right ideal", rj, tol.eq_tol);
    rep.check("K = Az is a left ideal", rk, tol.eq_tol);
    rep.check("D = zAz is an inner ideal (D A D in D)", rd, tol.eq_tol);
    // D sits inside J and K.
    rep.check("D in J and D in K", std::max(containment_residual(out.J, out.D), containment_residual(out.K, out.D)),
              1e-8);
    // The limit of z^{1/n} is a two-sided unit for D.
    const SupportIdempotent s = support_idem(z, ctx, tol);
    for (const auto& d : Dm) runit = std::max({runit, (s.s * d - d).norm(), (d * s.s - d).norm()});
    rep.check("s(z) is a unit for D", runit, 1e-8);
    rep.values["dim_J"] = static_cast<double>(out.J.dim());
    rep.values["dim_D"] = static_cast<double>(out.D.dim());
    rep.values["dim_K"] = static_cast<double>(out.K.dim());
    return out;
}

/// xA in yA (span containment) versus s(y) s(x) = s(x).
inline VerificationReport supp_order(const CMatrix& x, const CMatrix& y, const SubalgebraBasis& a,
                                     const Tolerances& tol = {}) {
    const AmbientContext& ctx = a.ambient();
    VerificationReport rep;
    rep.suite = "supp3";
    rep.inputs_digest = digest(std::vector<const CMatrix*>{&x, &y});
    const Span xa = product_span(x, a, std::nullopt);
    const Span ya = product_span(y, a, std::nullopt);
    const double cres = containment_residual(ya, xa);
    const bool contained = xa.dim() <= ya.dim() && cres <= 1e-8;
    const SupportIdempotent sx = support_idem(x, ctx, tol);
    const SupportIdempotent sy = support_idem(y, ctx, tol);
    const double ires = spectral_norm(sy.s * sx.s - sx.s);
    const bool ident = ires <= 1e-7;
    rep.info("xA in yA", contained, cres, 1e-8);
    rep.info("s(y) s(x) = s(x)", ident, ires, 1e-7);
    rep.check_true("verdicts agree", contained == ident);
    rep.values["agreement_x"] = sx.agreement_residual;
    rep.values["agreement_y"] = sy.agreement_residual;
    return rep;
}

/// For an idempotent p: p in F iff p in r.
inline VerificationReport lump_check(const CMatrix& p, const AmbientContext& ctx, const Tolerances& tol = {}) {
    const CMatrix pc = ctx.compress(p, tol.eq_tol);
    const double np = spectral_norm(pc);
    const double idem = spectral_norm(pc * pc - pc);
    if (idem > tol.eq_tol * std::max(1.0, np * np)) {
        std::ostringstream os;
        os << "lump_check: p is not idempotent (||p^2 - p|| = " << idem << ")";
        throw PreconditionError(os.str());
    }
    VerificationReport rep;
    rep.suite = "lump";
    rep.inputs_digest = digest(p);
    const auto m = membership(p, ctx, tol);
    rep.info("p in F", m.in_F, m.F_residual, m.F_tolerance);
    rep.info("p in r", m.in_r, m.r_residual, m.r_tolerance);
    rep.check_true("in_F <=> in_r", m.in_F == m.in_r);
    rep.values["norm"] = np;
    rep.values["idempotence_residual"] = idem;
    return rep;
}

/// A = xAx, A = xA = Ax, and s(x) a unit for A, which must agree.
inline VerificationReport aarnes_kadison_check(const CMatrix& x, const SubalgebraBasis& a, const Tolerances& tol = {}) {
    const AmbientContext& ctx = a.ambient();
    VerificationReport rep;
    rep.suite = "aarnes";
    rep.inputs_digest = digest(x);
    const double mres = a.membership_residual(x);
    if (mres > std::max(tol.eq_tol, 1e-8)) {
        std::ostringstream os;
        os << "aarnes_kadison_check: x is not in span(A) (residual " << mres << ")";
        throw PreconditionError(os.str());
    }
    const Span xax = product_span(x, a, x);
    const Span xa = product_span(x, a, std::nullopt);
    const Span ax = product_span(std::nullopt, a, x);
    const bool v1 = span_equal(xax, a.span());
    const bool v2 = span_equal(xa, a.span()) && span_equal(ax, a.span());
    const SupportIdempotent s = support_idem(x, ctx, tol);
    const double ures = a.unit_residual(s.s);
    const bool v3 = ures <= 1e-8;
    rep.info("(i) A = xAx", v1, static_cast<double>(a.dim() - xax.dim()), 0.0);
    rep.info("(ii) A = xA = Ax", v2, static_cast<double>(2 * a.dim() - xa.dim() - ax.dim()), 0.0);
    rep.info("(iii) s(x) is a unit for A", v3, ures, 1e-8);
    rep.check_true("(i) <=> (ii) <=> (iii)", v1 == v2 && v2 == v3);
    return rep;
}

/// ba(x) = ba(F(x)).
inline VerificationReport ba_ftransform_equal(const CMatrix& x, const AmbientContext& ctx, const Tolerances& tol = {}) {
    require_accretive(x, ctx, tol, "ba_ftransform_equal");
    VerificationReport rep;
    rep.suite = "whba";
    rep.inputs_digest = digest(x);
    const SubalgebraBasis bx = ba(x, ctx);
    const SubalgebraBasis bf = ba(f_transform(x, ctx, tol), ctx);
    rep.check("ba(F(x)) in ba(x)", containment_residual(bx.span(), bf.span()), 1e-8);
    rep.check("ba(x) in ba(F(x))", containment_residual(bf.span(), bx.span()), 1e-8);
    rep.check_true("equal dimension", bx.dim() == bf.dim());
    rep.values["dim"] = static_cast<double>(bx.dim());
    return rep;
}

/// qA is a right ideal with left unit q; for accretive x with s(x) in A,
/// xA = s(x)A.
inline VerificationReport idempotent_ideal(const CMatrix& q, const SubalgebraBasis& a,
                                           const std::optional<CMatrix>& x = std::nullopt,
                                           const Tolerances& tol = {}) {
    const AmbientContext& ctx = a.ambient();
    const double nq = spectral_norm(q);
    if (spectral_norm(q * q - q) > tol.eq_tol * std::max(1.0, nq * nq)) {
        throw PreconditionError("idempotent_ideal: q is not idempotent");
    }
    if (a.membership_residual(q) > std::max(tol.eq_tol, 1e-8)) {
        throw PreconditionError("idempotent_ideal: q is not in span(A)");
    }
    if (!membership(q, ctx, tol).in_F) throw PreconditionError("idempotent_ideal: q is not in cone F");
    VerificationReport rep;
    rep.suite = "ideal";
    rep.inputs_digest = x ? digest(std::vector<const CMatrix*>{&q, &*x}) : digest(q);
    const Span qa = product_span(q, a, std::nullopt);
    double rideal = 0.0, runit = 0.0;
    for (const auto& j : qa.matrices()) {
        runit = std::max(runit, (q * j - j).norm());
        for (const auto& b : a.basis()) rideal = std::max(rideal, qa.residual(j * b) * (j * b).norm());
    }
    rep.check("qA is a right ideal", rideal, 1e-8);
    rep.check("q is a left unit for qA", runit, 1e-8);
    if (x) {
        const SupportIdempotent s = support_idem(*x, ctx, tol);
        if (a.contains(s.s)) {
            const Span xa = product_span(*x, a, std::nullopt);
            const Span sa = product_span(s.s, a, std::nullopt);
            rep.check_true("xA = s(x)A", span_equal(xa, sa));
        } else {
            rep.info("xA = s(x)A", true, 0.0, 0.0, "not applicable: s(x) not in A");
        }
    }
    rep.values["dim_qA"] = static_cast<double>(qa.dim());
    return rep;
}

}  // namespace realpos
