#pragma once

// Linear maps between matrix algebras: amplifications, norm ladders, the Choi
// test and Kraus form, real (complete) positivity by sampling and witness
// search, and symmetric projections P(a) = (a + theta(a)(2q - 1)) / 2.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "realpos/algebra.hpp"
#include "realpos/cones.hpp"
#include "realpos/linalg.hpp"
#include "realpos/numrange.hpp"
#include "realpos/report.hpp"

namespace realpos {

/// k x k block matrix with m in block (a, b) and zeros elsewhere.
inline CMatrix block_unit(Eigen::Index k, Eigen::Index a, Eigen::Index b, const CMatrix& m) {
    const auto n = m.rows();
    CMatrix out = CMatrix::Zero(k * n, k * n);
    out.block(a * n, b * n, n, n) = m;
    return out;
}

/// I_k (x) m.
inline CMatrix block_repeat(Eigen::Index k, const CMatrix& m) {
    CMatrix out = CMatrix::Zero(k * m.rows(), k * m.cols());
    for (Eigen::Index a = 0; a < k; ++a) out.block(a * m.rows(), a * m.cols(), m.rows(), m.cols()) = m;
    return out;
}

inline AmbientContext amplify_context(const AmbientContext& ctx, Eigen::Index k) {
    if (ctx.mode() == AmbientContext::Mode::full) return AmbientContext::full(k * ctx.n());
    return AmbientContext::corner(block_repeat(k, ctx.unit()));
}

/// M_k(A): basis E_ab (x) b_i, ordered by (a, b) then i.
inline SubalgebraBasis amplify_algebra(const SubalgebraBasis& a, Eigen::Index k) {
    if (k < 1) throw InputError("amplification level must be >= 1");
    if (k == 1) return a;
    std::vector<CMatrix> basis;
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index q = 0; q < k; ++q) {
            for (const auto& b : a.basis()) basis.push_back(block_unit(k, p, q, b));
        }
    }
    std::optional<CMatrix> unit;
    if (a.unit()) unit = block_repeat(k, *a.unit());
    return SubalgebraBasis::make(amplify_context(a.ambient(), k), std::move(basis), unit, {}, false);
}

/// T : A -> B stored by its coordinate matrix (column i = coords of T(b_i)).
class LinearMapOnAlgebra {
public:
    LinearMapOnAlgebra(SubalgebraBasis domain, SubalgebraBasis codomain, CMatrix action)
        : domain_(std::move(domain)), codomain_(std::move(codomain)), action_(std::move(action)) {
        if (action_.rows() != codomain_.dim() || action_.cols() != domain_.dim()) {
            std::ostringstream os;
            os << "action matrix is " << action_.rows() << "x" << action_.cols() << " but the bases have dimensions "
               << codomain_.dim() << " and " << domain_.dim();
            throw InputError(os.str());
        }
        if (!all_finite(action_)) throw InputError("action matrix has non-finite entries");
        images_.reserve(static_cast<std::size_t>(domain_.dim()));
        for (Eigen::Index i = 0; i < domain_.dim(); ++i) images_.push_back(codomain_.from_coords(action_.col(i)));
    }

    /// Tabulates f on the domain basis; every image must lie in the codomain.
    static LinearMapOnAlgebra from_function(const SubalgebraBasis& domain, const SubalgebraBasis& codomain,
                                            const std::function<CMatrix(const CMatrix&)>& f, double tol = 1e-8) {
        CMatrix action(codomain.dim(), domain.dim());
        for (Eigen::Index i = 0; i < domain.dim(); ++i) {
            const CMatrix img = f(domain.basis()[static_cast<std::size_t>(i)]);
            const double r = codomain.membership_residual(img);
            if (r > tol) {
                std::ostringstream os;
                os << "map image of basis element " << i << " leaves the codomain (residual " << r << ")";
                throw InputError(os.str());
            }
            action.col(i) = codomain.coords(img);
        }
        return {domain, codomain, action};
    }

    static LinearMapOnAlgebra identity_on(const SubalgebraBasis& a) {
        return {a, a, CMatrix::Identity(a.dim(), a.dim())};
    }

    [[nodiscard]] const SubalgebraBasis& domain() const { return domain_; }
    [[nodiscard]] const SubalgebraBasis& codomain() const { return codomain_; }
    [[nodiscard]] const CMatrix& action() const { return action_; }
    [[nodiscard]] bool full_domain() const { return domain_.dim() == domain_.n() * domain_.n(); }

    /// T(b_i) for the i-th domain basis element.
    [[nodiscard]] const CMatrix& image(Eigen::Index i) const { return images_[static_cast<std::size_t>(i)]; }

    [[nodiscard]] CMatrix apply(const CMatrix& a) const {
        if (a.rows() != domain_.n() || a.cols() != domain_.n()) throw InputError("map argument has the wrong size");
        const CVector c = domain_.coords(a);
        CMatrix out = CMatrix::Zero(codomain_.n(), codomain_.n());
        for (Eigen::Index i = 0; i < c.size(); ++i) out += c(i) * images_[static_cast<std::size_t>(i)];
        return out;
    }

    /// T_k on a k x k block matrix over the domain.
    [[nodiscard]] CMatrix apply_amplified(const CMatrix& x, Eigen::Index k) const {
        const auto n = domain_.n(), m = codomain_.n();
        if (x.rows() != k * n || x.cols() != k * n) throw InputError("amplified argument has the wrong size");
        CMatrix out(k * m, k * m);
        for (Eigen::Index a = 0; a < k; ++a) {
            for (Eigen::Index b = 0; b < k; ++b) out.block(a * m, b * m, m, m) = apply(x.block(a * n, b * n, n, n));
        }
        return out;
    }

    /// alpha T + beta S (same domain and codomain).
    [[nodiscard]] LinearMapOnAlgebra combine(cplx alpha, const LinearMapOnAlgebra& s, cplx beta) const {
        if (s.action_.rows() != action_.rows() || s.action_.cols() != action_.cols()) {
            throw InputError("maps have different shapes");
        }
        return {domain_, codomain_, alpha * action_ + beta * s.action_};
    }

    /// T o S.
    [[nodiscard]] LinearMapOnAlgebra after(const LinearMapOnAlgebra& s) const {
        if (s.codomain_.dim() != domain_.dim()) throw InputError("maps cannot be composed");
        return {s.domain_, codomain_, action_ * s.action_};
    }

private:
    SubalgebraBasis domain_;
    SubalgebraBasis codomain_;
    CMatrix action_;
    std::vector<CMatrix> images_;
};

/// The k-th amplification T (x) id_k as a map M_k(A) -> M_k(B).
inline LinearMapOnAlgebra amplify(const LinearMapOnAlgebra& t, Eigen::Index k) {
    if (k < 1) throw InputError("amplification level must be >= 1");
    if (k == 1) return t;
    const auto d = t.domain().dim(), c = t.codomain().dim();
    CMatrix action = CMatrix::Zero(k * k * c, k * k * d);
    for (Eigen::Index j = 0; j < k * k; ++j) action.block(j * c, j * d, c, d) = t.action();
    return {amplify_algebra(t.domain(), k), amplify_algebra(t.codomain(), k), action};
}

// ---------------------------------------------------------------------------
// standard maps

inline LinearMapOnAlgebra transpose_map(Eigen::Index n) {
    const auto a = SubalgebraBasis::full(n);
    return LinearMapOnAlgebra::from_function(a, a, [](const CMatrix& x) { return CMatrix(x.transpose()); });
}

/// a -> sum_i K_i a K_i* on full n x n matrices (K_i are m x n).
inline LinearMapOnAlgebra kraus_map(const std::vector<CMatrix>& ks, Eigen::Index n) {
    if (ks.empty()) throw InputError("kraus_map needs at least one operator");
    const auto m = ks.front().rows();
    for (const auto& k : ks) {
        if (k.rows() != m || k.cols() != n) throw InputError("Kraus operators must all be m x n");
    }
    return LinearMapOnAlgebra::from_function(SubalgebraBasis::full(n), SubalgebraBasis::full(m), [&](const CMatrix& a) {
        CMatrix out = CMatrix::Zero(m, m);
        for (const auto& k : ks) out += k * a * k.adjoint();
        return out;
    });
}

/// Random CP map on M_n with `count` Gaussian Kraus operators, scaled so T(1) has norm 1.
inline LinearMapOnAlgebra random_cp_map(Eigen::Index n, std::uint64_t seed, int count = 2) {
    Rng rng = make_rng(seed);
    std::vector<CMatrix> ks;
    CMatrix t1 = CMatrix::Zero(n, n);
    for (int i = 0; i < count; ++i) {
        ks.push_back(gaussian_matrix(n, n, rng));
        t1 += ks.back() * ks.back().adjoint();
    }
    const double s = 1.0 / std::sqrt(spectral_norm(t1));
    for (auto& k : ks) k *= s;
    return kraus_map(ks, n);
}

// ---------------------------------------------------------------------------
// norm ladder

struct NormEstimate {
    double value = 0.0;     // ||T_k(u)|| / ||u|| for the best input found: a lower bound
    bool stationary = false;
    CMatrix best_input;     // unit operator norm
    int iterations = 0;
};

namespace detail {

/// Random element of M_k(A).
inline CMatrix random_block_element(const SubalgebraBasis& a, Eigen::Index k, Rng& rng) {
    const auto n = a.n();
    CMatrix x = CMatrix::Zero(k * n, k * n);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index q = 0; q < k; ++q) {
            CVector c(a.dim());
            for (Eigen::Index i = 0; i < a.dim(); ++i) {
                const double re = g(rng);
                const double im = g(rng);
                c(i) = cplx(re, im);
            }
            x.block(p * n, q * n, n, n) = a.from_coords(c);
        }
    }
    return x;
}

/// Blockwise orthogonal projection of x onto M_k(A) (identity for full A).
inline CMatrix project_blocks(const SubalgebraBasis& a, const CMatrix& x, Eigen::Index k) {
    if (a.dim() == a.n() * a.n()) return x;
    const auto n = a.n();
    CMatrix out(k * n, k * n);
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index q = 0; q < k; ++q) out.block(p * n, q * n, n, n) = a.span().project(x.block(p * n, q * n, n, n));
    }
    return out;
}

/// Pads a level-j input to level k with zero blocks.
inline CMatrix pad_blocks(const CMatrix& u, Eigen::Index n, Eigen::Index k) {
    CMatrix out = CMatrix::Zero(k * n, k * n);
    const auto s = std::min(u.rows(), k * n);
    out.topLeftCorner(s, s) = u.topLeftCorner(s, s);
    return out;
}

}  // namespace detail

/// Lower bound for ||T_k|| by multi-start alternating ascent: with (a, b) the
/// top singular pair of T_k(u), the next input is the polar part of the
/// representer of u -> a* T_k(u) b, projected back into M_k(A).
inline NormEstimate op_norm_estimate(const LinearMapOnAlgebra& t, Eigen::Index k, int budget = 100,
                                     std::uint64_t seed = 0, const std::optional<CMatrix>& warm_start = std::nullopt,
                                     int random_starts = 4) {
    if (budget < 1) throw InputError("op_norm_estimate: budget must be >= 1");
    if (k < 1) throw InputError("op_norm_estimate: level must be >= 1");
    const SubalgebraBasis& a = t.domain();
    const auto n = a.n(), m = t.codomain().n(), d = a.dim();
    NormEstimate best;
    if (d == 0) {
        best.stationary = true;
        best.best_input = CMatrix::Zero(k * n, k * n);
        return best;
    }
    // Gram matrix of the domain basis, for the representer solve.
    CMatrix gram(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) gram(i, j) = vectorize(a.basis()[static_cast<std::size_t>(i)]).dot(vectorize(a.basis()[static_cast<std::size_t>(j)]));
    }
    const auto gram_lu = gram.partialPivLu();

    auto normalise = [&](CMatrix u) -> std::optional<CMatrix> {
        const double nu = spectral_norm(u);
        if (!(nu > 1e-300) || !all_finite(u)) return std::nullopt;
        return CMatrix(u / nu);
    };

    std::vector<CMatrix> starts;
    if (warm_start) starts.push_back(detail::pad_blocks(*warm_start, n, k));
    if (a.unit()) starts.push_back(block_repeat(k, *a.unit()));
    if (t.full_domain()) {
        // partial swap sum_{p,q} E_pq (x) E_qp
        CMatrix sw = CMatrix::Zero(k * n, k * n);
        for (Eigen::Index p = 0; p < std::min(k, n); ++p) {
            for (Eigen::Index q = 0; q < std::min(k, n); ++q) sw(p * n + q, q * n + p) = 1.0;
        }
        starts.push_back(sw);
    }
    Rng rng = make_rng(seed);
    for (int s = 0; s < random_starts; ++s) starts.push_back(detail::random_block_element(a, k, rng));

    for (const auto& s0 : starts) {
        auto u0 = normalise(s0);
        if (!u0) continue;
        CMatrix u = *u0;
        double val = spectral_norm(t.apply_amplified(u, k));
        bool stationary = false;
        int it = 0;
        for (; it < budget; ++it) {
            const CMatrix v = t.apply_amplified(u, k);
            Eigen::JacobiSVD<CMatrix> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
            if (svd.singularValues()(0) == 0.0) {
                stationary = true;
                break;
            }
            const CVector lu = svd.matrixU().col(0), rv = svd.matrixV().col(0);
            CMatrix rep = CMatrix::Zero(k * n, k * n);
            for (Eigen::Index p = 0; p < k; ++p) {
                for (Eigen::Index q = 0; q < k; ++q) {
                    CVector g(d);
                    for (Eigen::Index i = 0; i < d; ++i) {
                        g(i) = lu.segment(p * m, m).dot(t.image(i) * rv.segment(q * m, m));
                    }
                    const CVector coef = gram_lu.solve(CVector(g.conjugate()));
                    rep.block(p * n, q * n, n, n) = a.from_coords(coef);
                }
            }
            Eigen::JacobiSVD<CMatrix> ps(rep, Eigen::ComputeFullU | Eigen::ComputeFullV);
            auto next = normalise(detail::project_blocks(a, ps.matrixU() * ps.matrixV().adjoint(), k));
            if (!next) {
                stationary = true;
                break;
            }
            const double nv = spectral_norm(t.apply_amplified(*next, k));
            if (!(nv > val * (1 + 1e-13))) {
                stationary = true;
                if (nv > val) {
                    val = nv;
                    u = *next;
                }
                break;
            }
            val = nv;
            u = *next;
        }
        // Ties keep the earlier start.
        if (val > best.value || best.best_input.size() == 0) {
            best.value = val;
            best.stationary = stationary;
            best.best_input = u;
            best.iterations = it;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Choi / Kraus

struct ChoiMatrix {
    CMatrix c;
    bool herm = false;
    double min_eig = 0.0;  // smallest eigenvalue of the Hermitian part
};

inline void require_full_domain(const LinearMapOnAlgebra& t, const char* op) {
    if (!t.full_domain()) {
        throw UnsupportedError(std::string(op) + ": requires a map defined on a full matrix algebra");
    }
}

/// [T(E_ij)]_{ij}.
inline ChoiMatrix choi(const LinearMapOnAlgebra& t, const Tolerances& tol = {}) {
    require_full_domain(t, "choi");
    const auto n = t.domain().n(), m = t.codomain().n();
    ChoiMatrix ch;
    ch.c.resize(n * m, n * m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) ch.c.block(i * m, j * m, m, m) = t.apply(matrix_unit(n, i, j));
    }
    ch.herm = is_hermitian(ch.c, tol.eq_tol);
    ch.min_eig = herm_min_eig(herm_part(ch.c));
    return ch;
}

struct CpVerdict {
    bool cp = false;
    double min_eig = 0.0;
    ChoiMatrix choi;
};

inline CpVerdict is_cp(const LinearMapOnAlgebra& t, const Tolerances& tol = {}) {
    CpVerdict v;
    v.choi = choi(t, tol);
    v.min_eig = v.choi.min_eig;
    v.cp = v.choi.herm && v.min_eig >= -tol.psd_tol * std::max(1.0, spectral_norm(v.choi.c));
    return v;
}

struct KrausFactorization {
    std::vector<CMatrix> v;  // T(a) = sum_i V_i* a V_i, each V_i is n x m
    double residual = 0.0;   // max over matrix units of ||T(E_ij) - sum V* E_ij V||
};

inline KrausFactorization kraus_factor(const LinearMapOnAlgebra& t, const Tolerances& tol = {}) {
    const CpVerdict cp = is_cp(t, tol);
    if (!cp.cp) {
        std::ostringstream os;
        os << "kraus_factor: map is not completely positive (Choi min eigenvalue " << cp.min_eig << ")";
        throw PreconditionError(os.str());
    }
    const auto n = t.domain().n(), m = t.codomain().n();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm_part(cp.choi.c));
    const auto& ev = es.eigenvalues();
    const double top = ev.size() ? std::max(0.0, ev(ev.size() - 1)) : 0.0;
    KrausFactorization kf;
    for (Eigen::Index j = ev.size() - 1; j >= 0; --j) {
        if (!(ev(j) > 1e-12 * std::max(1.0, top))) break;
        const CVector vec = es.eigenvectors().col(j) * std::sqrt(ev(j));
        CMatrix kmat(m, n);  // T(a) = K a K*
        for (Eigen::Index i = 0; i < n; ++i) kmat.col(i) = vec.segment(i * m, m);
        kf.v.push_back(kmat.adjoint());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const CMatrix e = matrix_unit(n, i, j);
            CMatrix rec = CMatrix::Zero(m, m);
            for (const auto& v : kf.v) rec += v.adjoint() * e * v;
            kf.residual = std::max(kf.residual, spectral_norm(t.apply(e) - rec));
        }
    }
    return kf;
}

// ---------------------------------------------------------------------------
// real complete positivity

struct RcpWitness {
    Eigen::Index level = 0;
    CMatrix input;
    double input_abscissa = 0.0;  // >= 0: the input is accretive
    double image_abscissa = 0.0;  // < 0: the image is not
};

struct RcpResult {
    bool passed = true;
    bool certified = false;  // CP via the Choi matrix, hence RCP
    std::string label;
    int samples = 0;
    int violations = 0;
    int evaluations = 0;
    double min_image_abscissa = std::numeric_limits<double>::infinity();
    std::optional<double> choi_min_eig;
    std::optional<RcpWitness> witness;
    std::vector<std::string> notes;
};

struct RcpOptions {
    std::vector<Eigen::Index> levels{1, 2, 3};
    int samples = 50;     // per level
    int budget = 2000;    // falsification evaluations per level
    std::uint64_t seed = 0;
};

namespace detail {

inline double block_abscissa(const CMatrix& x, const AmbientContext& ctx_k) {
    return abscissa(ctx_k.compress(x, 1e-8));
}

/// Clips the Hermitian part to be PSD, returns to M_k(A), restores
/// accretivity with the unit if needed, and scales into the unit ball.
inline CMatrix project_accretive(const SubalgebraBasis& a, const CMatrix& x, Eigen::Index k,
                                 const AmbientContext& ctx_k, const std::optional<CMatrix>& unit_k) {
    const CMatrix h = herm_part(x);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const RVector ev = es.eigenvalues().cwiseMax(0.0);
    CMatrix y = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint() + (x - h);
    y = project_blocks(a, y, k);
    const double ab = block_abscissa(y, ctx_k);
    if (ab < 0 && unit_k) y += (-ab) * *unit_k;
    const double ny = spectral_norm(y);
    if (ny > 1.0) y /= ny;
    return y;
}

}  // namespace detail

/// Samples accretive inputs at each level, then searches for a certified
/// witness X (accretive, ||X|| <= 1) with T_k(X) not accretive.
inline RcpResult rcp_test(const LinearMapOnAlgebra& t, const RcpOptions& opt = {}, const Tolerances& tol = {}) {
    if (opt.levels.empty()) throw InputError("rcp_test: levels must be nonempty");
    const SubalgebraBasis& a = t.domain();
    const auto n = a.n();
    RcpResult res;
    Rng rng = make_rng(opt.seed);

    auto violation_floor = [&](const CMatrix& img) { return -1e-8 * std::max(1.0, spectral_norm(img)); };

    for (Eigen::Index k : opt.levels) {
        if (k < 1) throw InputError("rcp_test: levels must be >= 1");
        const AmbientContext dctx = amplify_context(a.ambient(), k);
        const AmbientContext cctx = amplify_context(t.codomain().ambient(), k);
        std::optional<CMatrix> unit_k;
        if (a.unit()) unit_k = block_repeat(k, *a.unit());

        auto image_abscissa = [&](const CMatrix& x) {
            ++res.evaluations;
            return detail::block_abscissa(t.apply_amplified(x, k), cctx);
        };

        // (a) sampling
        CMatrix best_x;
        double best_f = std::numeric_limits<double>::infinity();
        for (int s = 0; s < opt.samples; ++s) {
            CMatrix x = detail::random_block_element(a, k, rng);
            double ab = detail::block_abscissa(x, dctx);
            if (ab < 0) {
                if (!unit_k) continue;
                x += (-ab) * *unit_k;
                ab = detail::block_abscissa(x, dctx);
                if (ab < -1e-12 * std::max(1.0, spectral_norm(x))) continue;
            }
            const double nx = spectral_norm(x);
            if (nx > 0) x /= nx;
            const CMatrix img = t.apply_amplified(x, k);
            ++res.evaluations;
            ++res.samples;
            const double f = detail::block_abscissa(img, cctx);
            res.min_image_abscissa = std::min(res.min_image_abscissa, f);
            if (f < violation_floor(img)) ++res.violations;
            if (f < best_f) {
                best_f = f;
                best_x = x;
            }
        }
        if (res.samples == 0) res.notes.push_back("no accretive samples could be generated at level " + std::to_string(k));

        // (b) falsification by projected random-direction descent
        std::vector<CMatrix> starts;
        if (t.full_domain()) {
            const auto r = std::min(k, n);
            CMatrix omega = CMatrix::Zero(k * n, k * n);
            for (Eigen::Index i = 0; i < r; ++i) {
                for (Eigen::Index j = 0; j < r; ++j) omega(i * n + i, j * n + j) = 1.0;
            }
            starts.push_back(omega / static_cast<double>(r));
        }
        if (best_x.size() > 0) starts.push_back(best_x);
        if (starts.empty()) continue;
        const int per_start = std::max(1, opt.budget / static_cast<int>(starts.size()));
        for (const auto& s0 : starts) {
            CMatrix x = detail::project_accretive(a, s0, k, dctx, unit_k);
            double f = image_abscissa(x);
            double step = 0.3;
            for (int e = 0; e < per_start; ++e) {
                CMatrix dir = detail::random_block_element(a, k, rng);
                dir /= dir.norm();
                const CMatrix y = detail::project_accretive(a, x + step * dir, k, dctx, unit_k);
                const double fy = image_abscissa(y);
                if (fy < f) {
                    x = y;
                    f = fy;
                    step = std::min(1.0, step * 1.5);
                } else {
                    step *= 0.7;
                    if (step < 1e-6) step = 0.3;
                }
            }
            res.min_image_abscissa = std::min(res.min_image_abscissa, f);
            // Certify: the input must be accretive as computed, the image not.
            double in_ab = detail::block_abscissa(x, dctx);
            if (in_ab < 0 && unit_k) {
                x += (-in_ab) * *unit_k;
                in_ab = detail::block_abscissa(x, dctx);
            }
            const CMatrix img = t.apply_amplified(x, k);
            const double out_ab = detail::block_abscissa(img, cctx);
            if (in_ab >= 0.0 && out_ab < violation_floor(img)) {
                if (!res.witness || out_ab < res.witness->image_abscissa) {
                    res.witness = RcpWitness{k, x, in_ab, out_ab};
                }
            }
        }
        if (res.witness) break;
    }

    if (t.full_domain()) {
        const CpVerdict cp = is_cp(t, tol);
        res.choi_min_eig = cp.min_eig;
        res.certified = cp.cp;
        if (!cp.cp && !res.witness) {
            res.notes.push_back("Choi matrix has a negative eigenvalue but no witness was found within the budget");
        }
    }
    res.passed = res.violations == 0 && !res.witness;
    if (!res.passed) {
        res.label = res.witness ? "FAIL (certified witness)" : "FAIL (sampled violation)";
    } else if (res.certified) {
        res.label = "PASS (certified: completely positive)";
    } else {
        res.label = "PASS (sampled; not a proof)";
    }
    return res;
}

// ---------------------------------------------------------------------------
// projections

struct SymmetricProjection {
    LinearMapOnAlgebra p;
    VerificationReport certificate;
    std::map<int, double> symmetry_levels;  // level -> estimate of ||I - 2P||_k
};

namespace detail {

/// Orthonormal frame of the null space of m (singular values <= rel_tol * max(1, s_max)).
inline CMatrix null_space(const CMatrix& m, double rel_tol = 1e-10) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double thresh = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > thresh) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

inline Span map_range(const LinearMapOnAlgebra& t) {
    std::vector<CMatrix> imgs;
    for (Eigen::Index i = 0; i < t.domain().dim(); ++i) imgs.push_back(t.image(i));
    return span_of(imgs, t.codomain().n());
}

}  // namespace detail

inline double max_idempotence_residual(const LinearMapOnAlgebra& p) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < p.domain().dim(); ++i) r = std::max(r, spectral_norm(p.apply(p.image(i)) - p.image(i)));
    return r;
}

/// P(a) = (a + theta(a)(2q - 1)) / 2 with its certificate.
inline SymmetricProjection build_symmetric_projection(const LinearMapOnAlgebra& theta, const CMatrix& q,
                                                      const SubalgebraBasis& a, const Tolerances& tol = {},
                                                      std::uint64_t seed = 0) {
    if (theta.domain().dim() != a.dim() || theta.codomain().dim() != a.dim() || theta.domain().n() != a.n() ||
        theta.codomain().n() != a.n()) {
        throw PreconditionError("build_symmetric_projection: theta must map A to A");
    }
    const auto d = a.dim();
    const double scale_tol = std::max(tol.eq_tol, 1e-9);
    {
        const double r = (theta.action() * theta.action() - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
        if (r > scale_tol) {
            std::ostringstream os;
            os << "build_symmetric_projection: theta o theta != id (residual " << r << ")";
            throw PreconditionError(os.str());
        }
    }
    double mult = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const CMatrix& bi = a.basis()[static_cast<std::size_t>(i)];
            const CMatrix& bj = a.basis()[static_cast<std::size_t>(j)];
            mult = std::max(mult, spectral_norm(theta.apply(bi * bj) - theta.image(i) * theta.image(j)) /
                                      std::max(1.0, spectral_norm(bi) * spectral_norm(bj)));
        }
    }
    if (mult > scale_tol) {
        std::ostringstream os;
        os << "build_symmetric_projection: theta(ab) != theta(a) theta(b) (residual " << mult << ")";
        throw PreconditionError(os.str());
    }
    const double nq = spectral_norm(q);
    if (spectral_norm(q * q - q) > scale_tol * std::max(1.0, nq * nq)) {
        throw PreconditionError("build_symmetric_projection: q is not idempotent (q^2 != q)");
    }
    if (a.membership_residual(q) > 1e-8) throw PreconditionError("build_symmetric_projection: q is not in A");
    if (spectral_norm(theta.apply(q) - q) > scale_tol * std::max(1.0, nq)) {
        throw PreconditionError("build_symmetric_projection: theta(q) != q");
    }

    const CMatrix one = a.unit_or_ambient();
    const CMatrix refl = 2.0 * q - one;
    SymmetricProjection out{LinearMapOnAlgebra::from_function(
                                a, a, [&](const CMatrix& x) { return CMatrix(0.5 * (x + theta.apply(x) * refl)); }),
                            {}, {}};
    auto& cert = out.certificate;
    cert.suite = "proj";
    cert.inputs_digest = digest(std::vector<const CMatrix*>{&theta.action(), &q});
    cert.values["theta_square_residual"] = (theta.action() * theta.action() - CMatrix::Identity(d, d)).norm();
    cert.values["theta_multiplicative_residual"] = mult;

    cert.check("P^2 = P", max_idempotence_residual(out.p), 1e-9);

    const LinearMapOnAlgebra sym = LinearMapOnAlgebra::identity_on(a).combine(1.0, out.p, -2.0);
    std::optional<CMatrix> warm;
    double worst = 0.0;
    for (int k = 1; k <= 3; ++k) {
        const NormEstimate e = op_norm_estimate(sym, k, 100, seed + static_cast<std::uint64_t>(k), warm);
        warm = e.best_input;
        out.symmetry_levels[k] = e.value;
        cert.values["symmetry_level_" + std::to_string(k)] = e.value;
        worst = std::max(worst, e.value - 1.0);
    }
    cert.check("||I - 2P||_k <= 1 for k = 1..3", worst, 1e-6);

    RcpOptions ro;
    ro.seed = seed;
    const RcpResult rcp = rcp_test(out.p, ro, tol);
    cert.check_true("rcp_test", rcp.passed, rcp.label);
    cert.values["rcp_min_image_abscissa"] = rcp.min_image_abscissa;

    // range(P) = {a in qAq : theta(a) = a}
    CMatrix sys(2 * d, d);
    sys.topRows(d) = theta.action() - CMatrix::Identity(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const CMatrix& b = a.basis()[static_cast<std::size_t>(i)];
        sys.bottomRows(d).col(i) = a.coords(q * b * q) - CVector::Unit(d, i);
    }
    const CMatrix ns = detail::null_space(sys);
    std::vector<CMatrix> fixed;
    for (Eigen::Index j = 0; j < ns.cols(); ++j) fixed.push_back(a.from_coords(ns.col(j)));
    const Span fix = span_of(fixed, a.n());
    const Span rng = detail::map_range(out.p);
    cert.check_true("range(P) = fixed points of theta in qAq", span_equal(rng, fix));
    cert.values["range_dim"] = static_cast<double>(rng.dim());

    // P = 0 on q'A + Aq' where those products stay in A.
    const CMatrix qp = one - q;
    double vanish = 0.0;
    int tested = 0;
    for (const auto& b : a.basis()) {
        for (const CMatrix& c : {CMatrix(qp * b), CMatrix(b * qp)}) {
            if (a.membership_residual(c) <= 1e-8) {
                vanish = std::max(vanish, spectral_norm(out.p.apply(c)));
                ++tested;
            }
        }
    }
    cert.check("P vanishes on q'A + Aq'", vanish, 1e-9);
    cert.values["complement_products_tested"] = tested;
    return out;
}

struct ProjectionClassification {
    bool idempotent = false;
    double idempotence_residual = 0.0;
    std::map<int, double> contractive_levels;  // ||P_k||
    std::map<int, double> complement_levels;   // ||(I - P)_k||
    std::map<int, double> symmetry_levels;     // ||(I - 2P)_k||
    bool bicontractive = false;
    bool symmetric = false;
    RcpResult rcp_sampled;
    double cond_exp_residual = 0.0;        // max ||P(P(a) b P(c)) - P(a) P(b) P(c)||
    bool range_subalgebra = false;
    double range_product_residual = 0.0;
    double p_product_assoc_residual = 0.0;  // (x.y).z - x.(y.z) with x.y = P(xy), on the range
    std::optional<double> p_product_unit_residual;  // P(1).x - x on the range
    double kernel_square_residual = 0.0;   // max ||k1 k2|| over ker P
    double kernel_ideal_residual = 0.0;    // ker P A + A ker P in ker P
    VerificationReport report;
};

inline ProjectionClassification classify_projection(const LinearMapOnAlgebra& p,
                                                    const std::vector<int>& levels = {1, 2, 3},
                                                    const Tolerances& tol = {}, std::uint64_t seed = 0) {
    if (p.domain().dim() != p.codomain().dim() || p.domain().n() != p.codomain().n()) {
        throw PreconditionError("classify_projection: P must map an algebra to itself");
    }
    ProjectionClassification c;
    c.idempotence_residual = max_idempotence_residual(p);
    if (c.idempotence_residual > std::max(tol.eq_tol, 1e-9)) {
        std::ostringstream os;
        os << "classify_projection: P is not idempotent (||P^2 - P|| = " << c.idempotence_residual << ")";
        throw PreconditionError(os.str());
    }
    c.idempotent = true;
    const SubalgebraBasis& a = p.domain();
    const auto id = LinearMapOnAlgebra::identity_on(a);
    const auto comp = id.combine(1.0, p, -1.0);
    const auto sym = id.combine(1.0, p, -2.0);
    auto& rep = c.report;
    rep.suite = "classify";
    rep.inputs_digest = digest(p.action());

    const double slack = 1e-6;
    std::optional<CMatrix> wp, wc, ws;
    bool monotone = true;
    double prev_p = 0, prev_c = 0, prev_s = 0;
    for (int k : levels) {
        const auto s = seed + static_cast<std::uint64_t>(k);
        const NormEstimate ep = op_norm_estimate(p, k, 100, s, wp);
        const NormEstimate ec = op_norm_estimate(comp, k, 100, s, wc);
        const NormEstimate es = op_norm_estimate(sym, k, 100, s, ws);
        wp = ep.best_input;
        wc = ec.best_input;
        ws = es.best_input;
        c.contractive_levels[k] = ep.value;
        c.complement_levels[k] = ec.value;
        c.symmetry_levels[k] = es.value;
        monotone = monotone && ep.value >= prev_p * (1 - 1e-12) && ec.value >= prev_c * (1 - 1e-12) &&
                   es.value >= prev_s * (1 - 1e-12);
        prev_p = ep.value;
        prev_c = ec.value;
        prev_s = es.value;
    }
    c.bicontractive = true;
    c.symmetric = true;
    for (int k : levels) {
        c.bicontractive = c.bicontractive && c.contractive_levels[k] <= 1 + slack && c.complement_levels[k] <= 1 + slack;
        c.symmetric = c.symmetric && c.symmetry_levels[k] <= 1 + slack;
    }
    RcpOptions ro;
    ro.levels.assign(levels.begin(), levels.end());
    ro.seed = seed;
    c.rcp_sampled = rcp_test(p, ro, tol);

    const auto d = a.dim();
    std::vector<CMatrix> pb;
    for (Eigen::Index i = 0; i < d; ++i) pb.push_back(p.image(i));
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index l = 0; l < d; ++l) {
                const CMatrix& bj = a.basis()[static_cast<std::size_t>(j)];
                const CMatrix lhs = p.apply(pb[static_cast<std::size_t>(i)] * bj * pb[static_cast<std::size_t>(l)]);
                const CMatrix rhs = pb[static_cast<std::size_t>(i)] * pb[static_cast<std::size_t>(j)] * pb[static_cast<std::size_t>(l)];
                c.cond_exp_residual = std::max(c.cond_exp_residual, spectral_norm(lhs - rhs));
            }
        }
    }

    const Span range = detail::map_range(p);
    const auto rm = range.matrices();
    for (const auto& x : rm) {
        for (const auto& y : rm) {
            const CMatrix xy = x * y;
            c.range_product_residual = std::max(c.range_product_residual, range.residual(xy) * xy.norm());
            const CMatrix pxy = p.apply(xy);
            for (const auto& z : rm) {
                c.p_product_assoc_residual = std::max(
                    c.p_product_assoc_residual, spectral_norm(p.apply(pxy * z) - p.apply(x * p.apply(y * z))));
            }
        }
    }
    c.range_subalgebra = c.range_product_residual <= 1e-8;
    if (a.unit()) {
        const CMatrix p1 = p.apply(*a.unit());
        double u = 0.0;
        for (const auto& x : rm) u = std::max({u, spectral_norm(p.apply(p1 * x) - x), spectral_norm(p.apply(x * p1) - x)});
        c.p_product_unit_residual = u;
    }

    // ker P = range(I - P)
    const Span ker = detail::map_range(comp);
    const auto km = ker.matrices();
    for (const auto& k1 : km) {
        for (const auto& k2 : km) c.kernel_square_residual = std::max(c.kernel_square_residual, spectral_norm(k1 * k2));
        for (const auto& b : a.basis()) {
            c.kernel_ideal_residual =
                std::max({c.kernel_ideal_residual, ker.residual(k1 * b) * (k1 * b).norm(), ker.residual(b * k1) * (b * k1).norm()});
        }
    }

    for (int k : levels) {
        rep.values["norm_P_level_" + std::to_string(k)] = c.contractive_levels[k];
        rep.values["norm_I-P_level_" + std::to_string(k)] = c.complement_levels[k];
        rep.values["norm_I-2P_level_" + std::to_string(k)] = c.symmetry_levels[k];
    }
    rep.values["cond_exp_residual"] = c.cond_exp_residual;
    rep.values["range_product_residual"] = c.range_product_residual;
    rep.values["p_product_assoc_residual"] = c.p_product_assoc_residual;
    if (c.p_product_unit_residual) rep.values["p_product_unit_residual"] = *c.p_product_unit_residual;
    rep.values["kernel_square_residual"] = c.kernel_square_residual;
    rep.values["kernel_ideal_residual"] = c.kernel_ideal_residual;
    rep.check("P^2 = P", c.idempotence_residual, 1e-9);
    rep.info("bicontractive", c.bicontractive);
    rep.info("symmetric", c.symmetric);
    rep.info("conditional expectation", c.cond_exp_residual <= 1e-10, c.cond_exp_residual, 1e-10);
    rep.info("range is a subalgebra", c.range_subalgebra, c.range_product_residual, 1e-8);
    rep.info("rcp_test", c.rcp_sampled.passed, 0.0, 0.0, c.rcp_sampled.label);
    rep.check_true("symmetric => bicontractive", !c.symmetric || c.bicontractive);
    rep.check_true("norm estimates non-decreasing in level", monotone);
    return c;
}

}  // namespace realpos
