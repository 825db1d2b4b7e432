#pragma once

// Principal fractional powers x^r (0 < r <= 1) of accretive matrices by three
// independent routes, the F-transform x(1+x)^{-1} and its inverse, and the
// norm/angle estimates for powers as checkable reports.
//
//   series        sum_k C(r,k) (-1)^k (e - x)^k          (x in F)
//   shifted       lim_{eps->0+} (x + eps e)^r, Schur form (x in r)
//   balakrishnan  sin(r pi)/pi int_0^inf s^{r-1} (s + x)^{-1} x ds
//
// Accretivity forces the eigenvalue 0 (if present) to be semisimple with a
// reducing eigenspace: ker x = ker x*. Every route therefore splits off the
// kernel first; on it each definition gives 0 in the limit.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "realpos/cones.hpp"
#include "realpos/linalg.hpp"
#include "realpos/numrange.hpp"
#include "realpos/quadrature.hpp"
#include "realpos/report.hpp"

namespace realpos {

enum class PowerMethod { series, shifted, balakrishnan, cross };

inline const char* to_string(PowerMethod m) {
    switch (m) {
        case PowerMethod::series: return "series";
        case PowerMethod::shifted: return "shifted";
        case PowerMethod::balakrishnan: return "balakrishnan";
        case PowerMethod::cross: return "cross";
    }
    return "?";
}

inline PowerMethod parse_power_method(const std::string& s) {
    if (s == "series") return PowerMethod::series;
    if (s == "shifted") return PowerMethod::shifted;
    if (s == "balakrishnan") return PowerMethod::balakrishnan;
    if (s == "cross") return PowerMethod::cross;
    throw InputError("unknown power method '" + s + "'");
}

struct QuadratureConfig {
    int node_count = 200;        // panel budget per half-line piece of the integral
    int richardson_levels = 3;   // extrapolation depth for the eps ladder

    void validate() const {
        if (node_count < 16) throw InputError("quadrature node_count must be >= 16");
        if (richardson_levels < 1) throw InputError("richardson_levels must be >= 1");
    }
};

struct PowerResult {
    CMatrix value;
    std::map<std::string, double> diagnostics;
};

/// Carries every candidate value when the definitions of x^r disagree.
class MethodDisagreementError : public NumericError {
public:
    MethodDisagreementError(const std::string& what, std::vector<std::pair<std::string, CMatrix>> candidates)
        : NumericError(what), candidates_(std::move(candidates)) {}
    [[nodiscard]] const std::vector<std::pair<std::string, CMatrix>>& candidates() const { return candidates_; }

private:
    std::vector<std::pair<std::string, CMatrix>> candidates_;
};

namespace detail {

inline void require_exponent(double r, bool allow_one = true) {
    if (!(r > 0.0) || r > 1.0 || (!allow_one && r == 1.0)) {
        std::ostringstream os;
        os << "exponent r must lie in (0, 1" << (allow_one ? "]" : ")") << ", got " << r;
        throw InputError(os.str());
    }
}

inline double inf_norm(const CMatrix& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

/// Principal square root of an upper triangular matrix whose eigenvalues avoid
/// (-inf, 0] (Bjorck-Hammarling recurrence).
inline CMatrix sqrt_triangular(const CMatrix& t) {
    const auto n = t.rows();
    CMatrix r = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        r(j, j) = std::sqrt(t(j, j));
        for (Eigen::Index i = j - 1; i >= 0; --i) {
            cplx s = 0.0;
            for (Eigen::Index k = i + 1; k < j; ++k) s += r(i, k) * r(k, j);
            const cplx den = r(i, i) + r(j, j);
            if (den == cplx(0.0, 0.0)) throw NumericError("triangular square root: zero denominator");
            r(i, j) = (t(i, j) - s) / den;
        }
    }
    return r;
}

/// T^r for upper triangular T with spectrum in the open right half-plane:
/// repeated square roots until T is near I, binomial series, then squaring.
inline CMatrix power_triangular(const CMatrix& t, double r) {
    const auto n = t.rows();
    const CMatrix one = identity(n);
    CMatrix root = t;
    int s = 0;
    while (inf_norm(root - one) > 0.25) {
        if (++s > 64) throw NumericError("power_triangular: square-root phase did not converge");
        root = sqrt_triangular(root);
    }
    const CMatrix z = one - root;
    CMatrix y = one;
    CMatrix term = one;
    double c = 1.0;
    for (int k = 1; k < 400; ++k) {
        c *= (k - 1 - r) / k;
        term = term * z;
        y += c * term;
        if (std::abs(c) * inf_norm(term) < 1e-18) break;
    }
    for (int j = s - 1; j >= 0; --j) {
        y = y * y;
        const double e = r / std::ldexp(1.0, j);
        for (Eigen::Index i = 0; i < n; ++i) y(i, i) = principal_pow(t(i, i), e);
    }
    if (s == 0) {
        for (Eigen::Index i = 0; i < n; ++i) y(i, i) = principal_pow(t(i, i), r);
    }
    return y;
}

/// Orthonormal change of basis putting ker x first: V* x V = 0 (+) core.
struct Deflated {
    CMatrix v;
    Eigen::Index kernel_dim = 0;
    CMatrix core;
    double coupling = 0.0;  // size of the off-diagonal blocks that are dropped
};

inline Deflated deflate_kernel(const CMatrix& x) {
    const KernelSplit ks = kernel_split(x);
    Deflated d;
    d.v = ks.basis;
    d.kernel_dim = ks.kernel_dim;
    const CMatrix xv = d.v.adjoint() * x * d.v;
    const auto k = d.kernel_dim, m = x.rows() - k;
    d.core = xv.bottomRightCorner(m, m);
    if (k > 0 && m > 0) {
        d.coupling = std::max(xv.topRightCorner(k, m).cwiseAbs().maxCoeff(),
                              xv.bottomLeftCorner(m, k).cwiseAbs().maxCoeff());
    }
    return d;
}

inline CMatrix reinflate(const Deflated& d, const CMatrix& core_value) {
    const auto n = d.v.rows();
    CMatrix full = CMatrix::Zero(n, n);
    const auto m = core_value.rows();
    if (m > 0) full.bottomRightCorner(m, m) = core_value;
    return d.v * full * d.v.adjoint();
}

/// Neville-Richardson table for values sampled at h_k = h_0 2^{-k}; returns
/// the extrapolated value and the norm of each diagonal correction.
inline std::pair<CMatrix, std::vector<double>> richardson(const std::vector<CMatrix>& seq) {
    std::vector<std::vector<CMatrix>> tab(seq.size());
    std::vector<double> corrections;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        tab[k].push_back(seq[k]);
        for (std::size_t j = 1; j <= k; ++j) {
            const double f = std::ldexp(1.0, static_cast<int>(j)) - 1.0;
            tab[k].push_back(tab[k][j - 1] + (tab[k][j - 1] - tab[k - 1][j - 1]) / f);
        }
        if (k > 0) corrections.push_back((tab[k][k] - tab[k - 1][k - 1]).norm());
    }
    return {tab.back().back(), corrections};
}

/// Shifted power on an invertible accretive core (no kernel).
inline PowerResult shifted_core(const CMatrix& core, double r, const QuadratureConfig& quad, double ref_norm) {
    PowerResult out;
    const auto m = core.rows();
    const SpectrumResult sp = spectrum(core);
    double delta = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) delta = std::min(delta, std::abs(sp.eigenvalues(i)));
    const double eps0 = std::min(1e-3 * std::max(1.0, ref_norm), 1e-2 * delta);
    std::vector<CMatrix> ladder;
    for (int k = 0; k <= quad.richardson_levels; ++k) {
        const double eps = eps0 * std::ldexp(1.0, -k);
        ladder.push_back(power_triangular(sp.t + eps * identity(m), r));
    }
    auto [tri, corr] = richardson(ladder);
    out.diagnostics["eps0"] = eps0;
    out.diagnostics["smallest_eigenvalue_modulus"] = delta;
    for (std::size_t i = 0; i < corr.size(); ++i) out.diagnostics["ladder_correction_" + std::to_string(i + 1)] = corr[i];
    // The corrections must shrink; growth means the eps ladder is not in its
    // asymptotic regime.
    const double floor = 1e-13 * std::max(1.0, tri.norm());
    for (std::size_t i = 1; i < corr.size(); ++i) {
        if (corr[i] > floor && corr[i] > corr[i - 1]) {
            std::ostringstream os;
            os << "shifted power: extrapolation diverges (ladder corrections";
            for (double c : corr) os << ' ' << c;
            os << ")";
            throw NumericError(os.str());
        }
    }
    out.value = sp.q * tri * sp.q.adjoint();
    return out;
}

}  // namespace detail

/// Binomial series on F. Truncation uses ||(e-x)^K|| times the coefficient
/// tail sum_{k>K} |C(r,k)| = 1 - sum_{k<=K} |C(r,k)|.
inline PowerResult power_series_detailed(const CMatrix& x, double r, const AmbientContext& ctx,
                                         const Tolerances& tol = {}, long max_terms = 200000) {
    detail::require_exponent(r);
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    const auto mem = membership(x, ctx, tol);
    if (!mem.in_F) {
        std::ostringstream os;
        os << "power_series: argument is not in cone F (||e - x|| - 1 = " << mem.F_residual << ")";
        throw PreconditionError(os.str());
    }
    PowerResult out;
    if (r == 1.0) {
        out.value = x;
        return out;
    }
    const detail::Deflated d = detail::deflate_kernel(xc);
    const auto m = d.core.rows();
    CMatrix value = CMatrix::Zero(m, m);
    if (m > 0) {
        const CMatrix z = identity(m) - d.core;
        CMatrix term = identity(m);
        value = identity(m);
        double c = 1.0, abs_sum = 0.0, bound = 1.0;
        long k = 1;
        for (; k <= max_terms; ++k) {
            c *= (k - 1 - r) / k;
            term = term * z;
            value += c * term;
            abs_sum += std::abs(c);
            bound = term.norm() * std::max(0.0, 1.0 - abs_sum);
            if (bound < tol.conv_tol) break;
        }
        out.diagnostics["terms"] = static_cast<double>(std::min(k, max_terms));
        out.diagnostics["tail_bound"] = bound;
        if (!(bound < tol.conv_tol)) {
            std::ostringstream os;
            os << "power_series: tail bound " << bound << " still above " << tol.conv_tol << " after " << max_terms
               << " terms (spectrum of e - x on the unit circle)";
            throw NumericError(os.str());
        }
    }
    out.diagnostics["kernel_dim"] = static_cast<double>(d.kernel_dim);
    out.value = ctx.expand(detail::reinflate(d, value));
    return out;
}

inline CMatrix power_series(const CMatrix& x, double r, const AmbientContext& ctx, const Tolerances& tol = {}) {
    return power_series_detailed(x, r, ctx, tol).value;
}

/// lim_{eps->0+} (x + eps e)^r evaluated on the Schur form with a Richardson
/// eps ladder.
inline PowerResult power_shifted_detailed(const CMatrix& x, double r, const AmbientContext& ctx,
                                          const QuadratureConfig& quad = {}, const Tolerances& tol = {}) {
    detail::require_exponent(r);
    quad.validate();
    require_accretive(x, ctx, tol, "power_shifted");
    PowerResult out;
    if (r == 1.0) {
        out.value = x;
        return out;
    }
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    const detail::Deflated d = detail::deflate_kernel(xc);
    CMatrix core_value(0, 0);
    if (d.core.rows() > 0) {
        PowerResult core = detail::shifted_core(d.core, r, quad, spectral_norm(xc));
        core_value = std::move(core.value);
        out.diagnostics = std::move(core.diagnostics);
    }
    out.diagnostics["kernel_dim"] = static_cast<double>(d.kernel_dim);
    out.diagnostics["kernel_coupling"] = d.coupling;
    out.value = ctx.expand(detail::reinflate(d, core_value));
    return out;
}

inline CMatrix power_shifted(const CMatrix& x, double r, const AmbientContext& ctx, const QuadratureConfig& quad = {},
                             const Tolerances& tol = {}) {
    return power_shifted_detailed(x, r, ctx, quad, tol).value;
}

/// Balakrishnan integral. With c = ||x|| the half-line is split at s = c:
///   [0, c]:   s = c v^{1/r}          -> (c^r / r)     int_0^1 (s + x)^{-1} x dv
///   [c, inf): s = c w^{-1/(1-r)}     -> (c^r / (1-r)) int_0^1 (1/c)(1 + x/s)^{-1} x dw
/// Both integrands are bounded; each piece is integrated adaptively.
inline PowerResult power_balakrishnan_detailed(const CMatrix& x, double r, const AmbientContext& ctx,
                                               const QuadratureConfig& quad = {}, const Tolerances& tol = {}) {
    detail::require_exponent(r);
    quad.validate();
    require_accretive(x, ctx, tol, "power_balakrishnan");
    PowerResult out;
    if (r == 1.0) {
        out.value = x;
        return out;
    }
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    const detail::Deflated d = detail::deflate_kernel(xc);
    const double c = spectral_norm(d.core);
    out.diagnostics["kernel_dim"] = static_cast<double>(d.kernel_dim);
    if (d.core.rows() == 0 || c == 0.0) {
        out.value = CMatrix::Zero(x.rows(), x.cols());
        return out;
    }
    const auto n = d.core.rows();
    const SpectrumResult sp = spectrum(d.core);
    const CMatrix& t = sp.t;
    const CMatrix one = identity(n);

    auto near = [&](double v) -> CMatrix {
        const double s = c * std::pow(v, 1.0 / r);
        CMatrix a = t + s * one;
        return a.triangularView<Eigen::Upper>().solve(t);
    };
    auto far = [&](double w) -> CMatrix {
        const double u = std::pow(w, 1.0 / (1.0 - r)) / c;  // 1/s
        CMatrix a = one + u * t;
        return a.triangularView<Eigen::Upper>().solve(t) / c;
    };
    const double pref = std::sin(r * pi) / pi * std::pow(c, r);
    const double target = 1e-11 * std::max(1.0, c);
    const QuadratureResult qa = integrate_gk(near, 0.0, 1.0, target / (pref / r), quad.node_count);
    const QuadratureResult qb = integrate_gk(far, 0.0, 1.0, target / (pref / (1.0 - r)), quad.node_count);
    const double err = pref * (qa.error_estimate / r + qb.error_estimate / (1.0 - r));
    out.diagnostics["error_estimate"] = err;
    out.diagnostics["evaluations"] = qa.evaluations + qb.evaluations;
    out.diagnostics["panels"] = qa.panels + qb.panels;
    const double limit = 1e-6 * std::pow(c, r);
    if (!(err <= limit)) {
        std::ostringstream os;
        os << "power_balakrishnan: quadrature error estimate " << err << " exceeds " << limit
           << "; increase node_count (currently " << quad.node_count << ")";
        throw NumericError(os.str());
    }
    const CMatrix tri = pref * (qa.value / r + qb.value / (1.0 - r));
    out.value = ctx.expand(detail::reinflate(d, sp.q * tri * sp.q.adjoint()));
    return out;
}

inline CMatrix power_balakrishnan(const CMatrix& x, double r, const AmbientContext& ctx,
                                  const QuadratureConfig& quad = {}, const Tolerances& tol = {}) {
    return power_balakrishnan_detailed(x, r, ctx, quad, tol).value;
}

struct CrossValidatedPower {
    CMatrix value;  // the shifted-spectral value
    std::vector<std::pair<std::string, CMatrix>> candidates;
    std::map<std::string, double> deviations;  // "a-b" -> ||a - b||
    double max_deviation = 0.0;
    double tolerance = 0.0;
    std::vector<std::string> notes;
};

/// Computes x^r by the shifted route and cross-checks it against every other
/// applicable definition; throws MethodDisagreementError on disagreement.
inline CrossValidatedPower power_cross(const CMatrix& x, double r, const AmbientContext& ctx,
                                       const QuadratureConfig& quad = {}, const Tolerances& tol = {}) {
    detail::require_exponent(r);
    require_accretive(x, ctx, tol, "power");
    CrossValidatedPower out;
    out.value = power_shifted(x, r, ctx, quad, tol);
    out.candidates.emplace_back("shifted", out.value);
    if (membership(x, ctx, tol).in_F) {
        try {
            out.candidates.emplace_back("series", power_series(x, r, ctx, tol));
        } catch (const NumericError& e) {
            out.notes.push_back(std::string("series skipped: ") + e.what());
        }
    }
    if (r < 1.0) out.candidates.emplace_back("balakrishnan", power_balakrishnan(x, r, ctx, quad, tol));
    const double nx = spectral_norm(ctx.compress(x, tol.eq_tol));
    out.tolerance = 1e-6 * (1.0 + nx);
    for (std::size_t i = 0; i < out.candidates.size(); ++i) {
        for (std::size_t j = i + 1; j < out.candidates.size(); ++j) {
            const double dev = spectral_norm(out.candidates[i].second - out.candidates[j].second);
            out.deviations[out.candidates[i].first + "-" + out.candidates[j].first] = dev;
            out.max_deviation = std::max(out.max_deviation, dev);
        }
    }
    if (out.max_deviation > out.tolerance) {
        std::ostringstream os;
        os << "power: definitions of x^" << r << " disagree (max deviation " << out.max_deviation << " > "
           << out.tolerance << ")";
        throw MethodDisagreementError(os.str(), out.candidates);
    }
    return out;
}

inline CMatrix power(const CMatrix& x, double r, const AmbientContext& ctx, const Tolerances& tol = {}) {
    return power_cross(x, r, ctx, {}, tol).value;
}

inline CMatrix power(const CMatrix& x, double r, const AmbientContext& ctx, PowerMethod method,
                     const QuadratureConfig& quad = {}, const Tolerances& tol = {}) {
    switch (method) {
        case PowerMethod::series: return power_series(x, r, ctx, tol);
        case PowerMethod::shifted: return power_shifted(x, r, ctx, quad, tol);
        case PowerMethod::balakrishnan: return power_balakrishnan(x, r, ctx, quad, tol);
        case PowerMethod::cross: return power_cross(x, r, ctx, quad, tol).value;
    }
    throw InputError("unknown power method");
}

/// F(x) = x (e + x)^{-1} = e - (e + x)^{-1}.
inline CMatrix f_transform(const CMatrix& x, const AmbientContext& ctx, const Tolerances& tol = {}) {
    require_accretive(x, ctx, tol, "f_transform");
    const CMatrix xc = ctx.compress(x, tol.eq_tol);
    const CMatrix res = identity(xc.rows()) + xc;
    return ctx.expand(res.partialPivLu().solve(xc));  // commutes with x
}

struct FInverseResult {
    CMatrix value;
    double condition = 0.0;  // condition number of e - y
};

/// y (e - y)^{-1}; the inverse of the F-transform.
inline FInverseResult f_inverse_detailed(const CMatrix& y, const AmbientContext& ctx, const Tolerances& tol = {}) {
    const CMatrix yc = ctx.compress(y, tol.eq_tol);
    const CMatrix a = identity(yc.rows()) - yc;
    FInverseResult out;
    out.condition = condition_number(a);
    if (!(out.condition < 1e14)) {
        std::ostringstream os;
        os << "f_inverse: e - y is singular (condition number " << out.condition << ")";
        throw InputError(os.str());
    }
    out.value = ctx.expand(a.partialPivLu().solve(yc));
    return out;
}

inline CMatrix f_inverse(const CMatrix& y, const AmbientContext& ctx, const Tolerances& tol = {}) {
    return f_inverse_detailed(y, ctx, tol).value;
}

/// sin(t pi) / (pi t (1 - t)): the norm bound for x^t with ||x|| = 1 in an
/// operator algebra (the Banach-algebra constant is twice this).
inline double power_norm_bound(double t) { return std::sin(t * pi) / (pi * t * (1.0 - t)); }

/// Gamma(t/2) Gamma((1-t)/2) / (2 sqrt(pi) Gamma(t) Gamma(1-t)), valid for ||x|| <= 1.
inline double drury_bound(double t) {
    return std::tgamma(t / 2) * std::tgamma((1 - t) / 2) / (2 * std::sqrt(pi) * std::tgamma(t) * std::tgamma(1 - t));
}

/// Limit of x^{1/n} as n -> infinity from repeated square roots
/// x^{1/2}, x^{1/4}, ..., x^{1/n_max}, Richardson-extrapolated in h = 1/n.
struct RootLimit {
    CMatrix limit;                  // extrapolated lim x^{1/n}
    CMatrix last_root;              // x^{1/n_max}
    std::vector<CMatrix> roots;     // x^{1/2^k}, k = 0..K
};

inline RootLimit root_limit(const CMatrix& x, const AmbientContext& ctx, long n_max = 1024, const Tolerances& tol = {}) {
    if (n_max < 2 || (n_max & (n_max - 1)) != 0) throw InputError("root_limit: n_max must be a power of two >= 2");
    require_accretive(x, ctx, tol, "root_limit");
    RootLimit out;
    out.roots.push_back(x);
    // Square roots of accretive elements are accretive, so each step stays in r.
    Tolerances loose = tol;
    loose.psd_tol = std::max(tol.psd_tol, 1e-8 * std::max(1.0, x.norm()));
    for (long n = 2; n <= n_max; n *= 2) out.roots.push_back(power_shifted(out.roots.back(), 0.5, ctx, {}, loose));
    out.last_root = out.roots.back();
    const std::size_t levels = std::min<std::size_t>(7, out.roots.size());
    std::vector<CMatrix> tail(out.roots.end() - static_cast<std::ptrdiff_t>(levels), out.roots.end());
    out.limit = detail::richardson(tail).first;
    return out;
}

/// Identities and inequalities satisfied by powers of an accretive element.
inline VerificationReport power_property_report(const CMatrix& x, const AmbientContext& ctx,
                                                const std::vector<double>& grid, const Tolerances& tol = {}) {
    for (double t : grid) {
        if (!(t > 0 && t < 1)) throw InputError("power_property_report: exponents must lie in (0, 1)");
    }
    require_accretive(x, ctx, tol, "power_property_report");
    VerificationReport rep;
    rep.suite = "bal";
    rep.inputs_digest = digest(x);
    const double nx = spectral_norm(ctx.compress(x, tol.eq_tol));
    const bool xin_F = membership(x, ctx, tol).in_F;
    rep.values["norm"] = nx;

    std::map<double, CMatrix> cache;
    bool cross_ok = true;
    double worst_dev = 0.0;
    auto pw = [&](const CMatrix& base, double t) -> CMatrix {
        try {
            auto cv = power_cross(base, t, ctx, {}, tol);
            worst_dev = std::max(worst_dev, cv.max_deviation / cv.tolerance);
            return cv.value;
        } catch (const MethodDisagreementError&) {
            cross_ok = false;
            return power_shifted(base, t, ctx, {}, tol);
        }
    };
    auto xt = [&](double t) -> const CMatrix& {
        auto it = cache.find(t);
        if (it == cache.end()) it = cache.emplace(t, t == 1.0 ? x : pw(x, t)).first;
        return it->second;
    };

    const SectorVerdict sx = sectorial_angle(ctx.compress(x, tol.eq_tol));
    const double theta = sx.angle.value_or(pi);
    rep.values["angle"] = theta;

    double semi = 0.0, scal = 0.0, est = 0.0;
    double bal = -1e300, dru = -1e300, sharp = -1e300, banach = -1e300;
    bool r_closed = true, f_closed = true;
    const double c = 3.0;
    const CMatrix cx = c * x;
    for (double t : grid) {
        const CMatrix& p = xt(t);
        for (double s : grid) {
            if (s <= t && s + t <= 1.0 + 1e-12) {
                semi = std::max(semi, spectral_norm(xt(s) * p - xt(std::min(1.0, s + t))) / std::pow(1.0 + nx, 2));
            }
        }
        scal = std::max(scal, spectral_norm(pw(cx, t) - std::pow(c, t) * p) / (1.0 + c * nx));
        if (xin_F) {
            for (double r : grid) est = std::max(est, spectral_norm(pw(p, r) - xt(t * r)) / (1.0 + nx));
        }
        const double np = spectral_norm(ctx.compress(p, tol.eq_tol));
        bal = std::max(bal, np - power_norm_bound(t) * std::pow(nx, t));
        if (nx <= 1.0 + tol.eq_tol) dru = std::max(dru, np - drury_bound(t));
        const auto sp = sectorial_angle(ctx.compress(p, tol.eq_tol));
        const double ang = sp.angle.value_or(pi);
        sharp = std::max(sharp, ang - t * theta);
        banach = std::max(banach, ang - (t * theta + (1 - t) * pi / 2));
        const auto mp = membership(p, ctx, tol);
        r_closed = r_closed && mp.in_r;
        if (xin_F) f_closed = f_closed && mp.in_F;
    }
    rep.check_true("definitions coincide", cross_ok);
    rep.values["max_deviation_over_tolerance"] = worst_dev;
    rep.check("semigroup x^s x^t = x^(s+t)", semi, 1e-7);
    rep.check("scaling (cx)^t = c^t x^t", scal, 1e-7);
    if (xin_F) {
        rep.check("(x^t)^r = x^(tr) on F", est, 1e-7);
    } else {
        rep.info("(x^t)^r = x^(tr) on F", true, 0.0, 0.0, "not applicable: x not in F");
    }
    rep.check("||x^t|| <= sin(t pi)/(pi t (1-t)) ||x||^t", bal, tol.eq_tol);
    if (nx <= 1.0 + tol.eq_tol) {
        rep.check("Drury bound for ||x|| <= 1", dru, tol.eq_tol);
    } else {
        rep.info("Drury bound for ||x|| <= 1", true, 0.0, 0.0, "not applicable: ||x|| > 1");
    }
    rep.check("angle(x^t) <= t angle(x)", sharp, 1e-6);
    rep.check("angle(x^t) <= t angle(x) + (1-t) pi/2", banach, 1e-6);
    rep.check_true("x^t accretive", r_closed);
    if (xin_F) rep.check_true("x^t in F", f_closed);
    return rep;
}

/// x^{1/n} acts as an approximate identity on x: ||x^{1/n} x - x|| -> 0.
/// The decay is first order in 1/n, so the check extrapolates the sequence
/// x^{1/n} x to n = infinity and compares with x.
inline VerificationReport root_bai_check(const CMatrix& x, const AmbientContext& ctx, long n_max = 1024,
                                         const Tolerances& tol = {}) {
    VerificationReport rep;
    rep.suite = "root_bai";
    rep.inputs_digest = digest(x);
    const RootLimit rl = root_limit(x, ctx, n_max, tol);
    const double nx = spectral_norm(x);
    double prev = std::numeric_limits<double>::infinity();
    int increases = 0;
    for (std::size_t k = 0; k < rl.roots.size(); ++k) {
        const double res = spectral_norm(rl.roots[k] * x - x);
        rep.values["residual_n" + std::to_string(1L << k)] = res;
        if (res > prev * (1 + 1e-9) + 1e-14) ++increases;
        prev = res;
    }
    rep.values["final_residual"] = prev;
    rep.info("residuals non-increasing", increases == 0, increases, 0.0);
    rep.check("lim x^(1/n) x = x", spectral_norm(rl.limit * x - x), 1e-6 * (1.0 + nx));
    return rep;
}

}  // namespace realpos
