#pragma once

// Seeded verification suites behind `realpos verify`.

#include <chrono>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "realpos/algebra.hpp"
#include "realpos/calculus.hpp"
#include "realpos/cones.hpp"
#include "realpos/maps.hpp"
#include "realpos/numrange.hpp"
#include "realpos/report.hpp"

namespace realpos {

struct SuiteOptions {
    std::uint64_t seed = 0;
    int count = 10;
    Eigen::Index n = 4;
    Tolerances tol;
    std::string fixture;  // suite-specific fixture selector; empty = default mix
};

/// Suites in the order `verify all` runs them.
inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"chaccr", "bal", "sectt", "stam", "lump", "supp3",
                                                "ws", "decompose", "hsa", "aarnes", "proj", "rcp"};
    return names;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of instance i of a suite; independent of the other suites run.
inline std::uint64_t instance_seed(std::uint64_t seed, const std::string& tag, int i) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return splitmix64(splitmix64(seed ^ h) + static_cast<std::uint64_t>(i));
}

namespace detail {

/// Appends the conditions of `from` to `to`, prefixing names.
inline void merge_report(VerificationReport& to, const VerificationReport& from, const std::string& prefix) {
    for (auto c : from.conditions) {
        c.name = prefix + c.name;
        to.conditions.push_back(std::move(c));
    }
    for (const auto& [k, v] : from.values) to.values[prefix + k] = v;
}

inline CMatrix diag_matrix(const std::vector<cplx>& d) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return m;
}

inline CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
    CMatrix m = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

/// Hermitian unitary W diag(+-1) W* with at least one of each sign when k > 1.
inline CMatrix random_hermitian_unitary(Eigen::Index k, Rng& rng) {
    const CMatrix w = random_unitary(k, rng);
    std::vector<cplx> d(static_cast<std::size_t>(k));
    for (auto& v : d) v = uniform(rng) < 0.5 ? -1.0 : 1.0;
    if (k > 1) {
        d[0] = 1.0;
        d[1] = -1.0;
    }
    return w * diag_matrix(d) * w.adjoint();
}

inline std::uint64_t next_seed(Rng& rng) { return rng(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// one instance per suite

/// Even instances are accretive by construction, odd ones unconstrained.
inline VerificationReport chaccr_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    const CMatrix x = i % 2 == 0 ? random_accretive(n, seed) : random_matrix(n, seed);
    return chaccr_verify(x, AmbientContext::full(n), log_grid(1e-2, 1e2, 20), tol);
}

inline const std::vector<double>& power_grid() {
    static const std::vector<double> g{0.1, 0.3, 0.5, 0.7, 0.9};
    return g;
}

/// Accretive test element: general, rescaled to norm <= 1, or in F.
inline CMatrix power_instance_matrix(Eigen::Index n, std::uint64_t seed, int i) {
    Rng rng = make_rng(seed);
    const CMatrix x = random_accretive(n, detail::next_seed(rng));
    const auto ctx = AmbientContext::full(n);
    switch (i % 3) {
        case 0: return x;
        case 1: return x * (uniform(rng, 0.2, 1.0) / spectral_norm(x));
        default: return f_transform(x, ctx);
    }
}

/// Power identities, norm and angle bounds, and k-th root inversion.
inline VerificationReport bal_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    const auto ctx = AmbientContext::full(n);
    const CMatrix x = power_instance_matrix(n, seed, i);
    VerificationReport rep = power_property_report(x, ctx, power_grid(), tol);
    const double nx = spectral_norm(x);
    double worst = 0.0;
    for (int k : {2, 3, 4}) {
        const CMatrix root = power(x, 1.0 / k, ctx, tol);
        CMatrix back = root;
        for (int j = 1; j < k; ++j) back = back * root;
        const double res = spectral_norm(back - x);
        rep.values["root_residual_k" + std::to_string(k)] = res;
        worst = std::max(worst, res);
    }
    rep.check("(x^(1/k))^k = x for k = 2, 3, 4", worst, 1e-6 * (1.0 + nx));
    return rep;
}

/// Angle laws for x^t and the bound angle(x^(1/n)) <= pi/(2n).
inline VerificationReport sectt_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    (void)i;
    const auto ctx = AmbientContext::full(n);
    Rng rng = make_rng(seed);
    const double cap = uniform(rng, 0.1, 1.0) * pi / 2;
    const CMatrix x = random_accretive(n, detail::next_seed(rng), cap);
    VerificationReport rep;
    rep.suite = "sectt";
    rep.inputs_digest = digest(x);
    const double theta = sectorial_angle(x).angle.value_or(pi);
    rep.values["angle"] = theta;
    double sharp = -1e300, banach = -1e300, roots = -1e300;
    for (double t : power_grid()) {
        const double a = sectorial_angle(power(x, t, ctx, tol)).angle.value_or(pi);
        sharp = std::max(sharp, a - t * theta);
        banach = std::max(banach, a - (t * theta + (1 - t) * pi / 2));
    }
    for (int m : {2, 4, 8, 16}) {
        const double a = sectorial_angle(power(x, 1.0 / m, ctx, tol)).angle.value_or(pi);
        rep.values["angle_root_" + std::to_string(m)] = a;
        roots = std::max(roots, a - pi / (2.0 * m));
    }
    rep.check("angle(x^t) <= t angle(x)", sharp, 1e-6);
    rep.check("angle(x^t) <= t angle(x) + (1-t) pi/2", banach, 1e-6);
    rep.check("angle(x^(1/n)) <= pi/(2n)", roots, 1e-6);
    return rep;
}

/// ||e - F(x)|| <= min(1, 1/d(-1, W(x))) and F^{-1}(F(x)) = x.
inline VerificationReport stam_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    const auto ctx = AmbientContext::full(n);
    Rng rng = make_rng(seed);
    CMatrix x = random_accretive(n, detail::next_seed(rng));
    if (i % 2 == 1) x *= std::exp(uniform(rng, -3.0, 3.0));
    VerificationReport rep;
    rep.suite = "stam";
    rep.inputs_digest = digest(x);
    const CMatrix f = f_transform(x, ctx, tol);
    const double dist = dist_to_point(x, cplx(-1.0, 0.0));
    const double bound = std::min(1.0, 1.0 / dist);
    const double lhs = spectral_norm(identity(n) - f);
    const FInverseResult inv = f_inverse_detailed(f, ctx, tol);
    rep.values["distance_to_minus_one"] = dist;
    rep.values["condition"] = inv.condition;
    rep.check("||e - F(x)|| <= min(1, 1/d(-1, W(x)))", lhs - bound, 1e-8);
    rep.check("F^-1(F(x)) = x", spectral_norm(inv.value - x), 1e-8 * (1.0 + inv.condition));
    rep.check_true("F(x) in F", membership(f, ctx, tol).in_F);
    return rep;
}

inline VerificationReport lump_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    (void)i;
    return lump_check(random_idempotent(n, seed, 1e3), AmbientContext::full(n), tol);
}

/// Properties of the support idempotent s(x).
inline void support_checks(VerificationReport& rep, const CMatrix& x, const std::string& label,
                           const AmbientContext& ctx, const Tolerances& tol) {
    const SupportIdempotent s = support_idem(x, ctx, tol);
    const double nx = std::max(1.0, spectral_norm(x));
    rep.check(label + ": Riesz and root-limit supports agree", s.agreement_residual, 1e-6);
    rep.check(label + ": s^2 = s", spectral_norm(s.s * s.s - s.s), 1e-9);
    rep.check(label + ": s x = x s = x", std::max(spectral_norm(s.s * x - x), spectral_norm(x * s.s - x)), 1e-9 * nx);
    rep.check_true(label + ": s in F", membership(s.s, ctx, tol).in_F);
}

/// Pairs with a common eigenframe (range of x inside range of y) or independent ones.
inline std::pair<CMatrix, CMatrix> supp3_pair(Eigen::Index n, std::uint64_t seed, int i) {
    Rng rng = make_rng(seed);
    auto pick = [&](Eigen::Index lo, Eigen::Index hi) {
        return static_cast<Eigen::Index>(std::uniform_int_distribution<long>(lo, hi)(rng));
    };
    auto core = [&](Eigen::Index k) {
        CMatrix c = CMatrix::Zero(n, n);
        if (k < n) c.bottomRightCorner(n - k, n - k) = random_accretive(n - k, detail::next_seed(rng));
        return c;
    };
    const Eigen::Index ky = pick(0, n - 1);
    if (i % 2 == 0) {
        const Eigen::Index kx = pick(ky, n);
        const CMatrix v = random_unitary(n, rng);
        return {v * core(kx) * v.adjoint(), v * core(ky) * v.adjoint()};
    }
    const Eigen::Index kx = pick(0, n - 1);
    const CMatrix v = random_unitary(n, rng);
    const CMatrix w = random_unitary(n, rng);
    return {v * core(kx) * v.adjoint(), w * core(ky) * w.adjoint()};
}

inline VerificationReport supp3_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    const auto [x, y] = supp3_pair(n, seed, i);
    const auto a = SubalgebraBasis::full(n);
    VerificationReport rep = supp_order(x, y, a, tol);
    support_checks(rep, x, "x", a.ambient(), tol);
    support_checks(rep, y, "y", a.ambient(), tol);
    return rep;
}

/// Accretive elements of three algebra families: invertible in M_n, with an
/// orthogonally complemented kernel in M_n, and in a block-diagonal algebra
/// whose element vanishes on one block (support different from the unit).
struct AlgebraFixture {
    SubalgebraBasis a;
    CMatrix x;
    std::string family;
};

inline AlgebraFixture algebra_fixture(Eigen::Index n, std::uint64_t seed, int i) {
    Rng rng = make_rng(seed);
    switch (i % 3) {
        case 0: return {SubalgebraBasis::full(n), random_accretive(n, detail::next_seed(rng)), "invertible"};
        case 1: {
            const auto k = static_cast<Eigen::Index>(std::uniform_int_distribution<long>(1, n)(rng));
            return {SubalgebraBasis::full(n), random_accretive_singular(n, k, detail::next_seed(rng)), "normal-kernel"};
        }
        default: {
            if (n < 2) return {SubalgebraBasis::full(n), CMatrix::Zero(n, n), "zero"};
            const Eigen::Index k = n / 2, m = n - k;
            CMatrix top = random_accretive_singular(k, static_cast<Eigen::Index>(
                                                            std::uniform_int_distribution<long>(0, k - 1)(rng)),
                                                    detail::next_seed(rng));
            return {SubalgebraBasis::block_diagonal({k, m}), detail::block_diag(top, CMatrix::Zero(m, m)),
                    "block support"};
        }
    }
}

inline VerificationReport ws_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    const AlgebraFixture f = algebra_fixture(n, seed, i);
    VerificationReport rep = ws_suite(f.x, f.a, tol);
    rep.values["family"] = static_cast<double>(i % 3);
    return rep;
}

/// b = x - y with x, y in F/2, for ||b|| <= 0.99.
inline VerificationReport decompose_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    (void)i;
    Rng rng = make_rng(seed);
    const double nb = uniform(rng, 0.0, 0.99);
    const CMatrix b = random_contraction(n, detail::next_seed(rng), nb);
    const HalfFDecomposition d = decompose_halfF(b, AmbientContext::full(n), tol);
    VerificationReport rep;
    rep.suite = "decompose";
    rep.inputs_digest = digest(b);
    rep.check("2x in F", d.x_F_residual, tol.eq_tol);
    rep.check("2y in F", d.y_F_residual, tol.eq_tol);
    rep.check("x - y = b up to rounding of e +- b", d.reconstruction_error, d.rounding_bound);
    rep.info("x - y = b bit for bit", d.reconstruction_error == 0.0, d.reconstruction_error, 0.0);
    rep.values["norm_b"] = spectral_norm(b);
    return rep;
}

/// Hereditary subalgebra from z = F(x) for singular accretive x, with the
/// ba(x) = ba(F(x)) and idempotent-ideal checks.
inline VerificationReport hsa_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    (void)i;
    Rng rng = make_rng(seed);
    const auto a = SubalgebraBasis::full(n);
    const auto& ctx = a.ambient();
    const auto k = static_cast<Eigen::Index>(std::uniform_int_distribution<long>(0, n - 1)(rng));
    const CMatrix x = random_accretive_singular(n, k, detail::next_seed(rng));
    const CMatrix z = f_transform(x, ctx, tol);
    HsaResult h = hsa_from_z(z, a, tol);
    VerificationReport rep = std::move(h.report);
    rep.inputs_digest = digest(std::vector<const CMatrix*>{&x, &z});
    detail::merge_report(rep, ba_ftransform_equal(x, ctx, tol), "ba: ");
    // q: orthogonal projection onto a random subspace
    const auto r = static_cast<Eigen::Index>(std::uniform_int_distribution<long>(0, n)(rng));
    const CMatrix u = random_unitary(n, rng);
    const CMatrix q = u.leftCols(r) * u.leftCols(r).adjoint();
    detail::merge_report(rep, idempotent_ideal(q, a, z, tol), "ideal: ");
    return rep;
}

/// A = xAx, A = xA = Ax, s(x) unit for A; true for invertible x, false otherwise.
inline VerificationReport aarnes_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    const AlgebraFixture f = algebra_fixture(n, seed, i);
    VerificationReport rep = aarnes_kadison_check(f.x, f.a, tol);
    rep.values["family"] = static_cast<double>(i % 3);
    return rep;
}

// ---------------------------------------------------------------------------
// projection fixtures

/// theta a *-automorphism of period 2 and q a central projection of A fixed
/// by theta, with theta the identity on (1 - q)A.
struct ProjectionFixture {
    SubalgebraBasis a;
    LinearMapOnAlgebra theta;
    CMatrix q;
    std::string family;
};

inline ProjectionFixture projection_fixture(Eigen::Index n, std::uint64_t seed, int i) {
    Rng rng = make_rng(seed);
    const int family = i % 3;
    if (family == 0 || n < 2) {
        auto a = SubalgebraBasis::full(n);
        const CMatrix u = detail::random_hermitian_unitary(n, rng);
        auto th = LinearMapOnAlgebra::from_function(a, a, [u](const CMatrix& m) { return CMatrix(u * m * u); });
        return {a, th, identity(n), "Ad(u) on M_n"};
    }
    if (family == 1) {
        auto a = SubalgebraBasis::diagonal(n);
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto s_size = static_cast<std::size_t>(std::uniform_int_distribution<long>(1, n)(rng));
        std::vector<Eigen::Index> sigma(static_cast<std::size_t>(n));
        std::iota(sigma.begin(), sigma.end(), 0);
        for (std::size_t j = 0; j + 1 < s_size; j += 2) {
            sigma[static_cast<std::size_t>(idx[j])] = idx[j + 1];
            sigma[static_cast<std::size_t>(idx[j + 1])] = idx[j];
        }
        CMatrix q = CMatrix::Zero(n, n);
        for (std::size_t j = 0; j < s_size; ++j) q(idx[j], idx[j]) = 1.0;
        auto th = LinearMapOnAlgebra::from_function(a, a, [sigma, n](const CMatrix& m) {
            CMatrix d = CMatrix::Zero(n, n);
            for (Eigen::Index j = 0; j < n; ++j) d(j, j) = m(sigma[static_cast<std::size_t>(j)], sigma[static_cast<std::size_t>(j)]);
            return d;
        });
        return {a, th, q, "permutation on diagonal"};
    }
    const Eigen::Index k = (n + 1) / 2, m = n - k;
    auto a = SubalgebraBasis::block_diagonal({k, m});
    const CMatrix u = detail::block_diag(detail::random_hermitian_unitary(k, rng), identity(m));
    auto th = LinearMapOnAlgebra::from_function(a, a, [u](const CMatrix& x) { return CMatrix(u * x * u); });
    const CMatrix q = detail::block_diag(identity(k), CMatrix::Zero(m, m));
    return {a, th, q, "Ad(u + 1) on block diagonal"};
}

/// Averaging onto the scalars in the 2x2 diagonal algebra.
inline LinearMapOnAlgebra scalar_averaging() {
    const auto d = SubalgebraBasis::diagonal(2);
    return LinearMapOnAlgebra::from_function(d, d, [](const CMatrix& a) { return CMatrix(0.5 * a.trace() * identity(2)); });
}

inline VerificationReport proj_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    const ProjectionFixture f = projection_fixture(n, seed, i);
    SymmetricProjection sp = build_symmetric_projection(f.theta, f.q, f.a, tol, seed);
    VerificationReport rep = std::move(sp.certificate);
    rep.suite = "proj";
    rep.values["family"] = static_cast<double>(i % 3);
    if (i == 0) {
        const ProjectionClassification c = classify_projection(scalar_averaging(), {1, 2, 3}, tol, seed);
        detail::merge_report(rep, c.report, "averaging: ");
        rep.check_true("averaging: symmetric", c.symmetric);
        rep.check("averaging: conditional expectation", c.cond_exp_residual, 1e-10);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// rcp

/// The transpose on M_2 is positive but not 2-positive: expect a certified
/// witness at level 2 and a Choi matrix with eigenvalue -1.
inline VerificationReport rcp_transpose_instance(std::uint64_t seed, const Tolerances& tol) {
    const auto t = transpose_map(2);
    RcpOptions opt;
    opt.seed = seed;
    const RcpResult r = rcp_test(t, opt, tol);
    VerificationReport rep;
    rep.suite = "rcp";
    rep.inputs_digest = digest(t.action());
    rep.info("transpose: " + r.label, r.passed);
    rep.check("Choi min eigenvalue <= -1", r.choi_min_eig.value_or(0.0) - (-1.0), 1e-9);
    rep.check_true("certified witness found", r.witness.has_value() && r.certified == false);
    if (r.witness) {
        rep.check_true("witness at level 2", r.witness->level == 2);
        rep.check("witness input accretive", -r.witness->input_abscissa, 0.0);
        rep.check("witness image abscissa <= -1e-4", r.witness->image_abscissa + 1e-4, 0.0);
        rep.values["witness_image_abscissa"] = r.witness->image_abscissa;
    }
    rep.values["evaluations"] = r.evaluations;
    return rep;
}

/// Instance 0: identity; instance 1: transpose on M_2; otherwise a random CP map.
inline VerificationReport rcp_instance(Eigen::Index n, std::uint64_t seed, int i, const Tolerances& tol) {
    if (i == 1) return rcp_transpose_instance(seed, tol);
    const auto t = i == 0 ? LinearMapOnAlgebra::identity_on(SubalgebraBasis::full(n)) : random_cp_map(n, seed);
    RcpOptions opt;
    opt.seed = seed;
    const RcpResult r = rcp_test(t, opt, tol);
    const KrausFactorization kf = kraus_factor(t, tol);
    VerificationReport rep;
    rep.suite = "rcp";
    rep.inputs_digest = digest(t.action());
    rep.check_true(r.label, r.passed);
    rep.check("sampled violations", r.violations, 0.0);
    rep.check_true("Choi matrix PSD", r.certified);
    rep.check("Kraus reconstruction", kf.residual, 1e-8);
    rep.values["min_image_abscissa"] = r.min_image_abscissa;
    rep.values["samples"] = r.samples;
    rep.values["kraus_count"] = static_cast<double>(kf.v.size());
    return rep;
}

// ---------------------------------------------------------------------------
// orchestration

using InstanceFn = std::function<VerificationReport(Eigen::Index, std::uint64_t, int, const Tolerances&)>;

inline InstanceFn suite_instance(const std::string& name) {
    if (name == "chaccr") return chaccr_instance;
    if (name == "bal") return bal_instance;
    if (name == "sectt") return sectt_instance;
    if (name == "stam") return stam_instance;
    if (name == "lump") return lump_instance;
    if (name == "supp3") return supp3_instance;
    if (name == "ws") return ws_instance;
    if (name == "decompose") return decompose_instance;
    if (name == "hsa") return hsa_instance;
    if (name == "aarnes") return aarnes_instance;
    if (name == "proj") return proj_instance;
    if (name == "rcp") return rcp_instance;
    throw InputError("unknown suite '" + name + "'");
}

/// Runs one instance; any exception becomes a failed check.
inline VerificationReport run_instance(const std::string& suite, const InstanceFn& fn, Eigen::Index n,
                                       std::uint64_t seed, int i, const Tolerances& tol) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    try {
        rep = fn(n, seed, i, tol);
    } catch (const std::exception& e) {
        rep = VerificationReport{};
        rep.check_true("instance completed", false, e.what());
    }
    rep.suite = suite;
    rep.seed = seed;
    rep.values["instance"] = i;
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline std::vector<VerificationReport> run_suite(const std::string& name, const SuiteOptions& opt) {
    if (opt.count < 0) throw InputError("count must be non-negative");
    if (opt.n < 1 || opt.n > 16) throw InputError("n must lie in [1, 16]");
    if (name == "all") {
        if (!opt.fixture.empty()) throw InputError("--fixture is not supported with 'all'");
        std::vector<VerificationReport> out;
        for (const auto& s : suite_names()) {
            auto part = run_suite(s, opt);
            out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        return out;
    }
    InstanceFn fn = suite_instance(name);
    std::vector<VerificationReport> out;
    if (!opt.fixture.empty()) {
        if (name != "rcp" || opt.fixture != "transpose2") {
            throw InputError("unknown fixture '" + opt.fixture + "' for suite '" + name + "'");
        }
        const auto s = instance_seed(opt.seed, name, 1);
        out.push_back(run_instance(name, [](Eigen::Index, std::uint64_t sd, int, const Tolerances& t) {
            return rcp_transpose_instance(sd, t);
        }, 2, s, 0, opt.tol));
        return out;
    }
    for (int i = 0; i < opt.count; ++i) out.push_back(run_instance(name, fn, opt.n, instance_seed(opt.seed, name, i), i, opt.tol));
    return out;
}

}  // namespace realpos
