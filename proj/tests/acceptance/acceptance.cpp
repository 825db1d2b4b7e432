// Acceptance run: one PASS/FAIL line per criterion, at full instance counts.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>

#include "realpos/algebra.hpp"
#include "realpos/calculus.hpp"
#include "realpos/cones.hpp"
#include "realpos/maps.hpp"
#include "realpos/suites.hpp"

using namespace realpos;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void line(int id, bool ok, const std::string& title, const std::string& detail) {
    std::printf("AC%-2d %s  %s: %s\n", id, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::uint64_t seed_of(const char* tag, int i) { return instance_seed(20240601, tag, i); }

bool check_passed(const VerificationReport& r, const std::string& name) {
    const Condition* c = r.find(name);
    return c && c->passed;
}

// ---------------------------------------------------------------------------

void ac1() {
    const auto t0 = Clock::now();
    int disagree = 0, accretive = 0, errors = 0;
    for (int i = 0; i < 1000; ++i) {
        try {
            const auto r = chaccr_instance(4, seed_of("ac1", i), i, {});
            if (!r.passed()) ++disagree;
            accretive += r.values.at("accretive") > 0.5;
        } catch (const std::exception&) {
            ++errors;
        }
    }
    const double t = seconds_since(t0);
    line(1, disagree == 0 && errors == 0 && t < 60, "accretivity characterisations agree",
         fmt("1000 instances (%d accretive verdicts), %d disagreements, %d errors, %.1f s", accretive, disagree, errors, t));
}

struct PowerInstance {
    CMatrix x;
    double norm;
    std::map<double, CMatrix> pw;  // t -> x^t (cross-validated)
};

std::vector<PowerInstance> power_set;

void ac2() {
    const auto t0 = Clock::now();
    int disagreements = 0, errors = 0, series_used = 0;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Eigen::Index n = 2 + i % 7;
        PowerInstance pi_;
        pi_.x = power_instance_matrix(n, seed_of("ac2", i), i);
        pi_.norm = spectral_norm(pi_.x);
        const auto ctx = AmbientContext::full(n);
        for (double r : {0.1, 0.3, 0.5, 0.7, 0.9, 0.25, 0.75, 1.0 / 3.0}) {
            try {
                const auto cv = power_cross(pi_.x, r, ctx);
                worst = std::max(worst, cv.max_deviation / (1.0 + pi_.norm));
                if (cv.candidates.size() == 3) ++series_used;
                pi_.pw[r] = cv.value;
            } catch (const MethodDisagreementError& e) {
                ++disagreements;
                const auto& c = e.candidates();
                for (std::size_t a = 0; a < c.size(); ++a) {
                    for (std::size_t b = a + 1; b < c.size(); ++b) {
                        worst = std::max(worst, spectral_norm(c[a].second - c[b].second) / (1.0 + pi_.norm));
                    }
                }
                pi_.pw[r] = c.front().second;
            } catch (const std::exception&) {
                ++errors;
            }
        }
        power_set.push_back(std::move(pi_));
    }
    const double t = seconds_since(t0);
    line(2, disagreements == 0 && errors == 0 && worst < 1e-6 && t < 300, "three definitions of x^r coincide",
         fmt("200 instances n=2..8, max pairwise deviation %.3g (1+||x||), %d runs with all three routes, %d errors, "
             "%.1f s",
             worst, series_used, errors, t));
}

CMatrix mpow(const CMatrix& a, int k) {
    CMatrix p = a;
    for (int j = 1; j < k; ++j) p = p * a;
    return p;
}

void ac3() {
    double root = 0.0, semi = 0.0;
    int missing = 0;
    for (const auto& p : power_set) {
        const double s1 = 1.0 + p.norm;
        auto get = [&](double t) -> const CMatrix* {
            if (t == 1.0) return &p.x;
            auto it = p.pw.find(t);
            if (it == p.pw.end()) {
                ++missing;
                return nullptr;
            }
            return &it->second;
        };
        const std::pair<int, double> roots[] = {{2, 0.5}, {3, 1.0 / 3.0}, {4, 0.25}};
        for (const auto& [k, r] : roots) {
            if (const CMatrix* y = get(r)) root = std::max(root, spectral_norm(mpow(*y, k) - p.x) / s1);
        }
        for (double s : {0.25, 0.5}) {
            for (double t : {0.25, 0.5}) {
                const CMatrix *a = get(s), *b = get(t), *c = get(s + t);
                if (a && b && c) semi = std::max(semi, spectral_norm(*a * *b - *c) / (s1 * s1));
            }
        }
    }
    line(3, missing == 0 && root <= 1e-6 && semi <= 1e-7, "root inversion and semigroup law",
         fmt("max ||(x^(1/k))^k - x||/(1+||x||) = %.3g (tol 1e-6), max ||x^s x^t - x^(s+t)||/(1+||x||)^2 = %.3g "
             "(tol 1e-7)",
             root, semi));
}

void ac4() {
    const auto t0 = Clock::now();
    double bal = -1e300, dru = -1e300;
    int errors = 0;
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Index n = 2 + i % 7;
        Rng rng = make_rng(seed_of("ac4", i));
        CMatrix x = random_accretive(n, rng());
        x *= uniform(rng, 0.05, 1.0) / spectral_norm(x);
        const auto ctx = AmbientContext::full(n);
        for (int j = 1; j <= 9; ++j) {
            const double t = 0.1 * j;
            try {
                const double nt = spectral_norm(power(x, t, ctx));
                bal = std::max(bal, nt - power_norm_bound(t));
                dru = std::max(dru, nt - drury_bound(t));
            } catch (const std::exception&) {
                ++errors;
            }
        }
    }
    line(4, errors == 0 && bal <= 1e-8 && dru <= 1e-8, "norm bounds for x^t with ||x|| <= 1",
         fmt("1000 instances x 9 exponents, min slack %.3g (sin form) and %.3g (Gamma form), %d errors, %.1f s", -bal,
             -dru, errors, seconds_since(t0)));
}

void ac5() {
    const auto t0 = Clock::now();
    double sharp = -1e300, banach = -1e300, roots = -1e300;
    int errors = 0;
    for (const auto& p : power_set) {
        const auto n = p.x.rows();
        const auto ctx = AmbientContext::full(n);
        const double theta = sectorial_angle(p.x).angle.value_or(pi);
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double a = sectorial_angle(p.pw.at(t)).angle.value_or(pi);
            sharp = std::max(sharp, a - t * theta);
            banach = std::max(banach, a - (t * theta + (1 - t) * pi / 2));
        }
        for (int m : {2, 4, 8, 16}) {
            try {
                const double a = sectorial_angle(power(p.x, 1.0 / m, ctx)).angle.value_or(pi);
                roots = std::max(roots, a - pi / (2.0 * m));
            } catch (const std::exception&) {
                ++errors;
            }
        }
    }
    line(5, errors == 0 && sharp <= 1e-6 && banach <= 1e-6 && roots <= 1e-6, "sectorial angle of powers",
         fmt("max excess %.3g (angle <= t theta), %.3g (angle <= t theta + (1-t) pi/2), %.3g (angle of x^(1/n) <= "
             "pi/2n), %.1f s",
             sharp, banach, roots, seconds_since(t0)));
}

void ac6() {
    int bad_bound = 0, bad_trip = 0, errors = 0;
    double worst_bound = -1e300, worst_trip = 0.0;
    for (int i = 0; i < 500; ++i) {
        try {
            const auto r = stam_instance(2 + i % 7, seed_of("ac6", i), i, {});
            const Condition* b = r.find("||e - F(x)|| <= min(1, 1/d(-1, W(x)))");
            const Condition* t = r.find("F^-1(F(x)) = x");
            worst_bound = std::max(worst_bound, b->residual);
            worst_trip = std::max(worst_trip, t->residual / t->tolerance);
            bad_bound += !b->passed;
            bad_trip += !t->passed;
        } catch (const std::exception&) {
            ++errors;
        }
    }
    line(6, bad_bound == 0 && bad_trip == 0 && errors == 0, "F-transform contraction and inverse",
         fmt("500 instances, max ||e - F(x)|| - bound = %.3g (tol 1e-8), max round-trip error / (1e-8 (1+cond)) = %.3g",
             worst_bound, worst_trip));
}

void ac7() {
    const auto t0 = Clock::now();
    int bad = 0, errors = 0, singular = 0;
    double agree = 0.0, idem = 0.0, unit = 0.0;
    for (int i = 0; i < 500; ++i) {
        const Eigen::Index n = 2 + i % 7;
        Rng rng = make_rng(seed_of("ac7", i));
        const auto k = static_cast<Eigen::Index>(std::uniform_int_distribution<long>(0, n - 1)(rng));
        singular += k > 0;
        const CMatrix x = random_accretive_singular(n, k, rng());
        const auto ctx = AmbientContext::full(n);
        try {
            const SupportIdempotent s = support_idem(x, ctx);
            const double ri = spectral_norm(s.s * s.s - s.s);
            const double ru = std::max(spectral_norm(s.s * x - x), spectral_norm(x * s.s - x));
            agree = std::max(agree, s.agreement_residual);
            idem = std::max(idem, ri);
            unit = std::max(unit, ru);
            if (!(s.agreement_residual < 1e-6 && ri <= 1e-9 && ru <= 1e-9 && membership(s.s, ctx).in_F)) ++bad;
        } catch (const std::exception&) {
            ++errors;
        }
    }
    int pair_bad = 0, contained = 0;
    for (int i = 0; i < 200; ++i) {
        const auto r = run_instance("supp3", supp3_instance, 2 + i % 5, seed_of("ac7p", i), i, {});
        pair_bad += !check_passed(r, "verdicts agree");
        const Condition* c = r.find("xA in yA");
        contained += c && c->passed;
    }
    line(7, bad == 0 && errors == 0 && pair_bad == 0, "support idempotent",
         fmt("500 instances (%d singular): max method gap %.3g, ||s^2-s|| %.3g, ||sx-x|| %.3g, s in F always; 200 "
             "pairs (%d with xA in yA), %d verdict mismatches, %.1f s",
             singular, agree, idem, unit, contained, pair_bad, seconds_since(t0)));
}

void ac8() {
    int bad = 0, errors = 0, kernel = 0;
    for (int i = 0; i < 500; ++i) {
        const auto r = run_instance("ws", ws_instance, 2 + i % 5, seed_of("ac8", i), i, {});
        if (!r.find("(i) <=> (iv) <=> (v)")) {
            ++errors;
            continue;
        }
        bad += !r.passed();
        kernel += r.values.at("kernel_dim") > 0;
    }
    line(8, bad == 0 && errors == 0, "pseudo-invertibility equivalences",
         fmt("500 instances over invertible / normal-kernel / block-support fixtures (%d singular), %d failures, %d "
             "errors",
             kernel, bad, errors));
}

void ac9() {
    int bad = 0, errors = 0, in_f = 0;
    for (int i = 0; i < 10000; ++i) {
        try {
            const Eigen::Index n = 2 + i % 5;
            const auto r = lump_check(random_idempotent(n, seed_of("ac9", i), 1e3), AmbientContext::full(n));
            bad += !r.passed();
            in_f += r.find("p in F")->passed;
        } catch (const std::exception&) {
            ++errors;
        }
    }
    line(9, bad == 0 && errors == 0, "idempotents: in F iff accretive",
         fmt("10000 idempotents (cond <= 1e3, %d in F), %d equivalence failures, %d errors", in_f, bad, errors));
}

void ac10() {
    int bad = 0, errors = 0, exact = 0;
    double worst_f = -1e300, worst_rec = 0.0;
    for (int i = 0; i < 1000; ++i) {
        try {
            const auto r = decompose_instance(2 + i % 7, seed_of("ac10", i), i, {});
            bad += !r.passed();
            worst_f = std::max({worst_f, r.find("2x in F")->residual, r.find("2y in F")->residual});
            const Condition* rec = r.find("x - y = b up to rounding of e +- b");
            worst_rec = std::max(worst_rec, rec->tolerance > 0 ? rec->residual / rec->tolerance : rec->residual);
            exact += r.find("x - y = b bit for bit")->passed;
        } catch (const std::exception&) {
            ++errors;
        }
    }
    line(10, bad == 0 && errors == 0 && exact == 1000, "b = x - y exactly with x, y in F/2",
         fmt("1000 instances, max ||e - 2x|| - 1 = %.3g, reconstruction error <= %.2f x rounding bound, bit-exact in "
             "%d/1000",
             worst_f, worst_rec, exact));
}

void ac11() {
    const auto t0 = Clock::now();
    int bad = 0, errors = 0;
    double idem = 0.0, sym = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Eigen::Index n = 2 + i % 3;
        try {
            const ProjectionFixture f = projection_fixture(n, seed_of("ac11", i), i);
            const SymmetricProjection sp = build_symmetric_projection(f.theta, f.q, f.a, {}, seed_of("ac11s", i));
            const double ri = max_idempotence_residual(sp.p);
            idem = std::max(idem, ri);
            bool ok = ri <= 1e-9 && sp.certificate.passed();
            for (int k = 1; k <= 3; ++k) {
                sym = std::max(sym, sp.symmetry_levels.at(k));
                ok = ok && sp.symmetry_levels.at(k) <= 1 + 1e-6;
            }
            for (const char* name : {"rcp_test", "range(P) = fixed points of theta in qAq"}) {
                ok = ok && check_passed(sp.certificate, name);
            }
            bad += !ok;
        } catch (const std::exception& e) {
            ++errors;
            std::fprintf(stderr, "ac11 instance %d: %s\n", i, e.what());
        }
    }
    const ProjectionClassification c = classify_projection(scalar_averaging());
    line(11, bad == 0 && errors == 0 && c.symmetric && c.cond_exp_residual <= 1e-10, "symmetric projections",
         fmt("50 fixtures, max ||P^2-P|| %.3g, max ||I-2P||_k %.9f, %d failures; scalar averaging: symmetric=%s, "
             "conditional expectation residual %.3g, %.1f s",
             idem, sym, bad, c.symmetric ? "yes" : "no", c.cond_exp_residual, seconds_since(t0)));
}

void ac12() {
    const auto t0 = Clock::now();
    int bad = 0, violations = 0;
    double kraus = 0.0;
    for (int i = 0; i < 21; ++i) {
        const Eigen::Index n = 2 + i % 2;
        const auto t = i == 0 ? LinearMapOnAlgebra::identity_on(SubalgebraBasis::full(n)) : random_cp_map(n, seed_of("ac12", i));
        RcpOptions opt;
        opt.seed = seed_of("ac12r", i);
        const RcpResult r = rcp_test(t, opt);
        const KrausFactorization kf = kraus_factor(t);
        kraus = std::max(kraus, kf.residual);
        violations += r.violations;
        bad += !(r.passed && r.violations == 0 && kf.residual <= 1e-8);
    }
    RcpOptions opt;
    opt.seed = seed_of("ac12t", 0);
    const RcpResult tr = rcp_test(transpose_map(2), opt);
    const bool wit = tr.witness && tr.witness->level == 2 && tr.witness->input_abscissa >= 0 &&
                     tr.witness->image_abscissa <= -1e-4;
    const double me = tr.choi_min_eig.value_or(0.0);
    line(12, bad == 0 && violations == 0 && kraus <= 1e-8 && me <= -1 + 1e-9 && wit, "RCP test against CP maps",
         fmt("identity + 20 CP maps: %d failures, %d sampled violations, max Kraus residual %.3g; transpose: Choi min "
             "eig %.12f, %s at level %ld, image abscissa %.4f, %d evaluations, %.1f s",
             bad, violations, kraus, me, tr.label.c_str(), tr.witness ? static_cast<long>(tr.witness->level) : 0L,
             tr.witness ? tr.witness->image_abscissa : 0.0, tr.evaluations, seconds_since(t0)));
}

std::string strip_wall_time(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    std::string l;
    static const std::regex wall("\"wall_time_s\"\\s*:");
    while (std::getline(in, l)) {
        if (!std::regex_search(l, wall)) ss << l << '\n';
    }
    return ss.str();
}

void ac13() {
    namespace fs = std::filesystem;
    const fs::path work = REALPOS_WORK_DIR;
    fs::create_directories(work);
    const std::string report = (work / "verify_all.json").string();
    const std::string cmd = std::string("\"") + REALPOS_CLI + "\" verify all --seed 42 --n 4 --count 50 --report \"" +
                            report + "\" > \"" + (work / "stdout.txt").string() + "\" 2>&1";
    const auto t0 = Clock::now();
    const int rc1 = std::system(cmd.c_str());
    const std::string first = strip_wall_time(report);
    fs::copy_file(report, work / "verify_all_run1.json", fs::copy_options::overwrite_existing);
    const int rc2 = std::system(cmd.c_str());
    const std::string second = strip_wall_time(report);
    const double t = seconds_since(t0);
    const bool same = !first.empty() && first == second;
    line(13, rc1 == 0 && rc2 == 0 && same && t < 600, "CLI determinism",
         fmt("verify all twice: exit %d and %d, reports %s modulo wall time (%zu bytes), %.1f s total", rc1, rc2,
             same ? "identical" : "DIFFER", first.size(), t));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7,
                                                      ac8, ac9, ac10, ac11, ac12, ac13};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            line(static_cast<int>(i + 1), false, "criterion aborted", e.what());
        }
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
