#include <cmath>
#include <complex>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "realpos/calculus.hpp"

using namespace realpos;

namespace {

CMatrix m2(cplx a, cplx b, cplx c, cplx d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

CMatrix diag(std::initializer_list<cplx> d) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (cplx v : d) {
        m(i, i) = v;
        ++i;
    }
    return m;
}

// lambda^r for the principal branch, from polar form.
cplx scalar_pow(cplx z, double r) { return std::polar(std::pow(std::abs(z), r), r * std::arg(z)); }

// [[l, 1], [0, l]]^r = [[l^r, r l^(r-1)], [0, l^r]] (derivative in the corner).
CMatrix jordan_pow(cplx l, double r) { return m2(scalar_pow(l, r), r * scalar_pow(l, r - 1), 0, scalar_pow(l, r)); }

// sin(r pi)/pi * int_0^inf s^(r-1) x/(s+x) ds for a positive scalar x, by tanh-sinh quadrature.
double balakrishnan_scalar(double x, double r) {
    boost::math::quadrature::tanh_sinh<double> q;
    auto f = [&](double s) { return std::pow(s, r - 1) * x / (s + x); };
    const double lo = q.integrate(f, 0.0, 1.0);
    // s = 1/u on [1, inf)
    const double hi = q.integrate([&](double u) { return std::pow(u, -r) * x / (1 + x * u); }, 0.0, 1.0);
    return std::sin(r * pi) / pi * (lo + hi);
}

const CMatrix jordan = m2(1, 1, 0, 1);
const auto ctx2 = AmbientContext::full(2);

}  // namespace

TEST(Series, Examples) {
    EXPECT_LT(max_abs_diff(power_series(identity(2), 0.3, ctx2), identity(2)), 1e-12);
    EXPECT_LT(max_abs_diff(power_series(diag({1, 0.25}), 0.5, ctx2), diag({1, 0.5})), 1e-9);
    const CMatrix x = m2(1, 0.5, 0, 1);
    const CMatrix y = power_series(x, 0.5, ctx2);
    EXPECT_LT(spectral_norm(y * y - x), 1e-8);
    EXPECT_LT(max_abs_diff(y, m2(1, 0.25, 0, 1)), 1e-8);
    EXPECT_THROW(power_series(3.0 * identity(2), 0.5, ctx2), PreconditionError);
}

TEST(Shifted, Examples) {
    EXPECT_LT(max_abs_diff(power_shifted(diag({4, 9}), 0.5, ctx2), diag({2, 3})), 1e-9);
    EXPECT_LT(max_abs_diff(power_shifted(diag({0, 1}), 0.5, ctx2), diag({0, 1})), 1e-9);
    EXPECT_LT(max_abs_diff(power_shifted(diag({cplx(0, 1), 1}), 0.5, ctx2), diag({std::polar(1.0, pi / 4), 1})), 1e-9);
    EXPECT_THROW(power_shifted(-identity(2), 0.5, ctx2), PreconditionError);
    EXPECT_THROW(power_shifted(identity(2), 1.5, ctx2), InputError);
}

TEST(Balakrishnan, ScalarOracle) {
    const auto ctx1 = AmbientContext::full(1);
    EXPECT_NEAR(balakrishnan_scalar(1.0, 0.5), 1.0, 1e-12);
    EXPECT_NEAR(balakrishnan_scalar(4.0, 0.5), 2.0, 1e-12);
    for (double x : {0.01, 0.7, 4.0, 250.0}) {
        for (double r : {0.1, 0.5, 0.9}) {
            const double want = balakrishnan_scalar(x, r);
            EXPECT_NEAR(power_balakrishnan(diag({x}), r, ctx1)(0, 0).real(), want, 1e-8 * want) << x << " " << r;
        }
    }
    EXPECT_LT(max_abs_diff(power_balakrishnan(identity(2), 0.5, ctx2), identity(2)), 1e-10);
    const CMatrix y = power_balakrishnan(jordan, 0.5, ctx2);
    EXPECT_LT(spectral_norm(y * y - jordan), 1e-6);
}

TEST(Powers, JordanBlockOracle) {
    for (cplx l : {cplx(1, 0), cplx(2, 1), cplx(0.6, -0.2)}) {
        for (double r : {0.1, 0.5, 0.9}) {
            CMatrix x = m2(l, 1, 0, l);
            const CMatrix want = jordan_pow(l, r);
            EXPECT_LT(max_abs_diff(power_shifted(x, r, ctx2), want), 1e-8) << l << " r=" << r;
            EXPECT_LT(max_abs_diff(power_balakrishnan(x, r, ctx2), want), 1e-7) << l << " r=" << r;
        }
    }
}

TEST(Powers, CrossValidation) {
    const auto c = power_cross(identity(2), 0.7, ctx2);
    EXPECT_LT(c.max_deviation, 1e-12);
    const auto d = power_cross(diag({1, 0.25}), 0.5, ctx2);
    EXPECT_EQ(d.candidates.size(), 3u);
    EXPECT_LT(max_abs_diff(d.value, diag({1, 0.5})), 1e-9);
    const auto ctx6 = AmbientContext::full(6);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const CMatrix x = random_accretive(6, s);
        for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto cv = power_cross(x, r, ctx6);
            EXPECT_LT(cv.max_deviation, 1e-6 * (1 + spectral_norm(x)));
        }
    }
}

TEST(Powers, SingularInputs) {
    const auto ctx4 = AmbientContext::full(4);
    for (std::uint64_t s = 0; s < 6; ++s) {
        const CMatrix x = random_accretive_singular(4, 1 + s % 3, s);
        for (double r : {0.1, 0.5}) {
            const auto cv = power_cross(x, r, ctx4);
            EXPECT_LT(cv.max_deviation, cv.tolerance);
        }
    }
}

TEST(FTransform, Examples) {
    EXPECT_LT(f_transform(CMatrix::Zero(2, 2), ctx2).norm(), 1e-15);
    EXPECT_LT(max_abs_diff(f_transform(identity(2), ctx2), 0.5 * identity(2)), 1e-15);
    EXPECT_LT(max_abs_diff(f_transform(diag({1, 3}), ctx2), diag({0.5, 0.75})), 1e-15);
    EXPECT_LT(f_inverse(CMatrix::Zero(2, 2), ctx2).norm(), 1e-15);
    EXPECT_LT(max_abs_diff(f_inverse(0.5 * identity(2), ctx2), identity(2)), 1e-15);
    EXPECT_LT(max_abs_diff(f_inverse(f_transform(jordan, ctx2), ctx2), jordan), 1e-9);
    EXPECT_THROW(f_inverse(identity(2), ctx2), InputError);
}

TEST(Bounds, GammaFormula) {
    // t = 1/2: Gamma(1/4)^2 / (2 sqrt(pi) pi)
    const double g = std::tgamma(0.25);
    EXPECT_NEAR(drury_bound(0.5), g * g / (2 * std::sqrt(pi) * pi), 1e-14);
    EXPECT_NEAR(power_norm_bound(0.5), 4 / pi, 1e-15);
    for (double t : {0.1, 0.3, 0.7, 0.9}) EXPECT_LT(drury_bound(t), power_norm_bound(t));
}

TEST(PowerProperties, Examples) {
    EXPECT_TRUE(power_property_report(identity(2), ctx2, {0.1, 0.5, 0.9}).passed());
    const CMatrix x = diag({cplx(0, 1), 1});
    const CMatrix h = power(x, 0.5, ctx2);
    EXPECT_NEAR(*sectorial_angle(h).angle, pi / 4, 1e-9);
    const auto ctx4 = AmbientContext::full(4);
    for (std::uint64_t s = 0; s < 20; ++s) {
        CMatrix y = random_accretive(4, 100 + s);
        y /= spectral_norm(y);
        const auto rep = power_property_report(y, ctx4, {0.1, 0.3, 0.5, 0.7, 0.9});
        EXPECT_TRUE(rep.passed()) << s;
        EXPECT_TRUE(rep.find("Drury bound for ||x|| <= 1")->passed);
    }
}

TEST(RootLimit, Examples) {
    EXPECT_TRUE(root_bai_check(identity(2), ctx2).passed());
    const auto d = root_bai_check(diag({1, 0.5}), ctx2);
    EXPECT_TRUE(d.passed());
    EXPECT_LE(d.values.at("residual_n2"), std::abs(std::pow(0.5, 0.5) * 0.5 - 0.5) + 1e-12);
    const auto j = root_bai_check(jordan, ctx2);
    EXPECT_TRUE(j.passed());
    EXPECT_LT(j.values.at("residual_n1024"), 1e-3);
}
