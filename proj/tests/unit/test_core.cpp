#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "realpos/cones.hpp"
#include "realpos/linalg.hpp"
#include "realpos/numrange.hpp"

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

// Largest singular value of a 2x2 matrix from the characteristic polynomial of x* x.
double svd2_max(const CMatrix& x) {
    const double f = x.squaredNorm();
    const double det = std::abs(x.determinant());
    return std::sqrt((f + std::sqrt(std::max(0.0, f * f - 4 * det * det))) / 2);
}

// Smallest eigenvalue of a 2x2 Hermitian matrix in closed form.
double herm2_min(const CMatrix& h) {
    const double a = h(0, 0).real(), d = h(1, 1).real();
    return (a + d) / 2 - std::sqrt((a - d) * (a - d) / 4 + std::norm(h(0, 1)));
}

const CMatrix nil = m2(0, 1, 0, 0);
const CMatrix jordan = m2(1, 1, 0, 1);

}  // namespace

TEST(Linalg, OperatorNorm) {
    EXPECT_DOUBLE_EQ(operator_norm(identity(3)), 1.0);
    EXPECT_DOUBLE_EQ(operator_norm(CMatrix::Zero(2, 2)), 0.0);
    EXPECT_NEAR(operator_norm(nil), svd2_max(nil), 1e-14);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const CMatrix x = random_matrix(2, s);
        EXPECT_NEAR(operator_norm(x), svd2_max(x), 1e-12 * svd2_max(x));
    }
    EXPECT_THROW(operator_norm(CMatrix::Zero(2, 3)), InputError);
    CMatrix bad = identity(2);
    bad(0, 1) = std::nan("");
    EXPECT_THROW(operator_norm(bad), InputError);
}

TEST(Linalg, HermPart) {
    Rng rng = make_rng(4);
    const CMatrix h = random_hermitian(3, rng);
    EXPECT_LT(max_abs_diff(herm_part(h), h), 1e-15);
    EXPECT_LT(max_abs_diff(herm_part(nil), m2(0, 0.5, 0.5, 0)), 1e-15);
    EXPECT_LT(herm_part(cplx(0, 1) * identity(2)).norm(), 1e-15);
}

TEST(Linalg, MatrixExp) {
    EXPECT_LT(max_abs_diff(matrix_exp(CMatrix::Zero(3, 3)), identity(3)), 1e-15);
    EXPECT_LT(max_abs_diff(matrix_exp(diag({1, 2})), diag({std::exp(1.0), std::exp(2.0)})), 1e-13);
    EXPECT_LT(max_abs_diff(matrix_exp(nil), jordan), 1e-15);
    const CMatrix x = 3.0 * random_matrix(4, 11);
    EXPECT_LT(spectral_norm(matrix_exp(x) * matrix_exp(-x) - identity(4)), 1e-8);
}

TEST(Linalg, RandomGenerators) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        EXPECT_GE(herm_min_eig(herm_part(random_accretive(2, s))), -1e-14);
        const CMatrix z = random_accretive(1, s, 0.1);
        EXPECT_LE(std::abs(std::arg(z(0, 0))), 0.1 + 1e-12);
        const CMatrix p = random_idempotent(3, s);
        EXPECT_LT(spectral_norm(p * p - p), 1e-10);
    }
    EXPECT_EQ(random_accretive(5, 77), random_accretive(5, 77));
    EXPECT_THROW(random_accretive(2, 0, 0.0), InputError);
}

TEST(NumRange, BoundaryOfNilpotentIsCircle) {
    const RangeBoundary rb = boundary(nil, 64);
    ASSERT_EQ(rb.boundary_points.size(), 64u);
    for (std::size_t j = 0; j < rb.angles.size(); ++j) {
        // oracle: largest eigenvalue of herm_part(e^{-i theta} x) is 1/2 for every theta
        const CMatrix h = herm_part(std::polar(1.0, -rb.angles[j]) * nil);
        EXPECT_NEAR(rb.support_values[j], -herm2_min(-h), 1e-12);
        EXPECT_NEAR(std::abs(rb.boundary_points[j]), 0.5, 1e-8);
    }
    for (const auto& p : boundary(identity(3), 16).boundary_points) EXPECT_LT(std::abs(p - cplx(1, 0)), 1e-12);
    for (const auto& p : boundary(diag({0, 1}), 64).boundary_points) {
        EXPECT_NEAR(p.imag(), 0.0, 1e-12);
        EXPECT_GE(p.real(), -1e-12);
        EXPECT_LE(p.real(), 1 + 1e-12);
    }
}

TEST(NumRange, AbscissaAndDistance) {
    EXPECT_NEAR(abscissa(identity(2)), 1.0, 1e-15);
    EXPECT_NEAR(abscissa(nil), herm2_min(herm_part(nil)), 1e-14);
    EXPECT_NEAR(abscissa(nil), -0.5, 1e-14);
    EXPECT_NEAR(abscissa(diag({1, cplx(0, 1)})), 0.0, 1e-15);
    EXPECT_NEAR(dist_to_point(identity(2), -1.0), 2.0, 1e-12);
    EXPECT_NEAR(dist_to_point(nil, -1.0), 0.5, 1e-10);
    EXPECT_NEAR(dist_to_point(diag({0, 1}), 0.5), 0.0, 1e-12);
}

TEST(NumRange, SectorialAngle) {
    EXPECT_NEAR(*sectorial_angle(diag({0, 1, 2})).angle, 0.0, 1e-12);
    EXPECT_NEAR(*sectorial_angle(diag({1, cplx(0, 1)})).angle, pi / 2, 1e-12);
    // oracle: W(jordan) is the disk of radius 1/2 about 1, so the tangent angle is arcsin(1/2)
    const double a = *sectorial_angle(jordan).angle;
    EXPECT_NEAR(a, std::asin(0.5), 1e-6);
    double sweep = 0.0;
    for (int j = 0; j < 20000; ++j) {
        const double th = 2 * pi * j / 20000;
        const cplx p = 1.0 + 0.5 * std::polar(1.0, th);
        sweep = std::max(sweep, std::abs(std::arg(p)));
    }
    EXPECT_NEAR(a, sweep, 1e-6);
    EXPECT_FALSE(sectorial_angle(nil).sectorial());

    EXPECT_TRUE(is_nearly_positive(diag({0.2, 0.9}), 0.3).nearly_positive);
    EXPECT_FALSE(is_nearly_positive(cplx(0, 0.5) * identity(2), 0.1).nearly_positive);
    EXPECT_TRUE(is_nearly_positive(jordan / operator_norm(jordan), 0.6).nearly_positive);
}

TEST(Cones, Membership) {
    const auto ctx = AmbientContext::full(2);
    EXPECT_TRUE(in_F(identity(2), ctx).in_F);
    EXPECT_NEAR(in_F(identity(2), ctx).F_residual, -1.0, 1e-15);
    const auto two = in_F(2.0 * identity(2), ctx);
    EXPECT_TRUE(two.in_F);
    EXPECT_TRUE(two.F_boundary);
    EXPECT_FALSE(in_F(-0.1 * identity(2), ctx).in_F);

    EXPECT_TRUE(in_r(diag({0, 3}), ctx).in_r);
    const auto j = in_r(jordan, ctx);
    EXPECT_TRUE(j.in_r);
    EXPECT_NEAR(-j.r_residual, herm2_min(m2(1, 0.5, 0.5, 1)), 1e-14);
    EXPECT_FALSE(in_r(-identity(2), ctx).in_r);
}

TEST(Cones, CornerAmbient) {
    const auto ctx = AmbientContext::corner(diag({1, 1, 0}));
    CMatrix x = CMatrix::Zero(3, 3);
    x.topLeftCorner(2, 2) = jordan;
    EXPECT_TRUE(membership(x, ctx).in_r);
    EXPECT_NEAR(membership(identity(3) - diag({0, 0, 1}), ctx).F_residual, -1.0, 1e-14);
    EXPECT_THROW(AmbientContext::corner(m2(1, 1, 0, 0)), InputError);
}

TEST(Cones, ChaccrVerify) {
    const auto ctx = AmbientContext::full(2);
    const auto id = chaccr_verify(identity(2), ctx, {0.1, 1, 10});
    EXPECT_TRUE(id.passed());
    for (const auto& c : id.conditions) EXPECT_TRUE(c.passed) << c.name;

    const auto neg = chaccr_verify(-identity(2), ctx, log_grid(1e-2, 1e2, 20));
    EXPECT_TRUE(neg.passed());
    EXPECT_FALSE(neg.find("(1) numerical range in right half-plane")->passed);
    EXPECT_FALSE(neg.find("(3) ||exp(-tx)|| <= 1")->passed);

    const auto j = chaccr_verify(jordan, ctx, log_grid(1e-2, 1e2, 20));
    EXPECT_TRUE(j.passed());
    EXPECT_NEAR(j.values.at("abscissa"), 0.5, 1e-14);
    for (const auto& c : j.conditions) EXPECT_TRUE(c.passed) << c.name;
    EXPECT_THROW(chaccr_verify(jordan, ctx, {}), InputError);
}

TEST(Cones, ScaleAndApproximate) {
    const auto ctx = AmbientContext::full(2);
    const auto z = scale_into_F(CMatrix::Zero(2, 2), ctx, 1.0);
    EXPECT_DOUBLE_EQ(z.c, 1.0);
    EXPECT_LT(max_abs_diff(z.y, identity(2)), 1e-15);
    const auto e = scale_into_F(identity(2), ctx, 1.0);
    EXPECT_DOUBLE_EQ(e.c, 2.0);
    const auto j = scale_into_F(jordan, ctx, 0.5);
    EXPECT_NEAR(j.c, 0.5 + std::pow(svd2_max(jordan), 2) / 0.5, 1e-12);
    EXPECT_LE(spectral_norm(identity(2) - j.y), 1.0 + 1e-12);

    EXPECT_LT(approximate_from_F(CMatrix::Zero(2, 2), ctx, 0.3).norm(), 1e-15);
    EXPECT_LT(max_abs_diff(approximate_from_F(identity(2), ctx, 1.0), 0.5 * identity(2)), 1e-15);
    const CMatrix a = approximate_from_F(jordan, ctx, 1e-3);
    EXPECT_LE(spectral_norm(a - jordan), 1e-3 * std::pow(svd2_max(jordan), 2));
    EXPECT_TRUE(membership(1e-3 * a, ctx).in_F);
}

TEST(Cones, OrderAndDecomposition) {
    const CMatrix x = random_matrix(3, 5);
    EXPECT_TRUE(order_leq(x, x));
    EXPECT_TRUE(order_leq(CMatrix::Zero(2, 2), identity(2)));
    EXPECT_FALSE(order_leq(identity(2), CMatrix::Zero(2, 2)));

    const auto ctx = AmbientContext::full(2);
    const auto d0 = decompose_halfF(CMatrix::Zero(2, 2), ctx);
    EXPECT_LT(max_abs_diff(d0.x, 0.5 * identity(2)), 1e-16);
    EXPECT_LT(max_abs_diff(d0.y, 0.5 * identity(2)), 1e-16);
    const auto dh = decompose_halfF(0.5 * identity(2), ctx);
    EXPECT_LT(max_abs_diff(dh.x, 0.75 * identity(2)), 1e-16);
    EXPECT_LT(max_abs_diff(dh.y, 0.25 * identity(2)), 1e-16);
    EXPECT_EQ(dh.reconstruction_error, 0.0);

    const auto ctx4 = AmbientContext::full(4);
    const CMatrix b = random_contraction(4, 8, 0.9);
    const auto d = decompose_halfF(b, ctx4);
    EXPECT_LE(spectral_norm(identity(4) - 2.0 * d.x), 1.0 + 1e-12);
    EXPECT_LE(spectral_norm(identity(4) - 2.0 * d.y), 1.0 + 1e-12);
    EXPECT_LE(d.reconstruction_error, d.rounding_bound);
    EXPECT_THROW(decompose_halfF(identity(2), ctx), PreconditionError);

    const auto u = upper_bound_pair(0.9 * identity(2), -0.9 * identity(2), ctx);
    EXPECT_LT(max_abs_diff(u.a, identity(2)), 1e-16);
    EXPECT_GE(u.x_margin, 0.0);
    EXPECT_GE(u.y_margin, 0.0);
    const auto r = upper_bound_pair(random_contraction(4, 1, 0.99), random_contraction(4, 2, 0.99), ctx4);
    EXPECT_GE(r.x_margin, 0.01 - 1e-12);
    EXPECT_GE(r.y_margin, 0.01 - 1e-12);
}
