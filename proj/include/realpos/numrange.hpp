#pragma once

// Numerical range (field of values) of a square matrix by the support-function
// sweep: for a direction theta, h(theta) is the top eigenvalue of
// Re(e^{-i theta} x) and the top eigenvector v gives the boundary point v* x v.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "realpos/linalg.hpp"

namespace realpos {

inline constexpr int default_sweep = 256;

struct RangeBoundary {
    std::vector<double> angles;          // strictly increasing, in [0, 2 pi)
    std::vector<double> support_values;  // h(theta_j)
    std::vector<cplx> boundary_points;   // v* x v for the top eigenvector v
};

namespace detail {

inline CMatrix rotated_herm(const CMatrix& x, double theta) {
    const CMatrix r = x * std::polar(1.0, -theta);
    return (r + r.adjoint()) * 0.5;
}

inline double support(const CMatrix& x, double theta) {
    return herm_eigenvalues(rotated_herm(x, theta))(x.rows() - 1);
}

inline std::pair<double, cplx> support_point(const CMatrix& x, double theta) {
    const TopEigen top = herm_top_eigen(rotated_herm(x, theta));
    const cplx p = top.vector.dot(x * top.vector);  // v* x v
    return {top.value, p};
}

inline double wrap_pi(double a) {
    a = std::fmod(a, 2 * pi);
    if (a <= -pi) a += 2 * pi;
    if (a > pi) a -= 2 * pi;
    return a;
}

/// Golden-section maximisation of f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, int iters = 80) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && (b - a) > 1e-14; ++i) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

}  // namespace detail

/// m supporting half-planes and boundary points of W(x).
inline RangeBoundary boundary(const CMatrix& x, int m = default_sweep) {
    require_square(x);
    if (m < 8) throw InputError("boundary: angle count must be at least 8");
    RangeBoundary rb;
    rb.angles.reserve(m);
    rb.support_values.reserve(m);
    rb.boundary_points.reserve(m);
    for (int j = 0; j < m; ++j) {
        const double th = 2 * pi * j / m;
        auto [h, p] = detail::support_point(x, th);
        rb.angles.push_back(th);
        rb.support_values.push_back(h);
        rb.boundary_points.push_back(p);
    }
    return rb;
}

/// Minimum of Re over W(x), the smallest eigenvalue of the Hermitian part.
inline double abscissa(const CMatrix& x) { return herm_min_eig(herm_part(x)); }

/// Distance from z to W(x): max(0, sup_theta Re(e^{-i theta} z) - h(theta)).
inline double dist_to_point(const CMatrix& x, cplx z, int m = default_sweep) {
    require_square(x);
    auto gap = [&](double th) { return (std::polar(1.0, -th) * z).real() - detail::support(x, th); };
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(m);
    for (int j = 0; j < m; ++j) {
        vals[j] = gap(2 * pi * j / m);
        if (vals[j] > best_val) {
            best_val = vals[j];
            best = j;
        }
    }
    const double step = 2 * pi / m;
    const auto refined = detail::golden_max(gap, (best - 1) * step, (best + 1) * step);
    return std::max({0.0, best_val, refined.second});
}

/// Smallest half-angle of a sector S_theta = {r e^{i rho}: |rho| <= theta}
/// containing W(x). `angle` is empty when 0 is interior to W(x).
struct SectorVerdict {
    std::optional<double> angle;
    cplx witness{0.0, 0.0};  // boundary point of largest |arg|

    [[nodiscard]] bool sectorial() const { return angle.has_value(); }
};

inline SectorVerdict sectorial_angle(const CMatrix& x, int m = default_sweep) {
    require_square(x);
    const double scale = std::max(1.0, operator_norm(x));
    const double tau = 1e-13 * scale;
    const double step = 2 * pi / m;

    std::vector<double> h(m);
    int jmin = 0;
    for (int j = 0; j < m; ++j) {
        h[j] = detail::support(x, j * step);
        if (h[j] < h[jmin]) jmin = j;
    }

    SectorVerdict out;
    bool all_small = true;
    for (double v : h) all_small = all_small && v <= tau;
    if (all_small) {
        // W(x) collapses onto {0}.
        out.angle = 0.0;
        return out;
    }

    auto hf = [&](double th) { return detail::support(x, th); };
    double phi_min = jmin * step;
    double hmin = h[jmin];
    if (hmin > tau) {
        const auto r = detail::golden_max([&](double th) { return -hf(th); }, phi_min - step, phi_min + step);
        phi_min = r.first;
        hmin = -r.second;
        if (hmin > tau) return out;  // 0 is interior
    }

    // Walk outward from the minimum to bracket both ends of {h <= tau}.
    auto bisect = [&](double inside, double outside) {
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (inside + outside);
            (hf(mid) <= tau ? inside : outside) = mid;
        }
        return inside;
    };
    double left_out = phi_min - step;
    int guard = 0;
    while (hf(left_out) <= tau && guard++ < m) left_out -= step;
    double right_out = phi_min + step;
    guard = 0;
    while (hf(right_out) <= tau && guard++ < m) right_out += step;
    const double phi_a = bisect(std::min(phi_min, left_out + step), left_out);
    const double phi_b = bisect(std::max(phi_min, right_out - step), right_out);

    const double arc = phi_b - phi_a;
    const double width = std::max(0.0, pi - arc);
    const double alpha1 = detail::wrap_pi(phi_b + pi / 2);
    const double alpha2 = alpha1 + width;

    const cplx p_lo = detail::support_point(x, phi_b).second;  // on the ray alpha1
    const cplx p_hi = detail::support_point(x, phi_a).second;  // on the ray alpha2

    if (alpha2 > pi || alpha1 >= pi) {
        out.angle = pi;
        out.witness = std::abs(alpha1) >= std::abs(detail::wrap_pi(alpha2)) ? p_lo : p_hi;
        return out;
    }
    const double a1 = std::abs(alpha1), a2 = std::abs(alpha2);
    out.angle = std::max(a1, a2);
    // Ties go to the witness with the smaller signed argument.
    if (a1 > a2) {
        out.witness = p_lo;
    } else if (a2 > a1) {
        out.witness = p_hi;
    } else {
        out.witness = alpha1 <= alpha2 ? p_lo : p_hi;
    }
    return out;
}

struct NearlyPositiveResult {
    bool nearly_positive = false;
    double norm = 0.0;
    std::optional<double> angle;
    double skew_norm = 0.0;      // ||x - Re x||
    bool skew_bound_ok = true;   // skew_norm <= eps + eq_tol whenever nearly_positive
};

/// Contraction with sectorial angle < arcsin(eps).
inline NearlyPositiveResult is_nearly_positive(const CMatrix& x, double eps, double eq_tol = 1e-9) {
    require_square(x);
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("is_nearly_positive: eps must lie in (0, 1)");
    NearlyPositiveResult r;
    r.norm = operator_norm(x);
    r.angle = sectorial_angle(x).angle;
    r.skew_norm = operator_norm(x - herm_part(x));
    r.nearly_positive = r.norm <= 1.0 + eq_tol && r.angle && *r.angle < std::asin(eps);
    if (r.nearly_positive) r.skew_bound_ok = r.skew_norm <= eps + eq_tol;
    return r;
}

}  // namespace realpos
