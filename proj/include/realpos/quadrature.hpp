#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for matrix-valued
// integrands on a finite interval.

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "realpos/linalg.hpp"

namespace realpos {

struct QuadratureResult {
    CMatrix value;
    double error_estimate = 0.0;  // sum of |K15 - G7| over panels, Frobenius norm
    int panels = 0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> gk_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes 1, 3, 5, 7 above.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    CMatrix value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b, int& evals) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    CMatrix fc = f(c);
    CMatrix kron = fc * kronrod_weights[7];
    CMatrix gauss = fc * gauss_weights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk_nodes[i];
        CMatrix s = f(c - dx) + f(c + dx);
        kron += s * kronrod_weights[i];
        if (i % 2 == 1) gauss += s * gauss_weights[i / 2];
    }
    evals += 15;
    Panel p{a, b, kron * h, 0.0};
    p.error = ((kron - gauss) * h).norm();
    return p;
}

}  // namespace detail

/// Integrates f over [a, b] until the summed error estimate is below abs_tol
/// or max_panels panels are in use.
template <class F>
QuadratureResult integrate_gk(F f, double a, double b, double abs_tol, int max_panels) {
    QuadratureResult out;
    std::priority_queue<detail::Panel> heap;
    heap.push(detail::gk15(f, a, b, out.evaluations));
    double total_err = heap.top().error;
    while (total_err > abs_tol && static_cast<int>(heap.size()) < max_panels) {
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted
            heap.push(worst);
            break;
        }
        detail::Panel left = detail::gk15(f, worst.a, mid, out.evaluations);
        detail::Panel right = detail::gk15(f, mid, worst.b, out.evaluations);
        total_err += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
    }
    out.panels = static_cast<int>(heap.size());
    // Sum from smallest error upward for a stable total.
    std::vector<detail::Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    out.value = CMatrix::Zero(panels.front().value.rows(), panels.front().value.cols());
    out.error_estimate = 0.0;
    for (auto it = panels.rbegin(); it != panels.rend(); ++it) {
        out.value += it->value;
        out.error_estimate += it->error;
    }
    out.converged = out.error_estimate <= abs_tol;
    return out;
}

}  // namespace realpos
