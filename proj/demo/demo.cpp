// Small tour of the library: cones, powers, supports and the transpose map.

#include <iostream>

#include "realpos/algebra.hpp"
#include "realpos/calculus.hpp"
#include "realpos/maps.hpp"
#include "realpos/numrange.hpp"

int main() {
    using namespace realpos;
    std::cout.precision(6);

    CMatrix j(2, 2);
    j << 1, 1, 0, 1;
    const auto ctx = AmbientContext::full(2);

    const auto m = membership(j, ctx);
    std::cout << "J = [[1,1],[0,1]]: abscissa " << abscissa(j) << ", in r " << m.in_r << ", in F " << m.in_F << "\n";
    std::cout << "sectorial angle " << sectorial_angle(j).angle.value_or(pi) << "\n";

    const CrossValidatedPower sq = power_cross(j, 0.5, ctx);
    std::cout << "J^(1/2) =\n" << sq.value << "\nmax deviation between definitions " << sq.max_deviation << "\n";
    std::cout << "||(J^(1/2))^2 - J|| = " << spectral_norm(sq.value * sq.value - j) << "\n";

    CMatrix x = CMatrix::Zero(3, 3);
    x(0, 0) = 2.0;
    x(1, 1) = cplx(1.0, 1.0);
    const SupportIdempotent s = support_idem(x, AmbientContext::full(3));
    std::cout << "support of diag(2, 1+i, 0):\n" << s.s.real() << "\n";

    const RcpResult r = rcp_test(transpose_map(2));
    std::cout << "transpose on M_2: " << r.label;
    if (r.witness) std::cout << " (level " << r.witness->level << ", image abscissa " << r.witness->image_abscissa << ")";
    std::cout << "\n";
    return 0;
}
