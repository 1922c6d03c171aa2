#include "kerrosc/husimi.hpp"
#include "kerrosc/errors.hpp"
#include "kerrosc/tunneling.hpp"
#include <cmath>

namespace kerrosc {

double husimi_q(const Eigen::MatrixXcd& rho, cplx beta)
{
    const int d = (int)rho.rows();
    Eigen::VectorXcd coh(d);
    double log_norm = -0.5 * std::norm(beta);
    cplx term(std::exp(log_norm), 0);
    coh(0) = term;
    for (int n = 1; n < d; n++) {
        term *= beta / std::sqrt((double)n);
        coh(n) = term;
    }
    double q = coh.dot(rho * coh).real() / M_PI;
    return q;
}

Region classify_point(const ModelParams& params, const PhasePortrait& pp, cplx beta)
{
    if (!pp.bistable)
        throw Error("classify_point: bistable portrait required");
    double eps = classical_hamiltonian(params, beta);
    if (eps < pp.eps_sep)
        return Region::r2;
    if (eps >= pp.eps1)
        return Region::r3_outer;
    auto [q1, q2] = tunneling_branch_points(params, pp, eps);
    double s = std::abs(beta) * std::sqrt(2 * params.alpha / params.delta);
    if (s <= q1)
        return Region::r1;
    if (s >= q2)
        return Region::r3;
    // inside the barrier band: attach to the nearer edge
    return (s - q1 < q2 - s) ? Region::r1 : Region::r3;
}

HusimiOccupations husimi_region_occupations(const Eigen::MatrixXcd& rho,
                                            const ModelParams& params, const PhasePortrait& pp,
                                            int grid_points)
{
    HusimiOccupations occ;
    const int d = (int)rho.rows();
    double r_max = 1.5 * std::sqrt((double)d);  // coherent support of the truncated space
    double h = 2 * r_max / (grid_points - 1);
    for (int ix = 0; ix < grid_points; ix++) {
        for (int iy = 0; iy < grid_points; iy++) {
            cplx beta(-r_max + ix * h, -r_max + iy * h);
            double q = husimi_q(rho, beta) * h * h;
            if (q <= 0)
                continue;
            occ.coverage += q;
            switch (classify_point(params, pp, beta)) {
                case Region::r1: occ.p1 += q; break;
                case Region::r2: occ.p2 += q; break;
                default: occ.p3 += q; break;
            }
        }
    }
    return occ;
}

} // namespace kerrosc
