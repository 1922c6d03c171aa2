#include "kerrosc/liouvillian.hpp"
#include "kerrosc/errors.hpp"
#include "kerrosc/parallel.hpp"
#include <Eigen/SparseLU>
#include <cmath>

namespace kerrosc {

SteadyState steady_state(const ModelParams& params, int n_max, const ClassicalBranches* branches)
{
    params.validate();
    if (!(params.gamma > 0))
        throw Error("steady_state: gamma > 0 required for a unique stationary state");
    const int d = n_max + 1;
    const int dim = d * d;
    SparseSuperOp gen = build_lindblad_superoperator(params, n_max);

    // replace the first row (the rho_00 equation) with the trace functional
    SparseSuperOp sys = gen;
    for (int col = 0; col < dim; col++) {
        for (SparseSuperOp::InnerIterator it(sys, col); it; ++it)
            if (it.row() == 0)
                it.valueRef() = 0;
    }
    std::vector<Eigen::Triplet<cplx>> trace_row;
    for (int n = 0; n < d; n++)
        trace_row.emplace_back(0, n * d + n, cplx(1, 0));
    SparseSuperOp tr(dim, dim);
    tr.setFromTriplets(trace_row.begin(), trace_row.end());
    sys += tr;
    sys.prune([](int, int, const cplx& v) { return v != cplx(0, 0); });
    sys.makeCompressed();

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
    rhs(0) = 1;

    Eigen::VectorXcd x;
    Eigen::SparseLU<SparseSuperOp> lu;
    lu.compute(sys);
    bool sparse_ok = (lu.info() == Eigen::Success);
    if (sparse_ok)
        x = lu.solve(rhs);

    auto residual_of = [&](const Eigen::VectorXcd& v) {
        Eigen::VectorXcd r = gen * v;
        r(0) = 0;  // the replaced row is not part of the stationarity condition
        return r.norm() / std::max(v.norm(), 1e-300);
    };

    double res = sparse_ok ? residual_of(x) : std::numeric_limits<double>::infinity();
    if (!sparse_ok || !(res < 1e-8)) {
        if (d <= 50) {
            Eigen::MatrixXcd dense(sys);
            x = dense.fullPivLu().solve(rhs);
            res = residual_of(x);
        }
        if (!(res < 1e-6))
            throw SolverError("steady_state: stationary solve failed", res);
    }

    SteadyState out;
    out.rho = unvectorize(x, d);
    out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();  // clean rounding asymmetry
    out.residual = res;
    for (int n = 0; n < d; n++)
        out.mean_intensity += n * out.rho(n, n).real();

    if (params.drive > 0 && params.delta > 0 && params.alpha > 0) {
        try {
            ClassicalBranches local;
            const ClassicalBranches* cb = branches;
            if (!cb) {
                local = build_classical_branches(params);
                cb = &local;
            }
            QuasienergySpectrum sp = diagonalize(params, n_max, cb);
            out.occupations = region_occupations(out.rho, sp);
        } catch (const Error&) {
            // monostable or unlabeled portrait: leave occupations at zero
        }
    }
    return out;
}

RegionOccupations region_occupations(const Eigen::MatrixXcd& rho,
                                     const QuasienergySpectrum& spectrum)
{
    if (!spectrum.labels_valid)
        throw Error("region_occupations: spectrum carries no region labels");
    RegionOccupations occ;
    const Eigen::MatrixXd& v = spectrum.basis;
    for (int i = 0; i < (int)spectrum.levels.size(); i++) {
        const SpectrumLevel& lev = spectrum.levels[i];
        Eigen::VectorXcd vi = v.col(i).cast<cplx>();
        double p = vi.dot(rho * vi).real();
        if (lev.boundary)
            occ.boundary_mass += p;
        switch (lev.label) {
            case Region::r2:
                occ.p2 += p;
                break;
            case Region::r3_outer:
                occ.p3 += p;
                break;
            case Region::r1:
            case Region::r3: {
                double w1 = lev.weight1;
                if (w1 > 0.02 && w1 < 0.98)
                    occ.split_mass += p;
                occ.p1 += w1 * p;
                occ.p3 += (1 - w1) * p;
                break;
            }
        }
    }
    occ.warning = (occ.boundary_mass > 0.05);
    return occ;
}

std::vector<SweepRow> sweep_occupations(const ModelParams& params_base,
                                        const std::vector<double>& delta_grid, int n_max,
                                        int workers, const ClassicalBranches* branches)
{
    std::vector<SweepRow> rows(delta_grid.size());
    parallel_for(delta_grid.size(), workers, [&](std::size_t k) {
        SweepRow& row = rows[k];
        row.delta = delta_grid[k];
        try {
            ModelParams p = params_base;
            p.delta = delta_grid[k];
            int nm = (n_max > 0) ? n_max : p.default_n_max();
            SteadyState ss = steady_state(p, nm, branches);
            row.p1 = ss.occupations.p1;
            row.p2 = ss.occupations.p2;
            row.p3 = ss.occupations.p3;
            row.mean_intensity = ss.mean_intensity;
            row.residual = ss.residual;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });
    return rows;
}

} // namespace kerrosc
