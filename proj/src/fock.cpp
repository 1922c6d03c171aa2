#include "kerrosc/fock.hpp"
#include "kerrosc/errors.hpp"
#include <cmath>
#include <sstream>
#include <vector>

namespace kerrosc {

FockMatrix annihilation_op(int n_max)
{
    const int d = n_max + 1;
    FockMatrix a = FockMatrix::Zero(d, d);
    for (int n = 1; n < d; n++)
        a(n - 1, n) = std::sqrt((double)n);
    return a;
}

FockMatrix number_op(int n_max)
{
    const int d = n_max + 1;
    FockMatrix n = FockMatrix::Zero(d, d);
    for (int k = 0; k < d; k++)
        n(k, k) = k;
    return n;
}

FockMatrix build_hamiltonian(const ModelParams& params, int n_max)
{
    params.validate();
    if (n_max < 1)
        throw std::invalid_argument("build_hamiltonian: n_max must be >= 1");
    if (params.delta > 0 && params.alpha > 0) {
        double high_amp = params.delta / params.alpha;
        if (high_amp > 0.5 * n_max) {
            std::ostringstream os;
            os << "Fock truncation n_max=" << n_max
               << " too small: classical high-amplitude intensity delta/alpha=" << high_amp
               << " exceeds n_max/2; use n_max >= " << params.default_n_max();
            throw TruncationError(os.str(), params.default_n_max());
        }
    }
    const int d = n_max + 1;
    FockMatrix h = FockMatrix::Zero(d, d);
    for (int n = 0; n < d; n++) {
        double nn = n;
        h(n, n) = -params.delta * nn + 0.5 * params.alpha * nn * nn + params.potential(nn);
    }
    for (int n = 1; n < d; n++) {
        double el = params.drive * std::sqrt((double)n);
        h(n - 1, n) += el;
        h(n, n - 1) += el;
    }
    return h;
}

SparseSuperOp build_lindblad_superoperator(const ModelParams& params, int n_max)
{
    const FockMatrix h = build_hamiltonian(params, n_max);
    const int d = n_max + 1;
    const double gnp = params.gamma * (params.n_thermal + 1);
    const double gn = params.gamma * params.n_thermal;
    const cplx iu(0, 1);

    // column-stacking convention: vec(A rho B) = (B^T kron A) vec(rho)
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve((std::size_t)16 * d * d);
    auto add = [&](int r, int c, cplx v) {
        if (v != cplx(0, 0))
            trip.emplace_back(r, c, v);
    };
    auto idx = [d](int row, int col) { return col * d + row; };

    for (int j = 0; j < d; j++) {      // rho column
        for (int i = 0; i < d; i++) {  // rho row
            const int r = idx(i, j);
            // i[rho, H] = i(rho H - H rho)
            for (int k = 0; k < d; k++) {
                if (h(k, j) != 0.0)
                    add(r, idx(i, k), iu * h(k, j));   // (rho H)_{ij} = rho_{ik} H_{kj}
                if (h(i, k) != 0.0)
                    add(r, idx(k, j), -iu * h(i, k));  // (H rho)_{ij}
            }
            if (params.gamma > 0) {
                // gamma(N+1) [a rho a+ - (a+a rho + rho a+a)/2]
                if (i + 1 < d && j + 1 < d)
                    add(r, idx(i + 1, j + 1), gnp * std::sqrt((double)(i + 1) * (j + 1)));
                add(r, r, -0.5 * gnp * (double)(i + j));
                // gamma N [a+ rho a - (a a+ rho + rho a a+)/2]; the truncated
                // product (a a+) vanishes on the top level, which keeps the
                // generator exactly trace-preserving on the truncated space
                if (i > 0 && j > 0)
                    add(r, idx(i - 1, j - 1), gn * std::sqrt((double)i * j));
                double aad_i = (i + 1 < d) ? i + 1 : 0;
                double aad_j = (j + 1 < d) ? j + 1 : 0;
                add(r, r, -0.5 * gn * (aad_i + aad_j));
            }
        }
    }
    SparseSuperOp gen(d * d, d * d);
    gen.setFromTriplets(trip.begin(), trip.end());
    gen.makeCompressed();
    return gen;
}

Eigen::MatrixXcd apply_generator(const SparseSuperOp& gen, const Eigen::MatrixXcd& rho)
{
    Eigen::VectorXcd v = vectorize(rho);
    Eigen::VectorXcd w = gen * v;
    return unvectorize(w, (int)rho.rows());
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho)
{
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int dim)
{
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

} // namespace kerrosc
