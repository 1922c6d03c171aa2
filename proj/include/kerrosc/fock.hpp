#pragma once
#include "kerrosc/params.hpp"
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>

namespace kerrosc {

using cplx = std::complex<double>;
using FockMatrix = Eigen::MatrixXcd;
using SparseSuperOp = Eigen::SparseMatrix<cplx>;

/// Annihilation operator on the (n_max+1)-dimensional truncated Fock space:
/// nonzeros on the first superdiagonal, <n-1|a|n> = sqrt(n).
FockMatrix annihilation_op(int n_max);

/// Diagonal number operator.
FockMatrix number_op(int n_max);

/// Rotating-frame Hamiltonian -delta n + (alpha/2) n^2 + V(n) + drive (a + a+).
/// Throws TruncationError when n_max < 2 delta/alpha (the high-amplitude
/// intensity would not be representable), with the default truncation as the
/// suggested fix.
FockMatrix build_hamiltonian(const ModelParams& params, int n_max);

/// Generator of the quantum master equation acting on column-stacked density
/// matrices: L[rho] = i[rho,H] + gamma(N+1) D[a] rho + gamma N D[a+] rho.
/// Assembled sparse; nonzero count scales as the square of the Fock dimension.
SparseSuperOp build_lindblad_superoperator(const ModelParams& params, int n_max);

/// Apply the generator to a density matrix (test and validation helper).
Eigen::MatrixXcd apply_generator(const SparseSuperOp& gen, const Eigen::MatrixXcd& rho);

/// Column-stacking of a matrix and its inverse.
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int dim);

} // namespace kerrosc
