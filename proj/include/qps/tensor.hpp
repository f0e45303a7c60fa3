#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qps/errors.hpp"
#include "qps/policy.hpp"
#include "qps/rng.hpp"

namespace qps {

using cxd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Site 0 is the leftmost tensor factor (most significant digit of a basis
// index).  All multi-site code in the project follows this convention.
std::int64_t product_dim(const std::vector<int>& dims);

// Full density matrix over a list of local dimensions.
struct DensityMatrix {
  std::vector<int> dims;
  ComplexMatrix mat;

  int dim() const { return int(mat.rows()); }
  int sites() const { return int(dims.size()); }
};

// Throws ContractViolation if rho is not Hermitian / trace-1 / PSD within policy.
void validate_density(const DensityMatrix& rho, const NumericPolicy& policy = default_policy());

bool is_hermitian(const ComplexMatrix& m, double tol);

// Kronecker product with the global entry cap.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   const NumericPolicy& policy = default_policy());
ComplexVector kron(const ComplexVector& a, const ComplexVector& b,
                   const NumericPolicy& policy = default_policy());

// Marginal on `keep` (strictly increasing site indices).  Empty keep returns
// the 1x1 matrix [tr rho].
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

struct EigResult {
  RealVector values;   // ascending
  ComplexMatrix vectors; // columns
};

// Dense Hermitian eigendecomposition.  Rejects inputs that are not Hermitian
// within policy.hermitian_check_tol.
EigResult hermitian_eig(const ComplexMatrix& m, const NumericPolicy& policy = default_policy());

// Eigenvalues only (ascending); same contract, cheaper.
RealVector hermitian_eigenvalues(const ComplexMatrix& m,
                                 const NumericPolicy& policy = default_policy());

// Sum of singular values.  Square input required.
double trace_norm(const ComplexMatrix& m);

// Hermitize, clip negative eigenvalues, renormalize the trace.  The zero
// matrix maps to the maximally mixed state.
DensityMatrix nearest_density_matrix(const ComplexMatrix& m, const std::vector<int>& dims,
                                     const NumericPolicy& policy = default_policy());

// Embed an operator acting on `sites` (distinct, ascending order corresponds
// to the row-major factor order of `op`) into the full space.
ComplexMatrix embed_operator(const ComplexMatrix& op, const std::vector<int>& sites,
                             const std::vector<int>& dims,
                             const NumericPolicy& policy = default_policy());

// --- small constructors -----------------------------------------------------

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix swap_operator(int d); // on C^d (x) C^d

ComplexVector random_state(int dim, Rng& rng);           // Haar via Gaussian
ComplexMatrix random_hermitian(int dim, Rng& rng);       // GUE, Hermitized
DensityMatrix random_density(const std::vector<int>& dims, Rng& rng); // mixed, full rank a.s.
ComplexMatrix projector(const ComplexVector& v);

} // namespace qps
