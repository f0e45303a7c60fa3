#pragma once

#include <cstdint>
#include <vector>

#include "qps/hamiltonian.hpp"
#include "qps/tensor.hpp"

namespace qps {

// Pure product state over the blocks of a partition: one unit vector of
// dimension d^|block| per block.
struct ProductState {
  BlockPartition partition;
  std::vector<ComplexVector> factors;
};

void validate_product_state(const ProductState& phi, int n, int d,
                            const NumericPolicy& policy = default_policy());

// sum_(i,j) w_ij <phi| H_ij |phi>
double product_energy(const HamiltonianInstance& h, const ProductState& phi,
                      const NumericPolicy& policy = default_policy());

struct SweepResult {
  ProductState state;
  double energy = 0.0;
  int sweeps = 0;        // total over the winning restart
  int restarts = 0;
  bool converged = false;
};

// Block coordinate descent: each block is replaced by the lowest eigenvector
// of its effective operator against the other blocks' current states.  Energy
// is nonincreasing within a restart; best of `restarts` random starts wins.
SweepResult meanfield_sweep(const HamiltonianInstance& h, const BlockPartition& partition,
                            int restarts, std::uint64_t seed,
                            const NumericPolicy& policy = default_policy());

struct BasicBoundReport {
  int n = 0, d = 0, degree = 0;
  double e0 = 0.0;
  double e_product = 0.0;
  double gap = 0.0;
  double bound = 0.0; // 12 (d^2 ln d / D)^{1/3}
  bool holds = false;
  std::uint64_t seed = 0;
  int restarts = 0;
};

// degree-based check; requires an unweighted regular instance with n >= D
BasicBoundReport bound_check_basic(const HamiltonianInstance& h, int restarts,
                                   std::uint64_t seed,
                                   const NumericPolicy& policy = default_policy());

struct ClusteredBoundReport {
  int n = 0, d = 0, degree = 0, m = 0;
  double e0 = 0.0;
  double e_block_product = 0.0; // block mean-field energy
  double avg_expansion = 0.0;   // mean block expansion
  double avg_info = 0.0;        // mean I(V_i : complement) of rho
  double bound = 0.0;           // 9 (d^2 avg_expansion / D * avg_info / m)^{1/6} + 1/m + m/n
  double lhs = 0.0;             // constructed-state edge trace distance
  double delta = 0.0;           // balancing parameter used for the construction
  bool holds = false;           // lhs <= bound
  std::uint64_t seed = 0;
};

// rho defaults to the exact ground state when not supplied
ClusteredBoundReport bound_check_clustered(const HamiltonianInstance& h,
                                           const BlockPartition& partition,
                                           const DensityMatrix* rho, int restarts,
                                           std::uint64_t seed,
                                           const NumericPolicy& policy = default_policy());

struct WeightedBoundReport {
  int n = 0, d = 0;
  double e0 = 0.0;
  double e_product = 0.0;
  double gap = 0.0;
  double collision = 0.0;  // tr[A^2] |pi|_2^2
  double pi_norm2 = 0.0;   // |pi|_2^2
  double bound = 0.0;      // 14 (d^4 ln d * collision)^{1/8} + |pi|_2^2
  bool holds = false;
  std::uint64_t seed = 0;
  int restarts = 0;
};

WeightedBoundReport bound_check_weighted(const HamiltonianInstance& h, int restarts,
                                         std::uint64_t seed,
                                         const NumericPolicy& policy = default_policy());

} // namespace qps
