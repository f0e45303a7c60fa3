#pragma once

#include <string>
#include <vector>

#include "qps/infotools_types.hpp"
#include "qps/tensor.hpp"

namespace qps {

// POVM on C^d: PSD effects summing to the identity.
struct Povm {
  int d = 2;
  std::vector<ComplexMatrix> effects;

  int outcomes() const { return int(effects.size()); }
};

void validate_povm(const Povm& p, const NumericPolicy& policy = default_policy());

// 12 rank-1 effects (1/6)|phi_x><phi_x| on the icosahedron's Bloch vectors.
// The ensemble {1/12, phi_x} is a projective 4-design, which is what gives the
// measurement its distortion guarantee.
Povm icosahedral_povm();

// Approximate informationally complete POVM for d > 2: d*d seeded random
// rank-1 effects completed by the deficit operator.  Completeness is a
// numerical fact here (checked via the Gram rank), not a design guarantee.
Povm random_rank1_povm(int d, std::uint64_t seed);

// max deviation of E_x <psi|phi_x>^8-type fourth moments from the symmetric
// subspace value, over `trials` random pure states
double design_moment_deviation(const Povm& p, int trials, std::uint64_t seed);

// Linear inverse of the measurement channel, via least squares on the
// vectorized effects.
struct ReconstructionMap {
  int d = 2;
  RealMatrix pinv;    // (d*d) x outcomes, acting on probability vectors
  double condition = 0.0;
  double residual = 0.0; // smallest singular value of the effect matrix
};

ReconstructionMap build_reconstruction(const Povm& p,
                                       const NumericPolicy& policy = default_policy());

// Exact outcome distribution of measuring `sites` of rho with p on each site.
JointDistribution measure_channel(const Povm& p, const DensityMatrix& rho,
                                  const std::vector<int>& sites,
                                  const NumericPolicy& policy = default_policy());

// Least-squares state fit followed by the density-matrix projection.
DensityMatrix reconstruct(const Povm& p, const std::vector<double>& probs,
                          const NumericPolicy& policy = default_policy());
DensityMatrix reconstruct_with(const ReconstructionMap& map, const std::vector<double>& probs,
                               const NumericPolicy& policy = default_policy());

// tr[(M_x1 (x) ... (x) M_xm) op] for every outcome tuple; op need not be a state
void apply_channel_tensor(const Povm& p, const ComplexMatrix& op, int site_count,
                          std::vector<double>& out);

struct DistortionReport {
  int k = 1;
  double estimate = 0.0;     // max ratio found; a lower bound on the true sup
  double bound = 0.0;        // (18 d)^(k/2)
  bool within_bound = false;
  int trials = 0;
};

// Search lower bound on sup |xi|_1 / |Lambda^(x)k (xi)|_1 over traceless
// Hermitian xi: random trials plus greedy local refinement.
DistortionReport distortion_estimate(const Povm& p, int k, int trials, std::uint64_t seed,
                                     const NumericPolicy& policy = default_policy());

std::string povm_to_json(const Povm& p);

} // namespace qps
