#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qps/hamiltonian.hpp"
#include "qps/infotools_types.hpp"
#include "qps/measurement.hpp"
#include "qps/tensor.hpp"

namespace qps {

// entropies are in nats throughout; 0 ln 0 := 0
double entropy(const std::vector<double>& probs);
double entropy(const JointDistribution& p);
double entropy(const DensityMatrix& rho);

// Entropies of the marginal on every subset of sites, indexed by bitmask.
class SubsetEntropies {
public:
  explicit SubsetEntropies(const JointDistribution& p);
  double operator()(std::uint32_t mask) const { return h_[mask]; }
  double of_sites(const std::vector<int>& sites) const;
  int sites() const { return n_; }

private:
  int n_ = 0;
  std::vector<double> h_;
};

// multipartite mutual information: S(G_1)+...+S(G_k)-S(G_1...G_k)
double mutual_information(const JointDistribution& p,
                          const std::vector<std::vector<int>>& groups);
double mutual_information(const DensityMatrix& rho, const std::vector<std::vector<int>>& groups);

// I(A:B|C) via the entropy combination S(AC)+S(BC)-S(ABC)-S(C).  The classical
// overload cross-checks against the average-over-conditionals form.
double conditional_mutual_information(const JointDistribution& p, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c,
                                      const NumericPolicy& policy = default_policy());
double conditional_mutual_information(const DensityMatrix& rho, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c);

// conditional distribution p(rest | sites = values), with its weight
struct Conditional {
  double weight = 0.0; // marginal probability of the observed values
  JointDistribution dist; // over the remaining sites, renormalized
};
Conditional condition_on(const JointDistribution& p, const std::vector<int>& sites,
                         const std::vector<int>& values);

double l1_distance(const JointDistribution& a, const JointDistribution& b);
JointDistribution product_of_marginals(const JointDistribution& p,
                                       const std::vector<std::vector<int>>& groups);

JointDistribution random_distribution(const std::vector<int>& sizes, Rng& rng);
JointDistribution random_symmetric_distribution(int n, int alphabet, Rng& rng);

// --- identity suite -----------------------------------------------------------

struct IdentityReport {
  int classical_trials = 0;
  int quantum_trials = 0;
  double max_chain_rule_gap = 0.0;       // |I(A:BR) - I(A:R) - I(A:B|R)|
  double max_multi_to_bi_gap = 0.0;      // multipartite vs telescoped bipartite sum
  double max_cmi_form_gap = 0.0;         // classical: combination vs average form
  double min_pinsker_slack = 0.0;        // I - 0.5 |p - prod|_1^2, most negative seen
  double min_upper_limit_slack = 0.0;    // bound - I, most negative seen
  double min_monotonicity_slack = 0.0;   // I(A:BC) - I(A:B), most negative seen
  bool ok = false;
};

IdentityReport check_info_identities(std::uint64_t seed, int trials,
                                     const NumericPolicy& policy = default_policy());

// --- decoupling ---------------------------------------------------------------

struct SelfDecouplingReport {
  double lhs = 0.0;          // averaged conditioned correlation
  double rhs = 0.0;          // (1/k) E_i I(X_i : X_-i)
  bool holds = false;
  int k = 0;
  // best derandomized choice
  int best_kprime = 0;
  std::vector<int> best_sites;
  double best_value = 0.0;
  bool derandomized_holds = false;
};

// mu is a distribution over sites; exact enumeration (the Monte Carlo path is
// not used for assertions and is intentionally not implemented here).
SelfDecouplingReport self_decoupling(const JointDistribution& p, const std::vector<double>& mu,
                                     int k, const NumericPolicy& policy = default_policy());

struct BlockDecouplingReport {
  double lhs_min = 0.0;  // best selection, asserted against rhs
  double lhs_avg = 0.0;  // averaged over all selections, for inspection
  double rhs = 0.0;
  bool holds = false;
  int k = 0;
  int best_kprime = 0;
  std::vector<std::vector<int>> best_sites; // per block
};

BlockDecouplingReport block_self_decoupling(const JointDistribution& p,
                                            const BlockPartition& partition, int k,
                                            const NumericPolicy& policy = default_policy());

// --- measure-and-condition construction ---------------------------------------

struct ConditionedStateReport {
  int n = 0, m = 0, nblocks = 0;
  double delta1 = 0.0, delta2 = 0.0;
  int ktilde = 0, k = 0;
  int combos_searched = 0;
  std::vector<int> measured_sites; // the selected set C
  // step quantities, keyed by the stage of the construction
  double block_block_cmi = 0.0;   // step 1
  double block_site_cmi = 0.0;    // step 2 (selection criterion)
  double edge_block_site_cmi = 0.0; // step 3
  double site_site_cmi = 0.0;     // step 4
  double classical_l1 = 0.0;      // step 5
  double quantum_trace_dist = 0.0; // step 6, across-block edges
  double lhs = 0.0;               // step 7: E_(a,b) |rho^ab - sigma^ab|_1
};

ConditionedStateReport conditioned_product_state(const DensityMatrix& rho, const Povm& povm,
                                                 const BlockPartition& partition,
                                                 const InteractionGraph& graph, double delta1,
                                                 double delta2, std::uint64_t seed,
                                                 const NumericPolicy& policy = default_policy());

// --- conditioning de Finetti experiments ---------------------------------------

struct DeFinettiReport {
  int n = 0, k = 0, t = 0;
  std::vector<double> lhs_per_m; // index m = 0..t
  double lhs_min = 0.0;
  int best_m = 0;
  double rhs = 0.0;
  bool holds = false;
};

DeFinettiReport definetti_classical(const JointDistribution& p, int k, int t,
                                    const NumericPolicy& policy = default_policy());

struct SymmetricDeFinettiReport {
  int n = 0, k = 0;
  double lhs = 0.0; // min over m of |p^(k) - mixture_m|_1
  int best_m = 0;
  double rhs = 0.0; // sqrt(2 k^2 ln|alphabet| / (n-k))
  bool holds = false;
};

// mixture-distance corollary for permutation-symmetric p
SymmetricDeFinettiReport definetti_symmetric(const JointDistribution& p, int k,
                                             const NumericPolicy& policy = default_policy());

DeFinettiReport definetti_quantum(const DensityMatrix& rho, const Povm& povm, int k, int t,
                                  const NumericPolicy& policy = default_policy());

} // namespace qps
