#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "qps/hamiltonian.hpp"
#include "qps/measurement.hpp"
#include "qps/tensor.hpp"

namespace qps {

// Pauli string on n qubits, two bits per site (0=I, 1=X, 2=Y, 3=Z).
struct PauliString {
  std::uint64_t code = 0;
  int n = 0;

  int letter(int site) const { return int((code >> (2 * site)) & 3); }
  int weight() const;
  std::string label() const; // "I" or e.g. "X2Z5"

  static PauliString identity(int n) { return {0, n}; }
  static PauliString single(int n, int site, int letter);
};

struct PauliProduct {
  std::uint64_t code = 0; // resulting string
  int phase = 0;          // exponent s of i^s, mod 4
};

// exact integer-phase product P_a * P_b = i^s * P_c
PauliProduct pauli_mul(std::uint64_t a, std::uint64_t b, int n);

// expansion coefficients of a Hermitian 2-qubit operator in the Pauli basis
// (16 real numbers, indexed letter0*4+letter1)
std::array<double, 16> two_site_pauli_coeffs(const ComplexMatrix& term);

struct MomentProblem {
  int n = 0;
  int k = 0;
  std::vector<std::uint64_t> basis;    // strings of weight <= k (matrix index)
  std::vector<std::uint64_t> mstrings; // strings of weight <= min(2k, n)
  std::unordered_map<std::uint64_t, int> mindex;
  // flattened |basis|^2 product tables
  std::vector<int> prod_index;
  std::vector<std::uint8_t> prod_phase;
  std::vector<double> multiplicity; // per m-string: number of matrix cells it occupies
  std::vector<double> objective;    // per m-string
  std::string meta_hash;            // instance hash for reports

  int side() const { return int(basis.size()); }
  int vars() const { return int(mstrings.size()); }
};

// d = 2 only; the moment basis is the Pauli basis.
MomentProblem build_moment_problem(const HamiltonianInstance& h, int k,
                                   const NumericPolicy& policy = default_policy());

struct MomentSolution {
  int k = 0;
  std::vector<double> m;        // indexed like problem.mstrings; m[identity] = 1
  double objective = 0.0;
  double psd_residual = 0.0;    // |min(0, lambda_min of the moment matrix)|
  double gap_estimate = 0.0;    // scale of remaining primal/dual movement
  int iterations = 0;
  bool converged = false;
};

struct SdpOptions {
  double tol = 1e-6;        // objective stability target
  int max_iters = 20000;
  double psd_tol = 1e-7;    // allowed PSD violation of the returned m
  // ADMM internals
  double rho0 = 1.0;        // initial penalty
  double alpha = 1.6;       // over-relaxation
  bool adapt_rho = true;
  std::ostream* trace = nullptr; // iteration log for tuning
};

// ADMM splitting between the moment parametrization (affine constraints exact
// by construction) and the PSD cone; projection by eigendecomposition.
MomentSolution solve_sdp(const MomentProblem& problem, const SdpOptions& opts = {});

// Hermitian moment matrix M(m)
ComplexMatrix moment_matrix(const MomentProblem& problem, const std::vector<double>& m);

// moments of an actual state: m_c = tr(rho P_c); feasible by construction
std::vector<double> moments_from_state(const MomentProblem& problem, const DensityMatrix& rho);

struct SandwichReport {
  std::vector<int> levels;
  std::vector<double> values;
  std::vector<bool> converged;
  double e0 = 0.0;
  bool has_e0 = false;
  bool monotone = true;       // v_k nondecreasing within tolerance
  bool below_exact = true;    // v_k <= e0 + tol for all k
};

SandwichReport sdp_sandwich(const HamiltonianInstance& h, int kmax,
                            const SdpOptions& opts = {},
                            const NumericPolicy& policy = default_policy());

struct RoundingRun {
  int m = 0;                  // number of site draws
  std::vector<int> sites;     // deduplicated S
  double energy = 0.0;
  double clipped_mass = 0.0;
  bool flagged = false;
  std::vector<ComplexMatrix> site_states; // one per site; |0><0| for sites in S
};

struct RoundingReport {
  int samples = 0;
  double objective = 0.0;
  double mean_energy = 0.0;
  double best_energy = 0.0;
  double mean_gap = 0.0;      // mean energy - objective
  double max_clipped_mass = 0.0;
  int flagged_runs = 0;
  std::vector<RoundingRun> runs;
};

// Propagation-sampling rounding: sample outcomes of a few sites from the
// pseudo-distribution, condition, and rebuild every other site from its
// conditional single-site statistics.
RoundingReport propagation_sampling(const MomentProblem& problem, const MomentSolution& solution,
                                    const HamiltonianInstance& h, const Povm& povm,
                                    std::uint64_t seed, int samples,
                                    const NumericPolicy& policy = default_policy());

struct ThresholdRankReport {
  int n = 0, degree = 0;
  std::vector<double> lambda_grid;
  std::vector<int> ranks;
  double epsilon = 0.0;
  int sites_needed_lower = 0; // 8k/eps at the smallest grid rank
  bool desk_scale = false;    // whether that k fits the caps here
};

ThresholdRankReport threshold_rank_certificate(const HamiltonianInstance& h, double epsilon);

std::string solution_to_json(const MomentProblem& problem, const MomentSolution& solution);

} // namespace qps
