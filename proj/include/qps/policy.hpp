#pragma once

#include <cstdint>

namespace qps {

// Every tolerance and cap used by the library, in one record.  Functions that
// enforce a contract take the policy explicitly so tests can sweep it.
struct NumericPolicy {
  // tensor-core contracts
  double hermitian_tol = 1e-12;   // |M - M^dag| per entry for Hermitian-flagged matrices
  double trace_one_tol = 1e-10;   // |tr(rho) - 1|
  double psd_floor = -1e-10;      // minimum eigenvalue of a density matrix
  double eig_residual_tol = 1e-9; // |M v - lambda v| relative to |M|
  double hermitian_check_tol = 1e-8; // input gate for hermitian_eig

  // graph / instance contracts
  double graph_norm_tol = 1e-12; // |sum_ij G_ij - 1|
  double term_norm_tol = 1e-10;  // operator-norm slack on interaction terms

  // information-theory contracts
  double identity_tol = 1e-10;    // chain rule etc. are equalities to this
  double nonneg_info_floor = -1e-10;
  double dist_sum_tol = 1e-10;    // |sum p - 1| for joint distributions

  // measurement contracts
  double povm_completeness_tol = 1e-10; // |sum_x M_x - I|
  double effect_psd_floor = -1e-12;
  double design_moment_tol = 1e-10;
  double reconstruct_tol = 1e-8;

  // moment-SDP
  double sdp_psd_tol = 1e-7;     // residual |lambda_min| allowed in a solution
  double sdp_obj_tol = 1e-6;     // default objective tolerance
  double pseudo_prob_floor = -1e-9; // rounding: clip threshold for pseudo-probabilities
  double clipped_mass_max = 1e-6;   // rounding: run is flagged beyond this

  // global dense-storage cap, in matrix entries
  std::int64_t entry_cap = std::int64_t(1) << 22;
};

inline const NumericPolicy& default_policy() {
  static const NumericPolicy p{};
  return p;
}

} // namespace qps
