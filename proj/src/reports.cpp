#include "qps/reports.hpp"

namespace qps {

const char* version_string() { return "qpslab 0.1.0"; }

ordered_json policy_to_json(const NumericPolicy& p) {
  return {{"hermitian_tol", p.hermitian_tol},
          {"trace_one_tol", p.trace_one_tol},
          {"psd_floor", p.psd_floor},
          {"eig_residual_tol", p.eig_residual_tol},
          {"identity_tol", p.identity_tol},
          {"reconstruct_tol", p.reconstruct_tol},
          {"sdp_psd_tol", p.sdp_psd_tol},
          {"sdp_obj_tol", p.sdp_obj_tol},
          {"pseudo_prob_floor", p.pseudo_prob_floor},
          {"clipped_mass_max", p.clipped_mass_max},
          {"entry_cap", p.entry_cap}};
}

ordered_json instance_meta(const HamiltonianInstance& h) {
  return {{"n", h.n},          {"d", h.d},   {"family", h.family},
          {"ensemble", h.ensemble}, {"seed", h.seed}, {"hash", instance_hash(h)}};
}

ordered_json report_envelope(const ordered_json& payload, std::uint64_t seed,
                             const std::string& hash) {
  ordered_json doc;
  doc["version"] = version_string();
  doc["seed"] = seed;
  if (!hash.empty()) doc["instance_hash"] = hash;
  doc["policy"] = policy_to_json(default_policy());
  doc["report"] = payload;
  return doc;
}

ordered_json to_json(const BasicBoundReport& r) {
  return {{"e0", r.e0},       {"e_product", r.e_product}, {"gap", r.gap},
          {"bound", r.bound}, {"holds", r.holds},         {"n", r.n},
          {"d", r.d},         {"degree", r.degree},       {"seed", r.seed},
          {"restarts", r.restarts}};
}

ordered_json to_json(const ClusteredBoundReport& r) {
  return {{"e0", r.e0},
          {"e_block_product", r.e_block_product},
          {"avg_expansion", r.avg_expansion},
          {"avg_info", r.avg_info},
          {"lhs", r.lhs},
          {"bound", r.bound},
          {"holds", r.holds},
          {"delta", r.delta},
          {"n", r.n},
          {"d", r.d},
          {"degree", r.degree},
          {"block_size", r.m},
          {"seed", r.seed}};
}

ordered_json to_json(const WeightedBoundReport& r) {
  return {{"e0", r.e0},
          {"e_product", r.e_product},
          {"gap", r.gap},
          {"collision", r.collision},
          {"pi_norm2", r.pi_norm2},
          {"bound", r.bound},
          {"holds", r.holds},
          {"n", r.n},
          {"d", r.d},
          {"seed", r.seed},
          {"restarts", r.restarts}};
}

ordered_json to_json(const IdentityReport& r) {
  return {{"classical_trials", r.classical_trials},
          {"quantum_trials", r.quantum_trials},
          {"max_chain_rule_gap", r.max_chain_rule_gap},
          {"max_multi_to_bi_gap", r.max_multi_to_bi_gap},
          {"max_cmi_form_gap", r.max_cmi_form_gap},
          {"min_pinsker_slack", r.min_pinsker_slack},
          {"min_upper_limit_slack", r.min_upper_limit_slack},
          {"min_monotonicity_slack", r.min_monotonicity_slack},
          {"ok", r.ok}};
}

ordered_json to_json(const SelfDecouplingReport& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"holds", r.holds},
          {"k", r.k},
          {"best_kprime", r.best_kprime},
          {"best_sites", r.best_sites},
          {"best_value", r.best_value},
          {"derandomized_holds", r.derandomized_holds}};
}

ordered_json to_json(const BlockDecouplingReport& r) {
  return {{"lhs_min", r.lhs_min},
          {"lhs_avg", r.lhs_avg},
          {"rhs", r.rhs},
          {"holds", r.holds},
          {"k", r.k},
          {"best_kprime", r.best_kprime},
          {"best_sites", r.best_sites}};
}

ordered_json to_json(const ConditionedStateReport& r) {
  return {{"n", r.n},
          {"block_size", r.m},
          {"blocks", r.nblocks},
          {"delta1", r.delta1},
          {"delta2", r.delta2},
          {"ktilde", r.ktilde},
          {"k", r.k},
          {"combos_searched", r.combos_searched},
          {"measured_sites", r.measured_sites},
          {"step1_block_block_cmi", r.block_block_cmi},
          {"step2_block_site_cmi", r.block_site_cmi},
          {"step3_edge_block_site_cmi", r.edge_block_site_cmi},
          {"step4_site_site_cmi", r.site_site_cmi},
          {"step5_classical_l1", r.classical_l1},
          {"step6_quantum_trace_dist", r.quantum_trace_dist},
          {"step7_lhs", r.lhs}};
}

ordered_json to_json(const DeFinettiReport& r) {
  return {{"n", r.n},         {"k", r.k},
          {"t", r.t},         {"lhs_per_m", r.lhs_per_m},
          {"lhs_min", r.lhs_min}, {"best_m", r.best_m},
          {"rhs", r.rhs},     {"holds", r.holds}};
}

ordered_json to_json(const SymmetricDeFinettiReport& r) {
  return {{"n", r.n},   {"k", r.k},           {"lhs", r.lhs},
          {"best_m", r.best_m}, {"rhs", r.rhs}, {"holds", r.holds}};
}

ordered_json to_json(const DistortionReport& r) {
  return {{"k", r.k},
          {"estimate", r.estimate},
          {"bound", r.bound},
          {"within_bound", r.within_bound},
          {"trials", r.trials}};
}

ordered_json to_json(const SandwichReport& r) {
  return {{"levels", r.levels},
          {"values", r.values},
          {"converged", r.converged},
          {"e0", r.e0},
          {"has_e0", r.has_e0},
          {"monotone", r.monotone},
          {"below_exact", r.below_exact}};
}

ordered_json to_json(const RoundingReport& r, bool include_runs) {
  ordered_json doc = {{"samples", r.samples},
                      {"objective", r.objective},
                      {"mean_energy", r.mean_energy},
                      {"best_energy", r.best_energy},
                      {"mean_gap", r.mean_gap},
                      {"max_clipped_mass", r.max_clipped_mass},
                      {"flagged_runs", r.flagged_runs}};
  if (include_runs) {
    ordered_json runs = ordered_json::array();
    for (const auto& run : r.runs)
      runs.push_back({{"m", run.m},
                      {"sites", run.sites},
                      {"energy", run.energy},
                      {"clipped_mass", run.clipped_mass},
                      {"flagged", run.flagged}});
    doc["runs"] = runs;
  }
  return doc;
}

ordered_json to_json(const ThresholdRankReport& r) {
  return {{"n", r.n},
          {"degree", r.degree},
          {"lambda_grid", r.lambda_grid},
          {"ranks", r.ranks},
          {"epsilon", r.epsilon},
          {"sites_needed_lower", r.sites_needed_lower},
          {"desk_scale", r.desk_scale}};
}

ordered_json to_json(const SweepResult& r) {
  return {{"energy", r.energy},
          {"sweeps", r.sweeps},
          {"restarts", r.restarts},
          {"converged", r.converged}};
}

} // namespace qps
