#include "qps/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qps/infotools.hpp"
#include "qps/lasserre.hpp"
#include "qps/meanfield.hpp"
#include "qps/measurement.hpp"
#include "qps/parallel.hpp"
#include "qps/reports.hpp"

namespace qps {

namespace {

using nlohmann::ordered_json;

GeneratorSpec mixed_spec(int i) {
  GeneratorSpec spec;
  spec.n = 3 + (i % 3); // 3, 4, 5
  spec.d = 2;
  switch (i % 4) {
    case 0: spec.family = GraphFamily::Ring; break;
    case 1: spec.family = GraphFamily::Complete; break;
    case 2:
      spec.family = GraphFamily::RandomRegular;
      spec.degree = (spec.n % 2 == 0) ? 3 : 2; // keep n*D even
      break;
    case 3: spec.family = GraphFamily::Weighted; break;
  }
  switch ((i / 4) % 4) {
    case 0: spec.ensemble = TermEnsemble::RandomHermitian; break;
    case 1: spec.ensemble = TermEnsemble::HeisenbergSwap; break;
    case 2: spec.ensemble = TermEnsemble::IsingField; break;
    case 3: spec.ensemble = TermEnsemble::ClassicalDiagonal; break;
  }
  return spec;
}

CriterionResult criterion_sandwich_chain(std::uint64_t seed, int jobs) {
  CriterionResult res;
  res.id = 1;
  res.name = "sandwich chain v1 <= v2 <= e0 <= meanfield on 200 instances";
  const int count = 200;
  const double tol = 1e-5;
  auto start = std::chrono::steady_clock::now();

  struct Row {
    double v1, v2, e0, emf;
    bool ok;
  };
  std::function<Row(int)> work = [&](int i) -> Row {
    GeneratorSpec spec = mixed_spec(i);
    HamiltonianInstance h = build_instance(spec, split_seed(seed, 1000 + std::uint64_t(i)));
    double e0 = ground_energy_only(h);
    double emf =
        meanfield_sweep(h, BlockPartition::singletons(h.n), 8, split_seed(seed, 2000 + i)).energy;
    SdpOptions opts;
    opts.tol = 1e-7;
    MomentSolution s1 = solve_sdp(build_moment_problem(h, 1), opts);
    MomentSolution s2 = solve_sdp(build_moment_problem(h, 2), opts);
    Row r{s1.objective, s2.objective, e0, emf, true};
    r.ok = (r.v1 <= r.v2 + tol) && (r.v2 <= r.e0 + tol) && (r.e0 <= r.emf + tol);
    return r;
  };
  auto rows = parallel_map<Row>(count, jobs, work);

  int failures = 0;
  double worst_v1v2 = -1e300, worst_v2e0 = -1e300, worst_e0mf = -1e300;
  for (const auto& r : rows) {
    if (!r.ok) ++failures;
    worst_v1v2 = std::max(worst_v1v2, r.v1 - r.v2);
    worst_v2e0 = std::max(worst_v2e0, r.v2 - r.e0);
    worst_e0mf = std::max(worst_e0mf, r.e0 - r.emf);
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool in_time = elapsed <= 600.0;
  res.pass = failures == 0 && in_time;
  res.details = {{"instances", count},
                 {"failures", failures},
                 {"worst_v1_minus_v2", worst_v1v2},
                 {"worst_v2_minus_e0", worst_v2e0},
                 {"worst_e0_minus_meanfield", worst_e0mf},
                 {"tolerance", tol},
                 {"within_time_budget", in_time}};
  return res;
}

CriterionResult criterion_sdp_exactness(std::uint64_t seed, int jobs) {
  CriterionResult res;
  res.id = 2;
  res.name = "|v_3 - e0| <= 1e-5 on 3-qubit instances, 20 seeds";
  const int count = 20;
  std::function<double(int)> work = [&](int i) -> double {
    GeneratorSpec spec;
    spec.n = 3;
    spec.d = 2;
    spec.family = (i % 2 == 0) ? GraphFamily::Ring : GraphFamily::Complete;
    spec.ensemble = (i % 3 == 0) ? TermEnsemble::HeisenbergSwap : TermEnsemble::RandomHermitian;
    HamiltonianInstance h = build_instance(spec, split_seed(seed, 3000 + std::uint64_t(i)));
    double e0 = ground_energy_only(h);
    SdpOptions opts;
    opts.tol = 1e-8;
    opts.max_iters = 60000;
    MomentSolution s3 = solve_sdp(build_moment_problem(h, 3), opts);
    return std::abs(s3.objective - e0);
  };
  auto devs = parallel_map<double>(count, jobs, work);
  double worst = *std::max_element(devs.begin(), devs.end());
  res.pass = worst <= 1e-5;
  res.details = {{"seeds", count}, {"worst_abs_deviation", worst}, {"tolerance", 1e-5}};
  return res;
}

CriterionResult criterion_swap_counterexample(std::uint64_t seed, int) {
  CriterionResult res;
  res.id = 3;
  res.name = "two-site swap: e0 = -1, product optimum 0, gap exactly 1";
  GeneratorSpec spec;
  spec.n = 2;
  spec.d = 2;
  spec.family = GraphFamily::SwapAntisymmetric;
  HamiltonianInstance h = build_instance(spec, seed);
  double e0 = ground_energy_only(h);
  double emf = meanfield_sweep(h, BlockPartition::singletons(2), 16, seed).energy;
  double gap = emf - e0;
  res.pass = std::abs(e0 + 1.0) <= 1e-9 && emf >= -1e-9 && std::abs(gap - 1.0) <= 1e-9;
  res.details = {{"e0", e0}, {"e_product", emf}, {"gap", gap}};
  return res;
}

CriterionResult criterion_identities(std::uint64_t seed, int) {
  CriterionResult res;
  res.id = 4;
  res.name = "information identities: chain rule, telescoping, Pinsker, limits";
  IdentityReport rep = check_info_identities(split_seed(seed, 4000), 1000);
  res.pass = rep.ok;
  res.details = to_json(rep);
  return res;
}

CriterionResult criterion_self_decoupling(std::uint64_t seed, int jobs) {
  CriterionResult res;
  res.id = 5;
  res.name = "decoupling inequalities on 500 + 200 random distributions";
  std::function<bool(int)> work = [&](int i) -> bool {
    Rng rng(split_seed(seed, 5000 + std::uint64_t(i)));
    int n = 4 + (i % 3); // 4..6
    JointDistribution p = random_distribution(std::vector<int>(std::size_t(n), 2), rng);
    std::vector<double> mu(std::size_t(n), 1.0 / double(n));
    int k = 1 + (i % (n - 1));
    return self_decoupling(p, mu, k).holds;
  };
  auto site_ok = parallel_map<bool>(500, jobs, work);

  std::function<bool(int)> bwork = [&](int i) -> bool {
    Rng rng(split_seed(seed, 6000 + std::uint64_t(i)));
    int n = (i % 2 == 0) ? 4 : 6;
    int m = 2;
    JointDistribution p = random_distribution(std::vector<int>(std::size_t(n), 2), rng);
    int k = 1 + (i % 2);
    return block_self_decoupling(p, BlockPartition::contiguous(n, m), k).holds;
  };
  auto block_ok = parallel_map<bool>(200, jobs, bwork);

  int site_fail = int(std::count(site_ok.begin(), site_ok.end(), false));
  int block_fail = int(std::count(block_ok.begin(), block_ok.end(), false));
  res.pass = site_fail == 0 && block_fail == 0;
  res.details = {{"site_cases", 500},
                 {"site_violations", site_fail},
                 {"block_cases", 200},
                 {"block_violations", block_fail}};
  return res;
}

CriterionResult criterion_definetti_classical(std::uint64_t seed, int jobs) {
  CriterionResult res;
  res.id = 6;
  res.name = "conditioning de Finetti bound on 200 random + 50 symmetric distributions";
  std::function<bool(int)> work = [&](int i) -> bool {
    Rng rng(split_seed(seed, 7000 + std::uint64_t(i)));
    int n = 5 + (i % 3); // 5..7
    JointDistribution p = random_distribution(std::vector<int>(std::size_t(n), 2), rng);
    for (int t = 1; t <= n - 2; ++t)
      if (!definetti_classical(p, 2, t).holds) return false;
    return true;
  };
  auto ok = parallel_map<bool>(200, jobs, work);

  std::function<bool(int)> swork = [&](int i) -> bool {
    Rng rng(split_seed(seed, 8000 + std::uint64_t(i)));
    JointDistribution p = random_symmetric_distribution(6, 2, rng);
    return definetti_symmetric(p, 2).holds;
  };
  auto sok = parallel_map<bool>(50, jobs, swork);

  int fails = int(std::count(ok.begin(), ok.end(), false));
  int sfails = int(std::count(sok.begin(), sok.end(), false));
  res.pass = fails == 0 && sfails == 0;
  res.details = {{"random_cases", 200},
                 {"random_violations", fails},
                 {"symmetric_cases", 50},
                 {"symmetric_violations", sfails}};
  return res;
}

CriterionResult criterion_definetti_quantum(std::uint64_t seed, int jobs) {
  CriterionResult res;
  res.id = 7;
  res.name = "measured de Finetti bound on 50 random 5-qubit states, k=2, t=3";
  Povm povm = icosahedral_povm();
  std::function<double(int)> work = [&](int i) -> double {
    Rng rng(split_seed(seed, 9000 + std::uint64_t(i)));
    ComplexVector psi = random_state(32, rng);
    DensityMatrix rho{{2, 2, 2, 2, 2}, projector(psi)};
    DeFinettiReport rep = definetti_quantum(rho, povm, 2, 3);
    return rep.holds ? rep.lhs_min : 1e300;
  };
  auto lhs = parallel_map<double>(50, jobs, work);
  double worst = *std::max_element(lhs.begin(), lhs.end());
  double rhs = 4.0 * std::log(2.0) * std::pow(36.0, 2.0) * 4.0 / 3.0;
  res.pass = worst <= rhs;
  res.details = {{"states", 50}, {"worst_lhs", worst}, {"rhs", rhs}};
  return res;
}

CriterionResult criterion_povm(std::uint64_t seed, int) {
  CriterionResult res;
  res.id = 8;
  res.name = "POVM distortion bounds and reconstruction round trip";
  Povm povm = icosahedral_povm();
  DistortionReport d1 = distortion_estimate(povm, 1, 2000, split_seed(seed, 10000));
  DistortionReport d2 = distortion_estimate(povm, 2, 400, split_seed(seed, 10001));

  ReconstructionMap map = build_reconstruction(povm);
  Rng rng(split_seed(seed, 10002));
  double worst_rt = 0.0;
  for (int i = 0; i < 100; ++i) {
    DensityMatrix rho = (i % 2 == 0)
                            ? DensityMatrix{{2}, projector(random_state(2, rng))}
                            : random_density({2}, rng);
    JointDistribution probs = measure_channel(povm, rho, {0});
    DensityMatrix back = reconstruct_with(map, probs.p);
    worst_rt = std::max(worst_rt, trace_norm(rho.mat - back.mat));
  }
  res.pass = d1.within_bound && d2.within_bound && d1.estimate <= 6.0 && d2.estimate <= 36.0 &&
             worst_rt <= 1e-8;
  res.details = {{"distortion_k1", d1.estimate},
                 {"bound_k1", 6.0},
                 {"distortion_k2", d2.estimate},
                 {"bound_k2", 36.0},
                 {"worst_round_trip", worst_rt}};
  return res;
}

CriterionResult criterion_conditioned_pipeline(std::uint64_t seed, int jobs) {
  CriterionResult res;
  res.id = 9;
  res.name = "measure-and-condition construction beats the clustered bound, 6 qubits";
  struct Case {
    bool holds;
    double lhs, bound;
  };
  std::function<Case(int)> work = [&](int i) -> Case {
    GeneratorSpec spec;
    spec.n = 6;
    spec.d = 2;
    spec.family = (i % 2 == 0) ? GraphFamily::Ring : GraphFamily::Complete;
    spec.ensemble = (i % 4 < 2) ? TermEnsemble::RandomHermitian : TermEnsemble::HeisenbergSwap;
    HamiltonianInstance h = build_instance(spec, split_seed(seed, 11000 + std::uint64_t(i)));
    ClusteredBoundReport rep = bound_check_clustered(h, BlockPartition::contiguous(6, 2), nullptr,
                                                     4, split_seed(seed, 11500 + i));
    return {rep.holds, rep.lhs, rep.bound};
  };
  auto cases = parallel_map<Case>(8, jobs, work);
  int fails = 0;
  double worst_margin = 1e300;
  for (const auto& c : cases) {
    if (!c.holds) ++fails;
    worst_margin = std::min(worst_margin, c.bound - c.lhs);
  }
  res.pass = fails == 0;
  res.details = {{"cases", int(cases.size())}, {"violations", fails},
                 {"smallest_margin", worst_margin}};
  return res;
}

CriterionResult criterion_rounding(std::uint64_t seed, int jobs) {
  CriterionResult res;
  res.id = 10;
  res.name = "rounding sanity: variational floor, product fixed point, clipped mass";
  Povm povm = icosahedral_povm();

  // variational floor and clipped mass on complete-graph instances at k = 2
  struct Case {
    double min_margin;
    double clipped;
    bool ok;
  };
  std::function<Case(int)> work = [&](int i) -> Case {
    GeneratorSpec spec;
    spec.n = 4 + (i % 2);
    spec.d = 2;
    spec.family = GraphFamily::Complete;
    spec.ensemble = (i % 2 == 0) ? TermEnsemble::RandomHermitian : TermEnsemble::IsingField;
    HamiltonianInstance h = build_instance(spec, split_seed(seed, 12000 + std::uint64_t(i)));
    double e0 = ground_energy_only(h);
    MomentProblem pr = build_moment_problem(h, 2);
    MomentSolution sol = solve_sdp(pr);
    RoundingReport rep =
        propagation_sampling(pr, sol, h, povm, split_seed(seed, 12500 + i), 25);
    double margin = 1e300;
    for (const auto& run : rep.runs) margin = std::min(margin, run.energy - e0);
    return {margin, rep.max_clipped_mass, margin >= -1e-8 && rep.max_clipped_mass <= 1e-6};
  };
  auto cases = parallel_map<Case>(6, jobs, work);

  // product-state moments reproduce the marginals exactly
  GeneratorSpec spec;
  spec.n = 4;
  spec.d = 2;
  spec.family = GraphFamily::Ring;
  spec.ensemble = TermEnsemble::RandomHermitian;
  HamiltonianInstance h = build_instance(spec, split_seed(seed, 13000));
  Rng rng(split_seed(seed, 13001));
  std::vector<ComplexMatrix> marginals;
  ComplexVector prod = ComplexVector::Ones(1);
  for (int i = 0; i < 4; ++i) {
    ComplexVector v = random_state(2, rng);
    marginals.push_back(projector(v));
    prod = kron(prod, v);
  }
  DensityMatrix rho{{2, 2, 2, 2}, projector(prod)};
  MomentProblem pr = build_moment_problem(h, 2);
  MomentSolution sol;
  sol.k = 2;
  sol.m = moments_from_state(pr, rho);
  sol.objective = 0.0;
  for (std::size_t i = 0; i < sol.m.size(); ++i) sol.objective += pr.objective[i] * sol.m[i];
  RoundingReport fixed =
      propagation_sampling(pr, sol, h, povm, split_seed(seed, 13002), 20);
  double worst_marginal_dev = 0.0;
  for (const auto& run : fixed.runs)
    for (int i = 0; i < 4; ++i) {
      if (std::binary_search(run.sites.begin(), run.sites.end(), i)) continue;
      worst_marginal_dev = std::max(
          worst_marginal_dev, trace_norm(run.site_states[std::size_t(i)] - marginals[std::size_t(i)]));
    }

  int fails = 0;
  double floor_margin = 1e300, clip_worst = 0.0;
  for (const auto& c : cases) {
    if (!c.ok) ++fails;
    floor_margin = std::min(floor_margin, c.min_margin);
    clip_worst = std::max(clip_worst, c.clipped);
  }
  res.pass = fails == 0 && worst_marginal_dev <= 1e-8;
  res.details = {{"complete_graph_cases", int(cases.size())},
                 {"violations", fails},
                 {"min_energy_minus_e0", floor_margin},
                 {"max_clipped_mass", clip_worst},
                 {"worst_product_marginal_dev", worst_marginal_dev}};
  return res;
}

CriterionResult criterion_degree_trend(std::uint64_t seed, int jobs) {
  CriterionResult res;
  res.id = 11;
  res.name = "mean meanfield gap nonincreasing in degree at n = 10";
  const std::vector<int> degrees = {3, 5, 9};
  const int per_degree = 30;
  struct Job {
    int d_index, seed_index;
  };
  std::vector<Job> jobs_list;
  for (int di = 0; di < int(degrees.size()); ++di)
    for (int s = 0; s < per_degree; ++s) jobs_list.push_back({di, s});

  std::function<double(int)> work = [&](int idx) -> double {
    const Job& job = jobs_list[std::size_t(idx)];
    GeneratorSpec spec;
    spec.n = 10;
    spec.d = 2;
    spec.family = GraphFamily::RandomRegular;
    spec.degree = degrees[std::size_t(job.d_index)];
    spec.ensemble = TermEnsemble::RandomHermitian;
    HamiltonianInstance h =
        build_instance(spec, split_seed(seed, 14000 + std::uint64_t(idx)));
    double e0 = ground_energy_only(h);
    double emf = meanfield_sweep(h, BlockPartition::singletons(h.n), 8,
                                 split_seed(seed, 14500 + std::uint64_t(idx)))
                     .energy;
    return emf - e0;
  };
  auto gaps = parallel_map<double>(int(jobs_list.size()), jobs, work);

  std::vector<double> means(degrees.size(), 0.0);
  for (std::size_t i = 0; i < jobs_list.size(); ++i)
    means[std::size_t(jobs_list[i].d_index)] += gaps[i] / double(per_degree);
  bool mono = true;
  for (std::size_t i = 1; i < means.size(); ++i)
    if (means[i] > means[i - 1] + 1e-12) mono = false;
  res.pass = mono;
  res.details = {{"degrees", degrees}, {"mean_gaps", means}, {"seeds_per_degree", per_degree}};
  return res;
}

} // namespace

std::vector<CriterionResult> run_acceptance(std::uint64_t seed, int jobs,
                                            std::ostream* progress) {
  std::vector<CriterionResult> out;
  auto push = [&](CriterionResult r) {
    if (progress)
      (*progress) << "criterion " << r.id << (r.pass ? " PASS  " : " FAIL  ") << r.name
                  << std::endl;
    out.push_back(std::move(r));
  };
  push(criterion_sandwich_chain(seed, jobs));
  push(criterion_sdp_exactness(seed, jobs));
  push(criterion_swap_counterexample(seed, jobs));
  push(criterion_identities(seed, jobs));
  push(criterion_self_decoupling(seed, jobs));
  push(criterion_definetti_classical(seed, jobs));
  push(criterion_definetti_quantum(seed, jobs));
  push(criterion_povm(seed, jobs));
  push(criterion_conditioned_pipeline(seed, jobs));
  push(criterion_rounding(seed, jobs));
  push(criterion_degree_trend(seed, jobs));
  return out;
}

int run_suite(std::uint64_t seed, int jobs, std::ostream& out) {
  auto results = run_acceptance(seed, jobs, nullptr);
  bool all = true;
  for (const auto& r : results) {
    ordered_json line = {{"criterion", r.id}, {"name", r.name}, {"pass", r.pass},
                         {"details", r.details}};
    out << line.dump() << "\n";
    all = all && r.pass;
  }
  ordered_json summary = {{"summary", true},
                          {"version", version_string()},
                          {"seed", seed},
                          {"criteria", int(results.size())},
                          {"all_pass", all}};
  out << summary.dump() << "\n";
  return all ? 0 : 1;
}

} // namespace qps
