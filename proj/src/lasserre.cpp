#include "qps/lasserre.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

namespace qps {

int PauliString::weight() const {
  int w = 0;
  for (int s = 0; s < n; ++s)
    if (letter(s) != 0) ++w;
  return w;
}

std::string PauliString::label() const {
  static const char names[4] = {'I', 'X', 'Y', 'Z'};
  std::string out;
  for (int s = 0; s < n; ++s) {
    int l = letter(s);
    if (l != 0) {
      out.push_back(names[l]);
      out += std::to_string(s);
    }
  }
  return out.empty() ? "I" : out;
}

PauliString PauliString::single(int n, int site, int letter) {
  PauliString p{0, n};
  p.code = std::uint64_t(letter) << (2 * site);
  return p;
}

// single-letter products: result letter and i^s phase exponent
// order: row * col with letters I,X,Y,Z
namespace {
struct LetterProduct {
  std::uint8_t letter;
  std::uint8_t phase;
};
constexpr LetterProduct kLetterMul[4][4] = {
    {{0, 0}, {1, 0}, {2, 0}, {3, 0}},
    {{1, 0}, {0, 0}, {3, 1}, {2, 3}},
    {{2, 0}, {3, 3}, {0, 0}, {1, 1}},
    {{3, 0}, {2, 1}, {1, 3}, {0, 0}},
};
} // namespace

PauliProduct pauli_mul(std::uint64_t a, std::uint64_t b, int n) {
  PauliProduct out;
  for (int s = 0; s < n; ++s) {
    int la = int((a >> (2 * s)) & 3);
    int lb = int((b >> (2 * s)) & 3);
    LetterProduct lp = kLetterMul[la][lb];
    out.code |= std::uint64_t(lp.letter) << (2 * s);
    out.phase = (out.phase + lp.phase) & 3;
  }
  return out;
}

std::array<double, 16> two_site_pauli_coeffs(const ComplexMatrix& term) {
  require(term.rows() == 4 && term.cols() == 4, ErrorKind::InvalidArgument,
          "two-site coefficients need a 4x4 term");
  std::array<ComplexMatrix, 4> sigma = {ComplexMatrix::Identity(2, 2), pauli_x(), pauli_y(),
                                        pauli_z()};
  std::array<double, 16> out{};
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      ComplexMatrix basis = kron(sigma[std::size_t(p)], sigma[std::size_t(q)]);
      out[std::size_t(p * 4 + q)] = (basis * term).trace().real() / 4.0;
    }
  return out;
}

// enumerate all strings of weight <= k on n sites, ordered by (weight, code)
static std::vector<std::uint64_t> strings_up_to_weight(int n, int k) {
  std::vector<std::uint64_t> out;
  std::vector<int> sites;
  auto rec = [&](auto&& self, int start, std::uint64_t code) -> void {
    out.push_back(code);
    if (int(sites.size()) == k) return;
    for (int s = start; s < n; ++s) {
      for (std::uint64_t l = 1; l <= 3; ++l) {
        sites.push_back(s);
        self(self, s + 1, code | (l << (2 * s)));
        sites.pop_back();
      }
    }
  };
  rec(rec, 0, 0);
  std::sort(out.begin(), out.end(), [n](std::uint64_t a, std::uint64_t b) {
    int wa = PauliString{a, n}.weight(), wb = PauliString{b, n}.weight();
    if (wa != wb) return wa < wb;
    return a < b;
  });
  return out;
}

MomentProblem build_moment_problem(const HamiltonianInstance& h, int k,
                                   const NumericPolicy& policy) {
  require(h.d == 2, ErrorKind::InvalidSpec,
          "unsupported-dimension: the moment relaxation is built for qubits (d = 2)");
  require(k >= 1 && k <= h.n, ErrorKind::InvalidArgument, "need 1 <= k <= n");
  MomentProblem pr;
  pr.n = h.n;
  pr.k = k;
  pr.basis = strings_up_to_weight(h.n, k);
  std::int64_t side = std::int64_t(pr.basis.size());
  require(side * side <= policy.entry_cap, ErrorKind::InstanceTooLarge,
          "moment matrix would exceed the entry cap");
  pr.mstrings = strings_up_to_weight(h.n, std::min(2 * k, h.n));
  pr.mindex.reserve(pr.mstrings.size() * 2);
  for (std::size_t i = 0; i < pr.mstrings.size(); ++i) pr.mindex[pr.mstrings[i]] = int(i);

  pr.prod_index.assign(std::size_t(side * side), 0);
  pr.prod_phase.assign(std::size_t(side * side), 0);
  pr.multiplicity.assign(pr.mstrings.size(), 0.0);
  for (std::int64_t a = 0; a < side; ++a)
    for (std::int64_t b = 0; b < side; ++b) {
      PauliProduct prod = pauli_mul(pr.basis[std::size_t(a)], pr.basis[std::size_t(b)], h.n);
      auto it = pr.mindex.find(prod.code);
      require(it != pr.mindex.end(), ErrorKind::ContractViolation,
              "product of basis strings left the moment index");
      pr.prod_index[std::size_t(a * side + b)] = it->second;
      pr.prod_phase[std::size_t(a * side + b)] = std::uint8_t(prod.phase);
      pr.multiplicity[std::size_t(it->second)] += 1.0;
    }

  pr.objective.assign(pr.mstrings.size(), 0.0);
  for (const auto& e : h.graph.edges()) {
    auto coeffs = two_site_pauli_coeffs(h.terms.at({e.i, e.j}));
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) {
        double c = coeffs[std::size_t(p * 4 + q)];
        if (std::abs(c) < 1e-300) continue;
        std::uint64_t code = (std::uint64_t(p) << (2 * e.i)) | (std::uint64_t(q) << (2 * e.j));
        auto it = pr.mindex.find(code);
        require(it != pr.mindex.end(), ErrorKind::ContractViolation,
                "objective string missing from the moment index");
        pr.objective[std::size_t(it->second)] += e.w * c;
      }
  }
  pr.meta_hash = instance_hash(h);
  return pr;
}

ComplexMatrix moment_matrix(const MomentProblem& pr, const std::vector<double>& m) {
  const int side = pr.side();
  static const cxd phases[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
  ComplexMatrix out(side, side);
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b) {
      std::size_t f = std::size_t(a) * std::size_t(side) + std::size_t(b);
      out(a, b) = phases[pr.prod_phase[f]] * m[std::size_t(pr.prod_index[f])];
    }
  return out;
}

std::vector<double> moments_from_state(const MomentProblem& pr, const DensityMatrix& rho) {
  std::vector<double> m(pr.mstrings.size(), 0.0);
  std::vector<int> dims(std::size_t(pr.n), 2);
  std::array<ComplexMatrix, 4> sigma = {ComplexMatrix::Identity(2, 2), pauli_x(), pauli_y(),
                                        pauli_z()};
  for (std::size_t i = 0; i < pr.mstrings.size(); ++i) {
    PauliString s{pr.mstrings[i], pr.n};
    // expectation via the marginal on the string's support
    std::vector<int> support;
    for (int site = 0; site < pr.n; ++site)
      if (s.letter(site) != 0) support.push_back(site);
    DensityMatrix marg = partial_trace(rho, support);
    ComplexMatrix op = ComplexMatrix::Identity(1, 1);
    for (int site : support) op = kron(op, sigma[std::size_t(s.letter(site))]);
    m[i] = (op * marg.mat).trace().real();
  }
  return m;
}

MomentSolution solve_sdp(const MomentProblem& pr, const SdpOptions& opts) {
  const int side = pr.side();
  const int nm = pr.vars();
  const int id_index = pr.mindex.at(0);
  static const cxd phases[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};

  std::vector<double> m(std::size_t(nm), 0.0);
  m[std::size_t(id_index)] = 1.0;

  ComplexMatrix M = moment_matrix(pr, m);
  ComplexMatrix Y = M; // identity, already PSD
  ComplexMatrix U = ComplexMatrix::Zero(side, side);

  double rho = opts.rho0;
  const double alpha = opts.alpha; // over-relaxation
  double last_obj = 0.0;
  int stable = 0;
  MomentSolution sol;
  sol.k = pr.k;

  auto objective_of = [&](const std::vector<double>& mv) {
    double o = 0.0;
    for (int i = 0; i < nm; ++i) o += pr.objective[std::size_t(i)] * mv[std::size_t(i)];
    return o;
  };

  int it = 0;
  bool stopped = false;
  double pres = 0.0;
  for (; it < opts.max_iters && !stopped; ++it) {
    // m-update: coordinatewise least squares against Y - U, objective tilted
    ComplexMatrix T = Y - U;
    std::vector<double> acc(std::size_t(nm), 0.0);
    for (int a = 0; a < side; ++a)
      for (int b = 0; b < side; ++b) {
        std::size_t f = std::size_t(a) * std::size_t(side) + std::size_t(b);
        // Re(conj(i^s) * T_ab)
        cxd t = T(a, b);
        switch (pr.prod_phase[f]) {
          case 0: acc[std::size_t(pr.prod_index[f])] += t.real(); break;
          case 1: acc[std::size_t(pr.prod_index[f])] += t.imag(); break;
          case 2: acc[std::size_t(pr.prod_index[f])] -= t.real(); break;
          case 3: acc[std::size_t(pr.prod_index[f])] -= t.imag(); break;
        }
      }
    for (int i = 0; i < nm; ++i)
      m[std::size_t(i)] = (acc[std::size_t(i)] - pr.objective[std::size_t(i)] / rho) /
                          pr.multiplicity[std::size_t(i)];
    m[std::size_t(id_index)] = 1.0;

    M = moment_matrix(pr, m);
    ComplexMatrix Mhat = alpha * M + (1.0 - alpha) * Y;
    ComplexMatrix Yprev = Y;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Mhat + U);
    RealVector w = es.eigenvalues().cwiseMax(0.0);
    Y = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    U += Mhat - Y;

    pres = (M - Y).norm();
    double dres = rho * (Y - Yprev).norm();
    double scale = std::max(1.0, std::max(M.norm(), Y.norm()));

    if (opts.adapt_rho && (it + 1) % 25 == 0) {
      // residual balancing
      if (pres > 10.0 * dres && rho < 1e4) {
        rho *= 2.0;
        U /= 2.0;
      } else if (dres > 10.0 * pres && rho > 1e-4) {
        rho /= 2.0;
        U *= 2.0;
      }
    }
    if (opts.trace && (it % 200 == 0 || it + 1 == opts.max_iters)) {
      RealVector evt = hermitian_eigenvalues(M);
      (*opts.trace) << it << " obj=" << objective_of(m) << " pres=" << pres
                    << " dres=" << dres << " rho=" << rho << " lmin=" << evt(0) << "\n";
    }

    double obj = objective_of(m);
    bool obj_stable = std::abs(obj - last_obj) <= opts.tol * 1e-2 * std::max(1.0, std::abs(obj));
    last_obj = obj;
    stable = obj_stable ? stable + 1 : 0;

    if (stable >= 10 && pres <= 1e-6 * scale && dres <= 1e-6 * scale) stopped = true;
  }
  sol.iterations = it;
  sol.converged = stopped;

  // Feasibility polish: blend toward the identity moments (whose matrix is
  // the identity) until the moment matrix is PSD.  Keeps the returned m
  // genuinely feasible, so the objective cannot undercut the true optimum.
  {
    RealVector ev = hermitian_eigenvalues(moment_matrix(pr, m));
    double lmin = ev(0);
    if (lmin < 0.0) {
      double theta = (-lmin + 1e-12) / (1.0 - lmin);
      for (int i = 0; i < nm; ++i) m[std::size_t(i)] *= (1.0 - theta);
      m[std::size_t(id_index)] = 1.0;
      ev = hermitian_eigenvalues(moment_matrix(pr, m));
      lmin = ev(0);
    }
    sol.psd_residual = std::max(0.0, -lmin);
    if (sol.psd_residual > opts.psd_tol) sol.converged = false;
  }
  sol.m = m;
  sol.objective = objective_of(m);
  sol.gap_estimate = pres / std::max(1.0, M.norm()) + std::abs(sol.objective - last_obj);
  return sol;
}

SandwichReport sdp_sandwich(const HamiltonianInstance& h, int kmax, const SdpOptions& opts,
                            const NumericPolicy& policy) {
  SandwichReport rep;
  std::vector<int> dims(std::size_t(h.n), h.d);
  std::int64_t full = product_dim(dims);
  if (full * full <= policy.entry_cap) {
    rep.e0 = ground_energy_only(h, policy);
    rep.has_e0 = true;
  }
  for (int k = 1; k <= kmax; ++k) {
    MomentProblem pr = build_moment_problem(h, k, policy);
    MomentSolution sol = solve_sdp(pr, opts);
    rep.levels.push_back(k);
    rep.values.push_back(sol.objective);
    rep.converged.push_back(sol.converged);
  }
  for (std::size_t i = 1; i < rep.values.size(); ++i)
    if (rep.values[i] < rep.values[i - 1] - 1e-5) rep.monotone = false;
  if (rep.has_e0)
    for (double v : rep.values)
      if (v > rep.e0 + 1e-5) rep.below_exact = false;
  return rep;
}

// ---------------------------------------------------------------------------
// propagation sampling
// ---------------------------------------------------------------------------

namespace {

// expansion coefficients of each effect in the Pauli basis: effect = sum_P alpha_P P
std::vector<std::array<double, 4>> effect_pauli_coeffs(const Povm& povm) {
  require(povm.d == 2, ErrorKind::InvalidArgument, "rounding runs on qubit POVMs");
  std::array<ComplexMatrix, 4> sigma = {ComplexMatrix::Identity(2, 2), pauli_x(), pauli_y(),
                                        pauli_z()};
  std::vector<std::array<double, 4>> out;
  for (const auto& eff : povm.effects) {
    std::array<double, 4> alpha{};
    for (int p = 0; p < 4; ++p) alpha[std::size_t(p)] = (sigma[std::size_t(p)] * eff).trace().real() / 2.0;
    out.push_back(alpha);
  }
  return out;
}

// pseudo-probability table over outcomes of `sites` (distinct, ascending):
// p(x) = m(prod_i effect_{x_i} on site i)
std::vector<double> pseudo_outcome_table(const MomentProblem& pr, const std::vector<double>& m,
                                         const std::vector<int>& sites,
                                         const std::vector<std::array<double, 4>>& alpha,
                                         int outcomes) {
  const int s = int(sites.size());
  // T[letters] = m[string with those letters on `sites`]
  std::int64_t pow4 = 1;
  for (int i = 0; i < s; ++i) pow4 *= 4;
  std::vector<double> t(static_cast<std::size_t>(pow4));
  for (std::int64_t f = 0; f < pow4; ++f) {
    std::uint64_t code = 0;
    std::int64_t ff = f;
    for (int i = s - 1; i >= 0; --i) {
      code |= std::uint64_t(ff & 3) << (2 * sites[std::size_t(i)]);
      ff >>= 2;
    }
    auto it = pr.mindex.find(code);
    require(it != pr.mindex.end(), ErrorKind::ContractViolation,
            "pseudo-probability needs a moment outside the relaxation level");
    t[std::size_t(f)] = m[std::size_t(it->second)];
  }
  // transform letter axes to outcome axes, one site at a time
  std::int64_t in_block = pow4;
  std::int64_t out_block = 1;
  for (int i = s - 1; i >= 0; --i) {
    in_block /= 4;
    std::vector<double> next(std::size_t(in_block * outcomes * out_block), 0.0);
    for (std::int64_t pre = 0; pre < in_block; ++pre)
      for (int x = 0; x < outcomes; ++x)
        for (std::int64_t post = 0; post < out_block; ++post) {
          double acc = 0.0;
          for (int l = 0; l < 4; ++l)
            acc += alpha[std::size_t(x)][std::size_t(l)] *
                   t[std::size_t((pre * 4 + l) * out_block + post)];
          next[std::size_t((pre * outcomes + x) * out_block + post)] = acc;
        }
    t = std::move(next);
    out_block *= outcomes;
  }
  return t;
}

} // namespace

RoundingReport propagation_sampling(const MomentProblem& pr, const MomentSolution& sol,
                                    const HamiltonianInstance& h, const Povm& povm,
                                    std::uint64_t seed, int samples, const NumericPolicy& policy) {
  require(h.d == 2 && povm.d == 2, ErrorKind::InvalidArgument, "rounding runs at d = 2");
  auto alpha = effect_pauli_coeffs(povm);
  ReconstructionMap recon = build_reconstruction(povm, policy);
  const int outcomes = povm.outcomes();

  RoundingReport rep;
  rep.samples = samples;
  rep.objective = sol.objective;
  double esum = 0.0;

  for (int run = 0; run < samples; ++run) {
    Rng rng(split_seed(seed, 0x407bd15aULL + std::uint64_t(run)));
    RoundingRun rr;
    rr.m = int(rng.uniform_int(std::uint64_t(2 * pr.k)));
    std::vector<int> draws;
    for (int i = 0; i < rr.m; ++i) draws.push_back(int(rng.uniform_int(std::uint64_t(h.n))));
    std::sort(draws.begin(), draws.end());
    draws.erase(std::unique(draws.begin(), draws.end()), draws.end());
    rr.sites = draws;

    // sample an outcome tuple from the clipped pseudo-distribution
    std::vector<int> xs(draws.size(), 0);
    if (!draws.empty()) {
      std::vector<double> table = pseudo_outcome_table(pr, sol.m, draws, alpha, outcomes);
      double clipped = 0.0, total = 0.0;
      for (double& v : table) {
        if (v < 0.0) {
          if (v < policy.pseudo_prob_floor) clipped += -v;
          v = 0.0;
        }
        total += v;
      }
      rr.clipped_mass = clipped;
      rr.flagged = clipped > policy.clipped_mass_max;
      require(total > 0.0, ErrorKind::ContractViolation, "pseudo-distribution has no mass");
      double u = rng.uniform() * total;
      std::int64_t pick = 0;
      for (std::size_t f = 0; f < table.size(); ++f) {
        u -= table[f];
        if (u <= 0.0) {
          pick = std::int64_t(f);
          break;
        }
      }
      for (int i = int(draws.size()) - 1; i >= 0; --i) {
        xs[std::size_t(i)] = int(pick % outcomes);
        pick /= outcomes;
      }
    }

    // conditional single-site statistics -> density matrices
    std::vector<DensityMatrix> sigma(std::size_t(h.n));
    ComplexVector ket0 = ComplexVector::Zero(2);
    ket0(0) = 1.0;
    for (int i = 0; i < h.n; ++i) {
      bool in_s = std::binary_search(draws.begin(), draws.end(), i);
      if (in_s) {
        sigma[std::size_t(i)] = DensityMatrix{{2}, projector(ket0)};
        continue;
      }
      std::vector<int> sites = draws;
      sites.push_back(i);
      std::sort(sites.begin(), sites.end());
      int pos = int(std::lower_bound(sites.begin(), sites.end(), i) - sites.begin());
      std::vector<double> table = pseudo_outcome_table(pr, sol.m, sites, alpha, outcomes);
      // slice at the sampled outcomes, leaving site i free
      std::vector<double> q(std::size_t(outcomes), 0.0);
      std::vector<std::int64_t> strides(sites.size(), 1);
      for (int t = int(sites.size()) - 2; t >= 0; --t)
        strides[std::size_t(t)] = strides[std::size_t(t + 1)] * outcomes;
      std::int64_t base = 0;
      int xi = 0;
      for (std::size_t t = 0; t < sites.size(); ++t) {
        if (int(t) == pos) continue;
        base += strides[t] * xs[std::size_t(xi)];
        ++xi;
      }
      double total = 0.0;
      for (int y = 0; y < outcomes; ++y) {
        q[std::size_t(y)] = table[std::size_t(base + strides[std::size_t(pos)] * y)];
        total += q[std::size_t(y)];
      }
      require(total > 0.0, ErrorKind::ContractViolation, "conditional has no mass");
      for (double& v : q) v /= total;
      sigma[std::size_t(i)] = reconstruct_with(recon, q, policy);
    }

    double energy = 0.0;
    for (const auto& e : h.graph.edges()) {
      ComplexMatrix pair = kron(sigma[std::size_t(e.i)].mat, sigma[std::size_t(e.j)].mat);
      energy += e.w * (h.terms.at({e.i, e.j}) * pair).trace().real();
    }
    rr.energy = energy;
    rr.site_states.reserve(std::size_t(h.n));
    for (int i = 0; i < h.n; ++i) rr.site_states.push_back(sigma[std::size_t(i)].mat);
    esum += energy;
    rep.max_clipped_mass = std::max(rep.max_clipped_mass, rr.clipped_mass);
    if (rr.flagged) ++rep.flagged_runs;
    if (run == 0 || energy < rep.best_energy) rep.best_energy = energy;
    rep.runs.push_back(std::move(rr));
  }
  rep.mean_energy = esum / double(samples);
  rep.mean_gap = rep.mean_energy - rep.objective;
  return rep;
}

ThresholdRankReport threshold_rank_certificate(const HamiltonianInstance& h, double epsilon) {
  ThresholdRankReport rep;
  rep.n = h.n;
  rep.epsilon = epsilon;
  int degree = 0;
  h.graph.regular(&degree);
  rep.degree = degree;
  for (double lam : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    rep.lambda_grid.push_back(lam);
    rep.ranks.push_back(threshold_rank(h.graph, lam));
  }
  int rank_min = *std::min_element(rep.ranks.begin(), rep.ranks.end());
  rep.sites_needed_lower = int(std::ceil(8.0 * double(rank_min) / epsilon));
  rep.desk_scale = rank_min <= 2 && h.n >= rep.sites_needed_lower;
  return rep;
}

std::string solution_to_json(const MomentProblem& pr, const MomentSolution& sol) {
  nlohmann::ordered_json doc;
  doc["k"] = sol.k;
  doc["objective"] = sol.objective;
  doc["psd_residual"] = sol.psd_residual;
  doc["iterations"] = sol.iterations;
  doc["converged"] = sol.converged;
  nlohmann::ordered_json mv = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < pr.mstrings.size(); ++i)
    mv[PauliString{pr.mstrings[i], pr.n}.label()] = sol.m[i];
  doc["m"] = mv;
  doc["instance_hash"] = pr.meta_hash;
  return doc.dump(2) + "\n";
}

} // namespace qps
