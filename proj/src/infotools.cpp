#include "qps/infotools.hpp"

#include <algorithm>
#include <cmath>

namespace qps {

// ---------------------------------------------------------------------------
// dense joint distributions
// ---------------------------------------------------------------------------

void validate_distribution(const JointDistribution& j, const NumericPolicy& policy) {
  std::int64_t total = 1;
  for (int s : j.sizes) {
    require(s >= 1, ErrorKind::ContractViolation, "alphabet size must be >= 1");
    total *= s;
  }
  require(total == j.entries(), ErrorKind::ContractViolation,
          "distribution storage does not match alphabet sizes");
  for (double v : j.p)
    require(v >= 0.0, ErrorKind::ContractViolation, "negative probability entry");
  require(std::abs(j.total() - 1.0) <= policy.dist_sum_tol, ErrorKind::ContractViolation,
          "probabilities do not sum to 1");
}

JointDistribution marginalize(const JointDistribution& j, const std::vector<int>& keep) {
  for (std::size_t i = 0; i < keep.size(); ++i) {
    require(keep[i] >= 0 && keep[i] < j.sites(), ErrorKind::InvalidArgument,
            "marginal site out of range");
    if (i > 0)
      require(keep[i] > keep[i - 1], ErrorKind::InvalidArgument, "marginal sites must ascend");
  }
  std::vector<int> out_sizes;
  for (int s : keep) out_sizes.push_back(j.sizes[s]);
  JointDistribution out = JointDistribution::zeros(out_sizes);
  if (keep.empty()) {
    out.p[0] = j.total();
    return out;
  }
  std::vector<std::int64_t> strides(j.sites());
  for (int s = 0; s < j.sites(); ++s) strides[s] = j.stride(s);
  const std::int64_t total = j.entries();
  for (std::int64_t f = 0; f < total; ++f) {
    std::int64_t o = 0;
    for (int s : keep) o = o * j.sizes[s] + (f / strides[s]) % j.sizes[s];
    out.p[std::size_t(o)] += j.p[std::size_t(f)];
  }
  return out;
}

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double v : probs)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

double entropy(const JointDistribution& p) { return entropy(p.p); }

double entropy(const DensityMatrix& rho) {
  RealVector w = hermitian_eigenvalues(rho.mat);
  double h = 0.0;
  for (int i = 0; i < w.size(); ++i)
    if (w(i) > 0.0) h -= w(i) * std::log(w(i));
  return h;
}

SubsetEntropies::SubsetEntropies(const JointDistribution& p) : n_(p.sites()) {
  require(n_ <= 20, ErrorKind::InstanceTooLarge, "subset entropies limited to 20 sites");
  h_.assign(std::size_t(1) << n_, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << n_); ++mask) {
    std::vector<int> keep;
    for (int s = 0; s < n_; ++s)
      if (mask & (1u << s)) keep.push_back(s);
    h_[mask] = entropy(marginalize(p, keep));
  }
}

double SubsetEntropies::of_sites(const std::vector<int>& sites) const {
  std::uint32_t mask = 0;
  for (int s : sites) mask |= (1u << s);
  return h_[mask];
}

static std::uint32_t to_mask(const std::vector<int>& sites) {
  std::uint32_t m = 0;
  for (int s : sites) m |= (1u << s);
  return m;
}

static std::vector<int> mask_sites(std::uint32_t mask, int n) {
  std::vector<int> out;
  for (int s = 0; s < n; ++s)
    if (mask & (1u << s)) out.push_back(s);
  return out;
}

double mutual_information(const JointDistribution& p,
                          const std::vector<std::vector<int>>& groups) {
  std::uint32_t all = 0;
  double sum = 0.0;
  for (const auto& g : groups) {
    std::uint32_t gm = to_mask(g);
    require((all & gm) == 0, ErrorKind::InvalidArgument, "groups overlap");
    all |= gm;
    sum += entropy(marginalize(p, mask_sites(gm, p.sites())));
  }
  double joint = entropy(marginalize(p, mask_sites(all, p.sites())));
  return sum - joint;
}

double mutual_information(const DensityMatrix& rho, const std::vector<std::vector<int>>& groups) {
  std::uint32_t all = 0;
  double sum = 0.0;
  for (const auto& g : groups) {
    std::uint32_t gm = to_mask(g);
    require((all & gm) == 0, ErrorKind::InvalidArgument, "groups overlap");
    all |= gm;
    sum += entropy(partial_trace(rho, mask_sites(gm, rho.sites())));
  }
  double joint = entropy(partial_trace(rho, mask_sites(all, rho.sites())));
  return sum - joint;
}

Conditional condition_on(const JointDistribution& p, const std::vector<int>& sites,
                         const std::vector<int>& values) {
  require(sites.size() == values.size(), ErrorKind::InvalidArgument,
          "conditioning sites/values mismatch");
  std::uint32_t cm = to_mask(sites);
  std::vector<int> rest = mask_sites(~cm & ((1u << p.sites()) - 1), p.sites());
  std::vector<int> rest_sizes;
  for (int s : rest) rest_sizes.push_back(p.sizes[s]);
  Conditional out;
  out.dist = JointDistribution::zeros(rest_sizes);
  std::vector<std::int64_t> strides(p.sites());
  for (int s = 0; s < p.sites(); ++s) strides[s] = p.stride(s);
  // base offset of the observed values
  std::int64_t base = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    require(values[i] >= 0 && values[i] < p.sizes[sites[i]], ErrorKind::InvalidArgument,
            "conditioning value out of range");
    base += strides[sites[i]] * values[i];
  }
  const std::int64_t rest_total = out.dist.entries();
  for (std::int64_t r = 0; r < rest_total; ++r) {
    std::int64_t off = base;
    std::int64_t rr = r;
    for (int s = int(rest.size()) - 1; s >= 0; --s) {
      off += (rr % p.sizes[rest[s]]) * strides[rest[s]];
      rr /= p.sizes[rest[s]];
    }
    out.dist.p[std::size_t(r)] = p.p[std::size_t(off)];
  }
  out.weight = out.dist.total();
  if (out.weight > 0.0)
    for (double& v : out.dist.p) v /= out.weight;
  return out;
}

double conditional_mutual_information(const JointDistribution& p, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c,
                                      const NumericPolicy& policy) {
  std::uint32_t am = to_mask(a), bm = to_mask(b), cm = to_mask(c);
  require((am & bm) == 0 && (am & cm) == 0 && (bm & cm) == 0, ErrorKind::InvalidArgument,
          "A, B, C must be disjoint");
  const int n = p.sites();
  auto h = [&](std::uint32_t mask) {
    return mask == 0 ? 0.0 : entropy(marginalize(p, mask_sites(mask, n)));
  };
  double combo = h(am | cm) + h(bm | cm) - h(am | bm | cm) - h(cm);

  // cross-check against the average of conditional mutual informations
  double avg = 0.0;
  if (c.empty()) {
    avg = mutual_information(p, {a, b});
  } else {
    JointDistribution pc = marginalize(p, mask_sites(cm, n));
    std::vector<int> vals(c.size(), 0);
    std::int64_t count = pc.entries();
    for (std::int64_t f = 0; f < count; ++f) {
      std::int64_t ff = f;
      for (int s = int(c.size()) - 1; s >= 0; --s) {
        vals[std::size_t(s)] = int(ff % p.sizes[c[std::size_t(s)]]);
        ff /= p.sizes[c[std::size_t(s)]];
      }
      Conditional cond = condition_on(p, c, vals);
      if (cond.weight <= 0.0) continue; // zero-probability branch carries no weight
      // map A, B site indices into the conditional's site space
      std::vector<int> rest = mask_sites(~cm & ((1u << n) - 1), n);
      auto remap = [&](const std::vector<int>& grp) {
        std::vector<int> out;
        for (int s : grp)
          out.push_back(int(std::lower_bound(rest.begin(), rest.end(), s) - rest.begin()));
        return out;
      };
      avg += cond.weight * mutual_information(cond.dist, {remap(a), remap(b)});
    }
  }
  require(std::abs(avg - combo) <= policy.identity_tol * std::max(1.0, std::abs(combo)) + 1e-12,
          ErrorKind::ContractViolation,
          "conditional mutual information forms disagree beyond tolerance");
  return combo;
}

double conditional_mutual_information(const DensityMatrix& rho, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c) {
  std::uint32_t am = to_mask(a), bm = to_mask(b), cm = to_mask(c);
  require((am & bm) == 0 && (am & cm) == 0 && (bm & cm) == 0, ErrorKind::InvalidArgument,
          "A, B, C must be disjoint");
  const int n = rho.sites();
  auto h = [&](std::uint32_t mask) {
    return mask == 0 ? 0.0 : entropy(partial_trace(rho, mask_sites(mask, n)));
  };
  return h(am | cm) + h(bm | cm) - h(am | bm | cm) - h(cm);
}

double l1_distance(const JointDistribution& a, const JointDistribution& b) {
  require(a.sizes == b.sizes, ErrorKind::InvalidArgument, "distributions have different shapes");
  double s = 0.0;
  for (std::size_t i = 0; i < a.p.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
  return s;
}

JointDistribution product_of_marginals(const JointDistribution& p,
                                       const std::vector<std::vector<int>>& groups) {
  std::uint32_t all = 0;
  for (const auto& g : groups) all |= to_mask(g);
  std::vector<int> union_sites = mask_sites(all, p.sites());
  std::vector<int> sizes;
  for (int s : union_sites) sizes.push_back(p.sizes[s]);
  std::vector<JointDistribution> margs;
  for (const auto& g : groups) {
    std::vector<int> sorted = g;
    std::sort(sorted.begin(), sorted.end());
    margs.push_back(marginalize(p, sorted));
  }
  JointDistribution out = JointDistribution::zeros(sizes);
  std::vector<int> idx(union_sites.size(), 0);
  const std::int64_t total = out.entries();
  for (std::int64_t f = 0; f < total; ++f) {
    std::int64_t ff = f;
    for (int s = int(union_sites.size()) - 1; s >= 0; --s) {
      idx[std::size_t(s)] = int(ff % sizes[std::size_t(s)]);
      ff /= sizes[std::size_t(s)];
    }
    double v = 1.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      std::vector<int> sorted = groups[gi];
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> sub;
      for (int s : sorted) {
        int pos = int(std::lower_bound(union_sites.begin(), union_sites.end(), s) -
                      union_sites.begin());
        sub.push_back(idx[std::size_t(pos)]);
      }
      v *= margs[gi].at(sub);
    }
    out.p[std::size_t(f)] = v;
  }
  return out;
}

JointDistribution random_distribution(const std::vector<int>& sizes, Rng& rng) {
  JointDistribution j = JointDistribution::zeros(sizes);
  double sum = 0.0;
  for (double& v : j.p) {
    v = -std::log(std::max(rng.uniform(), 1e-300)); // flat Dirichlet
    sum += v;
  }
  for (double& v : j.p) v /= sum;
  return j;
}

JointDistribution random_symmetric_distribution(int n, int alphabet, Rng& rng) {
  std::vector<int> sizes(n, alphabet);
  JointDistribution base = random_distribution(sizes, rng);
  JointDistribution out = JointDistribution::zeros(sizes);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::int64_t count = 0;
  std::vector<int> idx(n), pidx(n);
  do {
    ++count;
    const std::int64_t total = base.entries();
    for (std::int64_t f = 0; f < total; ++f) {
      std::int64_t ff = f;
      for (int s = n - 1; s >= 0; --s) {
        idx[s] = int(ff % alphabet);
        ff /= alphabet;
      }
      for (int s = 0; s < n; ++s) pidx[perm[s]] = idx[s];
      out.at(pidx) += base.at(idx);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& v : out.p) v /= double(count);
  return out;
}

// ---------------------------------------------------------------------------
// identity suite
// ---------------------------------------------------------------------------

IdentityReport check_info_identities(std::uint64_t seed, int trials,
                                     const NumericPolicy& policy) {
  IdentityReport rep;
  rep.classical_trials = trials;
  rep.quantum_trials = std::max(1, trials / 10);
  Rng rng(split_seed(seed, 0x1de47171e5ULL));

  auto track_max = [](double& slot, double v) { slot = std::max(slot, v); };
  auto track_min = [](double& slot, double v) { slot = std::min(slot, v); };
  rep.min_pinsker_slack = 0.0;
  rep.min_upper_limit_slack = 0.0;
  rep.min_monotonicity_slack = 0.0;

  for (int t = 0; t < trials; ++t) {
    int a = 2 + int(rng.uniform_int(2));
    int b = 2 + int(rng.uniform_int(2));
    int c = 2 + int(rng.uniform_int(2));
    int r = 2 + int(rng.uniform_int(2));
    JointDistribution p = random_distribution({a, b, r}, rng);
    SubsetEntropies h(p);
    auto H = [&](std::uint32_t m) { return m == 0 ? 0.0 : h(m); };
    // chain rule: I(A:BR) = I(A:R) + I(A:B|R); sites A=0, B=1, R=2
    double iabr = H(1) + H(6) - H(7);
    double iar = H(1) + H(4) - H(5);
    double iab_r = H(5) + H(6) - H(7) - H(4);
    track_max(rep.max_chain_rule_gap, std::abs(iabr - (iar + iab_r)));

    // classical CMI: combination form vs average form
    double combo = conditional_mutual_information(p, {0}, {1}, {2}, policy);
    track_max(rep.max_cmi_form_gap, std::abs(combo - iab_r));

    // multipartite-to-bipartite on 4 variables, conditioned on the last
    JointDistribution q = random_distribution({a, b, c, r}, rng);
    SubsetEntropies hq(q);
    auto Q = [&](std::uint32_t m) { return m == 0 ? 0.0 : hq(m); };
    std::uint32_t R = 1u << 3;
    double multi = (Q(1 | R) - Q(R)) + (Q(2 | R) - Q(R)) + (Q(4 | R) - Q(R)) - (Q(7 | R) - Q(R));
    double steps = (Q(1 | R) + Q(2 | R) - Q(3 | R) - Q(R)) + (Q(3 | R) + Q(4 | R) - Q(7 | R) - Q(R));
    track_max(rep.max_multi_to_bi_gap, std::abs(multi - steps));

    // Pinsker on the 3-variable distribution
    double mi3 = mutual_information(p, {{0}, {1}, {2}});
    JointDistribution prod = product_of_marginals(p, {{0}, {1}, {2}});
    double l1 = l1_distance(p, prod);
    track_min(rep.min_pinsker_slack, mi3 - 0.5 * l1 * l1);

    // classical upper limit and monotonicity
    double iab = H(1) + H(2) - H(3);
    track_min(rep.min_upper_limit_slack, std::min(std::log(a), std::log(b)) - iab);
    track_min(rep.min_monotonicity_slack, iabr - iab);
  }

  for (int t = 0; t < rep.quantum_trials; ++t) {
    DensityMatrix rho;
    if (t % 2 == 0) {
      ComplexVector psi = random_state(8, rng);
      rho = DensityMatrix{{2, 2, 2}, projector(psi)};
    } else {
      rho = random_density({2, 2, 2}, rng);
    }
    auto S = [&](const std::vector<int>& sites) {
      return sites.empty() ? 0.0 : entropy(partial_trace(rho, sites));
    };
    double iabr = S({0}) + S({1, 2}) - S({0, 1, 2});
    double iar = S({0}) + S({2}) - S({0, 2});
    double iab_r = S({0, 2}) + S({1, 2}) - S({0, 1, 2}) - S({2});
    track_max(rep.max_chain_rule_gap, std::abs(iabr - (iar + iab_r)));

    double multi = S({0}) + S({1}) + S({2}) - S({0, 1, 2});
    double steps = (S({0}) + S({1}) - S({0, 1})) + (S({0, 1}) + S({2}) - S({0, 1, 2}));
    track_max(rep.max_multi_to_bi_gap, std::abs(multi - steps));

    // Pinsker with the trace norm
    DensityMatrix m0 = partial_trace(rho, {0});
    DensityMatrix m1 = partial_trace(rho, {1});
    DensityMatrix m2 = partial_trace(rho, {2});
    ComplexMatrix prod = kron(kron(m0.mat, m1.mat), m2.mat);
    double tn = trace_norm(rho.mat - prod);
    track_min(rep.min_pinsker_slack, multi - 0.5 * tn * tn);

    double iab = S({0}) + S({1}) - S({0, 1});
    track_min(rep.min_upper_limit_slack, 2.0 * std::log(2.0) - iab);
    track_min(rep.min_monotonicity_slack, iabr - iab);
  }

  rep.ok = rep.max_chain_rule_gap <= policy.identity_tol &&
           rep.max_multi_to_bi_gap <= policy.identity_tol &&
           rep.max_cmi_form_gap <= policy.identity_tol &&
           rep.min_pinsker_slack >= policy.nonneg_info_floor &&
           rep.min_upper_limit_slack >= policy.nonneg_info_floor &&
           rep.min_monotonicity_slack >= policy.nonneg_info_floor;
  return rep;
}

// ---------------------------------------------------------------------------
// self-decoupling
// ---------------------------------------------------------------------------

SelfDecouplingReport self_decoupling(const JointDistribution& p, const std::vector<double>& mu,
                                     int k, const NumericPolicy& policy) {
  const int n = p.sites();
  require(int(mu.size()) == n, ErrorKind::InvalidArgument, "mu has wrong length");
  std::vector<int> supp;
  for (int i = 0; i < n; ++i)
    if (mu[i] > 0.0) supp.push_back(i);
  require(k >= 1 && k < int(supp.size()), ErrorKind::InvalidArgument,
          "need 1 <= k < |supp mu|");
  require(p.entries() <= (std::int64_t(1) << 22), ErrorKind::InstanceTooLarge,
          "exact enumeration regime exceeded");

  SubsetEntropies h(p);
  auto H = [&](std::uint32_t m) { return m == 0 ? 0.0 : h(m); };
  auto cmi = [&](int a, int b, std::uint32_t cmask) {
    std::uint32_t am = 1u << a, bm = 1u << b;
    return H(am | cmask) + H(bm | cmask) - H(am | bm | cmask) - H(cmask);
  };

  SelfDecouplingReport rep;
  rep.k = k;

  // rhs: (1/k) E_{i~mu} I(X_i : X_-i)
  std::uint32_t full = (1u << n) - 1;
  double rhs = 0.0;
  for (int i : supp) rhs += mu[i] * (H(1u << i) + H(full & ~(1u << i)) - H(full));
  rhs /= double(k);
  rep.rhs = rhs;

  // lhs: E_{k'} E_{(a,b,c...) ~ mu^(wedge k'+2)} I(X_a:X_b|X_c)
  // ordered tuples without replacement, enumerated recursively
  double lhs = 0.0;
  for (int kp = 0; kp < k; ++kp) {
    double num = 0.0, z = 0.0;
    std::vector<int> tuple;
    std::vector<char> used(n, 0);
    // positions 0,1 are (a,b); the rest are the conditioning sites
    auto rec = [&](auto&& self, double wprod) -> void {
      if (int(tuple.size()) == kp + 2) {
        std::uint32_t cmask = 0;
        for (int t = 2; t < kp + 2; ++t) cmask |= 1u << tuple[std::size_t(t)];
        num += wprod * cmi(tuple[0], tuple[1], cmask);
        z += wprod;
        return;
      }
      for (int s : supp) {
        if (used[s]) continue;
        used[s] = 1;
        tuple.push_back(s);
        self(self, wprod * mu[s]);
        tuple.pop_back();
        used[s] = 0;
      }
    };
    rec(rec, 1.0);
    lhs += num / z;
  }
  lhs /= double(k);
  rep.lhs = lhs;
  rep.holds = lhs <= rhs + 1e-12;

  // derandomized choice: best (k', C) for the conditional pair average
  double best = 0.0;
  bool first = true;
  for (int kp = 0; kp < k; ++kp) {
    std::vector<int> comb(kp);
    // enumerate k'-subsets of the support
    std::vector<int> pick(kp, 0);
    auto eval_subset = [&](const std::vector<int>& cs) {
      std::uint32_t cmask = to_mask(cs);
      double num = 0.0, z = 0.0;
      for (int a : supp) {
        if (cmask & (1u << a)) continue;
        for (int b : supp) {
          if (b == a || (cmask & (1u << b))) continue;
          double w = mu[a] * mu[b];
          num += w * cmi(a, b, cmask);
          z += w;
        }
      }
      return z > 0.0 ? num / z : 0.0;
    };
    auto rec2 = [&](auto&& self, std::size_t start, std::vector<int>& cs) -> void {
      if (int(cs.size()) == kp) {
        double v = eval_subset(cs);
        if (first || v < best) {
          first = false;
          best = v;
          rep.best_kprime = kp;
          rep.best_sites = cs;
        }
        return;
      }
      for (std::size_t s = start; s < supp.size(); ++s) {
        cs.push_back(supp[s]);
        self(self, s + 1, cs);
        cs.pop_back();
      }
    };
    std::vector<int> cs;
    rec2(rec2, 0, cs);
  }
  rep.best_value = best;
  rep.derandomized_holds = best <= rhs + 1e-12;
  return rep;
}

BlockDecouplingReport block_self_decoupling(const JointDistribution& p,
                                            const BlockPartition& partition, int k,
                                            const NumericPolicy& policy) {
  const int n = p.sites();
  validate_partition(partition, n);
  int m = 0;
  require(partition.equal_sized(&m), ErrorKind::InvalidArgument, "blocks must have equal size");
  require(k >= 1 && k <= m, ErrorKind::InvalidArgument, "need 1 <= k <= block size");
  const int nb = int(partition.blocks.size());
  require(nb >= 2, ErrorKind::InvalidArgument, "need at least two blocks");

  SubsetEntropies h(p);
  auto H = [&](std::uint32_t msk) { return msk == 0 ? 0.0 : h(msk); };
  std::vector<std::uint32_t> bmask(nb, 0);
  for (int b = 0; b < nb; ++b) bmask[std::size_t(b)] = to_mask(partition.blocks[std::size_t(b)]);

  BlockDecouplingReport rep;
  rep.k = k;

  // rhs: (1/k) E_{i != j} I(X_i : X_j)
  double rhs = 0.0;
  int pairs = 0;
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      if (i == j) continue;
      rhs += H(bmask[i]) + H(bmask[j]) - H(bmask[i] | bmask[j]);
      ++pairs;
    }
  rhs /= double(k) * double(pairs);
  rep.rhs = rhs;

  // paper-form lhs for a particular per-block selection
  auto lhs_for = [&](const std::vector<std::uint32_t>& sel) {
    std::uint32_t cfull = 0;
    for (auto s : sel) cfull |= s;
    double num = 0.0;
    int cnt = 0;
    for (int i = 0; i < nb; ++i)
      for (int a = 0; a < n; ++a) {
        if (bmask[i] & (1u << a)) continue;
        if (cfull & (1u << a)) continue;
        int ba = partition.block_of(a);
        std::uint32_t cond = sel[std::size_t(ba)];
        num += H(bmask[i] | cond) + H((1u << a) | cond) - H(bmask[i] | (1u << a) | cond) - H(cond);
        ++cnt;
      }
    return cnt > 0 ? num / double(cnt) : 0.0;
  };

  // enumerate joint selections: one k'-subset per block, for each k' < k
  double best = 0.0;
  bool first = true;
  double avg_sum = 0.0;
  std::int64_t avg_cnt = 0;
  for (int kp = 0; kp < k; ++kp) {
    std::vector<std::vector<std::uint32_t>> options(nb);
    for (int b = 0; b < nb; ++b) {
      const auto& sites = partition.blocks[std::size_t(b)];
      std::vector<int> cs;
      auto rec = [&](auto&& self, std::size_t start) -> void {
        if (int(cs.size()) == kp) {
          options[std::size_t(b)].push_back(to_mask(cs));
          return;
        }
        for (std::size_t s = start; s < sites.size(); ++s) {
          cs.push_back(sites[s]);
          self(self, s + 1);
          cs.pop_back();
        }
      };
      rec(rec, 0);
    }
    std::int64_t combos = 1;
    for (auto& o : options) combos *= std::int64_t(o.size());
    require(combos <= 200000, ErrorKind::InstanceTooLarge, "selection space too large");
    std::vector<std::uint32_t> sel(nb, 0);
    auto rec3 = [&](auto&& self, int b) -> void {
      if (b == nb) {
        double v = lhs_for(sel);
        avg_sum += v;
        ++avg_cnt;
        if (first || v < best) {
          first = false;
          best = v;
          rep.best_kprime = kp;
          rep.best_sites.clear();
          for (auto s : sel) rep.best_sites.push_back(mask_sites(s, n));
        }
        return;
      }
      for (auto o : options[std::size_t(b)]) {
        sel[std::size_t(b)] = o;
        self(self, b + 1);
      }
    };
    rec3(rec3, 0);
  }
  rep.lhs_min = best;
  rep.lhs_avg = avg_sum / double(avg_cnt);
  rep.holds = best <= rhs + 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// measurement conditioning helpers
// ---------------------------------------------------------------------------

namespace {

struct Rank1Effect {
  ComplexVector state;
  double scale; // effect = scale * |state><state|
};

std::vector<Rank1Effect> rank1_effects(const Povm& p) {
  std::vector<Rank1Effect> out;
  for (const auto& m : p.effects) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    int nonzero = 0;
    for (int i = 0; i < p.d; ++i)
      if (es.eigenvalues()(i) > 1e-12) ++nonzero;
    require(nonzero == 1, ErrorKind::InvalidArgument,
            "measurement conditioning needs rank-1 effects");
    out.push_back({es.eigenvectors().col(p.d - 1), es.eigenvalues()(p.d - 1)});
  }
  return out;
}

// contract site `pos` of `mat` (dims all equal d) against |phi><phi|
ComplexMatrix contract_site(const ComplexMatrix& mat, int nsites, int d, int pos,
                            const ComplexVector& phi) {
  std::int64_t left = 1;
  for (int s = 0; s < pos; ++s) left *= d;
  std::int64_t right = 1;
  for (int s = pos + 1; s < nsites; ++s) right *= d;
  std::int64_t dim_out = left * right;
  ComplexMatrix out = ComplexMatrix::Zero(dim_out, dim_out);
  for (std::int64_t lr = 0; lr < left; ++lr)
    for (std::int64_t lc = 0; lc < left; ++lc)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          cxd w = std::conj(phi(a)) * phi(b);
          if (w == cxd(0.0)) continue;
          for (std::int64_t rr = 0; rr < right; ++rr)
            for (std::int64_t rc = 0; rc < right; ++rc)
              out(lr * right + rr, lc * right + rc) +=
                  w * mat((lr * d + a) * right + rr, (lc * d + b) * right + rc);
        }
  return out;
}

// Walk all outcome tuples of measuring `sites` of rho with rank-1 effects.
// The visitor receives the outcome tuple, its probability, and the
// unnormalized conditional matrix on the remaining sites.
template <typename Visitor>
void walk_outcomes(const DensityMatrix& rho, const std::vector<int>& sites,
                   const std::vector<Rank1Effect>& effects, Visitor&& visit) {
  const int d = rho.dims.empty() ? 2 : rho.dims[0];
  std::vector<int> outcome(sites.size(), 0);
  // recursion over sites in descending position so earlier positions stay valid
  auto rec = [&](auto&& self, int idx, const ComplexMatrix& cur, int remaining,
                 double scale) -> void {
    if (idx == int(sites.size())) {
      visit(outcome, cur, scale);
      return;
    }
    // position of sites[idx] within the current (partially contracted) site list:
    // all earlier sites in `sites` were removed, and sites are ascending
    int pos = sites[std::size_t(idx)] - idx;
    for (int x = 0; x < int(effects.size()); ++x) {
      outcome[std::size_t(idx)] = x;
      ComplexMatrix next = contract_site(cur, remaining, d, pos, effects[std::size_t(x)].state);
      self(self, idx + 1, next, remaining - 1, scale * effects[std::size_t(x)].scale);
    }
  };
  rec(rec, 0, rho.mat, rho.sites(), 1.0);
}

} // namespace

// ---------------------------------------------------------------------------
// the measure-and-condition product-state construction
// ---------------------------------------------------------------------------

ConditionedStateReport conditioned_product_state(const DensityMatrix& rho, const Povm& povm,
                                                 const BlockPartition& partition,
                                                 const InteractionGraph& graph, double delta1,
                                                 double delta2, std::uint64_t seed,
                                                 const NumericPolicy& policy) {
  (void)seed; // enumeration is exact; the seed is kept for interface stability
  const int n = rho.sites();
  validate_partition(partition, n);
  require(graph.n == n, ErrorKind::InvalidArgument, "graph size mismatch");
  int m = 0;
  require(partition.equal_sized(&m), ErrorKind::InvalidArgument, "blocks must have equal size");
  const int nb = int(partition.blocks.size());
  for (int s = 0; s < n; ++s)
    require(rho.dims[std::size_t(s)] == povm.d, ErrorKind::InvalidArgument,
            "state dimension does not match the POVM");

  ConditionedStateReport rep;
  rep.n = n;
  rep.m = m;
  rep.nblocks = nb;
  rep.delta1 = delta1;
  rep.delta2 = delta2;
  // smallest integers k~ = ceil(nb*delta1) >= 1, k = ceil(m*delta2) >= 1,
  // clamped to the number of blocks / block size at desk scale
  rep.ktilde = std::min(nb, std::max(1, int(std::ceil(double(nb) * delta1 - 1e-12))));
  rep.k = std::min(m, std::max(1, int(std::ceil(double(m) * delta2 - 1e-12))));

  std::vector<std::uint32_t> bmask(nb, 0);
  for (int b = 0; b < nb; ++b) bmask[std::size_t(b)] = to_mask(partition.blocks[std::size_t(b)]);

  // lazy entropy cache over site subsets of the measured distribution
  std::map<std::uint32_t, double> hcache;
  auto H = [&](std::uint32_t mask) {
    if (mask == 0) return 0.0;
    auto it = hcache.find(mask);
    if (it != hcache.end()) return it->second;
    std::vector<int> sites = mask_sites(mask, n);
    double h = entropy(measure_channel(povm, rho, sites, policy));
    hcache.emplace(mask, h);
    return h;
  };

  // enumerate candidate measured sets: a set of blocks (< ktilde of them)
  // measured entirely, plus per-block extra sites (< k per block)
  struct Combo {
    std::uint32_t cmask;                       // all measured sites
    std::vector<std::uint32_t> block_extra;    // per-block extra sites
    std::uint32_t tilde_mask;                  // which blocks are fully measured
  };
  std::vector<Combo> combos;
  std::vector<std::vector<std::uint32_t>> per_block_opts(nb);
  for (int b = 0; b < nb; ++b) {
    const auto& sites = partition.blocks[std::size_t(b)];
    for (int kp = 0; kp < rep.k; ++kp) {
      std::vector<int> cs;
      auto rec = [&](auto&& self, std::size_t start) -> void {
        if (int(cs.size()) == kp) {
          per_block_opts[std::size_t(b)].push_back(to_mask(cs));
          return;
        }
        for (std::size_t s = start; s < sites.size(); ++s) {
          cs.push_back(sites[s]);
          self(self, s + 1);
          cs.pop_back();
        }
      };
      rec(rec, 0);
    }
  }
  for (std::uint32_t tmask = 0; tmask < (1u << nb); ++tmask) {
    if (__builtin_popcount(tmask) >= rep.ktilde) continue;
    std::vector<std::uint32_t> extra(nb, 0);
    auto rec = [&](auto&& self, int b) -> void {
      if (b == nb) {
        Combo c;
        c.tilde_mask = tmask;
        c.block_extra = extra;
        c.cmask = 0;
        for (int bb = 0; bb < nb; ++bb) {
          if (tmask & (1u << bb)) c.cmask |= bmask[std::size_t(bb)];
          c.cmask |= extra[std::size_t(bb)];
        }
        combos.push_back(c);
        return;
      }
      for (auto o : per_block_opts[std::size_t(b)]) {
        extra[std::size_t(b)] = o;
        self(self, b + 1);
      }
    };
    rec(rec, 0);
    require(combos.size() <= 20000, ErrorKind::InstanceTooLarge, "conditioning search too large");
  }
  rep.combos_searched = int(combos.size());

  // selection criterion (step 2): E_i E_{a not in V_i} I(X_i : Y_a | Z)
  auto step2_value = [&](const Combo& c) {
    double num = 0.0;
    int cnt = 0;
    for (int i = 0; i < nb; ++i)
      for (int a = 0; a < n; ++a) {
        if (bmask[std::size_t(i)] & (1u << a)) continue;
        num += H(bmask[std::size_t(i)] | c.cmask) + H((1u << a) | c.cmask) -
               H(bmask[std::size_t(i)] | (1u << a) | c.cmask) - H(c.cmask);
        ++cnt;
      }
    return num / double(cnt);
  };

  const Combo* best = nullptr;
  double best_val = 0.0;
  for (const auto& c : combos) {
    double v = step2_value(c);
    if (!best || v < best_val) {
      best = &c;
      best_val = v;
    }
  }
  rep.block_site_cmi = best_val;
  std::vector<int> csites = mask_sites(best->cmask, n);
  rep.measured_sites = csites;

  // step 1: block-block correlations for the chosen conditioning
  {
    double num = 0.0;
    int cnt = 0;
    for (int i = 0; i < nb; ++i) {
      if (best->tilde_mask & (1u << i)) continue;
      for (int j = 0; j < nb; ++j) {
        if (j == i || (best->tilde_mask & (1u << j))) continue;
        std::uint32_t cond = 0;
        for (int bb = 0; bb < nb; ++bb) {
          if (best->tilde_mask & (1u << bb)) cond |= bmask[std::size_t(bb)];
          if (bb != j) cond |= best->block_extra[std::size_t(bb)];
        }
        num += H(bmask[std::size_t(i)] | cond) + H(bmask[std::size_t(j)] | cond) -
               H(bmask[std::size_t(i)] | bmask[std::size_t(j)] | cond) - H(cond);
        ++cnt;
      }
    }
    rep.block_block_cmi = cnt > 0 ? num / double(cnt) : 0.0;
  }

  // step 3: block-site correlations along edges entering each block
  {
    double total_w = 0.0, acc = 0.0;
    for (const auto& e : graph.edges()) {
      int bi = partition.block_of(e.i), bj = partition.block_of(e.j);
      if (bi == bj) continue;
      // both orientations: site a neighboring block B(b)
      for (auto [a, blk] : {std::pair<int, int>{e.i, bj}, std::pair<int, int>{e.j, bi}}) {
        acc += e.w * (H(bmask[std::size_t(blk)] | best->cmask) + H((1u << a) | best->cmask) -
                      H(bmask[std::size_t(blk)] | (1u << a) | best->cmask) - H(best->cmask));
        total_w += e.w;
      }
    }
    rep.edge_block_site_cmi = total_w > 0.0 ? acc / total_w : 0.0;
  }

  // step 4: site-site correlations across blocks
  std::vector<InteractionGraph::Edge> across;
  double across_w = 0.0;
  for (const auto& e : graph.edges()) {
    if (partition.block_of(e.i) != partition.block_of(e.j)) {
      across.push_back(e);
      across_w += e.w;
    }
  }
  {
    double acc = 0.0;
    for (const auto& e : across)
      acc += e.w * (H((1u << e.i) | best->cmask) + H((1u << e.j) | best->cmask) -
                    H((1u << e.i) | (1u << e.j) | best->cmask) - H(best->cmask));
    rep.site_site_cmi = across_w > 0.0 ? acc / across_w : 0.0;
  }

  // step 5: classical variational distance across blocks, conditioned
  {
    double acc = 0.0;
    for (const auto& e : across) {
      std::vector<int> sites = mask_sites(best->cmask | (1u << e.i) | (1u << e.j), n);
      JointDistribution joint = measure_channel(povm, rho, sites, policy);
      // positions of e.i, e.j and the conditioning sites within `sites`
      std::vector<int> cond_pos, pair_pos;
      for (std::size_t t = 0; t < sites.size(); ++t) {
        if (sites[t] == e.i || sites[t] == e.j) pair_pos.push_back(int(t));
        if (best->cmask & (1u << sites[t])) cond_pos.push_back(int(t));
      }
      double edge_acc = 0.0;
      std::vector<int> vals(cond_pos.size(), 0);
      std::int64_t zcount = 1;
      for (std::size_t t = 0; t < cond_pos.size(); ++t) zcount *= joint.sizes[cond_pos[t]];
      for (std::int64_t z = 0; z < zcount; ++z) {
        std::int64_t zz = z;
        for (int t = int(cond_pos.size()) - 1; t >= 0; --t) {
          vals[std::size_t(t)] = int(zz % joint.sizes[cond_pos[std::size_t(t)]]);
          zz /= joint.sizes[cond_pos[std::size_t(t)]];
        }
        Conditional cond = condition_on(joint, cond_pos, vals);
        if (cond.weight <= 0.0) continue;
        // remaining sites of `joint` after conditioning, positions of the pair
        std::vector<int> rest;
        for (std::size_t t = 0; t < sites.size(); ++t)
          if (!(best->cmask & (1u << sites[t]))) rest.push_back(int(t));
        std::vector<int> pp;
        for (std::size_t t = 0; t < rest.size(); ++t)
          if (sites[std::size_t(rest[t])] == e.i || sites[std::size_t(rest[t])] == e.j)
            pp.push_back(int(t));
        JointDistribution pair;
        if (pp.size() == 2) {
          pair = marginalize(cond.dist, {pp[0], pp[1]});
        } else {
          continue; // both endpoints measured: conditional is deterministic
        }
        JointDistribution prod = product_of_marginals(pair, {{0}, {1}});
        edge_acc += cond.weight * l1_distance(pair, prod);
      }
      acc += e.w * edge_acc;
    }
    rep.classical_l1 = across_w > 0.0 ? acc / across_w : 0.0;
  }

  // steps 6 and 7: quantum trace distances and the assembled separable state.
  // A measured site collapses to a pure state in product with everything
  // else, so only edges with both endpoints unmeasured carry a nonzero
  // step-6 term or within-block entanglement.
  auto effects = rank1_effects(povm);
  auto edges = graph.edges();
  std::vector<ComplexMatrix> sigma_edge(edges.size());
  for (auto& s : sigma_edge) s = ComplexMatrix::Zero(povm.d * povm.d, povm.d * povm.d);
  double qdist_acc = 0.0;

  std::vector<int> unmeasured;
  for (int s = 0; s < n; ++s)
    if (!(best->cmask & (1u << s))) unmeasured.push_back(s);

  auto upos = [&](int s) {
    return int(std::lower_bound(unmeasured.begin(), unmeasured.end(), s) - unmeasured.begin());
  };
  auto is_measured = [&](int s) { return bool((best->cmask >> s) & 1); };

  if (unmeasured.empty()) {
    // everything measured: tau_z is a pure product state per outcome, so the
    // edge marginals of sigma follow from two-site outcome statistics
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const auto& e = edges[ei];
      JointDistribution pe = measure_channel(povm, rho, {e.i, e.j}, policy);
      for (int xa = 0; xa < int(effects.size()); ++xa)
        for (int xb = 0; xb < int(effects.size()); ++xb) {
          double w = pe.at({xa, xb});
          if (w <= 0.0) continue;
          sigma_edge[ei] += w * kron(projector(effects[std::size_t(xa)].state),
                                     projector(effects[std::size_t(xb)].state));
        }
    }
    rep.quantum_trace_dist = 0.0;
  } else {
    walk_outcomes(rho, csites, effects, [&](const std::vector<int>& outcome,
                                            const ComplexMatrix& cond, double scale) {
      double weight = cond.trace().real() * scale;
      if (weight <= 1e-15) return;
      DensityMatrix tau{std::vector<int>(unmeasured.size(), povm.d),
                        cond / cond.trace().real()};
      // per-leaf single-site states
      std::vector<ComplexMatrix> singles{std::size_t(n)};
      for (int s = 0; s < n; ++s) {
        if (is_measured(s)) {
          auto it = std::lower_bound(csites.begin(), csites.end(), s);
          singles[std::size_t(s)] =
              projector(effects[std::size_t(outcome[std::size_t(it - csites.begin())])].state);
        } else {
          singles[std::size_t(s)] = partial_trace(tau, {upos(s)}).mat;
        }
      }
      double local = 0.0;
      for (const auto& e : across) {
        if (is_measured(e.i) || is_measured(e.j)) continue; // exact product, distance 0
        ComplexMatrix joint = partial_trace(tau, {upos(e.i), upos(e.j)}).mat;
        local += e.w * trace_norm(joint - kron(singles[std::size_t(e.i)],
                                               singles[std::size_t(e.j)]));
      }
      qdist_acc += weight * local;
      for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        const auto& e = edges[ei];
        bool same_block = partition.block_of(e.i) == partition.block_of(e.j);
        if (same_block && !is_measured(e.i) && !is_measured(e.j))
          sigma_edge[ei] += weight * partial_trace(tau, {upos(e.i), upos(e.j)}).mat;
        else
          sigma_edge[ei] +=
              weight * kron(singles[std::size_t(e.i)], singles[std::size_t(e.j)]);
      }
    });
    rep.quantum_trace_dist = across_w > 0.0 ? qdist_acc / across_w : 0.0;
  }

  double lhs = 0.0;
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const auto& e = edges[ei];
    DensityMatrix marg = partial_trace(rho, {e.i, e.j});
    lhs += e.w * trace_norm(marg.mat - sigma_edge[ei]);
  }
  rep.lhs = lhs;
  return rep;
}

// ---------------------------------------------------------------------------
// de Finetti experiments
// ---------------------------------------------------------------------------

namespace {

// all ascending k-subsets of `pool`
std::vector<std::vector<int>> subsets_of(const std::vector<int>& pool, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (int(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t s = start; s < pool.size(); ++s) {
      cur.push_back(pool[s]);
      self(self, s + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

} // namespace

DeFinettiReport definetti_classical(const JointDistribution& p, int k, int t,
                                    const NumericPolicy& policy) {
  const int n = p.sites();
  require(k >= 1 && t >= 1, ErrorKind::InvalidArgument, "need k,t >= 1");
  require(t <= n - k, ErrorKind::InvalidArgument, "need t <= n - k");
  int alphabet = p.sizes[0];
  for (int s : p.sizes)
    require(s == alphabet, ErrorKind::InvalidArgument, "uniform alphabet required");

  DeFinettiReport rep;
  rep.n = n;
  rep.k = k;
  rep.t = t;
  rep.rhs = 2.0 * double(k) * double(k) * std::log(double(alphabet)) / double(t);

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;

  for (int m = 0; m <= t; ++m) {
    double level = 0.0;
    auto jsets = subsets_of(all, m);
    for (const auto& js : jsets) {
      std::vector<int> vals(js.size(), 0);
      std::int64_t count = 1;
      for (std::size_t i = 0; i < js.size(); ++i) count *= alphabet;
      std::vector<int> rest;
      std::uint32_t jm = to_mask(js);
      for (int s = 0; s < n; ++s)
        if (!(jm & (1u << s))) rest.push_back(s);
      double jacc = 0.0;
      for (std::int64_t x = 0; x < count; ++x) {
        std::int64_t xx = x;
        for (int i = int(js.size()) - 1; i >= 0; --i) {
          vals[std::size_t(i)] = int(xx % alphabet);
          xx /= alphabet;
        }
        Conditional cond = condition_on(p, js, vals);
        if (cond.weight <= 0.0) continue;
        // i-subsets live in the conditional's site space (rest, ascending)
        std::vector<int> rest_pos(rest.size());
        for (std::size_t i = 0; i < rest.size(); ++i) rest_pos[i] = int(i);
        auto isets = subsets_of(rest_pos, k);
        double iacc = 0.0;
        for (const auto& is : isets) {
          JointDistribution marg = marginalize(cond.dist, is);
          std::vector<std::vector<int>> singles;
          for (int pos = 0; pos < k; ++pos) singles.push_back({pos});
          JointDistribution prod = product_of_marginals(marg, singles);
          double l1 = l1_distance(marg, prod);
          iacc += l1 * l1;
        }
        jacc += cond.weight * iacc / double(isets.size());
      }
      level += jacc;
    }
    level /= double(jsets.size());
    rep.lhs_per_m.push_back(level);
  }
  rep.lhs_min = rep.lhs_per_m[0];
  rep.best_m = 0;
  for (int m = 1; m <= t; ++m)
    if (rep.lhs_per_m[std::size_t(m)] < rep.lhs_min) {
      rep.lhs_min = rep.lhs_per_m[std::size_t(m)];
      rep.best_m = m;
    }
  rep.holds = rep.lhs_min <= rep.rhs + 1e-12;
  return rep;
}

SymmetricDeFinettiReport definetti_symmetric(const JointDistribution& p, int k,
                                             const NumericPolicy& policy) {
  const int n = p.sites();
  require(k >= 1 && k < n, ErrorKind::InvalidArgument, "need 1 <= k < n");
  int alphabet = p.sizes[0];
  for (int s : p.sizes)
    require(s == alphabet, ErrorKind::InvalidArgument, "uniform alphabet required");
  int t = n - k;

  SymmetricDeFinettiReport rep;
  rep.n = n;
  rep.k = k;
  rep.rhs = std::sqrt(2.0 * double(k) * double(k) * std::log(double(alphabet)) / double(t));

  // reference marginal: first k sites
  std::vector<int> iset(k);
  for (int i = 0; i < k; ++i) iset[i] = i;
  JointDistribution ref = marginalize(p, iset);

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;

  bool first = true;
  for (int m = 0; m <= t; ++m) {
    // the mixture of product distributions induced by conditioning on m sites
    JointDistribution mixture = JointDistribution::zeros(std::vector<int>(k, alphabet));
    double total_weight = 0.0;
    // j-subsets disjoint from the reference sites
    std::vector<int> pool;
    for (int s = k; s < n; ++s) pool.push_back(s);
    auto jsets = subsets_of(pool, m);
    for (const auto& js : jsets) {
      std::vector<int> vals(js.size(), 0);
      std::int64_t count = 1;
      for (int i = 0; i < m; ++i) count *= alphabet;
      for (std::int64_t x = 0; x < count; ++x) {
        std::int64_t xx = x;
        for (int i = m - 1; i >= 0; --i) {
          vals[std::size_t(i)] = int(xx % alphabet);
          xx /= alphabet;
        }
        Conditional cond = condition_on(p, js, vals);
        if (cond.weight <= 0.0) continue;
        // single-site conditional marginal (site independent for symmetric p;
        // average over the reference positions to absorb numerical asymmetry)
        std::vector<double> q(std::size_t(alphabet), 0.0);
        for (int pos = 0; pos < k; ++pos) {
          JointDistribution single = marginalize(cond.dist, {pos});
          for (int aidx = 0; aidx < alphabet; ++aidx) q[std::size_t(aidx)] += single.p[std::size_t(aidx)];
        }
        for (double& v : q) v /= double(k);
        // add the product q^(x)k
        const std::int64_t tot = mixture.entries();
        for (std::int64_t f = 0; f < tot; ++f) {
          std::int64_t ff = f;
          double prod = 1.0;
          for (int pos = k - 1; pos >= 0; --pos) {
            prod *= q[std::size_t(ff % alphabet)];
            ff /= alphabet;
          }
          mixture.p[std::size_t(f)] += cond.weight * prod;
        }
        total_weight += cond.weight;
      }
    }
    if (!jsets.empty()) {
      for (double& v : mixture.p) v /= double(jsets.size());
      total_weight /= double(jsets.size());
    }
    if (std::abs(total_weight - 1.0) > 1e-9) continue;
    double l1 = l1_distance(ref, mixture);
    if (first || l1 < rep.lhs) {
      first = false;
      rep.lhs = l1;
      rep.best_m = m;
    }
  }
  rep.holds = rep.lhs <= rep.rhs + 1e-12;
  return rep;
}

DeFinettiReport definetti_quantum(const DensityMatrix& rho, const Povm& povm, int k, int t,
                                  const NumericPolicy& policy) {
  const int n = rho.sites();
  require(k >= 1 && t >= 1, ErrorKind::InvalidArgument, "need k,t >= 1");
  require(t <= n - k, ErrorKind::InvalidArgument, "need t <= n - k");
  for (int s = 0; s < n; ++s)
    require(rho.dims[std::size_t(s)] == povm.d, ErrorKind::InvalidArgument,
            "state dimension does not match the POVM");
  auto effects = rank1_effects(povm);

  DeFinettiReport rep;
  rep.n = n;
  rep.k = k;
  rep.t = t;
  double d = double(povm.d);
  rep.rhs = 4.0 * std::log(d) * std::pow(18.0 * d, double(k)) * double(k) * double(k) / double(t);

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;

  for (int m = 0; m <= t; ++m) {
    double level = 0.0;
    auto jsets = subsets_of(all, m);
    for (const auto& js : jsets) {
      std::vector<int> rest;
      std::uint32_t jm = to_mask(js);
      for (int s = 0; s < n; ++s)
        if (!(jm & (1u << s))) rest.push_back(s);
      std::vector<int> rest_pos(rest.size());
      for (std::size_t i = 0; i < rest.size(); ++i) rest_pos[i] = int(i);
      auto isets = subsets_of(rest_pos, k);
      double jacc = 0.0;
      walk_outcomes(rho, js, effects, [&](const std::vector<int>&, const ComplexMatrix& cond,
                                          double scale) {
        double weight = cond.trace().real() * scale;
        if (weight <= 1e-15) return;
        DensityMatrix tau{std::vector<int>(rest.size(), povm.d), cond / cond.trace().real()};
        double iacc = 0.0;
        for (const auto& is : isets) {
          DensityMatrix joint = partial_trace(tau, is);
          ComplexMatrix prod = ComplexMatrix::Identity(1, 1);
          for (int pos : is) prod = kron(prod, partial_trace(tau, {pos}).mat);
          double tn = trace_norm(joint.mat - prod);
          iacc += tn * tn;
        }
        jacc += weight * iacc / double(isets.size());
      });
      level += jacc;
    }
    level /= double(jsets.size());
    rep.lhs_per_m.push_back(level);
  }
  rep.lhs_min = rep.lhs_per_m[0];
  rep.best_m = 0;
  for (int m = 1; m <= t; ++m)
    if (rep.lhs_per_m[std::size_t(m)] < rep.lhs_min) {
      rep.lhs_min = rep.lhs_per_m[std::size_t(m)];
      rep.best_m = m;
    }
  rep.holds = rep.lhs_min <= rep.rhs + 1e-12;
  return rep;
}

} // namespace qps
