#include "qps/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include "qps/infotools.hpp"
#include "qps/measurement.hpp"

namespace qps {

void validate_product_state(const ProductState& phi, int n, int d, const NumericPolicy& policy) {
  validate_partition(phi.partition, n);
  require(phi.factors.size() == phi.partition.blocks.size(), ErrorKind::ContractViolation,
          "one factor per block required");
  for (std::size_t b = 0; b < phi.factors.size(); ++b) {
    std::int64_t dim = 1;
    for (std::size_t s = 0; s < phi.partition.blocks[b].size(); ++s) dim *= d;
    require(phi.factors[b].size() == dim, ErrorKind::ContractViolation,
            "factor dimension mismatch");
    require(std::abs(phi.factors[b].norm() - 1.0) <= 1e-12 * 10, ErrorKind::ContractViolation,
            "factor is not normalized");
  }
}

namespace {

// position of a site inside its block's ascending site list
int pos_in_block(const std::vector<int>& block, int site) {
  return int(std::lower_bound(block.begin(), block.end(), site) - block.begin());
}

// single-site reduced matrix of a block factor
ComplexMatrix site_marginal(const ComplexVector& factor, const std::vector<int>& block, int d,
                            int site) {
  DensityMatrix blockstate{std::vector<int>(block.size(), d), projector(factor)};
  return partial_trace(blockstate, {pos_in_block(block, site)}).mat;
}

// contraction of a two-site term against the state of one side
// free_first: the surviving site is the term's first slot
ComplexMatrix contract_term(const ComplexMatrix& term, const ComplexMatrix& other, int d,
                            bool free_first) {
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  if (free_first) {
    for (int a = 0; a < d; ++a)
      for (int a2 = 0; a2 < d; ++a2) {
        cxd acc = 0.0;
        for (int b = 0; b < d; ++b)
          for (int b2 = 0; b2 < d; ++b2) acc += term(a * d + b, a2 * d + b2) * other(b2, b);
        out(a, a2) = acc;
      }
  } else {
    for (int b = 0; b < d; ++b)
      for (int b2 = 0; b2 < d; ++b2) {
        cxd acc = 0.0;
        for (int a = 0; a < d; ++a)
          for (int a2 = 0; a2 < d; ++a2) acc += term(a * d + b, a2 * d + b2) * other(a2, a);
        out(b, b2) = acc;
      }
  }
  return out;
}

} // namespace

double product_energy(const HamiltonianInstance& h, const ProductState& phi,
                      const NumericPolicy& policy) {
  validate_product_state(phi, h.n, h.d, policy);
  const auto& blocks = phi.partition.blocks;
  // cache per-site marginals
  std::vector<ComplexMatrix> marg(std::size_t(h.n));
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int s : blocks[b]) marg[std::size_t(s)] = site_marginal(phi.factors[b], blocks[b], h.d, s);

  double energy = 0.0;
  for (const auto& e : h.graph.edges()) {
    const ComplexMatrix& term = h.terms.at({e.i, e.j});
    int bi = phi.partition.block_of(e.i), bj = phi.partition.block_of(e.j);
    if (bi == bj) {
      DensityMatrix blockstate{std::vector<int>(blocks[std::size_t(bi)].size(), h.d),
                               projector(phi.factors[std::size_t(bi)])};
      DensityMatrix pair = partial_trace(blockstate, {pos_in_block(blocks[std::size_t(bi)], e.i),
                                                      pos_in_block(blocks[std::size_t(bi)], e.j)});
      energy += e.w * (term * pair.mat).trace().real();
    } else {
      ComplexMatrix pair = kron(marg[std::size_t(e.i)], marg[std::size_t(e.j)]);
      energy += e.w * (term * pair).trace().real();
    }
  }
  return energy;
}

SweepResult meanfield_sweep(const HamiltonianInstance& h, const BlockPartition& partition,
                            int restarts, std::uint64_t seed, const NumericPolicy& policy) {
  validate_partition(partition, h.n);
  require(restarts >= 1, ErrorKind::InvalidArgument, "need at least one restart");
  const auto& blocks = partition.blocks;
  const int nb = int(blocks.size());
  for (const auto& b : blocks) {
    std::int64_t dim = 1;
    for (std::size_t s = 0; s < b.size(); ++s) dim *= h.d;
    require(dim * dim <= policy.entry_cap, ErrorKind::InstanceTooLarge,
            "block dimension exceeds the cap");
  }

  const int max_sweeps = 500;
  const double energy_tol = 1e-10;

  SweepResult best;
  best.restarts = restarts;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(split_seed(seed, 0x5eefULL + std::uint64_t(r)));
    ProductState phi;
    phi.partition = partition;
    for (const auto& b : blocks) {
      std::int64_t dim = 1;
      for (std::size_t s = 0; s < b.size(); ++s) dim *= h.d;
      phi.factors.push_back(random_state(int(dim), rng));
    }
    double energy = product_energy(h, phi, policy);
    int sweeps = 0;
    bool converged = false;
    while (sweeps < max_sweeps) {
      ++sweeps;
      for (int b = 0; b < nb; ++b) {
        // effective operator on block b against the other blocks
        std::int64_t dim = phi.factors[std::size_t(b)].size();
        ComplexMatrix heff = ComplexMatrix::Zero(dim, dim);
        std::vector<int> dims_b(blocks[std::size_t(b)].size(), h.d);
        for (const auto& e : h.graph.edges()) {
          int bi = partition.block_of(e.i), bj = partition.block_of(e.j);
          const ComplexMatrix& term = h.terms.at({e.i, e.j});
          if (bi == b && bj == b) {
            heff += e.w * embed_operator(term,
                                         {pos_in_block(blocks[std::size_t(b)], e.i),
                                          pos_in_block(blocks[std::size_t(b)], e.j)},
                                         dims_b, policy);
          } else if (bi == b) {
            ComplexMatrix other =
                site_marginal(phi.factors[std::size_t(bj)], blocks[std::size_t(bj)], h.d, e.j);
            ComplexMatrix k = contract_term(term, other, h.d, true);
            heff += e.w * embed_operator(k, {pos_in_block(blocks[std::size_t(b)], e.i)}, dims_b,
                                         policy);
          } else if (bj == b) {
            ComplexMatrix other =
                site_marginal(phi.factors[std::size_t(bi)], blocks[std::size_t(bi)], h.d, e.i);
            ComplexMatrix k = contract_term(term, other, h.d, false);
            heff += e.w * embed_operator(k, {pos_in_block(blocks[std::size_t(b)], e.j)}, dims_b,
                                         policy);
          }
        }
        EigResult eig = hermitian_eig(heff, policy);
        phi.factors[std::size_t(b)] = eig.vectors.col(0);
      }
      double next = product_energy(h, phi, policy);
      require(next <= energy + 1e-9, ErrorKind::ContractViolation,
              "sweep energy increased; coordinate update is broken");
      if (energy - next < energy_tol) {
        energy = next;
        converged = true;
        break;
      }
      energy = next;
    }
    if (r == 0 || energy < best.energy) {
      best.state = phi;
      best.energy = energy;
      best.sweeps = sweeps;
      best.converged = converged;
    }
  }
  return best;
}

BasicBoundReport bound_check_basic(const HamiltonianInstance& h, int restarts, std::uint64_t seed,
                                   const NumericPolicy& policy) {
  BasicBoundReport rep;
  rep.n = h.n;
  rep.d = h.d;
  rep.seed = seed;
  rep.restarts = restarts;
  int degree = 0;
  require(h.graph.regular(&degree), ErrorKind::InvalidArgument,
          "degree bound check needs an unweighted regular instance");
  require(h.n >= degree, ErrorKind::InvalidArgument,
          "degree bound check requires n >= D");
  rep.degree = degree;
  rep.e0 = ground_energy_only(h, policy);
  rep.e_product = meanfield_sweep(h, BlockPartition::singletons(h.n), restarts, seed, policy).energy;
  rep.gap = rep.e_product - rep.e0;
  rep.bound =
      12.0 * std::cbrt(double(h.d) * double(h.d) * std::log(double(h.d)) / double(degree));
  rep.holds = rep.gap <= rep.bound + 1e-12;
  return rep;
}

ClusteredBoundReport bound_check_clustered(const HamiltonianInstance& h,
                                           const BlockPartition& partition,
                                           const DensityMatrix* rho_in, int restarts,
                                           std::uint64_t seed, const NumericPolicy& policy) {
  ClusteredBoundReport rep;
  rep.n = h.n;
  rep.d = h.d;
  rep.seed = seed;
  int degree = 0;
  require(h.graph.regular(&degree), ErrorKind::InvalidArgument,
          "clustered bound check needs an unweighted regular instance");
  rep.degree = degree;
  int m = 0;
  require(partition.equal_sized(&m), ErrorKind::InvalidArgument, "blocks must have equal size");
  rep.m = m;
  const int nb = int(partition.blocks.size());

  DensityMatrix rho;
  if (rho_in) {
    rho = *rho_in;
  } else {
    GroundState gs = ground_energy(h, policy);
    rho = DensityMatrix{std::vector<int>(std::size_t(h.n), h.d), projector(gs.psi0)};
    rep.e0 = gs.e0;
  }
  if (rho_in) rep.e0 = ground_energy_only(h, policy);

  rep.e_block_product = meanfield_sweep(h, partition, restarts, seed, policy).energy;

  double phi_bar = 0.0;
  for (const auto& b : partition.blocks) phi_bar += expansion(h.graph, b);
  phi_bar /= double(nb);
  rep.avg_expansion = phi_bar;

  double info = 0.0;
  for (const auto& b : partition.blocks) {
    std::vector<int> comp;
    std::vector<char> in(std::size_t(h.n), 0);
    for (int s : b) in[std::size_t(s)] = 1;
    for (int s = 0; s < h.n; ++s)
      if (!in[std::size_t(s)]) comp.push_back(s);
    info += mutual_information(rho, {b, comp});
  }
  info /= double(nb);
  rep.avg_info = std::max(info, 0.0);

  rep.bound = 9.0 * std::pow(double(h.d) * double(h.d) * phi_bar / double(degree) *
                                 rep.avg_info / double(m),
                             1.0 / 6.0) +
              1.0 / double(m) + double(m) / double(h.n);

  // balancing choice of the conditioning parameters
  double delta = std::pow(18.0 * double(h.d), 1.0 / 3.0) *
                 std::pow(2.0 * phi_bar * rep.avg_info / (double(m) * double(degree)), 1.0 / 6.0);
  if (!std::isfinite(delta)) delta = 0.0;
  rep.delta = delta;

  Povm povm = icosahedral_povm();
  require(h.d == 2, ErrorKind::InvalidArgument,
          "the conditioning construction runs at d = 2");
  ConditionedStateReport cs = conditioned_product_state(rho, povm, partition, h.graph, delta,
                                                        delta, seed, policy);
  rep.lhs = cs.lhs;
  rep.holds = rep.lhs <= rep.bound + 1e-12;
  return rep;
}

WeightedBoundReport bound_check_weighted(const HamiltonianInstance& h, int restarts,
                                         std::uint64_t seed, const NumericPolicy& policy) {
  WeightedBoundReport rep;
  rep.n = h.n;
  rep.d = h.d;
  rep.seed = seed;
  rep.restarts = restarts;
  WalkStats w = walk_stats(h.graph);
  rep.collision = w.collision;
  rep.pi_norm2 = w.pi.squaredNorm();
  rep.e0 = ground_energy_only(h, policy);
  rep.e_product = meanfield_sweep(h, BlockPartition::singletons(h.n), restarts, seed, policy).energy;
  rep.gap = rep.e_product - rep.e0;
  double d4 = std::pow(double(h.d), 4.0);
  rep.bound = 14.0 * std::pow(d4 * std::log(double(h.d)) * rep.collision, 1.0 / 8.0) + rep.pi_norm2;
  rep.holds = rep.gap <= rep.bound + 1e-12;
  return rep;
}

} // namespace qps
