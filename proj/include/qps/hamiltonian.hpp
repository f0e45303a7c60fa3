#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qps/tensor.hpp"

namespace qps {

// Symmetric nonnegative weight matrix with zero diagonal, normalized so the
// sum over ordered pairs is 1.  An unweighted D-regular graph is stored as
// the uniform distribution over its directed edges.
struct InteractionGraph {
  int n = 0;
  RealMatrix weights; // G, n x n

  struct Edge {
    int i, j;     // i < j
    double w;     // undirected weight G_ij + G_ji; edge weights sum to 1
  };
  std::vector<Edge> edges() const;
  bool regular(int* degree_out = nullptr) const; // unweighted regular?
};

void validate_graph(const InteractionGraph& g, const NumericPolicy& policy = default_policy());

struct HamiltonianInstance {
  int n = 0;
  int d = 2;
  InteractionGraph graph;
  // term on unordered edge (i,j), i<j, acting on C^d (x) C^d, operator norm <= 1
  std::map<std::pair<int, int>, ComplexMatrix> terms;
  std::string family;
  std::string ensemble;
  std::uint64_t seed = 0;
};

void validate_instance(const HamiltonianInstance& h,
                       const NumericPolicy& policy = default_policy());

struct BlockPartition {
  std::vector<std::vector<int>> blocks;

  int site_count() const;
  int block_of(int site) const;
  bool equal_sized(int* m_out = nullptr) const;
  // blocks {0..m-1}, {m..2m-1}, ...
  static BlockPartition contiguous(int n, int m);
  static BlockPartition singletons(int n);
};

void validate_partition(const BlockPartition& p, int n);

struct WalkStats {
  RealVector pi;   // stationary distribution, pi_j = sum_i G_ij
  RealMatrix walk; // column-stochastic A, A_ij = G_ij / pi_j
  double collision = 0.0; // tr[A^2] * |pi|_2^2
  bool isolated_vertices = false;
};

enum class GraphFamily { Ring, Grid, Complete, RandomRegular, Weighted, SwapAntisymmetric, Star };
enum class TermEnsemble { RandomHermitian, HeisenbergSwap, IsingField, ClassicalDiagonal };

struct GeneratorSpec {
  GraphFamily family = GraphFamily::Ring;
  TermEnsemble ensemble = TermEnsemble::RandomHermitian;
  int n = 4;
  int d = 2;
  int degree = 3;            // random-regular only
  double edge_keep = 1.0;    // grid only: fraction of grid edges kept (seeded deletion)
};

GraphFamily parse_family(const std::string& s);
TermEnsemble parse_ensemble(const std::string& s);
std::string family_name(GraphFamily f);
std::string ensemble_name(TermEnsemble e);

// Deterministic function of (spec, seed).
HamiltonianInstance build_instance(const GeneratorSpec& spec, std::uint64_t seed);

// H = sum over ordered pairs of G_ij * H_ij, embedded on sites i,j.
ComplexMatrix assemble_full(const HamiltonianInstance& h,
                            const NumericPolicy& policy = default_policy());

struct GroundState {
  double e0 = 0.0;
  ComplexVector psi0;
};

GroundState ground_energy(const HamiltonianInstance& h,
                          const NumericPolicy& policy = default_policy());
double ground_energy_only(const HamiltonianInstance& h,
                          const NumericPolicy& policy = default_policy());

// Pr[(u,v) in E : v not in S | u in S] over ordered edge endpoints.
double expansion(const InteractionGraph& g, const std::vector<int>& subset);

// min over nonempty S with |S| <= n/2; exhaustive, n <= 20.
double graph_expansion(const InteractionGraph& g);

// number of walk-matrix eigenvalues strictly greater than lambda
int threshold_rank(const InteractionGraph& g, double lambda);

WalkStats walk_stats(const InteractionGraph& g);

// Instance file format; load/save round-trips byte-exactly on saved files.
std::string save_instance(const HamiltonianInstance& h);
HamiltonianInstance load_instance(const std::string& json_text);
std::string instance_hash(const HamiltonianInstance& h);

} // namespace qps
