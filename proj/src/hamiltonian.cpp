#include "qps/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qps {

using ordered_json = nlohmann::ordered_json;

std::vector<InteractionGraph::Edge> InteractionGraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (weights(i, j) > 0.0 || weights(j, i) > 0.0)
        out.push_back({i, j, weights(i, j) + weights(j, i)});
  return out;
}

bool InteractionGraph::regular(int* degree_out) const {
  auto es = edges();
  if (es.empty()) return false;
  double w0 = es[0].w;
  std::vector<int> deg(n, 0);
  for (const auto& e : es) {
    if (std::abs(e.w - w0) > 1e-12) return false;
    deg[e.i]++;
    deg[e.j]++;
  }
  for (int i = 0; i < n; ++i)
    if (deg[i] != deg[0]) return false;
  if (degree_out) *degree_out = deg[0];
  return true;
}

void validate_graph(const InteractionGraph& g, const NumericPolicy& policy) {
  require(g.weights.rows() == g.n && g.weights.cols() == g.n, ErrorKind::ContractViolation,
          "graph weight matrix has wrong shape");
  for (int i = 0; i < g.n; ++i) {
    require(g.weights(i, i) == 0.0, ErrorKind::ContractViolation, "graph has a self-loop weight");
    for (int j = 0; j < g.n; ++j) {
      require(g.weights(i, j) >= 0.0, ErrorKind::ContractViolation, "negative edge weight");
      require(std::abs(g.weights(i, j) - g.weights(j, i)) <= policy.graph_norm_tol,
              ErrorKind::ContractViolation, "graph weights are not symmetric");
    }
  }
  require(std::abs(g.weights.sum() - 1.0) <= policy.graph_norm_tol, ErrorKind::ContractViolation,
          "graph weights do not sum to 1");
}

void validate_instance(const HamiltonianInstance& h, const NumericPolicy& policy) {
  validate_graph(h.graph, policy);
  require(h.graph.n == h.n, ErrorKind::ContractViolation, "graph size does not match n");
  for (const auto& e : h.graph.edges()) {
    auto it = h.terms.find({e.i, e.j});
    require(it != h.terms.end(), ErrorKind::ContractViolation,
            "edge with positive weight has no interaction term");
    const ComplexMatrix& t = it->second;
    require(t.rows() == h.d * h.d && t.cols() == h.d * h.d, ErrorKind::ContractViolation,
            "term has wrong dimension");
    require(is_hermitian(t, 1e-10), ErrorKind::ContractViolation, "term is not Hermitian");
    double norm = hermitian_eigenvalues(t, policy).cwiseAbs().maxCoeff();
    require(norm <= 1.0 + policy.term_norm_tol, ErrorKind::ContractViolation,
            "term operator norm exceeds 1");
  }
}

int BlockPartition::site_count() const {
  int n = 0;
  for (const auto& b : blocks) n += int(b.size());
  return n;
}

int BlockPartition::block_of(int site) const {
  for (int b = 0; b < int(blocks.size()); ++b)
    for (int s : blocks[b])
      if (s == site) return b;
  fail(ErrorKind::InvalidArgument, "site not covered by partition");
}

bool BlockPartition::equal_sized(int* m_out) const {
  if (blocks.empty()) return false;
  std::size_t m = blocks[0].size();
  for (const auto& b : blocks)
    if (b.size() != m) return false;
  if (m_out) *m_out = int(m);
  return true;
}

BlockPartition BlockPartition::contiguous(int n, int m) {
  require(m >= 1 && n % m == 0, ErrorKind::InvalidArgument,
          "block size must divide the site count");
  BlockPartition p;
  for (int b = 0; b < n / m; ++b) {
    std::vector<int> blk;
    for (int s = 0; s < m; ++s) blk.push_back(b * m + s);
    p.blocks.push_back(blk);
  }
  return p;
}

BlockPartition BlockPartition::singletons(int n) { return contiguous(n, 1); }

void validate_partition(const BlockPartition& p, int n) {
  std::vector<char> seen(n, 0);
  for (const auto& b : p.blocks) {
    require(!b.empty(), ErrorKind::InvalidArgument, "empty partition block");
    for (int s : b) {
      require(s >= 0 && s < n, ErrorKind::InvalidArgument, "partition site out of range");
      require(!seen[s], ErrorKind::InvalidArgument, "partition blocks overlap");
      seen[s] = 1;
    }
  }
  for (int s = 0; s < n; ++s)
    require(seen[s], ErrorKind::InvalidArgument, "partition does not cover all sites");
}

// --- instance generation -----------------------------------------------------

static RealMatrix uniform_edge_weights(int n, const std::vector<std::pair<int, int>>& edges) {
  RealMatrix g = RealMatrix::Zero(n, n);
  require(!edges.empty(), ErrorKind::InvalidSpec, "graph family produced no edges");
  double w = 1.0 / (2.0 * double(edges.size()));
  for (auto [i, j] : edges) {
    g(i, j) += w;
    g(j, i) += w;
  }
  return g;
}

static std::vector<std::pair<int, int>> ring_edges(int n) {
  require(n >= 3, ErrorKind::InvalidSpec, "ring needs n >= 3");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.push_back({std::min(i, (i + 1) % n), std::max(i, (i + 1) % n)});
  std::sort(e.begin(), e.end());
  return e;
}

static std::vector<std::pair<int, int>> grid_edges(int n, double keep, Rng& rng) {
  // near-square planar grid; optional seeded edge deletion keeps planarity
  int rows = int(std::floor(std::sqrt(double(n))));
  while (rows > 1 && n % rows != 0) --rows;
  int cols = n / rows;
  std::vector<std::pair<int, int>> e;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < rows) e.push_back({id(r, c), id(r + 1, c)});
    }
  if (keep < 1.0) {
    std::vector<std::pair<int, int>> kept;
    for (auto& ed : e)
      if (rng.uniform() < keep) kept.push_back(ed);
    if (!kept.empty()) e = kept;
  }
  return e;
}

static std::vector<std::pair<int, int>> complete_edges(int n) {
  require(n >= 2, ErrorKind::InvalidSpec, "complete graph needs n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return e;
}

static std::vector<std::pair<int, int>> star_edges(int n) {
  require(n >= 2, ErrorKind::InvalidSpec, "star graph needs n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int j = 1; j < n; ++j) e.push_back({0, j});
  return e;
}

// pairing model with rejection of self-loops and multi-edges
static std::vector<std::pair<int, int>> random_regular_edges(int n, int deg, Rng& rng) {
  require(deg >= 1 && deg < n, ErrorKind::InvalidSpec, "random-regular needs 1 <= D < n");
  require((std::int64_t(n) * deg) % 2 == 0, ErrorKind::InvalidSpec,
          "random-regular needs n*D even");
  for (int attempt = 0; attempt < 4000; ++attempt) {
    std::vector<int> stubs;
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < deg; ++k) stubs.push_back(v);
    rng.shuffle(stubs);
    std::set<std::pair<int, int>> used;
    bool ok = true;
    for (std::size_t s = 0; s + 1 < stubs.size(); s += 2) {
      int a = stubs[s], b = stubs[s + 1];
      if (a == b) {
        ok = false;
        break;
      }
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (!used.insert(key).second) {
        ok = false;
        break;
      }
    }
    if (ok) return {used.begin(), used.end()};
  }
  fail(ErrorKind::InvalidSpec, "pairing model failed to produce a simple regular graph");
}

static RealMatrix random_weighted(int n, Rng& rng) {
  require(n >= 2, ErrorKind::InvalidSpec, "weighted graph needs n >= 2");
  RealMatrix g = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < 0.6) {
        double w = rng.uniform();
        g(i, j) = w;
        g(j, i) = w;
      }
    }
  // force connectivity of the support along a path
  for (int i = 0; i + 1 < n; ++i)
    if (g(i, i + 1) == 0.0) {
      double w = 0.25 + 0.5 * rng.uniform();
      g(i, i + 1) = w;
      g(i + 1, i) = w;
    }
  g /= g.sum();
  return g;
}

static ComplexMatrix make_term(TermEnsemble ens, int d, Rng& rng) {
  ComplexMatrix t;
  switch (ens) {
    case TermEnsemble::RandomHermitian:
      t = random_hermitian(d * d, rng);
      break;
    case TermEnsemble::HeisenbergSwap:
      t = swap_operator(d);
      break;
    case TermEnsemble::IsingField: {
      require(d == 2, ErrorKind::InvalidSpec, "ising-field is a qubit ensemble");
      ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
      t = kron(pauli_z(), pauli_z()) +
          0.5 * (kron(pauli_x(), i2) + kron(i2, pauli_x()));
      break;
    }
    case TermEnsemble::ClassicalDiagonal: {
      t = ComplexMatrix::Zero(d * d, d * d);
      for (int a = 0; a < d * d; ++a) t(a, a) = rng.uniform(-1.0, 1.0);
      break;
    }
  }
  double norm = hermitian_eigenvalues(t).cwiseAbs().maxCoeff();
  if (norm > 1.0) t /= norm;
  return t;
}

HamiltonianInstance build_instance(const GeneratorSpec& spec, std::uint64_t seed) {
  require(spec.n >= 2, ErrorKind::InvalidSpec, "need at least two sites");
  require(spec.d >= 2, ErrorKind::InvalidSpec, "local dimension must be >= 2");
  HamiltonianInstance h;
  h.n = spec.n;
  h.d = spec.d;
  h.family = family_name(spec.family);
  h.seed = seed;
  Rng graph_rng(split_seed(seed, 0xa11ce));

  h.graph.n = spec.n;
  TermEnsemble ens = spec.ensemble;
  switch (spec.family) {
    case GraphFamily::Ring:
      h.graph.weights = uniform_edge_weights(spec.n, ring_edges(spec.n));
      break;
    case GraphFamily::Grid:
      h.graph.weights = uniform_edge_weights(spec.n, grid_edges(spec.n, spec.edge_keep, graph_rng));
      break;
    case GraphFamily::Complete:
      h.graph.weights = uniform_edge_weights(spec.n, complete_edges(spec.n));
      break;
    case GraphFamily::Star:
      h.graph.weights = uniform_edge_weights(spec.n, star_edges(spec.n));
      break;
    case GraphFamily::RandomRegular:
      h.graph.weights =
          uniform_edge_weights(spec.n, random_regular_edges(spec.n, spec.degree, graph_rng));
      break;
    case GraphFamily::Weighted:
      h.graph.weights = random_weighted(spec.n, graph_rng);
      break;
    case GraphFamily::SwapAntisymmetric:
      h.graph.weights = uniform_edge_weights(spec.n, complete_edges(spec.n));
      ens = TermEnsemble::HeisenbergSwap;
      break;
  }
  h.ensemble = ensemble_name(ens);

  // per-edge seeds keyed by the edge's rank, independent of iteration order
  auto es = h.graph.edges();
  for (std::size_t e = 0; e < es.size(); ++e) {
    Rng term_rng(split_seed(seed, 0xbeef0000ULL + e));
    h.terms[{es[e].i, es[e].j}] = make_term(ens, spec.d, term_rng);
  }
  return h;
}

ComplexMatrix assemble_full(const HamiltonianInstance& h, const NumericPolicy& policy) {
  std::vector<int> dims(h.n, h.d);
  std::int64_t full = product_dim(dims);
  require(full * full <= policy.entry_cap, ErrorKind::InstanceTooLarge,
          "full Hamiltonian would exceed the entry cap");
  ComplexMatrix out = ComplexMatrix::Zero(full, full);
  for (const auto& e : h.graph.edges()) {
    const ComplexMatrix& t = h.terms.at({e.i, e.j});
    out += e.w * embed_operator(t, {e.i, e.j}, dims, policy);
  }
  return out;
}

GroundState ground_energy(const HamiltonianInstance& h, const NumericPolicy& policy) {
  ComplexMatrix full = assemble_full(h, policy);
  EigResult eig = hermitian_eig(full, policy);
  return {eig.values(0), eig.vectors.col(0)};
}

double ground_energy_only(const HamiltonianInstance& h, const NumericPolicy& policy) {
  ComplexMatrix full = assemble_full(h, policy);
  return hermitian_eigenvalues(full, policy)(0);
}

double expansion(const InteractionGraph& g, const std::vector<int>& subset) {
  require(!subset.empty(), ErrorKind::InvalidArgument, "expansion of an empty set");
  std::vector<char> in(g.n, 0);
  for (int s : subset) {
    require(s >= 0 && s < g.n, ErrorKind::InvalidArgument, "subset site out of range");
    in[s] = 1;
  }
  // ordered pairs (u,v): weight G_uv; condition on u in S
  double inside = 0.0, crossing = 0.0;
  for (int u = 0; u < g.n; ++u) {
    if (!in[u]) continue;
    for (int v = 0; v < g.n; ++v) {
      inside += g.weights(u, v);
      if (!in[v]) crossing += g.weights(u, v);
    }
  }
  require(inside > 0.0, ErrorKind::InvalidArgument, "subset touches no edges");
  return crossing / inside;
}

double graph_expansion(const InteractionGraph& g) {
  require(g.n <= 20, ErrorKind::InstanceTooLarge,
          "exhaustive expansion is limited to n <= 20; use per-partition averages instead");
  double best = 1.0;
  for (std::uint32_t mask = 1; mask < (1u << g.n); ++mask) {
    int size = __builtin_popcount(mask);
    if (size > g.n / 2) continue;
    std::vector<int> subset;
    for (int s = 0; s < g.n; ++s)
      if (mask & (1u << s)) subset.push_back(s);
    // subsets with no incident edges count as non-expanding
    double inside = 0.0;
    for (int s : subset) inside += g.weights.row(s).sum();
    if (inside == 0.0) return 0.0;
    best = std::min(best, expansion(g, subset));
  }
  return best;
}

WalkStats walk_stats(const InteractionGraph& g) {
  WalkStats w;
  w.pi = g.weights.colwise().sum();
  w.walk = RealMatrix::Zero(g.n, g.n);
  for (int j = 0; j < g.n; ++j) {
    if (w.pi(j) <= 0.0) {
      w.walk(j, j) = 1.0; // isolated vertex: point mass on itself
      w.isolated_vertices = true;
    } else {
      for (int i = 0; i < g.n; ++i) w.walk(i, j) = g.weights(i, j) / w.pi(j);
    }
  }
  w.collision = (w.walk * w.walk).trace() * w.pi.squaredNorm();
  return w;
}

int threshold_rank(const InteractionGraph& g, double lambda) {
  require(lambda > 0.0 && lambda < 1.0, ErrorKind::InvalidArgument, "lambda must be in (0,1)");
  WalkStats w = walk_stats(g);
  // A = G D^-1 is similar to the symmetric D^-1/2 G D^-1/2 on the support of pi
  RealVector scale = w.pi.cwiseMax(1e-300).cwiseSqrt();
  RealMatrix sym = g.weights;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      if (w.pi(i) <= 0.0 || w.pi(j) <= 0.0)
        sym(i, j) = (i == j && w.pi(i) <= 0.0) ? 1.0 : 0.0;
      else
        sym(i, j) = g.weights(i, j) / (scale(i) * scale(j));
    }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym, Eigen::EigenvaluesOnly);
  int count = 0;
  for (int i = 0; i < g.n; ++i)
    if (es.eigenvalues()(i) > lambda) ++count;
  return count;
}

// --- file format --------------------------------------------------------------

GraphFamily parse_family(const std::string& s) {
  if (s == "ring") return GraphFamily::Ring;
  if (s == "grid") return GraphFamily::Grid;
  if (s == "complete") return GraphFamily::Complete;
  if (s == "random-regular") return GraphFamily::RandomRegular;
  if (s == "weighted") return GraphFamily::Weighted;
  if (s == "swap-antisymmetric") return GraphFamily::SwapAntisymmetric;
  if (s == "star") return GraphFamily::Star;
  fail(ErrorKind::InvalidSpec, "unknown graph family '" + s + "'");
}

TermEnsemble parse_ensemble(const std::string& s) {
  if (s == "random-hermitian") return TermEnsemble::RandomHermitian;
  if (s == "heisenberg-swap") return TermEnsemble::HeisenbergSwap;
  if (s == "ising-field") return TermEnsemble::IsingField;
  if (s == "classical-diagonal") return TermEnsemble::ClassicalDiagonal;
  fail(ErrorKind::InvalidSpec, "unknown term ensemble '" + s + "'");
}

std::string family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::Ring: return "ring";
    case GraphFamily::Grid: return "grid";
    case GraphFamily::Complete: return "complete";
    case GraphFamily::RandomRegular: return "random-regular";
    case GraphFamily::Weighted: return "weighted";
    case GraphFamily::SwapAntisymmetric: return "swap-antisymmetric";
    case GraphFamily::Star: return "star";
  }
  return "?";
}

std::string ensemble_name(TermEnsemble e) {
  switch (e) {
    case TermEnsemble::RandomHermitian: return "random-hermitian";
    case TermEnsemble::HeisenbergSwap: return "heisenberg-swap";
    case TermEnsemble::IsingField: return "ising-field";
    case TermEnsemble::ClassicalDiagonal: return "classical-diagonal";
  }
  return "?";
}

std::string save_instance(const HamiltonianInstance& h) {
  ordered_json doc;
  doc["n"] = h.n;
  doc["d"] = h.d;
  ordered_json edges = ordered_json::array();
  for (const auto& e : h.graph.edges()) edges.push_back({e.i, e.j, e.w});
  doc["edges"] = edges;
  ordered_json terms = ordered_json::object();
  for (const auto& [key, t] : h.terms) {
    ordered_json entries = ordered_json::array();
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c)
        entries.push_back({t(r, c).real(), t(r, c).imag()});
    terms[std::to_string(key.first) + "," + std::to_string(key.second)] = entries;
  }
  doc["terms"] = terms;
  doc["meta"] = {{"family", h.family}, {"ensemble", h.ensemble}, {"seed", h.seed}};
  return doc.dump(2) + "\n";
}

HamiltonianInstance load_instance(const std::string& json_text) {
  ordered_json doc = ordered_json::parse(json_text);
  HamiltonianInstance h;
  h.n = doc.at("n").get<int>();
  h.d = doc.at("d").get<int>();
  h.graph.n = h.n;
  h.graph.weights = RealMatrix::Zero(h.n, h.n);
  for (const auto& e : doc.at("edges")) {
    int i = e.at(0).get<int>();
    int j = e.at(1).get<int>();
    double w = e.at(2).get<double>();
    h.graph.weights(i, j) += w / 2.0;
    h.graph.weights(j, i) += w / 2.0;
  }
  for (const auto& [key, entries] : doc.at("terms").items()) {
    auto comma = key.find(',');
    require(comma != std::string::npos, ErrorKind::InvalidSpec, "bad term key '" + key + "'");
    int i = std::stoi(key.substr(0, comma));
    int j = std::stoi(key.substr(comma + 1));
    int dd = h.d * h.d;
    require(int(entries.size()) == dd * dd, ErrorKind::InvalidSpec, "term entry count mismatch");
    ComplexMatrix t(dd, dd);
    int idx = 0;
    for (Eigen::Index r = 0; r < dd; ++r)
      for (Eigen::Index c = 0; c < dd; ++c) {
        t(r, c) = cxd(entries[idx][0].get<double>(), entries[idx][1].get<double>());
        ++idx;
      }
    h.terms[{i, j}] = t;
  }
  if (doc.contains("meta")) {
    h.family = doc["meta"].value("family", "");
    h.ensemble = doc["meta"].value("ensemble", "");
    h.seed = doc["meta"].value("seed", std::uint64_t(0));
  }
  return h;
}

std::string instance_hash(const HamiltonianInstance& h) {
  std::string text = save_instance(h);
  // FNV-1a 64
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return os.str();
}

} // namespace qps
