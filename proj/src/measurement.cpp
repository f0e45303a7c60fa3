#include "qps/measurement.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace qps {

void validate_povm(const Povm& p, const NumericPolicy& policy) {
  require(!p.effects.empty(), ErrorKind::ContractViolation, "POVM has no effects");
  ComplexMatrix sum = ComplexMatrix::Zero(p.d, p.d);
  for (const auto& m : p.effects) {
    require(m.rows() == p.d && m.cols() == p.d, ErrorKind::ContractViolation,
            "effect has wrong dimension");
    require(is_hermitian(m, 1e-12), ErrorKind::ContractViolation, "effect is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    require(es.eigenvalues()(0) >= policy.effect_psd_floor, ErrorKind::ContractViolation,
            "effect is not PSD");
    sum += m;
  }
  require((sum - ComplexMatrix::Identity(p.d, p.d)).cwiseAbs().maxCoeff() <=
              policy.povm_completeness_tol,
          ErrorKind::ContractViolation, "effects do not sum to the identity");
}

Povm icosahedral_povm() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double s = std::sqrt(1.0 + phi * phi);
  std::vector<std::array<double, 3>> verts;
  for (double a : {1.0, -1.0})
    for (double b : {phi, -phi}) {
      verts.push_back({0.0, a / s, b / s});
      verts.push_back({a / s, b / s, 0.0});
      verts.push_back({b / s, 0.0, a / s});
    }
  Povm p;
  p.d = 2;
  ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  ComplexMatrix sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  for (const auto& v : verts)
    p.effects.push_back((i2 + v[0] * sx + v[1] * sy + v[2] * sz) / 12.0);
  return p;
}

Povm random_rank1_povm(int d, std::uint64_t seed) {
  require(d >= 2, ErrorKind::InvalidArgument, "d must be >= 2");
  Rng rng(split_seed(seed, 0x90f71e5eULL));
  Povm p;
  p.d = d;
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d * d; ++k) {
    ComplexVector v = random_state(d, rng);
    ComplexMatrix eff = projector(v) / double(d * d);
    p.effects.push_back(eff);
    sum += eff;
  }
  // deficit completion; PSD because each rank-1 effect has norm 1/(d*d)
  p.effects.push_back(ComplexMatrix::Identity(d, d) - sum);
  return p;
}

double design_moment_deviation(const Povm& p, int trials, std::uint64_t seed) {
  // ensemble from the rank-1 decomposition of each effect, weights tr/d
  struct Element {
    double weight;
    ComplexVector state;
  };
  std::vector<Element> ensemble;
  for (const auto& m : p.effects) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    for (int i = 0; i < p.d; ++i) {
      double lam = es.eigenvalues()(i);
      if (lam > 1e-14) ensemble.push_back({lam / double(p.d), es.eigenvectors().col(i)});
    }
  }
  double haar = 1.0;
  for (int t = 1; t <= 4; ++t) haar *= double(t) / double(p.d + t - 1);
  Rng rng(split_seed(seed, 0xde51e4ULL));
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    ComplexVector psi = random_state(p.d, rng);
    double s = 0.0;
    for (const auto& el : ensemble) {
      double ov = std::norm(psi.dot(el.state));
      s += el.weight * ov * ov * ov * ov;
    }
    worst = std::max(worst, std::abs(s - haar));
  }
  return worst;
}

// real coordinates of a Hermitian matrix in an orthonormal (Frobenius) basis
static RealVector hermitian_coords(const ComplexMatrix& m) {
  int d = int(m.rows());
  RealVector h(d * d);
  int idx = 0;
  for (int i = 0; i < d; ++i) h(idx++) = m(i, i).real();
  const double r2 = std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      h(idx++) = r2 * m(i, j).real();
      h(idx++) = r2 * m(i, j).imag();
    }
  return h;
}

static ComplexMatrix hermitian_from_coords(const RealVector& h, int d) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  int idx = 0;
  for (int i = 0; i < d; ++i) m(i, i) = h(idx++);
  const double r2 = std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double re = h(idx++) / r2;
      double im = h(idx++) / r2;
      m(i, j) = cxd(re, im);
      m(j, i) = cxd(re, -im);
    }
  return m;
}

ReconstructionMap build_reconstruction(const Povm& p, const NumericPolicy& policy) {
  validate_povm(p, policy);
  int d = p.d;
  RealMatrix a(p.outcomes(), d * d);
  for (int x = 0; x < p.outcomes(); ++x) a.row(x) = hermitian_coords(p.effects[x]);
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double smin = sv(sv.size() - 1);
  if (smin <= 1e-12 * sv(0)) {
    fail(ErrorKind::NotInformationallyComplete,
         "effect Gram system is rank-deficient (smallest singular value " +
             std::to_string(smin) + ")");
  }
  ReconstructionMap map;
  map.d = d;
  map.condition = sv(0) / smin;
  map.residual = smin;
  RealVector inv = sv.cwiseInverse();
  map.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return map;
}

void apply_channel_tensor(const Povm& p, const ComplexMatrix& op, int site_count,
                          std::vector<double>& out) {
  // out[x1..xm] = tr[(M_x1 (x) ... (x) M_xm) op]; op need not be a state
  int m = site_count;
  int nOut = p.outcomes();
  std::vector<ComplexMatrix> level{op};
  for (int t = 0; t < m; ++t) {
    std::vector<ComplexMatrix> next;
    next.reserve(level.size() * nOut);
    Eigen::Index rest = level[0].rows() / p.d;
    for (const auto& cur : level)
      for (int x = 0; x < nOut; ++x) {
        ComplexMatrix red = ComplexMatrix::Zero(rest, rest);
        for (int a = 0; a < p.d; ++a)
          for (int a2 = 0; a2 < p.d; ++a2) {
            cxd w = p.effects[x](a, a2);
            if (w == cxd(0.0)) continue;
            red += w * cur.block(a2 * rest, a * rest, rest, rest);
          }
        next.push_back(std::move(red));
      }
    level = std::move(next);
  }
  out.resize(level.size());
  for (std::size_t i = 0; i < level.size(); ++i) out[i] = level[i](0, 0).real();
}

JointDistribution measure_channel(const Povm& p, const DensityMatrix& rho,
                                  const std::vector<int>& sites, const NumericPolicy& policy) {
  for (int s : sites)
    require(rho.dims[s] == p.d, ErrorKind::InvalidArgument,
            "POVM dimension does not match site dimension");
  std::int64_t total = 1;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    total *= p.outcomes();
    require(total <= policy.entry_cap, ErrorKind::InstanceTooLarge,
            "outcome table exceeds the entry cap; evaluate marginals instead");
  }
  DensityMatrix marg = partial_trace(rho, sites);
  std::vector<double> out;
  apply_channel_tensor(p, marg.mat, int(sites.size()), out);
  JointDistribution j;
  j.sizes.assign(sites.size(), p.outcomes());
  j.p = std::move(out);
  double sum = 0.0;
  for (double& v : j.p) {
    require(v >= -1e-12, ErrorKind::ContractViolation, "channel produced a negative probability");
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  require(std::abs(sum - 1.0) <= policy.dist_sum_tol, ErrorKind::ContractViolation,
          "channel output does not sum to 1");
  return j;
}

DensityMatrix reconstruct_with(const ReconstructionMap& map, const std::vector<double>& probs,
                               const NumericPolicy& policy) {
  require(int(probs.size()) == map.pinv.cols(), ErrorKind::InvalidArgument,
          "probability vector length does not match outcome count");
  RealVector pv(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) pv(int(i)) = probs[i];
  RealVector h = map.pinv * pv;
  ComplexMatrix fit = hermitian_from_coords(h, map.d);
  return nearest_density_matrix(fit, {map.d}, policy);
}

DensityMatrix reconstruct(const Povm& p, const std::vector<double>& probs,
                          const NumericPolicy& policy) {
  require(int(probs.size()) == p.outcomes(), ErrorKind::InvalidArgument,
          "probability vector length does not match outcome count");
  ReconstructionMap map = build_reconstruction(p, policy);
  return reconstruct_with(map, probs, policy);
}

static double l1_of_channel(const Povm& p, const ComplexMatrix& xi, int k) {
  std::vector<double> out;
  apply_channel_tensor(p, xi, k, out);
  double s = 0.0;
  for (double v : out) s += std::abs(v);
  return s;
}

DistortionReport distortion_estimate(const Povm& p, int k, int trials, std::uint64_t seed,
                                     const NumericPolicy& policy) {
  require(k >= 1, ErrorKind::InvalidArgument, "k must be >= 1");
  std::int64_t dk = 1;
  for (int t = 0; t < k; ++t) {
    dk *= p.d;
    require(dk * dk <= policy.entry_cap, ErrorKind::InstanceTooLarge, "k too large for the cap");
  }
  Rng rng(split_seed(seed, 0xd157ULL + std::uint64_t(k)));
  auto make_traceless = [&](ComplexMatrix m) {
    m -= (m.trace() / double(m.rows())) * ComplexMatrix::Identity(m.rows(), m.cols());
    return m;
  };
  auto ratio = [&](const ComplexMatrix& xi) {
    double denom = l1_of_channel(p, xi, k);
    if (denom <= 1e-300) return 0.0;
    return trace_norm(xi) / denom;
  };

  double best = 0.0;
  ComplexMatrix best_xi;
  for (int t = 0; t < trials; ++t) {
    ComplexMatrix xi = make_traceless(random_hermitian(int(dk), rng));
    double r = ratio(xi);
    if (r > best) {
      best = r;
      best_xi = xi;
    }
  }
  // greedy refinement around the best candidate
  if (best > 0.0) {
    double step = 0.5;
    for (int it = 0; it < 200; ++it) {
      ComplexMatrix cand = make_traceless(best_xi + step * random_hermitian(int(dk), rng) *
                                                        best_xi.cwiseAbs().maxCoeff());
      double r = ratio(cand);
      if (r > best) {
        best = r;
        best_xi = cand;
      } else {
        step *= 0.97;
      }
    }
  }
  DistortionReport rep;
  rep.k = k;
  rep.trials = trials;
  rep.estimate = best;
  rep.bound = std::pow(18.0 * double(p.d), double(k) / 2.0);
  rep.within_bound = best <= rep.bound + 1e-9;
  return rep;
}

std::string povm_to_json(const Povm& p) {
  nlohmann::ordered_json doc;
  doc["d"] = p.d;
  doc["outcomes"] = p.outcomes();
  nlohmann::ordered_json effs = nlohmann::ordered_json::array();
  for (const auto& m : p.effects) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (int r = 0; r < p.d; ++r)
      for (int c = 0; c < p.d; ++c) entries.push_back({m(r, c).real(), m(r, c).imag()});
    effs.push_back({{"weight", m.trace().real() / double(p.d)}, {"matrix", entries}});
  }
  doc["effects"] = effs;
  doc["design_order"] = (p.outcomes() == 12 && p.d == 2) ? 4 : 1;
  return doc.dump(2) + "\n";
}

} // namespace qps
