#pragma once

#include <cstdint>
#include <vector>

#include "qps/errors.hpp"
#include "qps/policy.hpp"

namespace qps {

// Dense joint distribution over outcome tuples.  Site 0 is the most
// significant digit of the flat index, matching the tensor-factor convention.
struct JointDistribution {
  std::vector<int> sizes;
  std::vector<double> p;

  int sites() const { return int(sizes.size()); }
  std::int64_t entries() const { return std::int64_t(p.size()); }

  std::int64_t stride(int site) const {
    std::int64_t s = 1;
    for (int k = site + 1; k < sites(); ++k) s *= sizes[k];
    return s;
  }

  double& at(const std::vector<int>& idx) { return p[flat(idx)]; }
  double at(const std::vector<int>& idx) const { return p[flat(idx)]; }

  std::int64_t flat(const std::vector<int>& idx) const {
    std::int64_t f = 0;
    for (int s = 0; s < sites(); ++s) f = f * sizes[s] + idx[s];
    return f;
  }

  static JointDistribution zeros(const std::vector<int>& sizes_) {
    JointDistribution j;
    j.sizes = sizes_;
    std::int64_t total = 1;
    for (int s : sizes_) total *= s;
    j.p.assign(std::size_t(total), 0.0);
    return j;
  }

  double total() const {
    double t = 0.0;
    for (double v : p) t += v;
    return t;
  }
};

void validate_distribution(const JointDistribution& j,
                           const NumericPolicy& policy = default_policy());

// Marginal onto `keep` (ascending site indices).
JointDistribution marginalize(const JointDistribution& j, const std::vector<int>& keep);

} // namespace qps
