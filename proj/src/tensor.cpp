#include "qps/tensor.hpp"

#include <cmath>

namespace qps {

std::int64_t product_dim(const std::vector<int>& dims) {
  std::int64_t p = 1;
  for (int d : dims) {
    require(d >= 1, ErrorKind::InvalidArgument, "local dimension must be >= 1");
    p *= d;
  }
  return p;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void validate_density(const DensityMatrix& rho, const NumericPolicy& policy) {
  require(rho.mat.rows() == rho.mat.cols(), ErrorKind::ContractViolation,
          "density matrix must be square");
  require(product_dim(rho.dims) == rho.mat.rows(), ErrorKind::ContractViolation,
          "density matrix dims do not match matrix size");
  require(is_hermitian(rho.mat, policy.hermitian_tol * std::max(1.0, rho.mat.norm())),
          ErrorKind::ContractViolation, "density matrix is not Hermitian");
  double tr = rho.mat.trace().real();
  require(std::abs(tr - 1.0) <= policy.trace_one_tol, ErrorKind::ContractViolation,
          "density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.mat, Eigen::EigenvaluesOnly);
  require(es.eigenvalues()(0) >= policy.psd_floor, ErrorKind::ContractViolation,
          "density matrix has a negative eigenvalue");
}

static void check_cap(std::int64_t rows, std::int64_t cols, const NumericPolicy& policy) {
  require(rows * cols <= policy.entry_cap, ErrorKind::InstanceTooLarge,
          "dense target would exceed the entry cap (" + std::to_string(rows) + "x" +
              std::to_string(cols) + ")");
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, const NumericPolicy& policy) {
  check_cap(a.rows() * b.rows(), a.cols() * b.cols(), policy);
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b, const NumericPolicy& policy) {
  check_cap(a.size() * b.size(), 1, policy);
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const int n = rho.sites();
  for (std::size_t i = 0; i < keep.size(); ++i) {
    require(keep[i] >= 0 && keep[i] < n, ErrorKind::InvalidArgument, "keep site out of range");
    if (i > 0)
      require(keep[i] > keep[i - 1], ErrorKind::InvalidArgument, "keep sites must be ascending");
  }
  if (keep.empty()) {
    DensityMatrix out;
    out.dims = {1};
    out.mat = ComplexMatrix::Constant(1, 1, rho.mat.trace());
    return out;
  }

  std::vector<int> traced;
  std::vector<char> kept(n, 0);
  for (int s : keep) kept[s] = 1;
  for (int s = 0; s < n; ++s)
    if (!kept[s]) traced.push_back(s);

  // strides in the full index
  std::vector<std::int64_t> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * rho.dims[s + 1];

  std::int64_t dk = 1, dt = 1;
  for (int s : keep) dk *= rho.dims[s];
  for (int s : traced) dt *= rho.dims[s];

  // enumerate kept and traced multi-indices as flat offsets into the full index
  auto offsets = [&](const std::vector<int>& sites, std::int64_t count) {
    std::vector<std::int64_t> off(count, 0);
    std::int64_t reps = 1;
    for (int s = int(sites.size()) - 1; s >= 0; --s) {
      int d = rho.dims[sites[s]];
      for (std::int64_t idx = 0; idx < count; ++idx) {
        std::int64_t digit = (idx / reps) % d;
        off[idx] += digit * stride[sites[s]];
      }
      reps *= d;
    }
    return off;
  };
  std::vector<std::int64_t> keep_off = offsets(keep, dk);
  std::vector<std::int64_t> trace_off = offsets(traced, dt);

  DensityMatrix out;
  for (int s : keep) out.dims.push_back(rho.dims[s]);
  out.mat = ComplexMatrix::Zero(dk, dk);
  for (std::int64_t r = 0; r < dk; ++r)
    for (std::int64_t c = 0; c < dk; ++c) {
      cxd acc = 0.0;
      for (std::int64_t t = 0; t < dt; ++t)
        acc += rho.mat(keep_off[r] + trace_off[t], keep_off[c] + trace_off[t]);
      out.mat(r, c) = acc;
    }
  return out;
}

EigResult hermitian_eig(const ComplexMatrix& m, const NumericPolicy& policy) {
  require(m.rows() == m.cols(), ErrorKind::InvalidArgument, "hermitian_eig: square input required");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require(is_hermitian(m, policy.hermitian_check_tol * scale), ErrorKind::ContractViolation,
          "hermitian_eig: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((m + m.adjoint()) / 2.0);
  require(es.info() == Eigen::Success, ErrorKind::ContractViolation,
          "hermitian_eig: eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m, const NumericPolicy& policy) {
  require(m.rows() == m.cols(), ErrorKind::InvalidArgument, "square input required");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require(is_hermitian(m, policy.hermitian_check_tol * scale), ErrorKind::ContractViolation,
          "hermitian_eigenvalues: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double trace_norm(const ComplexMatrix& m) {
  require(m.rows() == m.cols(), ErrorKind::InvalidArgument, "trace_norm: square input required");
  double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (is_hermitian(m, 1e-10 * scale)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((m + m.adjoint()) / 2.0,
                                                    Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

DensityMatrix nearest_density_matrix(const ComplexMatrix& m, const std::vector<int>& dims,
                                     const NumericPolicy& policy) {
  require(m.rows() == m.cols(), ErrorKind::InvalidArgument, "square input required");
  require(product_dim(dims) == m.rows(), ErrorKind::InvalidArgument,
          "dims do not match matrix size");
  ComplexMatrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  RealVector w = es.eigenvalues().cwiseMax(0.0);
  double tr = w.sum();
  DensityMatrix out;
  out.dims = dims;
  if (tr <= 0.0) {
    // documented convention: nothing left after clipping -> maximally mixed
    out.mat = ComplexMatrix::Identity(m.rows(), m.cols()) / double(m.rows());
    return out;
  }
  w /= tr;
  out.mat = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  out.mat = (out.mat + out.mat.adjoint()) / 2.0;
  return out;
}

ComplexMatrix embed_operator(const ComplexMatrix& op, const std::vector<int>& sites,
                             const std::vector<int>& dims, const NumericPolicy& policy) {
  const int n = int(dims.size());
  std::int64_t full = product_dim(dims);
  check_cap(full, full, policy);
  std::int64_t dop = 1;
  for (int s : sites) {
    require(s >= 0 && s < n, ErrorKind::InvalidArgument, "embed site out of range");
    dop *= dims[s];
  }
  require(op.rows() == dop && op.cols() == dop, ErrorKind::InvalidArgument,
          "operator size does not match listed sites");

  std::vector<std::int64_t> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  std::vector<int> rest;
  std::vector<char> used(n, 0);
  for (int s : sites) used[s] = 1;
  for (int s = 0; s < n; ++s)
    if (!used[s]) rest.push_back(s);
  std::int64_t drest = full / dop;

  auto offsets = [&](const std::vector<int>& ss, std::int64_t count) {
    std::vector<std::int64_t> off(count, 0);
    std::int64_t reps = 1;
    for (int s = int(ss.size()) - 1; s >= 0; --s) {
      int d = dims[ss[s]];
      for (std::int64_t idx = 0; idx < count; ++idx) off[idx] += ((idx / reps) % d) * stride[ss[s]];
      reps *= d;
    }
    return off;
  };
  std::vector<std::int64_t> op_off = offsets(sites, dop);
  std::vector<std::int64_t> rest_off = offsets(rest, drest);

  ComplexMatrix out = ComplexMatrix::Zero(full, full);
  for (std::int64_t r = 0; r < dop; ++r)
    for (std::int64_t c = 0; c < dop; ++c) {
      cxd v = op(r, c);
      if (v == cxd(0.0)) continue;
      for (std::int64_t t = 0; t < drest; ++t)
        out(op_off[r] + rest_off[t], op_off[c] + rest_off[t]) += v;
    }
  return out;
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix swap_operator(int d) {
  ComplexMatrix f = ComplexMatrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) f(a * d + b, b * d + a) = 1.0;
  return f;
}

ComplexVector random_state(int dim, Rng& rng) {
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cxd(rng.normal(), rng.normal());
  v.normalize();
  return v;
}

ComplexMatrix random_hermitian(int dim, Rng& rng) {
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cxd(rng.normal(), rng.normal());
  return (m + m.adjoint()) / 2.0;
}

DensityMatrix random_density(const std::vector<int>& dims, Rng& rng) {
  int dim = int(product_dim(dims));
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
  ComplexMatrix w = g * g.adjoint();
  w /= w.trace().real();
  return {dims, (w + w.adjoint()) / 2.0};
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

} // namespace qps
