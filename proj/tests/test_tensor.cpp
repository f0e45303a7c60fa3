#include <doctest.h>

#include "qps/tensor.hpp"

using namespace qps;

namespace {

DensityMatrix ghz3() {
  ComplexVector v = ComplexVector::Zero(8);
  v(0) = 1.0 / std::sqrt(2.0);
  v(7) = 1.0 / std::sqrt(2.0);
  return {{2, 2, 2}, projector(v)};
}

// independent marginal computation by raw index loops, for checking partial_trace
ComplexMatrix brute_marginal(const ComplexMatrix& mat, const std::vector<int>& dims,
                             const std::vector<int>& keep) {
  int n = int(dims.size());
  std::vector<std::int64_t> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];
  std::int64_t dk = 1;
  for (int s : keep) dk *= dims[s];
  std::int64_t full = mat.rows();
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (std::int64_t r = 0; r < full; ++r)
    for (std::int64_t c = 0; c < full; ++c) {
      bool match = true;
      for (int s = 0; s < n; ++s) {
        bool kept = std::find(keep.begin(), keep.end(), s) != keep.end();
        if (!kept && ((r / stride[s]) % dims[s]) != ((c / stride[s]) % dims[s])) match = false;
      }
      if (!match) continue;
      std::int64_t rr = 0, cc = 0;
      for (int s : keep) {
        rr = rr * dims[s] + (r / stride[s]) % dims[s];
        cc = cc * dims[s] + (c / stride[s]) % dims[s];
      }
      out(rr, cc) += mat(r, c);
    }
  return out;
}

} // namespace

TEST_CASE("kron identity and diagonal cases") {
  ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK((kron(i2, i2) - ComplexMatrix::Identity(4, 4)).norm() == doctest::Approx(0.0));

  ComplexMatrix zz = kron(pauli_z(), pauli_z());
  CHECK(zz(0, 0).real() == doctest::Approx(1.0));
  CHECK(zz(1, 1).real() == doctest::Approx(-1.0));
  CHECK(zz(2, 2).real() == doctest::Approx(-1.0));
  CHECK(zz(3, 3).real() == doctest::Approx(1.0));

  // X (x) X flips |00> to |11>
  ComplexVector e00 = ComplexVector::Zero(4);
  e00(0) = 1.0;
  ComplexVector flipped = kron(pauli_x(), pauli_x()) * e00;
  CHECK(std::abs(flipped(3) - cxd(1.0, 0.0)) < 1e-15);
}

TEST_CASE("kron is associative and bilinear on random triples") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    ComplexMatrix a = random_hermitian(2, rng);
    ComplexMatrix b = random_hermitian(3, rng);
    ComplexMatrix c = random_hermitian(2, rng);
    CHECK((kron(kron(a, b), c) - kron(a, kron(b, c))).cwiseAbs().maxCoeff() < 1e-12);
    ComplexMatrix a2 = random_hermitian(2, rng);
    CHECK((kron(a + a2, b) - kron(a, b) - kron(a2, b)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("kron refuses to exceed the entry cap") {
  NumericPolicy tight;
  tight.entry_cap = 16;
  ComplexMatrix i4 = ComplexMatrix::Identity(4, 4);
  CHECK_THROWS_AS((void)kron(i4, i4, tight), Error);
}

TEST_CASE("partial trace basics") {
  Rng rng(11);
  // product state marginal
  DensityMatrix a = random_density({2}, rng);
  DensityMatrix b = random_density({3}, rng);
  DensityMatrix ab{{2, 3}, kron(a.mat, b.mat)};
  CHECK((partial_trace(ab, {0}).mat - a.mat).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_trace(ab, {1}).mat - b.mat).cwiseAbs().maxCoeff() < 1e-12);

  // Bell pair marginal is maximally mixed
  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  DensityMatrix rho{{2, 2}, projector(bell)};
  CHECK((partial_trace(rho, {0}).mat - ComplexMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <
        1e-12);

  // empty keep gives [tr rho] = [1]
  DensityMatrix scalar = partial_trace(rho, {});
  CHECK(scalar.mat.rows() == 1);
  CHECK(scalar.mat(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("GHZ two-site marginal matches the brute-force oracle") {
  DensityMatrix rho = ghz3();
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = 0.5;
  expected(3, 3) = 0.5;
  DensityMatrix marg = partial_trace(rho, {0, 1});
  CHECK((marg.mat - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((marg.mat - brute_marginal(rho.mat, {2, 2, 2}, {0, 1})).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace preserves trace and is identity on all sites") {
  Rng rng(3);
  DensityMatrix rho = random_density({2, 2, 2}, rng);
  CHECK((partial_trace(rho, {0, 1, 2}).mat - rho.mat).cwiseAbs().maxCoeff() < 1e-14);
  for (auto keep : std::vector<std::vector<int>>{{0}, {1}, {2}, {0, 2}}) {
    CHECK(partial_trace(rho, keep).mat.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hermitian_eig: known spectra and reconstruction") {
  EigResult z = hermitian_eig(pauli_z());
  CHECK(z.values(0) == doctest::Approx(-1.0));
  CHECK(z.values(1) == doctest::Approx(1.0));

  EigResult f = hermitian_eig(swap_operator(2));
  CHECK(f.values(0) == doctest::Approx(-1.0));
  CHECK(f.values(1) == doctest::Approx(1.0));
  CHECK(f.values(2) == doctest::Approx(1.0));
  CHECK(f.values(3) == doctest::Approx(1.0));

  Rng rng(5);
  ComplexMatrix m = random_hermitian(8, rng);
  EigResult e = hermitian_eig(m);
  ComplexMatrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
  CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-9 * m.norm());
  // residual and orthonormality contracts
  for (int i = 0; i < 8; ++i)
    CHECK((m * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm() < 1e-9 * m.norm());
  CHECK((e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() <
        1e-9);
  // moments: sum of eigenvalues = trace, sum of squares = tr(M^2)
  CHECK(e.values.sum() == doctest::Approx(m.trace().real()).epsilon(1e-9));
  CHECK(e.values.squaredNorm() == doctest::Approx((m * m).trace().real()).epsilon(1e-9));
}

TEST_CASE("hermitian_eig rejects a non-Hermitian matrix") {
  ComplexMatrix bad(2, 2);
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS((void)hermitian_eig(bad), Error);
}

TEST_CASE("trace norm values") {
  ComplexMatrix d(2, 2);
  d << 1, 0, 0, -1;
  CHECK(trace_norm(d) == doctest::Approx(2.0));
  CHECK(trace_norm(d - d) == doctest::Approx(0.0));

  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  ComplexVector zero(2);
  zero << 1.0, 0.0;
  CHECK(trace_norm(projector(zero) - projector(plus)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("trace norm triangle inequality on random Hermitian triples") {
  Rng rng(17);
  for (int t = 0; t < 25; ++t) {
    ComplexMatrix a = random_hermitian(4, rng);
    ComplexMatrix b = random_hermitian(4, rng);
    CHECK(trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10);
  }
}

TEST_CASE("nearest density matrix") {
  Rng rng(23);
  // fixed point on valid input
  DensityMatrix rho = random_density({2, 2}, rng);
  DensityMatrix back = nearest_density_matrix(rho.mat, {2, 2});
  CHECK((back.mat - rho.mat).cwiseAbs().maxCoeff() < 1e-12);

  // forced clip
  ComplexMatrix bad(2, 2);
  bad << 1.5, 0.0, 0.0, -0.5;
  DensityMatrix fixed = nearest_density_matrix(bad, {2});
  CHECK(fixed.mat(0, 0).real() == doctest::Approx(1.0));
  CHECK(fixed.mat(1, 1).real() == doctest::Approx(0.0));

  // zero matrix maps to maximally mixed
  DensityMatrix mixed = nearest_density_matrix(ComplexMatrix::Zero(4, 4), {2, 2});
  CHECK((mixed.mat - ComplexMatrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-14);

  // output always satisfies the density-matrix contract
  for (int t = 0; t < 10; ++t) {
    ComplexMatrix noise = random_hermitian(4, rng);
    DensityMatrix out = nearest_density_matrix(rho.mat + 0.3 * noise, {2, 2});
    CHECK_NOTHROW(validate_density(out));
  }

  // continuity: projection moves by O(eps) for a small Hermitian perturbation
  ComplexMatrix noise = random_hermitian(4, rng);
  noise /= trace_norm(noise);
  double prev = 1.0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    DensityMatrix out = nearest_density_matrix(rho.mat + eps * noise, {2, 2});
    double dist = trace_norm(out.mat - rho.mat);
    CHECK(dist <= 10.0 * eps);
    CHECK(dist <= prev);
    prev = dist;
  }
}

TEST_CASE("validate_density rejects broken inputs") {
  ComplexMatrix notpsd(2, 2);
  notpsd << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(validate_density(DensityMatrix{{2}, notpsd}), Error);
  ComplexMatrix wrongtrace = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(validate_density(DensityMatrix{{2}, wrongtrace}), Error);
}

TEST_CASE("embed_operator places a term on the right sites") {
  std::vector<int> dims{2, 2, 2};
  ComplexMatrix zz = kron(pauli_z(), pauli_z());
  ComplexMatrix full = embed_operator(zz, {0, 2}, dims);
  ComplexMatrix expected = kron(kron(pauli_z(), ComplexMatrix::Identity(2, 2)), pauli_z());
  CHECK((full - expected).cwiseAbs().maxCoeff() < 1e-14);
}
