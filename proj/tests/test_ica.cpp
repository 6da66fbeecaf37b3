#include "jdnewton/ica.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

using namespace jdn;

namespace {

Matrix covariance(const Matrix& Z) {
  const Matrix C = Z.colwise() - Z.rowwise().mean();
  return C * C.transpose() / static_cast<double>(Z.cols());
}

// Four-loop sample cumulant straight from the moment definition.
double cumulant_oracle(const Matrix& Z, Index i, Index j, Index k, Index l) {
  const double T = static_cast<double>(Z.cols());
  auto m2 = [&](Index a, Index b) {
    double s = 0;
    for (Index t = 0; t < Z.cols(); ++t) s += Z(a, t) * Z(b, t);
    return s / T;
  };
  double m4 = 0;
  for (Index t = 0; t < Z.cols(); ++t) m4 += Z(i, t) * Z(j, t) * Z(k, t) * Z(l, t);
  m4 /= T;
  return m4 - m2(i, j) * m2(k, l) - m2(i, k) * m2(j, l) - m2(i, l) * m2(j, k);
}

}  // namespace

TEST(Whitening, IdentityCovariance) {
  Rng rng(1);
  const Matrix G = rng.gaussian(2, 5000);
  const Matrix X = Vector((Vector(2) << 2, 3).finished()).asDiagonal() * G;
  const Whitened w = center_whiten(X);
  EXPECT_LE((covariance(w.Z0) - Matrix::Identity(2, 2)).norm(), 1e-8);
  EXPECT_LE(w.Z0.rowwise().mean().norm(), 1e-12);
  EXPECT_LE((w.transform.W * w.transform.W_inv - Matrix::Identity(2, 2)).norm(), 1e-12);

  const Whitened again = center_whiten(w.Z0);
  EXPECT_LE((covariance(again.Z0) - Matrix::Identity(2, 2)).norm(), 1e-8);
  EXPECT_LE(orthogonality_defect(again.transform.W), 1e-8);
}

TEST(Whitening, SingularCovariance) {
  Rng rng(2);
  Matrix X = rng.gaussian(3, 100);
  X.row(1).setConstant(4.0);
  try {
    center_whiten(X);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularCovariance);
  }
}

TEST(Cumulant, RademacherAndGaussian) {
  Rng rng(3);
  const Index T = 20000;
  Matrix R(2, T);
  for (Index t = 0; t < T; ++t) {
    R(0, t) = rng.uniform() < 0.5 ? -1 : 1;
    R(1, t) = rng.uniform() < 0.5 ? -1 : 1;
  }
  EXPECT_NEAR(cumulant(R, 0, 0, 0, 0), -2.0, 5.0 / std::sqrt(static_cast<double>(T)));
  const Matrix G = rng.gaussian(2, T);
  const double tol = 5 * std::sqrt(24.0 / static_cast<double>(T));
  EXPECT_LE(std::abs(cumulant(G, 0, 0, 0, 0)), tol);
  EXPECT_LE(std::abs(cumulant(G, 0, 1, 0, 1)), tol);
  EXPECT_THROW(cumulant(G, 0, 0, 0, 2), Error);
}

TEST(Cumulant, MatchesDefinitionAndIsFullySymmetric) {
  Rng rng(4);
  const Matrix Z = center_whiten(rng.gaussian(3, 200).array().cube().matrix()).Z0;
  std::array<Index, 4> idx = {0, 1, 1, 2};
  const double ref = cumulant_oracle(Z, 0, 1, 1, 2);
  EXPECT_NEAR(cumulant(Z, 0, 1, 1, 2), ref, 1e-12 * std::max(1.0, std::abs(ref)));
  std::sort(idx.begin(), idx.end());
  do {
    EXPECT_NEAR(cumulant(Z, idx[0], idx[1], idx[2], idx[3]), ref, 1e-13 * std::max(1.0, std::abs(ref)));
  } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST(BasisMatrix, DefinitionAndOrthonormality) {
  EXPECT_EQ(basis_matrix(0, 0, 3), elementary(3, 3, 0, 0));
  EXPECT_LE((basis_matrix(0, 1, 3) - (elementary(3, 3, 0, 1) + elementary(3, 3, 1, 0)) / std::sqrt(2.0)).norm(), 1e-16);
  EXPECT_THROW(basis_matrix(1, 0, 3), Error);
  for (Index n = 1; n <= 5; ++n) {
    std::vector<Matrix> all;
    for (Index l = 0; l < n; ++l) {
      for (Index k = 0; k <= l; ++k) all.push_back(basis_matrix(k, l, n));
    }
    for (std::size_t a = 0; a < all.size(); ++a) {
      EXPECT_EQ(all[a], all[a].transpose());
      for (std::size_t b = 0; b < all.size(); ++b) {
        EXPECT_NEAR((all[a].transpose() * all[b]).trace(), a == b ? 1.0 : 0.0, 1e-15);
      }
    }
  }
}

TEST(CumulantMatrix, ShortcutMatchesLiteral) {
  Rng rng(5);
  for (Index n : {2, 3, 4}) {
    Matrix S = rng.gaussian(n, 2000);
    S = S.array().cube().matrix();
    const Matrix Z = center_whiten(rng.gaussian(n, n) * S).Z0;
    const Matrix M = sym(rng.gaussian(n, n));
    const Matrix a = cumulant_matrix(Z, M);
    const Matrix b = cumulant_matrix_literal(Z, M);
    EXPECT_LE((a - b).norm(), 1e-10 * b.norm());
    // Literal entrywise definition for one entry.
    double q01 = 0;
    for (Index k = 0; k < n; ++k) {
      for (Index l = 0; l < n; ++l) q01 += cumulant_oracle(Z, 0, 1, k, l) * M(k, l);
    }
    EXPECT_NEAR(a(0, 1), q01, 1e-10 * b.norm());
  }
}

TEST(CumulantMatrix, IdentityShortcutAndGaussian) {
  Rng rng(6);
  const Index T = 50000;
  const Matrix Z = center_whiten(rng.gaussian(3, T)).Z0;
  const Matrix Q = cumulant_matrix(Z, Matrix::Identity(3, 3));
  Matrix E = Matrix::Zero(3, 3);
  for (Index t = 0; t < T; ++t) E += Z.col(t).squaredNorm() * Z.col(t) * Z.col(t).transpose();
  E /= static_cast<double>(T);
  EXPECT_LE((Q - (E - 5.0 * Matrix::Identity(3, 3))).norm(), 1e-10 * E.norm());
  EXPECT_LE(Q.norm(), 10.0 * 3 / std::sqrt(static_cast<double>(T)));
}

TEST(BuildJdProblem, OrderingAndContrastIdentity) {
  Rng rng(7);
  const Matrix S = synthetic_sources(3, 10000, rng);
  const Matrix X = image_mixing_matrix() * S;
  const Whitened w = center_whiten(X);
  const CumulantSet cs = build_jd_problem(w.Z0);
  ASSERT_EQ(cs.A.size(), 6u);
  const std::vector<std::pair<Index, Index>> order = {{0, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}, {2, 2}};
  EXPECT_EQ(cs.index, order);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_LE((cs.A[i] - cumulant_matrix(w.Z0, basis_matrix(order[i].first, order[i].second, 3))).norm(),
              1e-12 * cs.A[i].norm());
  }
  const Matrix Y = oracle::random_point(3, 3, rng);
  double off = 0;
  for (const auto& M : cs.A.matrices()) off += off_part(Y.transpose() * M * Y).squaredNorm();
  const double total = cs.A.frobenius_sq_sum();
  EXPECT_NEAR(off - total, objective(cs.A, Y), 1e-10 * total);

  // The true unmixing rotation nearly diagonalizes the set.
  const Matrix U = w.transform.W * image_mixing_matrix();  // whitened mixing, close to orthogonal
  const Matrix Ytrue = qf(U);
  double off_true = 0;
  for (const auto& M : cs.A.matrices()) off_true += off_part(Ytrue.transpose() * M * Ytrue).squaredNorm();
  EXPECT_LE(off_true, 0.1 * total);
}

TEST(Separate, SyntheticSourcesRecovered) {
  Rng rng(8);
  const Matrix S = synthetic_sources(3, 100000, rng);
  const Matrix M = rng.gaussian(3, 3);
  const Matrix X = M * S;
  const SeparationResult r = separate(X);
  EXPECT_LE((r.Z - r.B_sep * (X.colwise() - r.whitening.mean)).norm(), 0.0);
  EXPECT_LE(r.grad_newton, r.grad_jacobi);
  EXPECT_FALSE(r.fell_back_to_jacobi);
  EXPECT_TRUE(r.warnings.empty());
  const Alignment al = align(r.Z, S);
  for (Index i = 0; i < 3; ++i) EXPECT_GE(std::abs(al.correlations(i)), 0.99);
}

TEST(Separate, UnmixedSourcesComeBackAsSignedPermutation) {
  Rng rng(9);
  const Matrix S = synthetic_sources(3, 50000, rng);
  const SeparationResult r = separate(S);
  // Each row of the unmixing matrix has one dominant entry.
  for (Index i = 0; i < 3; ++i) {
    Vector row = r.B_sep.row(i).cwiseAbs().transpose();
    std::sort(row.begin(), row.end());
    EXPECT_GE(row(2), 0.95);
    EXPECT_LE(row(1), 0.05);
  }
  const Alignment al = align(r.Z, S);
  for (Index i = 0; i < 3; ++i) EXPECT_GE(std::abs(al.correlations(i)), 0.99);
}

TEST(Separate, GaussianSourcesWarn) {
  Rng rng(10);
  const Matrix S = synthetic_sources(3, 20000, rng, true);
  const SeparationResult r = separate(rng.gaussian(3, 3) * S);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Align, ExamplesAndExhaustiveOracle) {
  Rng rng(11);
  const Matrix S = synthetic_sources(3, 1000, rng);
  Alignment a = align(S, S);
  EXPECT_EQ(a.permutation, (std::vector<Index>{0, 1, 2}));
  EXPECT_LE((a.scales - Vector::Ones(3)).norm(), 1e-12);
  EXPECT_LE((a.correlations - Vector::Ones(3)).norm(), 1e-12);

  const Matrix R = -S.colwise().reverse();
  a = align(R, S);
  EXPECT_EQ(a.permutation, (std::vector<Index>{2, 1, 0}));
  for (Index i = 0; i < 3; ++i) {
    EXPECT_NEAR(a.scales(i), -1.0, 1e-12);
    EXPECT_NEAR(std::abs(a.correlations(i)), 1.0, 1e-12);
  }

  // Noisy recovery against a brute-force search over all 3! assignments.
  Matrix mix = Matrix::Identity(3, 3) + 0.2 * rng.gaussian(3, 3);
  Matrix Zn = mix * S + 0.3 * rng.gaussian(3, 1000);
  Zn.row(0).swap(Zn.row(2));
  a = align(Zn, S);
  std::array<Index, 3> perm = {0, 1, 2};
  double best = -1;
  std::array<Index, 3> best_perm{};
  do {
    double total = 0;
    for (Index i = 0; i < 3; ++i) total += std::abs(correlation(S.row(i), Zn.row(perm[static_cast<std::size_t>(i)])));
    if (total > best) {
      best = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (Index i = 0; i < 3; ++i) {
    EXPECT_EQ(a.permutation[static_cast<std::size_t>(i)], best_perm[static_cast<std::size_t>(i)]);
    EXPECT_NEAR(std::abs(a.correlations(i)), std::abs(correlation(S.row(i), Zn.row(best_perm[static_cast<std::size_t>(i)]))), 1e-12);
  }
  EXPECT_THROW(align(Zn.leftCols(10), S), Error);
}

TEST(Synthetic, UnitVarianceAndKurtosis) {
  Rng rng(12);
  const Matrix S = synthetic_sources(4, 200000, rng);
  const Vector k = excess_kurtosis(S);
  EXPECT_NEAR(k(0), -1.2, 0.05);
  EXPECT_NEAR(k(1), 3.0, 0.3);
  EXPECT_NEAR(k(2), -2.0, 0.01);
  EXPECT_NEAR(k(3), 6.0, 0.8);
  for (Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(S.row(i).mean(), 0.0, 0.02);
    EXPECT_NEAR(S.row(i).squaredNorm() / 200000.0, 1.0, 0.03);
  }
}
