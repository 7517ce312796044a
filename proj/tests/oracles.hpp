#pragma once

// Independent reference computations for the tests. Everything here works on
// dense matrices and shares no code path with the library's circulant and
// spectral shortcuts.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "qwalk/lattice.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

// Normalized adjacency of a cycle: 1/2 on both neighbours (1 when n = 2).
inline Matrix cycle_walk_matrix(int n) {
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, (i + 1) % n) += 0.5;
    a(i, (i + n - 1) % n) += 0.5;
  }
  return a;
}

// (1/d) sum_k I x .. x A_k x .. x I, ordered like qwalk::LatticeSpec (last coordinate fastest).
inline Matrix lattice_walk_matrix(const std::vector<int>& dims) {
  const qwalk::LatticeSpec lattice(dims);
  const auto N = static_cast<int>(lattice.vertex_count());
  Matrix a = Matrix::Zero(N, N);
  const double share = 0.5 / static_cast<double>(dims.size());
  for (int i = 0; i < N; ++i) {
    auto c = lattice.coords(static_cast<std::size_t>(i));
    for (std::size_t k = 0; k < dims.size(); ++k) {
      for (int step : {1, -1}) {
        auto nb = c;
        nb[k] += step;
        a(i, static_cast<int>(lattice.index(nb))) += share;
      }
    }
  }
  return a;
}

// exp(M) by scaling and squaring with a 30-term Taylor series.
inline CMatrix expm(const CMatrix& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const CMatrix scaled = m / std::pow(2.0, squarings);
  CMatrix result = CMatrix::Identity(m.rows(), m.cols());
  CMatrix term = CMatrix::Identity(m.rows(), m.cols());
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// e^{i t A}.
inline CMatrix walk_unitary(const Matrix& a, double t) {
  return expm(CMatrix(a.cast<std::complex<double>>() * std::complex<double>(0.0, t)));
}

inline Eigen::VectorXd sorted_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  return solver.eigenvalues();
}

inline Matrix to_matrix(const std::vector<double>& dense, std::size_t n) {
  Matrix m(static_cast<int>(n), static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(static_cast<int>(i), static_cast<int>(j)) = dense[i * n + j];
  }
  return m;
}

inline Matrix matrix_power(const Matrix& m, int e) {
  Matrix r = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < e; ++i) r = r * m;
  return r;
}

// max_{j, j'} 1/2 ||M(:,j) - M(:,j')||_1 over all column pairs.
inline double all_pairs_column_distance(const Matrix& m) {
  double best = 0.0;
  for (int j = 0; j < m.cols(); ++j) {
    for (int k = j + 1; k < m.cols(); ++k) best = std::max(best, 0.5 * (m.col(j) - m.col(k)).cwiseAbs().sum());
  }
  return best;
}

// Composite Simpson with an even number of intervals no wider than h.
inline double simpson(const std::function<double(double)>& f, double a, double b, double h) {
  int intervals = 2 * static_cast<int>(std::ceil((b - a) / (2.0 * h)));
  if (intervals < 2) intervals = 2;
  const double step = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * step);
  return s * step / 3.0;
}

// Expected number of steps for |X - Y| on Z_n to reach 0 from `start` when a
// coordinate is chosen with probability 1/d and the difference then moves +-1.
inline double coupling_hitting_time(int n, int d, int start) {
  // Unknowns h(1..n-1); h(0) = h(n) = 0.
  const int m = n - 1;
  Matrix a = Matrix::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m);
  const double pick = 1.0 / d;
  for (int k = 1; k <= m; ++k) {
    const int row = k - 1;
    a(row, row) = pick;
    if (k - 1 >= 1) a(row, row - 1) -= 0.5 * pick;
    if (k + 1 <= m) a(row, row + 1) -= 0.5 * pick;
  }
  const Eigen::VectorXd h = a.fullPivLu().solve(rhs);
  return h(start - 1);
}

}  // namespace oracle
