// Independent quadrature of the averaged column on Z95 x Z93 at the
// theorem 3 horizon, compared against the analytic case check.
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "qwalk/experiments.hpp"

using namespace qwalk;

namespace {

using cplx = std::complex<double>;

// Representative offsets l = 0..(n-1)/2 against phases e^{i t lambda_j / 2},
// with lambda_j = cos(2 pi j / n), j = 0..(n-1)/2 and j > 0 counted twice.
struct Factor {
  int n;
  Eigen::MatrixXd coeff;  // offsets x classes
  Eigen::VectorXd freq;
};

Factor make_factor(int n) {
  const int m = (n + 1) / 2;
  Factor f{n, Eigen::MatrixXd(m, m), Eigen::VectorXd(m)};
  for (int j = 0; j < m; ++j) {
    f.freq(j) = 0.5 * std::cos(2.0 * std::numbers::pi * j / n);
    for (int l = 0; l < m; ++l) {
      f.coeff(l, j) = (j == 0 ? 1.0 : 2.0 * std::cos(2.0 * std::numbers::pi * double(l) * j / n)) / n;
    }
  }
  return f;
}

// Fills columns of `out` with |a_l(t)|^2 at times t0 + k h, k = 0..count-1.
// Phases start exact at t0 and advance by multiplication within the block.
void probabilities(const Factor& f, double t0, double h, Eigen::Index count, Eigen::MatrixXd& out) {
  const auto m = f.freq.size();
  Eigen::MatrixXd re(m, count), im(m, count);
  for (Eigen::Index j = 0; j < m; ++j) {
    cplx z = std::polar(1.0, f.freq(j) * t0);
    const cplx step = std::polar(1.0, f.freq(j) * h);
    for (Eigen::Index c = 0; c < count; ++c) {
      re(j, c) = z.real();
      im(j, c) = z.imag();
      z *= step;
    }
  }
  const Eigen::MatrixXd ar = f.coeff * re;
  const Eigen::MatrixXd ai = f.coeff * im;
  out = ar.cwiseAbs2() + ai.cwiseAbs2();
}

}  // namespace

TEST_CASE("slow: theorem3 column against Simpson quadrature") {
  const int n1 = 95, n2 = 93;
  const auto report = theorem3_case_check(n1, n2);
  const double T = report.T;

  const auto f1 = make_factor(n1);
  const auto f2 = make_factor(n2);
  const long M = 2 * static_cast<long>(std::ceil(T / (2 * 0.05)));
  const double h = T / double(M);

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(f1.freq.size(), f2.freq.size());
  const long block = 4096;
  Eigen::MatrixXd p1, p2;
  for (long start = 0; start <= M; start += block) {
    const long stop = std::min(M + 1, start + block);
    std::vector<double> w;
    for (long k = start; k < stop; ++k) w.push_back(k == 0 || k == M ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0));
    probabilities(f1, double(start) * h, h, stop - start, p1);
    probabilities(f2, double(start) * h, h, stop - start, p2);
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    acc.noalias() += p1 * wv.asDiagonal() * p2.transpose();
  }
  acc *= h / 3.0 / T;

  const double u = 1.0 / (double(n1) * n2);
  double l1 = 0.0, worst = 0.0;
  for (int l1i = 0; l1i < n1; ++l1i) {
    for (int l2i = 0; l2i < n2; ++l2i) {
      const int r1 = std::min(l1i, n1 - l1i), r2 = std::min(l2i, n2 - l2i);
      const double q = acc(r1, r2);
      l1 += std::abs(q - u);
      worst = std::max(worst, std::abs(q - report.column[static_cast<std::size_t>(l1i) * n2 + l2i]));
    }
  }
  MESSAGE("max entry gap " << worst << ", aggregate " << l1 << " vs " << report.aggregate_l1);
  CHECK(worst < 1e-9);
  CHECK(std::abs(l1 - report.aggregate_l1) < 1e-5);
}
