#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "qfluct/errors.hpp"
#include "qfluct/oracle/dense.hpp"
#include "qfluct/sectors.hpp"

using namespace qfluct;

TEST_SUITE("sectors") {

TEST_CASE("multiplicity small cases") {
  CHECK(multiplicity(2, 1) == 1);
  CHECK(multiplicity(2, 0) == 1);
  CHECK(multiplicity(4, 2) == 1);
  CHECK(multiplicity(4, 1) == 3);
  CHECK(multiplicity(4, 0) == 2);
  CHECK(multiplicity(1, HalfInteger::from_twice(1)) == 1);
  CHECK(multiplicity(3, HalfInteger::from_twice(3)) == 1);
  CHECK(multiplicity(3, HalfInteger::from_twice(1)) == 2);
}

TEST_CASE("multiplicity rejects bad labels") {
  CHECK_THROWS_AS(multiplicity(4, HalfInteger::from_twice(1)), InvalidSectorError);
  CHECK_THROWS_AS(multiplicity(3, 1), InvalidSectorError);
  CHECK_THROWS_AS(multiplicity(4, 3), InvalidSectorError);
  CHECK_THROWS_AS(multiplicity(4, -1), InvalidSectorError);
  CHECK_THROWS_AS(multiplicity(0, 0), Error);
  CHECK_THROWS_AS(multiplicity(68, 0), std::overflow_error);
}

TEST_CASE("multiplicities match the dense Casimir") {
  for (int n : {2, 4, 6, 8}) {
    const auto counts = oracle::casimir_multiplicities(n);
    REQUIRE(counts.size() == static_cast<std::size_t>(n / 2 + 1));
    for (int i = 0; i <= n / 2; ++i) {
      CHECK(static_cast<std::uint64_t>(counts[i]) == multiplicity(n, n / 2 - i));
    }
  }
}

TEST_CASE("dimension sum rule") {
  for (int n = 1; n <= 40; ++n) CHECK(dimension_sum(n) == (std::uint64_t{1} << n));
}

TEST_CASE("log multiplicity agrees with the exact count") {
  for (int n : {2, 10, 40, 66}) {
    for (int s = n / 2; s >= 0; s -= 3) {
      const double exact = static_cast<double>(multiplicity(n, s));
      CHECK(log_multiplicity(n, s) == doctest::Approx(std::log(exact)).epsilon(1e-12));
    }
  }
  const double big = log_multiplicity(100000, 10);
  CHECK(std::isfinite(big));
  CHECK(big > 0.0);
  CHECK(log_multiplicity(100000, 50000) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("sector energy") {
  const ModelParams p{1.0, 1.0, 1.0, 0.0};
  CHECK(sector_energy(p, {2, 1, 1}) == doctest::Approx(-4.0));
  CHECK(sector_energy(p, {2, 0, 0}) == 0.0);
  CHECK(sector_energy(p, {2, 1, -1}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(sector_energy(p, {2, 1, 2}), InvalidSectorError);
  CHECK_THROWS_AS(sector_energy(p, {2, 2, 0}), InvalidSectorError);
}

TEST_CASE("sector spectrum equals the dense diagonalization") {
  for (const ModelParams& p : {ModelParams{1.0, 1.0, 1.0, 0.0}, ModelParams{0.3, 2.0, 1.0, 0.0},
                               ModelParams{0.0, 0.7, 1.0, 0.0}}) {
    for (int n : {2, 4, 6}) {
      const Eigen::VectorXd dense = oracle::dense_spectrum(p, n);
      const Eigen::VectorXd sect = oracle::sector_spectrum(p, n);
      REQUIRE(dense.size() == sect.size());
      CHECK((dense - sect).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("boltzmann table: explicit partition sum at N = 2") {
  const SectorTable table = boltzmann_table({1.0, 1.0, 1.0, 0.0}, 2);
  const double z = std::exp(4.0) + std::exp(2.0) + std::exp(-2.0) + 1.0;
  const Sector& s1 = table.sector(1);
  CHECK(std::exp(s1.log_rho[2]) == doctest::Approx(std::exp(4.0) / z).epsilon(1e-14));
  CHECK(std::exp(s1.log_rho[1]) == doctest::Approx(std::exp(2.0) / z).epsilon(1e-14));
  CHECK(std::exp(s1.log_rho[0]) == doctest::Approx(std::exp(-2.0) / z).epsilon(1e-14));
  CHECK(std::exp(table.sector(0).log_rho[0]) == doctest::Approx(1.0 / z).epsilon(1e-14));
  CHECK(table.log_partition() == doctest::Approx(std::log(z)).epsilon(1e-14));
}

TEST_CASE("boltzmann table: uniform high-temperature limit") {
  for (int n : {2, 8, 30}) {
    const SectorTable table = boltzmann_table({0.5, 1.0, 1e-12, 0.0}, n);
    std::size_t visited = 0;
    table.for_each_row([&](int s, int, double lw, double) {
      CHECK(lw == doctest::Approx(table.sector(s).log_d - n * std::log(2.0)).epsilon(1e-9));
      ++visited;
    });
    CHECK(visited == table.row_count());
    for (const Sector& sec : table.sectors()) {
      for (double lr : sec.log_rho) CHECK(lr == doctest::Approx(-n * std::log(2.0)).epsilon(1e-9));
    }
  }
}

TEST_CASE("boltzmann table: normalization, ordering and no overflow") {
  for (int n : {2, 4, 64, 1000, 4096}) {
    for (double beta : {0.1, 2.0, 50.0}) {
      const SectorTable table = boltzmann_table({0.2, 1.0, beta, 0.0}, n);
      CHECK(std::abs(table.total_weight() - 1.0) < 1e-12);
      CHECK(table.sectors().front().s == n / 2);
      CHECK(table.sectors().back().s == 0);
      std::size_t rows = 0, bad = 0;
      for (const Sector& sec : table.sectors()) {
        CHECK(sec.size() == 2 * sec.s + 1);
        rows += sec.size();
        for (double lr : sec.log_rho) bad += !std::isfinite(lr) || lr > 0.0;
      }
      CHECK(bad == 0);
      CHECK(rows == table.row_count());
    }
  }
}

TEST_CASE("boltzmann table does not depend on mu") {
  const SectorTable a = boltzmann_table({0.2, 1.0, 3.0, 0.0}, 12);
  const SectorTable b = boltzmann_table({0.2, 1.0, 3.0, 0.7}, 12);
  CHECK(a.log_partition() == b.log_partition());
  for (std::size_t i = 0; i < a.sectors().size(); ++i) CHECK(a.sectors()[i].log_rho == b.sectors()[i].log_rho);
}

TEST_CASE("boltzmann table errors") {
  CHECK_THROWS_AS(boltzmann_table({0.0, 1.0, 1.0, 0.0}, 3), UnsupportedParityError);
  CHECK_THROWS_AS(boltzmann_table({0.0, 1.0, 0.0, 0.0}, 4), ParameterError);
  CHECK_THROWS_AS(boltzmann_table({-0.1, 1.0, 1.0, 0.0}, 4), ParameterError);
  CHECK_THROWS_AS(boltzmann_table({NAN, 1.0, 1.0, 0.0}, 4), ParameterError);
}

TEST_CASE("pair expectation matches the dense state") {
  for (int n : {2, 4, 6}) {
    const ModelParams p{0.1, 1.0, 2.5, 0.0};
    const oracle::DenseGns dense(p, n, 0.5);
    CHECK(pair_expectation(boltzmann_table(p, n)) == doctest::Approx(dense.pair_expectation()).epsilon(1e-10));
  }
}

TEST_CASE("ladder coefficients") {
  CHECK(ladder_coefficient(HalfInteger::from_twice(1), HalfInteger::from_twice(-1), 1) == doctest::Approx(1.0));
  CHECK(ladder_coefficient(1, -1, 2) == doctest::Approx(2.0));
  CHECK(ladder_coefficient(1, 1, 1) == 0.0);
  CHECK(ladder_coefficient(1, -1, -1) == 0.0);
  CHECK(ladder_coefficient(1, 1, -2) == doctest::Approx(2.0));
  CHECK(ladder_coefficient(3, 0, 0) == 1.0);
  CHECK(ladder_coefficient(2, 0, 5) == 0.0);
  CHECK(std::isinf(log_ladder_coefficient(1, 1, 1)));
}

TEST_CASE("ladder coefficients match explicit products") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int s = std::uniform_int_distribution<int>(0, 60)(rng);
    const int sz = std::uniform_int_distribution<int>(-s, s)(rng);
    const int k = std::uniform_int_distribution<int>(-40, 40)(rng);
    double direct = 1.0;
    bool zero = sz + k > s || sz + k < -s;
    if (!zero) {
      for (int j = 0; j < std::abs(k); ++j) {
        const double m = k > 0 ? sz + j : sz - j;
        const double f = k > 0 ? s * (s + 1.0) - m * (m + 1.0) : s * (s + 1.0) - m * (m - 1.0);
        direct *= std::sqrt(f);
      }
    }
    const double lc = log_ladder_coefficient(s, sz, k);
    if (zero) {
      CHECK(std::isinf(lc));
    } else {
      CHECK(lc == doctest::Approx(std::log(direct)).epsilon(1e-12).scale(1.0));
      CHECK(ladder_coefficient(s, sz, k) == doctest::Approx(direct).epsilon(1e-11));
    }
  }
}

TEST_CASE("dense spin operator norms") {
  for (int n = 1; n <= 8; ++n) {
    const oracle::SpinOperators ops = oracle::spin_operators(n);
    CHECK(oracle::operator_norm(ops.sx) == doctest::Approx(n / 2.0).epsilon(1e-10));
    CHECK(oracle::operator_norm(ops.sy) == doctest::Approx(n / 2.0).epsilon(1e-10));
    CHECK(oracle::operator_norm(ops.sz) == doctest::Approx(n / 2.0).epsilon(1e-10));
    CHECK(oracle::operator_norm(ops.sp) <= (n + 1) / 2.0 + 1e-10);
    CHECK(oracle::operator_norm(ops.sm) <= (n + 1) / 2.0 + 1e-10);
  }
}

TEST_CASE("commutator norms stay bounded") {
  // ||[A^n, B^m]|| <= n m ||A||^{n-1} ||B||^{m-1} ||[A, B]|| with ||[S+, S-]|| = N
  for (int n = 1; n <= 2; ++n) {
    for (int m = 1; m <= 2; ++m) {
      for (int N = 2; N <= 8; N += 2) {
        const oracle::SpinOperators ops = oracle::spin_operators(N);
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(ops.sp.rows(), ops.sp.cols());
        Eigen::MatrixXcd b = a;
        for (int i = 0; i < n; ++i) a = a * ops.sp;
        for (int i = 0; i < m; ++i) b = b * ops.sm;
        const double ratio = oracle::operator_norm(a * b - b * a) / std::pow(N, n + m - 1);
        const double bound = n * m * std::pow((N + 1.0) / (2.0 * N), n + m - 2);
        CHECK(ratio <= bound + 1e-12);
        CHECK(ratio > 0.0);
      }
    }
  }
}

}  // TEST_SUITE
