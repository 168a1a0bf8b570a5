#include "qfluct/sectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qfluct/errors.hpp"
#include "sum.hpp"

namespace qfluct {

namespace {

using u128 = unsigned __int128;

// C(n, k) for n <= 66 without intermediate overflow.
std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u128 c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<u128>(n - k + i) / static_cast<u128>(i);
  return static_cast<std::uint64_t>(c);
}

// Twice-valued spin checks shared by multiplicity and log_multiplicity.
int lowering_index(int n_spins, HalfInteger s) {
  if (n_spins < 1) throw InvalidSectorError("n_spins must be >= 1, got " + std::to_string(n_spins));
  const int twice = s.twice();
  if (twice < 0 || twice > n_spins)
    throw InvalidSectorError("spin " + std::to_string(s.value()) + " outside [0, N/2] for N=" +
                             std::to_string(n_spins));
  if ((n_spins - twice) % 2 != 0)
    throw InvalidSectorError("spin " + std::to_string(s.value()) + " has the wrong parity for N=" +
                             std::to_string(n_spins));
  return (n_spins - twice) / 2;
}

// Product over the |k| ladder steps, with (s-m)(s+m+1) for raising and
// (s+m)(s-m+1) for lowering, all in doubled units.
double ladder_direct(int ts, int tm, int k) {
  if (std::abs(tm) > ts || (ts - tm) % 2 != 0) return 0.0;
  double prod = 1.0;
  if (k >= 0) {
    for (int step = 0; step < k; ++step) {
      const int m = tm + 2 * step;
      const double f = 0.25 * double(ts - m) * double(ts + m + 2);
      if (f <= 0.0) return 0.0;
      prod *= std::sqrt(f);
    }
  } else {
    for (int step = 0; step < -k; ++step) {
      const int m = tm - 2 * step;
      const double f = 0.25 * double(ts + m) * double(ts - m + 2);
      if (f <= 0.0) return 0.0;
      prod *= std::sqrt(f);
    }
  }
  return prod;
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(epsilon) || !std::isfinite(t_c) || !std::isfinite(beta) || !std::isfinite(mu))
    throw ParameterError("model parameters must be finite");
  if (t_c <= 0.0) throw ParameterError("t_c must be positive");
  if (beta <= 0.0) throw ParameterError("beta must be positive");
  if (epsilon < 0.0) throw ParameterError("epsilon must be non-negative");
}

void SectorLabel::validate() const {
  if (n_spins < 2) throw InvalidSectorError("n_spins must be >= 2");
  if (n_spins % 2 != 0) throw UnsupportedParityError("odd N is not supported");
  if (s < 0 || s > n_spins / 2) throw InvalidSectorError("s outside [0, N/2]");
  if (std::abs(sz) > s) throw InvalidSectorError("|s_z| exceeds s");
}

std::uint64_t multiplicity(int n_spins, HalfInteger s) {
  const int k = lowering_index(n_spins, s);
  if (n_spins > 66) throw std::overflow_error("exact multiplicity overflows 64 bits for N > 66");
  return binomial(n_spins, k) - binomial(n_spins, k - 1);
}

double log_multiplicity(int n_spins, HalfInteger s) {
  const int k = lowering_index(n_spins, s);
  const double n = n_spins;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         std::log(s.twice() + 1.0) - std::log(0.5 * n + s.value() + 1.0);
}

std::uint64_t dimension_sum(int n_spins) {
  if (n_spins < 1 || n_spins > 63) throw std::overflow_error("dimension_sum supports 1 <= N <= 63");
  u128 total = 0;
  for (int twice = n_spins; twice >= 0; twice -= 2) {
    const HalfInteger s = HalfInteger::from_twice(twice);
    total += u128(multiplicity(n_spins, s)) * u128(twice + 1);
  }
  return static_cast<std::uint64_t>(total);
}

double sector_energy_unchecked(double epsilon, double t_c, int n_spins, int s, int sz) {
  const double ds = s, dz = sz;
  return -2.0 * epsilon * dz - (2.0 * t_c / n_spins) * (ds * (ds + 1.0) - dz * (dz - 1.0));
}

double sector_energy(const ModelParams& params, const SectorLabel& label) {
  label.validate();
  return sector_energy_unchecked(params.epsilon, params.t_c, label.n_spins, label.s, label.sz);
}

double ladder_coefficient(HalfInteger s, HalfInteger sz, int k) {
  return ladder_direct(s.twice(), sz.twice(), k);
}

double log_ladder_coefficient(int s, int sz, int k) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (std::abs(sz) > s) return kNegInf;
  if (k < 0) {
    // Lowering by |k| from sz is the transpose of raising by |k| from sz - |k|.
    return log_ladder_coefficient(s, sz + k, -k);
  }
  if (sz + k > s) return kNegInf;
  if (k <= 16) {
    double acc = 0.0;
    for (int m = sz; m < sz + k; ++m) acc += 0.5 * (std::log(double(s - m)) + std::log(double(s + m + 1)));
    return acc;
  }
  return 0.5 * (std::lgamma(s - sz + 1.0) - std::lgamma(s - sz - k + 1.0) +
                std::lgamma(s + sz + k + 1.0) - std::lgamma(s + sz + 1.0));
}

SectorTable::SectorTable(int n_spins, double log_partition, std::vector<Sector> sectors)
    : n_spins_(n_spins), log_partition_(log_partition), sectors_(std::move(sectors)) {}

const Sector& SectorTable::sector(int s) const {
  const int idx = n_spins_ / 2 - s;
  if (idx < 0 || idx >= static_cast<int>(sectors_.size()))
    throw InvalidSectorError("no sector with s=" + std::to_string(s));
  return sectors_[idx];
}

std::size_t SectorTable::row_count() const {
  std::size_t n = 0;
  for (const Sector& sec : sectors_) n += sec.eta.size();
  return n;
}

double SectorTable::total_weight() const {
  detail::CompensatedSum acc;
  for_each_row([&](int, int, double lw, double) { acc.add(std::exp(lw)); });
  return acc.value();
}

SectorTable boltzmann_table(const ModelParams& params, int n_spins) {
  params.validate();
  if (n_spins % 2 != 0) throw UnsupportedParityError("odd N is not supported (N=" + std::to_string(n_spins) + ")");
  if (n_spins < 2) throw InvalidSectorError("n_spins must be >= 2");

  std::vector<Sector> sectors;
  sectors.reserve(n_spins / 2 + 1);
  double max_log = -std::numeric_limits<double>::infinity();
  for (int s = n_spins / 2; s >= 0; --s) {
    Sector sec;
    sec.s = s;
    sec.log_d = log_multiplicity(n_spins, s);
    sec.d = n_spins <= 66 ? multiplicity(n_spins, s) : 0;
    sec.eta.resize(2 * s + 1);
    sec.log_rho.resize(2 * s + 1);
    for (int i = 0; i <= 2 * s; ++i) {
      sec.eta[i] = sector_energy_unchecked(params.epsilon, params.t_c, n_spins, s, i - s);
      max_log = std::max(max_log, sec.log_d - params.beta * sec.eta[i]);
    }
    sectors.push_back(std::move(sec));
  }
  detail::CompensatedSum z;
  for (const Sector& sec : sectors)
    for (double e : sec.eta) z.add(std::exp(sec.log_d - params.beta * e - max_log));
  double log_z = max_log + std::log(z.value());
  for (Sector& sec : sectors)
    for (int i = 0; i < sec.size(); ++i) sec.log_rho[i] = -params.beta * sec.eta[i] - log_z;
  // log d + log rho rounds at the scale of log d (thousands of nats at large
  // N), so re-measure the norm on the stored values once.
  detail::CompensatedSum w;
  for (const Sector& sec : sectors)
    for (int i = 0; i < sec.size(); ++i) w.add(std::exp(sec.log_weight(i)));
  const double shift = std::log(w.value());
  log_z += shift;
  for (Sector& sec : sectors)
    for (double& lr : sec.log_rho) lr -= shift;
  return SectorTable(n_spins, log_z, std::move(sectors));
}

double pair_expectation(const SectorTable& table) {
  const double n = table.n_spins();
  detail::CompensatedSum acc;
  table.for_each_row([&](int s, int sz, double lw, double) {
    acc.add(std::exp(lw) * (double(s) * (s + 1) - double(sz) * (sz - 1)));
  });
  return acc.value() / (n * n);
}

}  // namespace qfluct
