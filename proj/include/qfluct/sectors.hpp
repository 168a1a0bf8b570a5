#pragma once

// Permutation-symmetry bookkeeping for N quasi-spins: multiplicities of the
// total-spin irreducible representations, the strong-coupling spectrum and
// Gibbs weights, and SU(2) ladder matrix elements.

#include <cstdint>
#include <vector>

namespace qfluct {

struct ModelParams {
  double epsilon = 0.0;  // per-level energy
  double t_c = 1.0;      // critical temperature
  double beta = 1.0;     // inverse temperature
  double mu = 0.0;       // chemical potential; enters dynamics only

  /// Throws ParameterError unless t_c > 0, beta > 0, epsilon >= 0, all finite.
  void validate() const;
};

/// Spin quantum number stored as twice its value so that half-integers stay
/// exact.
class HalfInteger {
 public:
  constexpr HalfInteger(int value) : twice_(2 * value) {}  // NOLINT: implicit from integer spin
  static constexpr HalfInteger from_twice(int twice) {
    HalfInteger h(0);
    h.twice_ = twice;
    return h;
  }
  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  friend constexpr bool operator==(HalfInteger, HalfInteger) = default;

 private:
  int twice_;
};

/// (N, s, s_z) with N even; for even N both s and s_z are integers.
struct SectorLabel {
  int n_spins = 2;
  int s = 0;
  int sz = 0;

  void validate() const;
};

/// d(s) = C(N, N/2 - s) - C(N, N/2 - s - 1), exact for N <= 66.
/// Throws InvalidSectorError on a parity mismatch or s outside [0, N/2],
/// std::overflow_error when N > 66 (use log_multiplicity instead).
std::uint64_t multiplicity(int n_spins, HalfInteger s);

/// log d(s) for any N (lgamma based); s integer-spaced from N/2.
double log_multiplicity(int n_spins, HalfInteger s);

/// Sum_s d(s)(2s+1), computed in exact integer arithmetic. Equals 2^N.
std::uint64_t dimension_sum(int n_spins);

/// eta^N(s, s_z) = -2 eps s_z - (2 T_c / N)(s(s+1) - s_z(s_z - 1)).
double sector_energy(const ModelParams& params, const SectorLabel& label);

/// Same formula without label validation; hot path for table construction.
double sector_energy_unchecked(double epsilon, double t_c, int n_spins, int s, int sz);

/// <s, s_z + k| (S_+)^k |s, s_z> for k >= 0, <s, s_z + k| (S_-)^{|k|} |s, s_z>
/// for k < 0. Zero when the walk leaves [-s, s].
double ladder_coefficient(HalfInteger s, HalfInteger sz, int k);

/// log of ladder_coefficient for integer spins; -infinity when it vanishes.
double log_ladder_coefficient(int s, int sz, int k);

/// All s_z rows of one total-spin sector. Rows are ordered by ascending s_z.
struct Sector {
  int s = 0;
  double log_d = 0.0;
  std::uint64_t d = 0;  // exact multiplicity, 0 when N > 66
  std::vector<double> eta;
  std::vector<double> log_rho;

  int size() const { return static_cast<int>(eta.size()); }
  int sz(int row) const { return row - s; }
  /// log(d(s) rho(s, s_z)): weight of the row inside the GNS vector norm.
  double log_weight(int row) const { return log_d + log_rho[row]; }
};

/// Boltzmann weights of the strong-coupling Hamiltonian for one N.
/// Immutable after construction.
class SectorTable {
 public:
  SectorTable(int n_spins, double log_partition, std::vector<Sector> sectors);

  int n_spins() const { return n_spins_; }
  double log_partition() const { return log_partition_; }
  /// Sectors ordered by descending s, starting at N/2.
  const std::vector<Sector>& sectors() const { return sectors_; }
  const Sector& sector(int s) const;
  std::size_t row_count() const;

  /// Sum_s d(s) Sum_{s_z} rho(s, s_z); 1 up to rounding.
  double total_weight() const;

  /// Calls f(s, sz, log_weight, eta) for every row in table order.
  template <class F>
  void for_each_row(F&& f) const {
    for (const Sector& sec : sectors_) {
      for (int i = 0; i < sec.size(); ++i) f(sec.s, sec.sz(i), sec.log_weight(i), sec.eta[i]);
    }
  }

 private:
  int n_spins_;
  double log_partition_;
  std::vector<Sector> sectors_;
};

/// rho(s, s_z) = exp(-beta eta - log Z), accumulated in the log domain.
/// mu does not enter. Throws UnsupportedParityError for odd N.
SectorTable boltzmann_table(const ModelParams& params, int n_spins);

/// Exact Sum d rho (s(s+1) - s_z(s_z - 1)) / N^2 = <S_+ S_->/N^2.
double pair_expectation(const SectorTable& table);

}  // namespace qfluct
