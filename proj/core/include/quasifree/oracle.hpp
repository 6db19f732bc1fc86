#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "quasifree/covariance.hpp"
#include "quasifree/model.hpp"

namespace quasifree {

/// Brute-force Fock-space reference for tiny chains. Basis state s has site x
/// occupied iff bit x of s is set; the Jordan-Wigner string of f_x counts the
/// occupied sites below x.

inline constexpr int kMaxOracleSites = 14;
/// Dense density matrices stop here (4^L complex entries).
inline constexpr int kMaxDensitySites = 10;

using SparseOperator = Eigen::SparseMatrix<cplx>;

class FockOperatorSet {
 public:
  explicit FockOperatorSet(int sites);

  int sites() const { return sites_; }
  std::size_t dimension() const { return std::size_t{1} << sites_; }
  const SparseOperator& annihilation(int x) const { return f_.at(static_cast<std::size_t>(x)); }
  SparseOperator creation(int x) const { return annihilation(x).adjoint(); }
  SparseOperator number() const;

  /// max over x, y of the deviation of {f_x, f^dag_y} = delta and {f_x, f_y} = 0.
  double anticommutation_deviation() const;

 private:
  int sites_;
  std::vector<SparseOperator> f_;
};

/// H = sum_{x,y} h_{x,y} f^dag_x f_y.
SparseOperator build_hamiltonian(const ComplexMatrix& h);
SparseOperator build_hamiltonian(const HoppingModel& model);
SparseOperator build_hamiltonian(const DisorderedModel& model);

class ManyBodyState {
 public:
  enum class Parity { Even, Odd, Mixed };

  static ManyBodyState pure(int sites, ComplexVector psi);
  static ManyBodyState mixed(int sites, ComplexMatrix rho);
  static ManyBodyState fock(std::span<const int> occupations);
  /// f^dag_x |0>
  static ManyBodyState single_particle(int sites, int x);

  int sites() const { return sites_; }
  bool is_pure() const { return pure_; }
  const ComplexVector& vector() const { return psi_; }
  const ComplexMatrix& density() const { return rho_; }

  /// Parity::Mixed means both parities are present without coherences between them.
  Parity parity() const;
  /// Largest amplitude or matrix element that couples the two parity sectors.
  double parity_violation() const;
  double norm() const;

 private:
  ManyBodyState() = default;

  int sites_ = 0;
  bool pure_ = true;
  ComplexVector psi_;
  ComplexMatrix rho_;
};

/// exp(-i H t) acting on states, from one eigendecomposition per particle-number
/// sector. H must conserve N.
class SectorEvolution {
 public:
  SectorEvolution(const SparseOperator& h, int sites);

  ManyBodyState evolve(const ManyBodyState& state, double t) const;
  /// All eigenvalues of H, ascending.
  std::vector<double> spectrum() const;

 private:
  struct Sector {
    std::vector<std::uint32_t> states;
    RealVector energies;
    ComplexMatrix vectors;
  };

  int sites_;
  std::vector<Sector> sectors_;
  std::vector<std::uint32_t> position_;  // index of each basis state inside its sector
};

ManyBodyState evolve_state(const ManyBodyState& state, const SparseOperator& h, double t);

/// exp(-beta (H - mu N)) / Z as a density matrix; L <= kMaxDensitySites.
ManyBodyState gibbs_state(const SparseOperator& h, int sites, double beta, double mu);

/// <f^dag_x f_y>
Covariance covariance_of(const ManyBodyState& state);

/// <O> = <psi|O|psi> or tr(rho O).
cplx expectation(const ManyBodyState& state, const SparseOperator& op);

using Quartet = std::array<int, 4>;

/// max over quartets of |<f^dag_1 f^dag_2 f_3 f_4> - (G_14 G_23 - G_13 G_24)|, G = covariance_of(state).
double wick_deviation(const ManyBodyState& state, std::span<const Quartet> quartets);

/// All quartets with every site inside some window of `width` consecutive sites (periodic).
std::vector<Quartet> local_quartets(int sites, int width);

/// Tiled pairs: each block of four sites in (|1100> + |0011>) / sqrt 2.
ManyBodyState paired_state(int blocks);

}  // namespace quasifree
