#pragma once

#include <span>
#include <vector>

#include "quasifree/model.hpp"
#include "quasifree/types.hpp"

namespace quasifree {

/// One-particle propagator G(t), fixed so that Gamma(t) = G Gamma G^dag.
///
/// For a real symmetric coupling matrix h this is G(t) = exp(i t h). Clean
/// models store only the mode phases exp(i omega_k t) and the first column
/// g_j = G_{j,0}; entries are materialized on demand.
class Propagator {
 public:
  enum class Kind { Circulant, Dense };

  /// `mode_phases[k]` multiplies the Fourier mode exp(2 pi i k x / L).
  static Propagator circulant(double time, std::vector<cplx> mode_phases);
  static Propagator dense(double time, ComplexMatrix matrix);

  double time() const { return time_; }
  int size() const { return size_; }
  Kind kind() const { return kind_; }

  /// G_{x,y}, indices taken modulo L.
  cplx operator()(int x, int y) const;

  ComplexMatrix dense_matrix() const;

  /// Circulant only: g_j = G_{x,y} for j = (x - y) mod L.
  std::span<const cplx> offsets() const;
  /// Circulant only: exp(i omega_k t) indexed by k mod L.
  std::span<const cplx> mode_phases() const;
  /// Dense only.
  const ComplexMatrix& matrix() const;

  /// max_x | sum_y |G_{x,y}|^2 - 1 |
  double unitarity_deviation() const;

  /// Product this * other (time adds). Circulant products stay circulant.
  Propagator compose(const Propagator& other) const;

 private:
  Propagator() = default;

  double time_ = 0.0;
  int size_ = 0;
  Kind kind_ = Kind::Circulant;
  std::vector<cplx> phases_;
  std::vector<cplx> offsets_;
  ComplexMatrix matrix_;
};

/// G(t) of a clean model from one length-L inverse DFT of exp(i omega_k t).
Propagator propagate(const HoppingModel& model, double t);

/// G(t) = V exp(i w t) V^T from the model's cached eigen decomposition.
Propagator propagate_disordered(const DisorderedModel& model, double t);

/// i^d J_d(-2t): the infinite-volume limit of conj(G_{x,y}(t)), d = x - y,
/// for the nearest-neighbour chain with J_1 = 1. For general J_1 use t -> J_1 t.
cplx bessel_approximation(int d, double t);

/// pi |d - 2t| / L, the finite-size error of the Bessel approximation.
double bessel_error_bound(int d, double t, int size);

}  // namespace quasifree
