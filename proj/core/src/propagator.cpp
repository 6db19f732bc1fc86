#include "quasifree/propagator.hpp"

#include <cmath>
#include <cstdlib>

#include "quasifree/errors.hpp"
#include "quasifree/fft.hpp"

namespace quasifree {

Propagator Propagator::circulant(double time, std::vector<cplx> mode_phases) {
  Propagator g;
  g.time_ = time;
  g.size_ = static_cast<int>(mode_phases.size());
  g.kind_ = Kind::Circulant;
  g.phases_ = std::move(mode_phases);
  g.offsets_ = fft(g.phases_, FftSign::Backward);
  const double inv = 1.0 / g.size_;
  for (auto& v : g.offsets_) v *= inv;
  return g;
}

Propagator Propagator::dense(double time, ComplexMatrix matrix) {
  if (matrix.rows() != matrix.cols()) throw DimensionMismatch("Propagator: matrix must be square");
  Propagator g;
  g.time_ = time;
  g.size_ = static_cast<int>(matrix.rows());
  g.kind_ = Kind::Dense;
  g.matrix_ = std::move(matrix);
  return g;
}

cplx Propagator::operator()(int x, int y) const {
  if (kind_ == Kind::Circulant) return offsets_[wrap(static_cast<long>(x) - y, size_)];
  return matrix_(wrap(x, size_), wrap(y, size_));
}

ComplexMatrix Propagator::dense_matrix() const {
  if (kind_ == Kind::Dense) return matrix_;
  ComplexMatrix m(size_, size_);
  for (int y = 0; y < size_; ++y)
    for (int x = 0; x < size_; ++x) m(x, y) = offsets_[wrap(x - y, size_)];
  return m;
}

std::span<const cplx> Propagator::offsets() const {
  if (kind_ != Kind::Circulant) throw PreconditionViolated("offsets(): propagator is dense");
  return offsets_;
}

std::span<const cplx> Propagator::mode_phases() const {
  if (kind_ != Kind::Circulant) throw PreconditionViolated("mode_phases(): propagator is dense");
  return phases_;
}

const ComplexMatrix& Propagator::matrix() const {
  if (kind_ != Kind::Dense) throw PreconditionViolated("matrix(): propagator is circulant");
  return matrix_;
}

double Propagator::unitarity_deviation() const {
  if (kind_ == Kind::Circulant) {
    double s = 0.0;
    for (const auto& v : offsets_) s += std::norm(v);
    return std::abs(s - 1.0);  // every row holds the same entries
  }
  return (matrix_.rowwise().squaredNorm().array() - 1.0).abs().maxCoeff();
}

Propagator Propagator::compose(const Propagator& other) const {
  if (size_ != other.size_) throw DimensionMismatch("compose: propagators of different size");
  if (kind_ == Kind::Circulant && other.kind_ == Kind::Circulant) {
    std::vector<cplx> phases(phases_.size());
    for (std::size_t k = 0; k < phases.size(); ++k) phases[k] = phases_[k] * other.phases_[k];
    return circulant(time_ + other.time_, std::move(phases));
  }
  return dense(time_ + other.time_, dense_matrix() * other.dense_matrix());
}

Propagator propagate(const HoppingModel& model, double t) {
  const auto energies = mode_energies(model);
  std::vector<cplx> phases(energies.size());
  for (std::size_t k = 0; k < energies.size(); ++k) phases[k] = std::polar(1.0, energies[k] * t);
  return Propagator::circulant(t, std::move(phases));
}

Propagator propagate_disordered(const DisorderedModel& model, double t) {
  const auto& sys = model.eigensystem();
  const ComplexVector phases =
      (sys.values.array() * t).unaryExpr([](double a) { return std::polar(1.0, a); });
  const ComplexMatrix v = sys.vectors.cast<cplx>();
  return Propagator::dense(t, v * phases.asDiagonal() * v.transpose());
}

cplx bessel_approximation(int d, double t) {
  // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
  const int n = std::abs(d);
  const double x = -2.0 * t;
  double j = std::cyl_bessel_j(static_cast<double>(n), std::abs(x));
  if (n % 2 == 1 && ((d < 0) != (x < 0))) j = -j;
  static constexpr cplx kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPowersOfI[wrap(d, 4)] * j;
}

double bessel_error_bound(int d, double t, int size) {
  if (size <= 0) throw PreconditionViolated("bessel_error_bound: L must be positive");
  return kPi * std::abs(d - 2.0 * t) / size;
}

}  // namespace quasifree
