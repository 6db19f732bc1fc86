#include "quasifree/fft.hpp"

#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace quasifree {
namespace {

// FFTW's planner is not thread safe; execution of an existing plan on new
// arrays is. Plans are created once per shape and kept for the process lifetime.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = rows == 1 ? fftw_plan_dft_1d(cols, scratch, scratch, sign, flags)
                               : fftw_plan_dft_2d(rows, cols, scratch, scratch, sign, flags);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void fft_inplace(std::span<cplx> data, FftSign sign) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(1, static_cast<int>(data.size()), static_cast<int>(sign));
  fftw_execute_dft(plan, as_fftw(data.data()), as_fftw(data.data()));
}

std::vector<cplx> fft(std::span<const cplx> data, FftSign sign) {
  std::vector<cplx> out(data.begin(), data.end());
  fft_inplace(out, sign);
  return out;
}

void fft2_inplace(ComplexMatrix& m, FftSign sign) {
  if (m.size() == 0) return;
  // Eigen stores column-major; a 2D DFT is separable, so transforming the
  // buffer as a (cols x rows) row-major array gives the same result.
  const bool vector_shape = m.cols() == 1 || m.rows() == 1;
  fftw_plan plan = vector_shape ? cache().get(1, static_cast<int>(m.size()), static_cast<int>(sign))
                                : cache().get(static_cast<int>(m.cols()), static_cast<int>(m.rows()),
                                              static_cast<int>(sign));
  fftw_execute_dft(plan, as_fftw(m.data()), as_fftw(m.data()));
}

}  // namespace quasifree
