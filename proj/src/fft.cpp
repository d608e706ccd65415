#include "vsaxmc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace vsaxmc::fft {
namespace {

// FFTW's planner is not re-entrant, execution on distinct arrays is.
// Plans are built once per length with FFTW_ESTIMATE, which keeps the chosen
// algorithm (and so every output bit) independent of timing.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
  }

  PlanPair get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int len = static_cast<int>(n);
    PlanPair p{fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, flags),
               fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, flags)};
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::vector<Complex> forward(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<Complex> in(x.begin(), x.end());
  std::vector<Complex> out(n);
  if (n == 0) return out;
  fftw_execute_dft(cache().get(n).forward, as_fftw(in.data()), as_fftw(out.data()));
  return out;
}

std::vector<double> inverse_real(std::span<const Complex> bins) {
  const std::size_t n = bins.size();
  std::vector<Complex> in(bins.begin(), bins.end());
  std::vector<Complex> out(n);
  std::vector<double> result(n);
  if (n == 0) return result;
  fftw_execute_dft(cache().get(n).inverse, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = out[i].real() * scale;
  return result;
}

}  // namespace vsaxmc::fft
