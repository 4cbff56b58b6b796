#include "toalab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "toalab/errors.hpp"

namespace toalab::fft {

namespace {

// Plans are created once per (size, direction) under a lock; fftw_execute_dft
// on a finished plan is thread-safe.
class plan_cache {
public:
  ~plan_cache() {
    for (auto& [key, plan] : plans_) {
      fftw_destroy_plan(plan);
    }
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) {
      return it->second;
    }
    std::vector<fftw_complex> a(static_cast<std::size_t>(n));
    std::vector<fftw_complex> b(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, a.data(), b.data(), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) {
      throw numeric_error("fftw plan creation failed for size " + std::to_string(n));
    }
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

plan_cache& cache() {
  static plan_cache instance;
  return instance;
}

void transform(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign) {
  if (in.size() != out.size() || in.empty()) {
    throw argument_error("fft: input and output sizes must match and be nonzero");
  }
  const int n = static_cast<int>(in.size());
  fftw_plan plan = cache().get(n, sign);
  // fftw_execute_dft wants a mutable input pointer.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out) {
    v *= scale;
  }
}

} // namespace

void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  transform(in, out, FFTW_FORWARD);
}

void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  transform(in, out, FFTW_BACKWARD);
}

} // namespace toalab::fft
