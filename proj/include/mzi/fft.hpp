#pragma once

// Thin RAII layer over FFTW. Plans use FFTW_ESTIMATE so results do not depend
// on planner timing; planner calls are serialized by a process-wide mutex.

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace mzi::fft {

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FreeDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using Buffer = std::unique_ptr<T[], FreeDeleter>;

template <typename T>
Buffer<T> allocate(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (!p) throw std::bad_alloc();
  return Buffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_) throw std::runtime_error("fftw: plan creation failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace detail

/// Unnormalized forward DFT: X_k = sum_n x_n exp(-2 pi i k n / N).
inline std::vector<std::complex<double>> forward(std::span<const std::complex<double>> input) {
  const std::size_t n = input.size();
  if (n == 0) return {};
  auto in = detail::allocate<fftw_complex>(n);
  auto out = detail::allocate<fftw_complex>(n);
  std::unique_ptr<detail::Plan> plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan = std::make_unique<detail::Plan>(
        fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  }
  std::memcpy(in.get(), input.data(), n * sizeof(fftw_complex));
  plan->execute();
  std::vector<std::complex<double>> result(n);
  std::memcpy(static_cast<void*>(result.data()), out.get(), n * sizeof(fftw_complex));
  return result;
}

/// Unnormalized forward DFT of a real sequence; returns bins 0..N/2.
inline std::vector<std::complex<double>> forward_real(std::span<const double> input) {
  const std::size_t n = input.size();
  if (n == 0) return {};
  auto in = detail::allocate<double>(n);
  auto out = detail::allocate<fftw_complex>(n / 2 + 1);
  std::unique_ptr<detail::Plan> plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan = std::make_unique<detail::Plan>(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::memcpy(in.get(), input.data(), n * sizeof(double));
  plan->execute();
  std::vector<std::complex<double>> result(n / 2 + 1);
  std::memcpy(static_cast<void*>(result.data()), out.get(), result.size() * sizeof(fftw_complex));
  return result;
}

/// Forward DFT along the slow axis of a row-major [rows][cols] array, one
/// transform per column. Output has the same layout.
inline std::vector<std::complex<double>> forward_columns(std::span<const std::complex<double>> data, std::size_t rows,
                                                          std::size_t cols) {
  if (rows * cols != data.size()) throw std::invalid_argument("forward_columns: shape mismatch");
  if (data.empty()) return {};
  auto in = detail::allocate<fftw_complex>(data.size());
  auto out = detail::allocate<fftw_complex>(data.size());
  std::unique_ptr<detail::Plan> plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    int n = static_cast<int>(rows);
    plan = std::make_unique<detail::Plan>(fftw_plan_many_dft(1, &n, static_cast<int>(cols), in.get(), nullptr,
                                                             static_cast<int>(cols), 1, out.get(), nullptr,
                                                             static_cast<int>(cols), 1, FFTW_FORWARD, FFTW_ESTIMATE));
  }
  std::memcpy(in.get(), data.data(), data.size() * sizeof(fftw_complex));
  plan->execute();
  std::vector<std::complex<double>> result(data.size());
  std::memcpy(static_cast<void*>(result.data()), out.get(), data.size() * sizeof(fftw_complex));
  return result;
}

}  // namespace mzi::fft
