#pragma once

#include <chrono>

namespace silentflow {

// Worker budget handed down to OpenMP kernels. workers == 0 means the OpenMP
// default (OMP_NUM_THREADS or the hardware count).
struct ExecPolicy {
  int workers = 0;

  int threads() const;
  static ExecPolicy serial() { return ExecPolicy{1}; }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace silentflow
