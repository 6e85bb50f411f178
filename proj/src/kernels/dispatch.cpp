#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace crd::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("CRD_KERNELS")) {
    const std::string choice(env);
    if (choice == "scalar") return Backend::scalar;
    if (choice == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
  }
  return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

bool backend_available(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return avx2::kCompiled && cpu_has_avx2();
  }
  return false;
}

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

const KernelTable& table(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("kernels: backend " + std::string(backend_name(backend)) + " unavailable on this CPU");
  }
  return backend == Backend::avx2 ? avx2::kTable : scalar::kTable;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("kernels: backend " + std::string(backend_name(backend)) + " unavailable on this CPU");
  }
  current().store(backend, std::memory_order_relaxed);
}

}  // namespace crd::kernels
