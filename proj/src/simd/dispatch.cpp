#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gibbslab/simd/kernels.hpp"

namespace gibbslab::simd {

#if defined(GIBBSLAB_HAVE_AVX2)
namespace detail {
const KernelTable* avx2_table();
}
#endif

namespace {

bool cpu_has_avx2() {
#if defined(GIBBSLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Level initial_level() {
  Level level = detected_level();
  // GIBBSLAB_SIMD=scalar forces the reference kernels.
  if (const char* env = std::getenv("GIBBSLAB_SIMD"); env != nullptr) {
    if (std::string(env) == "scalar") level = Level::Scalar;
  }
  return level;
}

std::atomic<Level>& current() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(GIBBSLAB_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

Level detected_level() { return avx2_kernels() != nullptr ? Level::Avx2 : Level::Scalar; }

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level) {
  if (level == Level::Avx2 && avx2_kernels() == nullptr) {
    throw std::invalid_argument("AVX2 kernels are not available on this machine");
  }
  current().store(level, std::memory_order_relaxed);
}

const KernelTable& kernels() {
  if (active_level() == Level::Avx2) return *avx2_kernels();
  return scalar_kernels();
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Scalar:
      return "scalar";
    case Level::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace gibbslab::simd
