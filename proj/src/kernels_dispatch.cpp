/// Runtime kernel selection. The AVX2 set is used when the CPU reports both
/// AVX2 and FMA; SLOCAL_KERNELS=scalar|avx2 overrides the choice (requesting
/// avx2 on a CPU without it falls back to scalar).

#include "slocal/common.hpp"
#include "slocal/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace slocal::kern {
namespace {

const Kernels* choose() {
  const Kernels* avx2 = nullptr;
#if defined(__x86_64__) || defined(__i386__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    avx2 = avx2_set();
#endif
  if (const char* env = std::getenv("SLOCAL_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ref();
    if (std::strcmp(env, "avx2") == 0 && avx2) return avx2;
  }
  return avx2 ? avx2 : &scalar_ref();
}

}  // namespace

const Kernels& active() {
  static const Kernels& k = *choose();
  return k;
}

}  // namespace slocal::kern

namespace slocal {

void pin_blas_single_threaded() {
  // The dense eigensolver route goes through OpenBLAS; its thread pool
  // fights our own on a small core count, so cap it before first use.
  // setenv with overwrite=0 respects an explicit user setting.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);
  setenv("OMP_NUM_THREADS", "1", 0);
}

}  // namespace slocal
