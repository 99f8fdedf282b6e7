#include "ergonet/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ergonet::kernels {

const Kernels* avx2_table();
const Kernels* neon_table();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels* select() {
  const Kernels* v_avx2 = avx2();
  const Kernels* v_neon = neon();
  if (const char* env = std::getenv("ERGONET_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar();
    if (std::strcmp(env, "avx2") == 0 && v_avx2) return v_avx2;
    if (std::strcmp(env, "neon") == 0 && v_neon) return v_neon;
    return &scalar();
  }
  if (v_avx2) return v_avx2;
  if (v_neon) return v_neon;
  return &scalar();
}

}  // namespace

const Kernels* avx2() {
  const Kernels* t = avx2_table();
  return (t && cpu_has_avx2()) ? t : nullptr;
}

const Kernels* neon() { return neon_table(); }

const Kernels& active() {
  static const Kernels* chosen = select();
  return *chosen;
}

std::vector<const Kernels*> available() {
  std::vector<const Kernels*> out{&scalar()};
  if (const Kernels* t = avx2()) out.push_back(t);
  if (const Kernels* t = neon()) out.push_back(t);
  return out;
}

}  // namespace ergonet::kernels
