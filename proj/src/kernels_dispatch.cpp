#include <cstdlib>
#include <string_view>

#include "qfolio/kernels.hpp"

namespace qfolio::kernels {

namespace {

const KernelTable& select() {
  const char* env = std::getenv("QFOLIO_KERNELS");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return scalar();
  if (const KernelTable* wide = avx2()) return *wide;
  return scalar();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace qfolio::kernels
