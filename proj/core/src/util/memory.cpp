#include "gridcast/util/memory.hpp"

#include <cstdlib>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace gridcast::util {

void retain_freed_memory() noexcept {
#if defined(__GLIBC__)
  mallopt(M_TOP_PAD, 64 * 1024 * 1024);
  mallopt(M_TRIM_THRESHOLD, 1024 * 1024 * 1024);
  mallopt(M_MMAP_THRESHOLD, 32 * 1024 * 1024);
#endif
}

}  // namespace gridcast::util
