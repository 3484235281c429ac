#pragma once

namespace gridcast::util {

/// Asks the C allocator to keep freed memory mapped instead of handing it back
/// to the kernel. Training allocates and frees the same few megabytes of
/// activations every batch, and refaulting those pages is slow. No-op where
/// the allocator offers no such control. Call once at program start.
void retain_freed_memory() noexcept;

}  // namespace gridcast::util
