#include "latcover/parallel.hpp"

namespace latcover {

namespace {
std::atomic<unsigned> g_default_threads{0};
}

void set_default_threads(unsigned threads) noexcept {
  g_default_threads.store(threads, std::memory_order_relaxed);
}

unsigned default_threads() noexcept { return g_default_threads.load(std::memory_order_relaxed); }

unsigned resolve_threads(unsigned requested) noexcept {
  unsigned t = requested != 0 ? requested : default_threads();
  if (t == 0) t = std::thread::hardware_concurrency();
  return t == 0 ? 1 : t;
}

}  // namespace latcover
