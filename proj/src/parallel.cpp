#include "npdetect/parallel.hpp"

namespace npdetect {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_worker_threads(unsigned threads) noexcept { g_threads = threads; }

unsigned worker_threads() noexcept {
  const unsigned requested = g_threads.load();
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace npdetect
