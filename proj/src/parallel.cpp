#include "oscillab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace oscillab {

namespace {

unsigned initial_workers() {
  if (const char* env = std::getenv("OSCILLAB_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return 1;
}

std::atomic<unsigned>& workers() {
  static std::atomic<unsigned> w{initial_workers()};
  return w;
}

}  // namespace

unsigned worker_count() { return workers().load(); }
void set_worker_count(unsigned n) { workers().store(n == 0 ? 1 : n); }

}  // namespace oscillab
