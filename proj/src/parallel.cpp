#include "neurobeat/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace neurobeat {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NEUROBEAT_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
      // fall through to the default; a malformed value should not abort
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace neurobeat
