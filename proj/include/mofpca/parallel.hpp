#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace mofpca {

inline constexpr const char* kWorkersEnv = "MOFPCA_WORKERS";

// Worker count from MOFPCA_WORKERS; 1 when unset or unparsable.
inline std::size_t workers_from_env() {
  const char* raw = std::getenv(kWorkersEnv);
  if (raw == nullptr) return 1;
  try {
    const long v = std::stol(raw);
    return v >= 1 ? static_cast<std::size_t>(v) : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

/// Calls body(begin, end) over contiguous chunks of [0, n) on up to `workers`
/// threads. Each chunk owns its output slots, so results do not depend on
/// scheduling. The first exception thrown by any chunk is rethrown.
template <typename Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mofpca
