#include "parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace espd {

std::size_t thread_budget() {
  std::size_t budget = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ESP_DESIGN_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) budget = std::min<std::size_t>(budget, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // unparsable cap is ignored
    }
  }
  return budget;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_budget(), count);
  // Thread start-up dominates below this size.
  if (workers <= 1 || count < 64) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace espd
