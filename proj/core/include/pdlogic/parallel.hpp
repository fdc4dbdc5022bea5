#pragma once

#include <cstddef>
#include <functional>

namespace pdl {

// Runs fn(i) for i in [0, n) on the work-stealing pool. The number of worker
// threads is governed by the active ThreadLimit (or the pool default).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Caps pool parallelism while alive. threads == 0 leaves the default.
class ThreadLimit {
 public:
  explicit ThreadLimit(std::size_t threads);
  ~ThreadLimit();
  ThreadLimit(const ThreadLimit&) = delete;
  ThreadLimit& operator=(const ThreadLimit&) = delete;

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace pdl
