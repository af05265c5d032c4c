#ifndef IQA_PARALLEL_HPP
#define IQA_PARALLEL_HPP

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace iqa {

// Fixed-size pool that runs index-parallel loops. Work items are claimed
// dynamically, so callers must write results into per-index slots and
// combine them in index order to stay independent of the thread count.
class WorkerPool {
public:
  // threads <= 0 selects std::thread::hardware_concurrency().
  explicit WorkerPool(int threads = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const noexcept { return static_cast<int>(workers_.size()) + 1; }

  // Runs fn(i) for i in [0, count). Blocks until all items finish; rethrows
  // the first exception raised by any item.
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

private:
  void worker_loop();
  void drain();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t count_ = 0;
  std::atomic<std::size_t> next_{0};
  std::size_t active_ = 0;
  std::size_t generation_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

int resolve_thread_count(int requested);

} // namespace iqa

#endif
