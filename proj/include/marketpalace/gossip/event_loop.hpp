#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <future>
#include <mutex>
#include <queue>
#include <thread>
#include <type_traits>
#include <vector>

#include "marketpalace/common/error.hpp"

namespace marketpalace::gossip {

// Single-threaded executor with timers. Every mutation of node state runs
// here, so handlers need no further locking.
class EventLoop {
 public:
  using Clock = std::chrono::steady_clock;
  using Task = std::function<void()>;

  EventLoop();
  ~EventLoop();
  EventLoop(const EventLoop&) = delete;
  EventLoop& operator=(const EventLoop&) = delete;

  void post(Task task);
  void post_at(Clock::time_point when, Task task);
  /// Stops accepting work, drops pending timers and joins the thread.
  void stop();
  bool in_loop() const noexcept { return std::this_thread::get_id() == thread_.get_id(); }

  /// Runs `f` on the loop and waits for its result. Runs inline when
  /// already on the loop. Throws Error(io) if the loop has stopped.
  template <class F>
  auto call(F&& f) -> std::invoke_result_t<F> {
    using R = std::invoke_result_t<F>;
    if (in_loop()) return f();
    auto task = std::make_shared<std::packaged_task<R()>>(std::forward<F>(f));
    auto result = task->get_future();
    if (!try_post([task] { (*task)(); })) throw Error(Errc::io, "event loop stopped");
    return result.get();
  }

 private:
  struct Timed {
    Clock::time_point when;
    std::uint64_t seq;
    Task task;
    bool operator>(const Timed& o) const {
      return when != o.when ? when > o.when : seq > o.seq;
    }
  };

  bool try_post(Task task);
  void run();

  std::mutex mutex_;
  std::condition_variable cv_;
  std::queue<Task> ready_;
  std::priority_queue<Timed, std::vector<Timed>, std::greater<>> timers_;
  std::uint64_t seq_ = 0;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace marketpalace::gossip
