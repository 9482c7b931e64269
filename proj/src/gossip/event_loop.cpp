#include "marketpalace/gossip/event_loop.hpp"

#include "marketpalace/common/log.hpp"

namespace marketpalace::gossip {

EventLoop::EventLoop() : thread_([this] { run(); }) {}

EventLoop::~EventLoop() { stop(); }

bool EventLoop::try_post(Task task) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_) return false;
    ready_.push(std::move(task));
  }
  cv_.notify_one();
  return true;
}

void EventLoop::post(Task task) { try_post(std::move(task)); }

void EventLoop::post_at(Clock::time_point when, Task task) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_) return;
    timers_.push(Timed{when, seq_++, std::move(task)});
  }
  cv_.notify_one();
}

void EventLoop::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable() && !in_loop()) thread_.join();
}

void EventLoop::run() {
  std::unique_lock lock(mutex_);
  for (;;) {
    if (stopping_) {
      // Finish already-queued work so blocked call()ers get their results.
      while (!ready_.empty()) {
        Task t = std::move(ready_.front());
        ready_.pop();
        lock.unlock();
        try {
          t();
        } catch (...) {
        }
        lock.lock();
      }
      return;
    }
    auto now = Clock::now();
    while (!timers_.empty() && timers_.top().when <= now) {
      ready_.push(std::move(const_cast<Timed&>(timers_.top()).task));
      timers_.pop();
    }
    if (!ready_.empty()) {
      Task t = std::move(ready_.front());
      ready_.pop();
      lock.unlock();
      try {
        t();
      } catch (const std::exception& e) {
        log::error("loop", std::string("task failed: ") + e.what());
      }
      lock.lock();
      continue;
    }
    if (timers_.empty()) {
      cv_.wait(lock);
    } else {
      cv_.wait_until(lock, timers_.top().when);
    }
  }
}

}  // namespace marketpalace::gossip
