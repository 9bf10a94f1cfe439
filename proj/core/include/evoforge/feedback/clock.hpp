#pragma once

#include <chrono>
#include <mutex>

#include "evoforge/domain.hpp"

namespace evoforge::feedback {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  }
};

/// Manually advanced clock for simulation and tests.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Timestamp start = Timestamp{}) : now_(start) {}

  Timestamp now() const override {
    std::lock_guard lock(mutex_);
    return now_;
  }
  void set(Timestamp t) {
    std::lock_guard lock(mutex_);
    now_ = t;
  }
  void advance(std::chrono::seconds d) {
    std::lock_guard lock(mutex_);
    now_ += d;
  }

 private:
  mutable std::mutex mutex_;
  Timestamp now_;
};

}  // namespace evoforge::feedback
