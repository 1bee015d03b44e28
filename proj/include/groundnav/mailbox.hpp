#pragma once

#include <cstdint>
#include <memory>
#include <mutex>

namespace groundnav::runtime {

/// Single-slot, overwrite-on-publish channel carrying immutable snapshots.
/// Readers always see the most recent value; older ones are dropped.
template <typename T>
class Mailbox {
 public:
  void publish(std::shared_ptr<const T> value) {
    std::lock_guard lock(mutex_);
    value_ = std::move(value);
    ++sequence_;
  }

  std::shared_ptr<const T> latest() const {
    std::lock_guard lock(mutex_);
    return value_;
  }

  /// Number of publishes so far; lets a reader detect fresh data.
  std::uint64_t sequence() const {
    std::lock_guard lock(mutex_);
    return sequence_;
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const T> value_;
  std::uint64_t sequence_ = 0;
};

}  // namespace groundnav::runtime
