#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoforge/store/event.hpp"

namespace evoforge::store {

/// Incremental decoder: feed bytes in any chunking; complete lines are
/// validated as they arrive.
class LogReader {
 public:
  LogReader() = default;

  /// Throws CorruptLogError on the first invalid complete line.
  void feed(std::string_view bytes);
  /// Throws CorruptLogError when an unterminated record remains.
  void finish() const;

  const std::vector<Event>& events() const noexcept { return events_; }
  /// Bytes covered by complete, valid records.
  std::size_t consumed() const noexcept { return consumed_; }
  bool has_partial() const noexcept { return !partial_.empty(); }

 private:
  void take_line(std::string_view line);

  std::vector<Event> events_;
  std::string partial_;
  std::size_t consumed_ = 0;
};

/// Strict decode of a whole log. Any damage, including a torn final record,
/// raises CorruptLogError naming the first bad seq.
std::vector<Event> read_log(std::string_view bytes);

/// concept_created and concept_retired only take effect once a later
/// campaign_started or activation_completed commits them.
bool is_staged(EventKind kind);
bool is_commit(EventKind kind);

/// Number of leading events that form committed groups.
std::size_t committed_length(std::span<const Event> events);

struct Recovery {
  std::vector<Event> events;
  std::size_t valid_bytes = 0;    // length of the log to keep
  bool torn_tail = false;         // the last record was incomplete or damaged
  std::size_t dropped_uncommitted = 0;
};

/// Crash recovery: drops a damaged final record and any uncommitted staged
/// tail. Damage before the final record is still CorruptLogError.
Recovery recover_log(std::string_view bytes);

/// Append-only event log, either a file or an in-memory buffer.
class EventLog {
 public:
  static EventLog in_memory();
  /// Opens (or creates) `path`, recovering and truncating a torn tail.
  /// With durable=false appends skip fsync (tests and simulation).
  static EventLog open_file(const std::filesystem::path& path, bool durable = true);

  EventLog(EventLog&& other) noexcept;
  EventLog& operator=(EventLog&& other) noexcept;
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;
  ~EventLog();

  /// Appends the events in one write (and one fsync); returns the last seq.
  std::uint64_t append(std::span<const NewEvent> events);
  std::uint64_t append(NewEvent event);

  std::uint64_t last_seq() const noexcept { return events_.size(); }
  const std::vector<Event>& events() const noexcept { return events_; }
  const Recovery& recovery() const noexcept { return recovery_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  /// The raw bytes of the log.
  std::string contents() const;

 private:
  EventLog() = default;
  void write_bytes(const std::string& bytes);

  std::filesystem::path path_;
  int fd_ = -1;
  bool durable_ = false;
  std::size_t size_ = 0;
  std::string memory_;
  std::vector<Event> events_;
  Recovery recovery_;
};

}  // namespace evoforge::store
