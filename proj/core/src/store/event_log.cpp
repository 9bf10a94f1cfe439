#include "evoforge/store/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "evoforge/errors.hpp"

namespace evoforge::store {

void LogReader::take_line(std::string_view line) {
  events_.push_back(decode_record(line, events_.size() + 1));
}

void LogReader::feed(std::string_view bytes) {
  while (!bytes.empty()) {
    const auto nl = bytes.find('\n');
    if (nl == std::string_view::npos) {
      partial_.append(bytes);
      return;
    }
    if (partial_.empty()) {
      take_line(bytes.substr(0, nl));
      consumed_ += nl + 1;
    } else {
      partial_.append(bytes.substr(0, nl));
      take_line(partial_);
      consumed_ += partial_.size() + 1;
      partial_.clear();
    }
    bytes.remove_prefix(nl + 1);
  }
}

void LogReader::finish() const {
  if (!partial_.empty()) {
    throw CorruptLogError(static_cast<std::int64_t>(events_.size() + 1),
                          "truncated record at end of log");
  }
}

std::vector<Event> read_log(std::string_view bytes) {
  LogReader reader;
  reader.feed(bytes);
  reader.finish();
  return reader.events();
}

bool is_staged(EventKind kind) {
  return kind == EventKind::kConceptCreated || kind == EventKind::kConceptRetired;
}

bool is_commit(EventKind kind) {
  return kind == EventKind::kCampaignStarted || kind == EventKind::kActivationCompleted;
}

std::size_t committed_length(std::span<const Event> events) {
  std::size_t n = events.size();
  while (n > 0 && is_staged(events[n - 1].kind)) --n;
  return n;
}

Recovery recover_log(std::string_view bytes) {
  Recovery out;
  std::vector<std::size_t> line_sizes;
  std::size_t pos = 0;
  std::uint64_t seq = 1;
  while (pos < bytes.size()) {
    const auto nl = bytes.find('\n', pos);
    const bool last = nl == std::string_view::npos || nl + 1 == bytes.size();
    const std::string_view line =
        bytes.substr(pos, (nl == std::string_view::npos ? bytes.size() : nl) - pos);
    try {
      if (nl == std::string_view::npos) {
        throw CorruptLogError(static_cast<std::int64_t>(seq), "truncated record at end of log");
      }
      out.events.push_back(decode_record(line, seq));
      line_sizes.push_back(line.size() + 1);
    } catch (const CorruptLogError&) {
      if (!last) throw;
      out.torn_tail = true;
      break;
    }
    ++seq;
    pos = nl + 1;
  }
  out.valid_bytes = pos;

  const std::size_t keep = committed_length(out.events);
  out.dropped_uncommitted = out.events.size() - keep;
  while (out.events.size() > keep) {
    out.valid_bytes -= line_sizes[out.events.size() - 1];
    out.events.pop_back();
  }
  return out;
}

EventLog EventLog::in_memory() { return EventLog(); }

EventLog EventLog::open_file(const std::filesystem::path& path, bool durable) {
  EventLog log;
  log.path_ = path;
  log.durable_ = durable;
  std::string bytes;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    bytes = ss.str();
  }
  log.recovery_ = recover_log(bytes);
  log.events_ = log.recovery_.events;
  log.fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (log.fd_ < 0) {
    throw std::system_error(errno, std::generic_category(), "open " + path.string());
  }
  if (log.recovery_.valid_bytes != bytes.size()) {
    if (::ftruncate(log.fd_, static_cast<off_t>(log.recovery_.valid_bytes)) != 0) {
      throw std::system_error(errno, std::generic_category(), "truncate " + path.string());
    }
    if (durable) ::fsync(log.fd_);
  }
  log.size_ = log.recovery_.valid_bytes;
  return log;
}

EventLog::EventLog(EventLog&& other) noexcept
    : path_(std::move(other.path_)),
      fd_(std::exchange(other.fd_, -1)),
      durable_(other.durable_),
      size_(other.size_),
      memory_(std::move(other.memory_)),
      events_(std::move(other.events_)),
      recovery_(std::move(other.recovery_)) {}

EventLog& EventLog::operator=(EventLog&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    durable_ = other.durable_;
    size_ = other.size_;
    memory_ = std::move(other.memory_);
    events_ = std::move(other.events_);
    recovery_ = std::move(other.recovery_);
  }
  return *this;
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLog::write_bytes(const std::string& bytes) {
  if (fd_ < 0) {
    memory_ += bytes;
    size_ += bytes.size();
    return;
  }
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::pwrite(fd_, bytes.data() + written, bytes.size() - written,
                               static_cast<off_t>(size_ + written));
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      // Leave no partial record behind.
      [[maybe_unused]] const int rc = ::ftruncate(fd_, static_cast<off_t>(size_));
      if (err == ENOSPC || err == EDQUOT) {
        throw Error(ErrorCode::kStorageFull, "event log " + path_.string() + ": disk full");
      }
      throw std::system_error(err, std::generic_category(), "write " + path_.string());
    }
    written += static_cast<std::size_t>(n);
  }
  if (durable_ && ::fsync(fd_) != 0) {
    throw std::system_error(errno, std::generic_category(), "fsync " + path_.string());
  }
  size_ += bytes.size();
}

std::uint64_t EventLog::append(std::span<const NewEvent> events) {
  std::vector<Event> staged;
  std::string bytes;
  std::uint64_t seq = last_seq();
  for (const NewEvent& e : events) {
    staged.push_back(Event{++seq, e.kind, e.at, e.payload});
    bytes += encode_record(staged.back());
  }
  write_bytes(bytes);
  events_.insert(events_.end(), std::make_move_iterator(staged.begin()),
                 std::make_move_iterator(staged.end()));
  return last_seq();
}

std::uint64_t EventLog::append(NewEvent event) {
  return append(std::span<const NewEvent>(&event, 1));
}

std::string EventLog::contents() const {
  if (fd_ < 0) return memory_;
  std::string out(size_, '\0');
  std::size_t got = 0;
  while (got < size_) {
    const ssize_t n = ::pread(fd_, out.data() + got, size_ - got, static_cast<off_t>(got));
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "read " + path_.string());
    }
    got += static_cast<std::size_t>(n);
  }
  return out;
}

}  // namespace evoforge::store
