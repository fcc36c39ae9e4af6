#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patch/document.hpp"
#include "patch/error.hpp"
#include "patch/trace.hpp"

namespace patch {

enum class SessionStatus { Running, Finished, Failed, Stopped };

std::string_view to_string(SessionStatus s);

struct SessionEnd {
  SessionStatus status = SessionStatus::Running;
  std::vector<std::pair<std::string, Value>> outputs;  // finished
  std::optional<ErrorKind> error;                      // failed
  std::string message;
  std::string step_id;

  friend bool operator==(const SessionEnd&, const SessionEnd&) = default;
};

// Append-only event log of one run. One producer, any number of readers.
class TraceSession {
 public:
  explicit TraceSession(std::string id, std::size_t capacity = 1'000'000);

  const std::string& id() const { return id_; }

  // Appends in seq order. Past capacity the session fails with
  // budget-exceeded and the call returns false.
  bool append(TraceEvent e);

  // Terminal transitions; only the first one takes effect.
  void finish(std::vector<std::pair<std::string, Value>> outputs);
  void fail(ErrorKind kind, std::string message, std::string step_id = {});
  void mark_stopped();

  SessionEnd end() const;
  bool terminal() const;
  std::size_t size() const;
  std::vector<TraceEvent> events() const;

  // Events with seq >= from that are available now; waits up to `timeout`
  // for at least one when none are and the session is still running.
  std::vector<TraceEvent> read_from(std::uint64_t from, std::chrono::milliseconds timeout) const;

  // Set by a forced stop; the run polls it.
  std::atomic<bool>& cancel_flag() { return cancel_; }

 private:
  bool finalize(SessionEnd end);

  std::string id_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<TraceEvent> events_;
  SessionEnd end_;
  std::atomic<bool> cancel_{false};
};

// In-order feed over one session: replays stored events, then follows live
// ones until the session ends.
class Subscription {
 public:
  Subscription(std::shared_ptr<const TraceSession> session, std::uint64_t from);

  // Next event, blocking while the session runs; nullopt once the session
  // is terminal and every event was delivered.
  std::optional<TraceEvent> next();
  // Like next, but gives up after `timeout` (returns nullopt with
  // done() still false).
  std::optional<TraceEvent> next_for(std::chrono::milliseconds timeout);
  bool done() const { return done_; }
  const TraceSession& session() const { return *session_; }

 private:
  std::shared_ptr<const TraceSession> session_;
  std::uint64_t cursor_;
  std::vector<TraceEvent> pending_;
  std::size_t pos_ = 0;
  bool done_ = false;
};

class SessionHub {
 public:
  std::shared_ptr<TraceSession> create(std::size_t capacity = 1'000'000);
  // Throws UnknownSession.
  std::shared_ptr<TraceSession> find(const std::string& id) const;
  Subscription subscribe(const std::string& id, std::uint64_t from) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<TraceSession>> sessions_;
  std::uint64_t counter_ = 0;
};

// Count of events per kind name.
std::map<std::string, std::size_t> summarize(const std::vector<TraceEvent>& events);
std::map<std::string, std::size_t> summarize(const TraceSession& session);

// Wire encoding: one JSON object per event; values travel as literals.
Json event_to_json(const TraceEvent& e);
TraceEvent event_from_json(const Json& j);
Json end_to_json(const SessionEnd& end);
SessionEnd end_from_json(const Json& j);

// Server-sent event frames.
std::string sse_event_frame(const TraceEvent& e);
std::string sse_end_frame(const SessionEnd& end);

}  // namespace patch
