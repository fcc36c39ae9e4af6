#include "patch/trace_stream.hpp"

#include "patch/literal.hpp"

namespace patch {

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Running: return "running";
    case SessionStatus::Finished: return "finished";
    case SessionStatus::Failed: return "failed";
    case SessionStatus::Stopped: return "stopped";
  }
  return "?";
}

TraceSession::TraceSession(std::string id, std::size_t capacity)
    : id_(std::move(id)), capacity_(capacity) {}

bool TraceSession::append(TraceEvent e) {
  {
    std::lock_guard lock(mu_);
    if (end_.status != SessionStatus::Running) return false;
    if (events_.size() < capacity_) {
      events_.push_back(std::move(e));
      cv_.notify_all();
      return true;
    }
  }
  fail(ErrorKind::BudgetExceeded,
       "trace exceeded " + std::to_string(capacity_) + " events");
  cancel_ = true;
  return false;
}

bool TraceSession::finalize(SessionEnd end) {
  std::lock_guard lock(mu_);
  if (end_.status != SessionStatus::Running) return false;
  end_ = std::move(end);
  cv_.notify_all();
  return true;
}

void TraceSession::finish(std::vector<std::pair<std::string, Value>> outputs) {
  SessionEnd e;
  e.status = SessionStatus::Finished;
  e.outputs = std::move(outputs);
  finalize(std::move(e));
}

void TraceSession::fail(ErrorKind kind, std::string message, std::string step_id) {
  SessionEnd e;
  e.status = SessionStatus::Failed;
  e.error = kind;
  e.message = std::move(message);
  e.step_id = std::move(step_id);
  finalize(std::move(e));
}

void TraceSession::mark_stopped() {
  SessionEnd e;
  e.status = SessionStatus::Stopped;
  finalize(std::move(e));
}

SessionEnd TraceSession::end() const {
  std::lock_guard lock(mu_);
  return end_;
}

bool TraceSession::terminal() const {
  std::lock_guard lock(mu_);
  return end_.status != SessionStatus::Running;
}

std::size_t TraceSession::size() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

std::vector<TraceEvent> TraceSession::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<TraceEvent> TraceSession::read_from(std::uint64_t from,
                                                std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  const std::size_t first = from == 0 ? 0 : static_cast<std::size_t>(from - 1);
  cv_.wait_for(lock, timeout, [&] {
    return events_.size() > first || end_.status != SessionStatus::Running;
  });
  if (events_.size() <= first) return {};
  return std::vector<TraceEvent>(events_.begin() + static_cast<std::ptrdiff_t>(first), events_.end());
}

Subscription::Subscription(std::shared_ptr<const TraceSession> session, std::uint64_t from)
    : session_(std::move(session)), cursor_(from == 0 ? 1 : from) {}

std::optional<TraceEvent> Subscription::next_for(std::chrono::milliseconds timeout) {
  if (pos_ < pending_.size()) return pending_[pos_++];
  if (done_) return std::nullopt;
  // Terminal status is checked before reading so no event appended before
  // the end can be missed.
  const bool was_terminal = session_->terminal();
  pending_ = session_->read_from(cursor_, timeout);
  pos_ = 0;
  cursor_ += pending_.size();
  if (pending_.empty()) {
    if (was_terminal) done_ = true;
    return std::nullopt;
  }
  return pending_[pos_++];
}

std::optional<TraceEvent> Subscription::next() {
  while (true) {
    auto e = next_for(std::chrono::milliseconds(200));
    if (e || done_) return e;
  }
}

std::shared_ptr<TraceSession> SessionHub::create(std::size_t capacity) {
  std::lock_guard lock(mu_);
  auto s = std::make_shared<TraceSession>("s" + std::to_string(++counter_), capacity);
  sessions_.emplace(s->id(), s);
  return s;
}

std::shared_ptr<TraceSession> SessionHub::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw PatchError(ErrorKind::UnknownSession, "no session '" + id + "'");
  return it->second;
}

Subscription SessionHub::subscribe(const std::string& id, std::uint64_t from) const {
  return Subscription(find(id), from);
}

std::map<std::string, std::size_t> summarize(const std::vector<TraceEvent>& events) {
  std::map<std::string, std::size_t> counts;
  for (const auto& e : events) ++counts[std::string(to_string(e.kind))];
  return counts;
}

std::map<std::string, std::size_t> summarize(const TraceSession& session) {
  return summarize(session.events());
}

Json event_to_json(const TraceEvent& e) {
  Json j = Json::object();
  j["seq"] = e.seq;
  j["kind"] = std::string(to_string(e.kind));
  j["module"] = e.module;
  j["step"] = e.step_id;
  if (!e.var.empty()) j["var"] = e.var;
  if (!e.target.empty()) j["target"] = e.target;
  if (e.old_value) j["old"] = render_value(*e.old_value);
  if (e.value) j["value"] = render_value(*e.value);
  switch (e.kind) {
    case EventKind::Compare:
      j["lhs"] = e.lhs ? render_value(*e.lhs) : "";
      j["rhs"] = e.rhs ? render_value(*e.rhs) : "";
      j["op"] = e.op;
      j["result"] = e.result;
      break;
    case EventKind::Swap:
      j["i"] = e.i;
      j["j"] = e.j;
      break;
    case EventKind::LoopIter:
      j["iteration"] = e.iteration;
      break;
    default:
      break;
  }
  if (!e.snapshot.empty()) {
    Json snap = Json::object();
    for (const auto& [name, v] : e.snapshot) snap[name] = render_value(v);
    j["snapshot"] = std::move(snap);
  }
  return j;
}

TraceEvent event_from_json(const Json& j) {
  try {
    TraceEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw PatchError(ErrorKind::ParseError, "unknown event kind");
    e.kind = *kind;
    e.module = j.at("module").get<std::string>();
    e.step_id = j.at("step").get<std::string>();
    e.var = j.value("var", "");
    e.target = j.value("target", "");
    if (j.contains("old")) e.old_value = parse_literal(j["old"].get<std::string>());
    if (j.contains("value")) e.value = parse_literal(j["value"].get<std::string>());
    if (e.kind == EventKind::Compare) {
      e.lhs = parse_literal(j.at("lhs").get<std::string>());
      e.rhs = parse_literal(j.at("rhs").get<std::string>());
      e.op = j.at("op").get<std::string>();
      e.result = j.at("result").get<bool>();
    }
    e.i = j.value("i", std::int64_t{0});
    e.j = j.value("j", std::int64_t{0});
    e.iteration = j.value("iteration", std::int64_t{0});
    if (j.contains("snapshot")) {
      for (auto it = j["snapshot"].begin(); it != j["snapshot"].end(); ++it) {
        e.snapshot.emplace_back(it.key(), parse_literal(it.value().get<std::string>()));
      }
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw PatchError(ErrorKind::ParseError, std::string("malformed event: ") + ex.what());
  }
}

Json end_to_json(const SessionEnd& end) {
  Json j = Json::object();
  j["status"] = std::string(to_string(end.status));
  if (end.status == SessionStatus::Finished) {
    Json outs = Json::object();
    for (const auto& [name, v] : end.outputs) outs[name] = render_value(v);
    j["outputs"] = std::move(outs);
  }
  if (end.error) {
    j["error"] = std::string(to_string(*end.error));
    j["message"] = end.message;
    if (!end.step_id.empty()) j["step"] = end.step_id;
  }
  return j;
}

SessionEnd end_from_json(const Json& j) {
  SessionEnd end;
  const std::string status = j.at("status").get<std::string>();
  for (auto s : {SessionStatus::Running, SessionStatus::Finished, SessionStatus::Failed,
                 SessionStatus::Stopped}) {
    if (to_string(s) == status) end.status = s;
  }
  if (j.contains("outputs")) {
    for (auto it = j["outputs"].begin(); it != j["outputs"].end(); ++it) {
      end.outputs.emplace_back(it.key(), parse_literal(it.value().get<std::string>()));
    }
  }
  if (j.contains("error")) {
    const std::string kind = j["error"].get<std::string>();
    for (int k = 0; k <= static_cast<int>(ErrorKind::Io); ++k) {
      if (to_string(static_cast<ErrorKind>(k)) == kind) end.error = static_cast<ErrorKind>(k);
    }
    end.message = j.value("message", "");
    end.step_id = j.value("step", "");
  }
  return end;
}

std::string sse_event_frame(const TraceEvent& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: trace\ndata: " + event_to_json(e).dump() + "\n\n";
}

std::string sse_end_frame(const SessionEnd& end) {
  return "event: end\ndata: " + end_to_json(end).dump() + "\n\n";
}

}  // namespace patch
