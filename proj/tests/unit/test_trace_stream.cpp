#include <doctest.h>

#include <thread>

#include "../support.hpp"
#include "patch/error.hpp"
#include "patch/trace_stream.hpp"

using namespace patch;
using namespace patch::test;

namespace {

// Runs the reference sort into a fresh session of the hub.
std::shared_ptr<TraceSession> sorted_session(SessionHub& hub, const std::vector<std::int64_t>& xs) {
  auto s = hub.create();
  RunOptions opts;
  opts.keep_trace = false;
  opts.on_event = [&](const TraceEvent& e) { s->append(e); };
  RunResult r = sort_run(bubble_sort().program, xs, opts);
  s->finish(std::move(r.outputs));
  return s;
}

std::vector<TraceEvent> drain(Subscription sub) {
  std::vector<TraceEvent> out;
  while (auto e = sub.next()) out.push_back(*e);
  CHECK(sub.done());
  return out;
}

}  // namespace

TEST_SUITE("trace-stream") {
  TEST_CASE("replay from the start and past the end") {
    SessionHub hub;
    auto s = sorted_session(hub, {29, -4, 2, 17, 45, 9});
    const auto reference = sort_run(bubble_sort().program, {29, -4, 2, 17, 45, 9}).trace;
    const auto all = drain(hub.subscribe(s->id(), 1));
    CHECK(all == reference);
    CHECK(s->end().status == SessionStatus::Finished);
    CHECK(drain(hub.subscribe(s->id(), reference.size() + 1)).empty());
    CHECK(drain(hub.subscribe(s->id(), 10)).size() == reference.size() - 9);
    try {
      hub.subscribe("nope", 1);
      FAIL("expected unknown-session");
    } catch (const PatchError& e) {
      CHECK(e.kind() == ErrorKind::UnknownSession);
    }
  }

  TEST_CASE("two subscriptions replay the same events") {
    SessionHub hub;
    auto s = sorted_session(hub, {4, 3, 2, 1});
    CHECK(drain(hub.subscribe(s->id(), 1)) == drain(hub.subscribe(s->id(), 1)));
  }

  TEST_CASE("summaries count swaps") {
    SessionHub hub;
    CHECK(summarize(*sorted_session(hub, {29, -4, 2, 17, 45, 9}))["swap"] == inversions({29, -4, 2, 17, 45, 9}));
    CHECK(summarize(*sorted_session(hub, {1, 2, 3})).count("swap") == 0);
    CHECK(summarize(*sorted_session(hub, {3, 2, 1}))["swap"] == 3);
  }

  TEST_CASE("live subscribers see events in order") {
    SessionHub hub;
    auto s = hub.create();
    std::vector<TraceEvent> seen[3];
    std::vector<std::thread> readers;
    for (auto& out : seen) {
      readers.emplace_back([&, sub = hub.subscribe(s->id(), 1)]() mutable {
        while (auto e = sub.next()) out.push_back(*e);
      });
    }
    for (std::uint64_t i = 1; i <= 500; ++i) {
      TraceEvent e;
      e.seq = i;
      e.kind = EventKind::LoopIter;
      e.iteration = static_cast<std::int64_t>(i);
      s->append(e);
    }
    s->finish({});
    for (auto& t : readers) t.join();
    for (const auto& out : seen) {
      REQUIRE(out.size() == 500);
      for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].seq == i + 1);
    }
  }

  TEST_CASE("terminal transitions happen once") {
    TraceSession s("s", 3);
    for (int i = 1; i <= 3; ++i) CHECK(s.append(TraceEvent{.seq = static_cast<std::uint64_t>(i)}));
    CHECK_FALSE(s.append(TraceEvent{.seq = 4}));
    CHECK(s.end().status == SessionStatus::Failed);
    CHECK(s.end().error == ErrorKind::BudgetExceeded);
    s.finish({});
    s.mark_stopped();
    CHECK(s.end().status == SessionStatus::Failed);
    CHECK(s.size() == 3);
  }

  TEST_CASE("wire encoding round trips") {
    const auto trace = sort_run(bubble_sort().program, {3, 1, 2}).trace;
    for (const auto& e : trace) CHECK(event_from_json(event_to_json(e)) == e);
    SessionEnd end;
    end.status = SessionStatus::Finished;
    end.outputs = {{"list", int_list({1, 2, 3})}};
    CHECK(end_from_json(end_to_json(end)) == end);
    const std::string frame = sse_event_frame(trace.front());
    CHECK(frame.rfind("id: 1\nevent: trace\ndata: ", 0) == 0);
    CHECK(frame.substr(frame.size() - 2) == "\n\n");
  }
}
