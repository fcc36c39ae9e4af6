// Local HTTP service for the editor: documents, validation, run sessions with
// a server-sent event feed, preview and code emission.
//
//   PUT    /documents/{id}             store; 200 with the validation report
//   GET    /documents/{id}             canonical document
//   DELETE /documents/{id}
//   POST   /documents/{id}/runs        {module?, inputs?, console?, watch?} -> 201 {session}
//   GET    /runs/{sid}                 status and per-kind event counts
//   GET    /runs/{sid}/events?from=N   text/event-stream, then "event: end"
//   POST   /runs/{sid}/stop
//   POST   /documents/{id}/emit        {dialect, module?} -> source files
//   POST   /documents/{id}/preview     {module?, inputs?, console?, step}
//   GET    /dialects
//
// Errors are {"error": <kind>, "message": <text>} with 400 (malformed), 404
// (unknown id), 409 (run on an invalid document) or 422 (inputs do not
// resolve, or no lowering for a construct).
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "patch/document.hpp"
#include "patch/trace_stream.hpp"

namespace patch {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 7341;  // 0 picks a free port
  std::size_t session_capacity = 1'000'000;
  std::filesystem::path store;  // when set, documents persist as <id>.patch.json
};

class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread. Returns the bound port; throws
  // Io when the address cannot be bound.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();

  int port() const { return port_; }
  SessionHub& sessions() { return hub_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ServiceOptions options_;
  SessionHub hub_;
  int port_ = 0;
  std::thread server_thread_;
};

}  // namespace patch
