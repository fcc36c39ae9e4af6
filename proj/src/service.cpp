#include "patch/service.hpp"

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <regex>
#include <set>

#include "patch/codegen.hpp"
#include "patch/error.hpp"
#include "patch/identifier.hpp"
#include "patch/interpreter.hpp"
#include "patch/literal.hpp"
#include "patch/resolver.hpp"
#include "patch/validate.hpp"

namespace patch {

namespace {

using Snapshot = std::shared_ptr<const PatchDocument>;

struct HttpError {
  int status;
  std::string kind;
  std::string message;
};

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view kind, const std::string& message) {
  reply(res, status, Json{{"error", std::string(kind)}, {"message", message}});
}

int status_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::VersionUnsupported:
    case ErrorKind::LiteralSyntaxError:
    case ErrorKind::MalformedIdentifier:
    case ErrorKind::IncompatibleAssignment:
      return 400;
    case ErrorKind::UnknownModule:
    case ErrorKind::UnknownSession:
      return 404;
    case ErrorKind::InvalidProgram:
      return 409;
    default:
      return 422;
  }
}

Json body_of(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw HttpError{400, "parse-error", "request body is not a JSON object"};
  return j;
}

std::string string_member(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  if (!j[key].is_string()) throw HttpError{400, "parse-error", std::string("'") + key + "' must be a string"};
  return j[key].get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw HttpError{400, "parse-error", std::string("'") + key + "' must be an array"};
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw HttpError{400, "parse-error", std::string("'") + key + "' holds strings"};
    out.push_back(v.get<std::string>());
  }
  return out;
}

// Inputs travel as literal text; bare JSON numbers, booleans and arrays are
// accepted too and read through their JSON text.
std::string literal_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::vector<Argument> arguments_of(const ModuleDef& m, const Json& body) {
  if (!body.contains("inputs") || body["inputs"].is_null()) return {};
  const Json& in = body["inputs"];
  if (in.is_object()) {
    std::vector<std::pair<std::string, std::string>> raw;
    for (const auto& [k, v] : in.items()) raw.emplace_back(k, literal_text(v));
    return parse_arguments(m, raw);
  }
  if (in.is_array()) {
    std::vector<Argument> out;
    for (const auto& v : in) out.push_back({std::nullopt, parse_literal(literal_text(v))});
    return out;
  }
  throw HttpError{400, "parse-error", "'inputs' must be an object or an array"};
}

const ModuleDef& module_of(const PatchProgram& program, const std::string& name) {
  const ModuleDef* m = name.empty() ? program.entry_module() : program.find_module(name);
  if (!m) throw PatchError(ErrorKind::UnknownModule, "no module '" + (name.empty() ? program.entry : name) + "'");
  return *m;
}

void check_resolves(const ModuleDef& m, const std::vector<Argument>& args) {
  CallSignature sig;
  for (const auto& a : args) {
    std::optional<std::string> name;
    if (a.name) name = normalize_identifier(*a.name);
    sig.actuals.push_back({name, type_of(a.value)});
  }
  resolve_call(sig, m);
}

Json report_json(const ValidationReport& r) {
  Json findings = Json::array();
  for (const auto& f : r.findings) {
    findings.push_back({{"module", f.module}, {"step", f.step_id}, {"rule", f.rule}, {"message", f.message}});
  }
  return Json{{"ok", r.ok()}, {"findings", std::move(findings)}};
}

// Findings that leave the tree unwalkable. Preview tolerates the rest so a
// half-drawn program can still be stepped through.
bool structural(const ValidationReport& r) {
  static const std::set<std::string> rules = {"tree-shape", "dangling-ref", "duplicate-id", "root-kind",
                                              "group-arity", "payload-kind", "no-children",
                                              "exit-outside", "duplicate-module", "entry-missing"};
  for (const auto& f : r.findings) {
    if (rules.count(f.rule)) return true;
  }
  return false;
}

Json pairs_json(const std::vector<std::pair<std::string, Value>>& values) {
  Json j = Json::object();
  for (const auto& [name, v] : values) j[name] = render_value(v);
  return j;
}

Json status_json(const TraceSession& s) {
  Json j = end_to_json(s.end());
  j["session"] = s.id();
  j["events"] = s.size();
  j["counts"] = summarize(s);
  return j;
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  SessionHub& hub;
  httplib::Server server;
  std::mutex mu;
  std::map<std::string, Snapshot> documents;
  std::mutex runs_mu;
  std::vector<std::pair<std::shared_ptr<TraceSession>, std::thread>> runs;

  Impl(ServiceOptions o, SessionHub& h) : options(std::move(o)), hub(h) { routes(); }

  ~Impl() {
    std::lock_guard lock(runs_mu);
    for (auto& [session, thread] : runs) {
      session->cancel_flag() = true;
      if (thread.joinable()) thread.join();
    }
  }

  std::filesystem::path stored_path(const std::string& id) const {
    return options.store / (id + ".patch.json");
  }

  Snapshot find(const std::string& id) {
    std::lock_guard lock(mu);
    if (auto it = documents.find(id); it != documents.end()) return it->second;
    if (!options.store.empty() && std::filesystem::exists(stored_path(id))) {
      auto doc = std::make_shared<const PatchDocument>(load_document(stored_path(id).string()));
      documents[id] = doc;
      return doc;
    }
    throw HttpError{404, "unknown-document", "no document '" + id + "'"};
  }

  void put(const std::string& id, PatchDocument doc) {
    std::lock_guard lock(mu);
    if (!options.store.empty()) {
      std::filesystem::create_directories(options.store);
      save_document(doc, stored_path(id).string());
    }
    documents[id] = std::make_shared<const PatchDocument>(std::move(doc));
  }

  void erase(const std::string& id) {
    std::lock_guard lock(mu);
    bool found = documents.erase(id) > 0;
    if (!options.store.empty()) {
      std::error_code ec;
      found = std::filesystem::remove(stored_path(id), ec) || found;
    }
    if (!found) throw HttpError{404, "unknown-document", "no document '" + id + "'"};
  }

  template <class F>
  void guarded(const httplib::Request& req, httplib::Response& res, F&& f) {
    try {
      if (req.path_params.count("id") && !std::regex_match(req.path_params.at("id"), id_pattern())) {
        throw HttpError{400, "malformed-identifier", "document ids use letters, digits, '.', '_' and '-'"};
      }
      f();
    } catch (const HttpError& e) {
      reply_error(res, e.status, e.kind, e.message);
    } catch (const PatchError& e) {
      reply_error(res, status_for(e.kind()), to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "internal", e.what());
    }
  }

  static const std::regex& id_pattern() {
    static const std::regex re("[A-Za-z0-9_.-]+");
    return re;
  }

  std::string start_run(Snapshot doc, const ModuleDef& m, std::vector<Argument> args,
                        std::vector<std::string> console, std::vector<std::string> watch) {
    auto session = hub.create(options.session_capacity);
    std::thread worker([doc, session, module = m.name, args = std::move(args),
                        console = std::move(console), watch = std::move(watch)] {
      RunOptions opts;
      opts.keep_trace = false;
      opts.watch = watch;
      opts.cancel = &session->cancel_flag();
      opts.on_event = [&](const TraceEvent& e) {
        if (!session->append(e)) session->cancel_flag() = true;
      };
      ScriptedConsole io(console);
      InMemoryRepository repo;
      try {
        RunResult r = run_module(doc->program, module, args, io, repo, opts);
        if (r.status == RunResult::Status::Cancelled) {
          session->mark_stopped();
        } else {
          session->finish(std::move(r.outputs));
        }
      } catch (const PatchError& e) {
        session->fail(e.kind(), e.what(), e.step_id());
      } catch (const std::exception& e) {
        session->fail(ErrorKind::InvalidProgram, e.what());
      }
    });
    std::lock_guard lock(runs_mu);
    runs.emplace_back(session, std::move(worker));
    return session->id();
  }

  void routes() {
    server.Put("/documents/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        PatchDocument doc = parse_document(req.body);
        Json body = report_json(validate(doc.program));
        put(req.path_params.at("id"), std::move(doc));
        Json out{{"id", req.path_params.at("id")}};
        out.update(body);
        reply(res, 200, out);
      });
    });

    server.Get("/documents/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        res.status = 200;
        res.set_content(serialize_document(*find(req.path_params.at("id"))), std::string(kMediaType));
      });
    });

    server.Delete("/documents/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        erase(req.path_params.at("id"));
        res.status = 204;
      });
    });

    server.Post("/documents/:id/runs", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        Snapshot doc = find(req.path_params.at("id"));
        const Json body = body_of(req);
        const ValidationReport report = validate(doc->program);
        if (!report.ok()) {
          Json out{{"error", "invalid-program"}, {"message", "the document has validation findings"}};
          out["findings"] = report_json(report)["findings"];
          reply(res, 409, out);
          return;
        }
        const ModuleDef& m = module_of(doc->program, string_member(body, "module"));
        auto args = arguments_of(m, body);
        check_resolves(m, args);
        const std::string sid =
            start_run(doc, m, std::move(args), string_list(body, "console"), string_list(body, "watch"));
        reply(res, 201, Json{{"session", sid}, {"module", m.name}});
      });
    });

    server.Get("/runs/:sid", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] { reply(res, 200, status_json(*hub.find(req.path_params.at("sid")))); });
    });

    server.Post("/runs/:sid/stop", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        auto session = hub.find(req.path_params.at("sid"));
        session->cancel_flag() = true;
        for (int i = 0; i < 200 && !session->terminal(); ++i) {
          std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        session->mark_stopped();
        reply(res, 200, status_json(*session));
      });
    });

    server.Get("/runs/:sid/events", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        std::uint64_t from = 1;
        if (req.has_param("from")) {
          const std::string text = req.get_param_value("from");
          try {
            std::size_t used = 0;
            from = std::stoull(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
          } catch (const std::exception&) {
            throw HttpError{400, "parse-error", "'from' must be a sequence number"};
          }
        }
        auto sub = std::make_shared<Subscription>(hub.subscribe(req.path_params.at("sid"), from));
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [sub](std::size_t, httplib::DataSink& sink) {
          std::string chunk;
          for (int n = 0; n < 256; ++n) {
            auto e = n == 0 ? sub->next_for(std::chrono::milliseconds(250))
                            : sub->next_for(std::chrono::milliseconds(0));
            if (!e) break;
            chunk += sse_event_frame(*e);
          }
          if (sub->done()) chunk += sse_end_frame(sub->session().end());
          if (!chunk.empty() && !sink.write(chunk.data(), chunk.size())) return false;
          if (sub->done()) sink.done();
          return true;
        });
      });
    });

    server.Post("/documents/:id/emit", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        Snapshot doc = find(req.path_params.at("id"));
        const Json body = body_of(req);
        std::string dialect = string_member(body, "dialect");
        if (dialect.empty()) dialect = "cxx";
        const ModuleDef& m = module_of(doc->program, string_member(body, "module"));
        const SourceText src = emit(doc->program, m.name, dialect);
        Json files = Json::array();
        files.push_back({{"name", src.file_name}, {"text", src.text}});
        files.push_back({{"name", src.harness_file_name}, {"text", src.harness}});
        reply(res, 200, Json{{"dialect", src.dialect}, {"module", src.module},
                             {"entry", src.entry_symbol}, {"files", std::move(files)}});
      });
    });

    server.Post("/documents/:id/preview", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        Snapshot doc = find(req.path_params.at("id"));
        const Json body = body_of(req);
        const ValidationReport report = validate(doc->program);
        if (structural(report)) {
          Json out{{"error", "invalid-program"}, {"message", "the document is not a well-formed tree"}};
          out["findings"] = report_json(report)["findings"];
          reply(res, 409, out);
          return;
        }
        const ModuleDef& m = module_of(doc->program, string_member(body, "module"));
        auto args = arguments_of(m, body);
        check_resolves(m, args);
        RunOptions opts;
        opts.keep_trace = false;
        std::size_t events = 0;
        opts.on_event = [&](const TraceEvent&) { ++events; };
        std::string step = string_member(body, "step");
        if (!step.empty()) opts.preview_until = step;
        ScriptedConsole io(string_list(body, "console"));
        InMemoryRepository repo;
        Json out{{"module", m.name}};
        if (!step.empty()) out["step"] = step;
        try {
          RunResult r = run_module(doc->program, m.name, args, io, repo, opts);
          out["status"] = r.status == RunResult::Status::Halted ? "halted" : "finished";
          out["outputs"] = pairs_json(r.outputs);
          out["variables"] = pairs_json(r.variables);
        } catch (const PatchError& e) {
          if (e.kind() == ErrorKind::InvalidProgram && e.step_id().empty()) throw HttpError{400, "invalid-program", e.what()};
          out["status"] = "failed";
          out["error"] = std::string(to_string(e.kind()));
          out["message"] = e.what();
          if (!e.step_id().empty()) out["failed_step"] = e.step_id();
        }
        out["displays"] = io.output();
        out["events"] = events;
        reply(res, 200, out);
      });
    });

    server.Get("/dialects", [](const httplib::Request&, httplib::Response& res) {
      Json list = Json::array();
      for (const auto& id : dialect_ids()) {
        const Dialect& d = find_dialect(id);
        const auto tool = d.toolchain();
        list.push_back({{"id", id},
                        {"block_style", d.traits().block_style},
                        {"extension", d.traits().extension},
                        {"toolchain", tool ? Json(*tool) : Json(nullptr)}});
      }
      reply(res, 200, list);
    });
  }
};

Service::Service(ServiceOptions options)
    : impl_(std::make_unique<Impl>(options, hub_)), options_(std::move(options)) {}

Service::~Service() {
  stop();
  impl_.reset();
}

int Service::start() {
  const int port = options_.port == 0 ? impl_->server.bind_to_any_port(options_.host)
                                      : (impl_->server.bind_to_port(options_.host, options_.port) ? options_.port : -1);
  if (port < 0) {
    throw PatchError(ErrorKind::Io, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  port_ = port;
  server_thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void Service::run() {
  if (options_.port == 0) {
    port_ = impl_->server.bind_to_any_port(options_.host);
  } else if (impl_->server.bind_to_port(options_.host, options_.port)) {
    port_ = options_.port;
  } else {
    port_ = -1;
  }
  if (port_ < 0) {
    throw PatchError(ErrorKind::Io, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  impl_->server.listen_after_bind();
}

void Service::stop() {
  if (impl_) impl_->server.stop();
  if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace patch
