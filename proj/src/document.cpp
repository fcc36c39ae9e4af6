#include "patch/document.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "patch/error.hpp"
#include "patch/identifier.hpp"
#include "patch/literal.hpp"

namespace patch {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw PatchError(ErrorKind::ParseError, (path.empty() ? std::string("document") : path) + ": " + msg);
}

std::string name_of(const std::string& raw) {
  return is_valid_identifier(raw) ? normalize_identifier(raw) : raw;
}

const Json& member(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing member '") + key + "'");
  return *it;
}

std::string text_member(const Json& obj, const char* key, const std::string& path) {
  const Json& v = member(obj, key, path);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_text(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) fail(path + "." + key, "expected a string");
  return it->get<std::string>();
}

const Json& array_member(const Json& obj, const char* key, const std::string& path) {
  const Json& v = member(obj, key, path);
  if (!v.is_array()) fail(path + "." + key, "expected an array");
  return v;
}

Expr expr_member(const Json& obj, const char* key, const std::string& path) {
  const std::string text = text_member(obj, key, path);
  try {
    return parse_expr(text);
  } catch (const PatchError& e) {
    fail(path + "." + key, e.what());
  }
}

PatchType type_text(const std::string& text, const std::string& path) {
  try {
    return parse_type(text);
  } catch (const PatchError& e) {
    fail(path, e.what());
  }
}

Json unknown_members(const Json& obj, std::initializer_list<const char*> known) {
  Json extra = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const char* k : known) found = found || it.key() == k;
    if (!found) extra[it.key()] = it.value();
  }
  return extra;
}

void check_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

std::vector<DataObjectDecl> decls(const Json& arr, const std::string& path) {
  std::vector<DataObjectDecl> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    check_object(arr[i], p);
    DataObjectDecl d;
    d.name = name_of(text_member(arr[i], "name", p));
    d.type = type_text(text_member(arr[i], "type", p), p + ".type");
    if (auto b = optional_text(arr[i], "binding", p)) {
      auto parsed = binding_from_string(*b);
      if (!parsed) fail(p + ".binding", "unknown binding '" + *b + "'");
      d.binding = *parsed;
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::optional<PatchType> optional_type(const Json& obj, const std::string& path) {
  auto t = optional_text(obj, "type", path);
  if (!t) return std::nullopt;
  return type_text(*t, path + ".type");
}

StepPayload payload_from_json(StepKind kind, const Json& p, const std::string& path) {
  check_object(p, path);
  switch (kind) {
    case StepKind::Module:
    case StepKind::Exit:
    case StepKind::Stop:
      return NoPayload{};
    case StepKind::Assign:
    case StepKind::Transform:
      if (p.contains("container")) {
        return SwapPayload{expr_member(p, "container", path), expr_member(p, "first", path),
                           expr_member(p, "second", path)};
      }
      return AssignPayload{expr_member(p, "target", path), optional_type(p, path),
                           expr_member(p, "source", path)};
    case StepKind::Read: {
      ReadPayload r{expr_member(p, "target", path), optional_type(p, path), Binding::Console};
      if (auto b = optional_text(p, "source", path)) {
        auto parsed = binding_from_string(*b);
        if (!parsed) fail(path + ".source", "unknown binding '" + *b + "'");
        r.source = *parsed;
      }
      return r;
    }
    case StepKind::Display:
      return DisplayPayload{expr_member(p, "value", path)};
    case StepKind::ByPass:
    case StepKind::EitherOr:
    case StepKind::ConditionalLoop:
      return ConditionPayload{expr_member(p, "condition", path)};
    case StepKind::Labeled:
      return LabeledPayload{expr_member(p, "scrutinee", path)};
    case StepKind::CounterLoop:
      return CounterPayload{name_of(text_member(p, "variable", path)), expr_member(p, "start", path),
                            expr_member(p, "end", path)};
    case StepKind::SentinelLoop: {
      SentinelPayload s{name_of(text_member(p, "variable", path)),
                        expr_member(p, "collection", path), std::nullopt};
      if (p.contains("marker") && !p["marker"].is_null()) s.marker = expr_member(p, "marker", path);
      return s;
    }
    case StepKind::Call: {
      CallPayload c;
      c.module = text_member(p, "module", path);
      if (p.contains("actuals")) {
        const Json& arr = array_member(p, "actuals", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
          const std::string ap = path + ".actuals[" + std::to_string(i) + "]";
          check_object(arr[i], ap);
          CallActual a;
          if (auto n = optional_text(arr[i], "name", ap)) a.name = name_of(*n);
          a.value = expr_member(arr[i], "value", ap);
          c.actuals.push_back(std::move(a));
        }
      }
      if (p.contains("results")) {
        const Json& arr = array_member(p, "results", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
          const std::string rp = path + ".results[" + std::to_string(i) + "]";
          check_object(arr[i], rp);
          c.results.push_back(
              {name_of(text_member(arr[i], "output", rp)), expr_member(arr[i], "target", rp)});
        }
      }
      return c;
    }
  }
  fail(path, "unsupported step kind");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json payload_to_json(const StepPayload& payload) {
  Json j = Json::object();
  std::visit(Overloaded{
                 [&](const NoPayload&) {},
                 [&](const AssignPayload& p) {
                   j["target"] = print_expr(p.target);
                   if (p.type) j["type"] = render_type(*p.type);
                   j["source"] = print_expr(p.source);
                 },
                 [&](const SwapPayload& p) {
                   j["container"] = print_expr(p.container);
                   j["first"] = print_expr(p.first);
                   j["second"] = print_expr(p.second);
                 },
                 [&](const ReadPayload& p) {
                   j["target"] = print_expr(p.target);
                   if (p.type) j["type"] = render_type(*p.type);
                   j["source"] = std::string(to_string(p.source));
                 },
                 [&](const DisplayPayload& p) { j["value"] = print_expr(p.value); },
                 [&](const ConditionPayload& p) { j["condition"] = print_expr(p.condition); },
                 [&](const LabeledPayload& p) { j["scrutinee"] = print_expr(p.scrutinee); },
                 [&](const CounterPayload& p) {
                   j["variable"] = p.variable;
                   j["start"] = print_expr(p.start);
                   j["end"] = print_expr(p.end);
                 },
                 [&](const SentinelPayload& p) {
                   j["variable"] = p.variable;
                   j["collection"] = print_expr(p.collection);
                   if (p.marker) j["marker"] = print_expr(*p.marker);
                 },
                 [&](const CallPayload& p) {
                   j["module"] = p.module;
                   Json actuals = Json::array();
                   for (const auto& a : p.actuals) {
                     Json x = Json::object();
                     if (a.name) x["name"] = *a.name;
                     x["value"] = print_expr(a.value);
                     actuals.push_back(std::move(x));
                   }
                   j["actuals"] = std::move(actuals);
                   Json results = Json::array();
                   for (const auto& r : p.results) {
                     results.push_back(Json{{"output", r.output}, {"target", print_expr(r.target)}});
                   }
                   j["results"] = std::move(results);
                 },
             },
             payload);
  return j;
}

Json decls_to_json(const std::vector<DataObjectDecl>& ds) {
  Json arr = Json::array();
  for (const auto& d : ds) {
    arr.push_back(Json{{"name", d.name},
                       {"type", render_type(d.type)},
                       {"binding", std::string(to_string(d.binding))}});
  }
  return arr;
}

std::string location(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + " column " + std::to_string(col);
}

}  // namespace

std::vector<const Step*> canonical_step_order(const ModuleDef& m) {
  std::vector<const Step*> out;
  std::unordered_set<std::string> seen;
  std::function<void(const Step*)> visit = [&](const Step* s) {
    if (!s || !seen.insert(s->id).second) return;
    out.push_back(s);
    if (s->next) visit(m.find(*s->next));
    for (const auto& c : s->children) visit(m.find(c.step));
  };
  visit(m.root());
  for (const auto& s : m.steps) {
    if (seen.insert(s.id).second) out.push_back(&s);
  }
  return out;
}

PatchDocument document_from_json(const Json& j) {
  check_object(j, "");
  PatchDocument doc;
  const Json& version = member(j, "formatVersion", "");
  if (!version.is_number_integer()) fail("formatVersion", "expected an integer");
  doc.format_version = version.get<int>();
  if (doc.format_version != kFormatVersion) {
    throw PatchError(ErrorKind::VersionUnsupported,
                     "format version " + std::to_string(doc.format_version) + " is not supported");
  }
  doc.program.entry = text_member(j, "entry", "");
  if (auto it = j.find("layout"); it != j.end() && !it->is_null()) doc.layout = *it;
  doc.extra = unknown_members(j, {"formatVersion", "entry", "modules", "layout"});

  const Json& modules = array_member(j, "modules", "");
  for (std::size_t mi = 0; mi < modules.size(); ++mi) {
    const std::string mp = "modules[" + std::to_string(mi) + "]";
    const Json& mj = modules[mi];
    check_object(mj, mp);
    ModuleDef m;
    m.name = text_member(mj, "name", mp);
    m.inputs = decls(array_member(mj, "inputs", mp), mp + ".inputs");
    m.outputs = decls(array_member(mj, "outputs", mp), mp + ".outputs");
    Json mx = unknown_members(mj, {"name", "inputs", "outputs", "steps"});
    if (!mx.empty()) doc.module_extra[m.name] = std::move(mx);

    const Json& steps = array_member(mj, "steps", mp);
    for (std::size_t si = 0; si < steps.size(); ++si) {
      const std::string sp = mp + ".steps[" + std::to_string(si) + "]";
      const Json& sj = steps[si];
      check_object(sj, sp);
      Step s;
      s.id = text_member(sj, "id", sp);
      if (s.id.empty()) fail(sp + ".id", "step ids cannot be empty");
      const std::string kind = text_member(sj, "kind", sp);
      auto k = step_kind_from_string(kind);
      if (!k) fail(sp + ".kind", "unknown step kind '" + kind + "'");
      s.kind = *k;
      auto pit = sj.find("payload");
      s.payload = payload_from_json(s.kind, pit == sj.end() ? Json::object() : *pit, sp + ".payload");
      s.next = optional_text(sj, "next", sp);
      if (sj.contains("children")) {
        const Json& children = array_member(sj, "children", sp);
        for (std::size_t ci = 0; ci < children.size(); ++ci) {
          const std::string cp = sp + ".children[" + std::to_string(ci) + "]";
          const Json& cj = children[ci];
          check_object(cj, cp);
          ChildLink link;
          const std::string group = text_member(cj, "group", cp);
          auto g = child_group_from_string(group);
          if (!g) fail(cp + ".group", "unknown child group '" + group + "'");
          link.group = *g;
          if (auto label = optional_text(cj, "label", cp)) {
            try {
              link.label = parse_literal(*label);
            } catch (const PatchError& e) {
              fail(cp + ".label", e.what());
            }
          }
          link.step = text_member(cj, "step", cp);
          s.children.push_back(std::move(link));
        }
      }
      Json sx = unknown_members(sj, {"id", "kind", "payload", "next", "children"});
      if (!sx.empty()) doc.step_extra[{m.name, s.id}] = std::move(sx);
      m.steps.push_back(std::move(s));
    }
    doc.program.modules.push_back(std::move(m));
  }
  return doc;
}

PatchDocument parse_document(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw PatchError(ErrorKind::ParseError, "syntax error at " + location(text, e.byte));
  }
  return document_from_json(j);
}

Json document_to_json(const PatchDocument& doc) {
  Json j = Json::object();
  j["formatVersion"] = doc.format_version;
  j["entry"] = doc.program.entry;
  Json modules = Json::array();
  for (const auto& m : doc.program.modules) {
    Json mj = Json::object();
    mj["name"] = m.name;
    mj["inputs"] = decls_to_json(m.inputs);
    mj["outputs"] = decls_to_json(m.outputs);
    Json steps = Json::array();
    for (const Step* s : canonical_step_order(m)) {
      Json sj = Json::object();
      sj["id"] = s->id;
      sj["kind"] = std::string(to_string(s->kind));
      sj["payload"] = payload_to_json(s->payload);
      sj["next"] = s->next ? Json(*s->next) : Json(nullptr);
      Json children = Json::array();
      for (const auto& c : s->children) {
        Json cj = Json::object();
        cj["group"] = std::string(to_string(c.group));
        if (c.label) cj["label"] = render_value(*c.label);
        cj["step"] = c.step;
        children.push_back(std::move(cj));
      }
      sj["children"] = std::move(children);
      if (auto it = doc.step_extra.find({m.name, s->id}); it != doc.step_extra.end()) {
        for (auto e = it->second.begin(); e != it->second.end(); ++e) sj[e.key()] = e.value();
      }
      steps.push_back(std::move(sj));
    }
    mj["steps"] = std::move(steps);
    if (auto it = doc.module_extra.find(m.name); it != doc.module_extra.end()) {
      for (auto e = it->second.begin(); e != it->second.end(); ++e) mj[e.key()] = e.value();
    }
    modules.push_back(std::move(mj));
  }
  j["modules"] = std::move(modules);
  if (doc.layout) j["layout"] = *doc.layout;
  for (auto e = doc.extra.begin(); e != doc.extra.end(); ++e) j[e.key()] = e.value();
  return j;
}

std::string serialize_document(const PatchDocument& doc) {
  return document_to_json(doc).dump(2) + "\n";
}

PatchDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PatchError(ErrorKind::Io, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

void save_document(const PatchDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PatchError(ErrorKind::Io, "cannot write " + path);
  out << serialize_document(doc);
  if (!out) throw PatchError(ErrorKind::Io, "cannot write " + path);
}

}  // namespace patch
