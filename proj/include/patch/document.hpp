#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "patch/model.hpp"

namespace patch {

using Json = nlohmann::ordered_json;

// A program as stored on disk (.patch.json). Members the format does not
// define are kept as-is at the document, module and step level so that
// newer editors can round-trip through older tools.
struct PatchDocument {
  int format_version = 1;
  PatchProgram program;
  std::optional<Json> layout;  // UI geometry, opaque here
  Json extra = Json::object();
  std::map<std::string, Json> module_extra;                       // by module name
  std::map<std::pair<std::string, std::string>, Json> step_extra;  // by (module, step id)

  friend bool operator==(const PatchDocument&, const PatchDocument&) = default;
};

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kMediaType = "application/vnd.patch+json";

// Throws ParseError (with line/column for syntax errors, a member path for
// structural ones) or VersionUnsupported.
PatchDocument parse_document(std::string_view text);
PatchDocument document_from_json(const Json& j);

// Canonical text: fixed member order, steps in pre-order (a step, its solid
// successor chain, then its dashed children), two-space indentation and a
// trailing newline.
std::string serialize_document(const PatchDocument& doc);
Json document_to_json(const PatchDocument& doc);

// Throws Io on unreadable or unwritable files.
PatchDocument load_document(const std::string& path);
void save_document(const PatchDocument& doc, const std::string& path);

// Steps of m in canonical order; unreachable steps follow in stored order.
std::vector<const Step*> canonical_step_order(const ModuleDef& m);

}  // namespace patch
