#include "patch/identifier.hpp"

#include <array>
#include <cctype>

#include "patch/error.hpp"

namespace patch {

namespace {

constexpr std::array<std::string_view, 9> kReserved = {
    "true", "false", "and", "or", "not", "in", "union", "intersect", "cross"};

std::string fold(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool well_formed(std::string_view raw) {
  if (raw.empty() || !std::isalpha(static_cast<unsigned char>(raw.front()))) return false;
  for (char c : raw) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_') return false;
  }
  return true;
}

}  // namespace

bool is_reserved_word(std::string_view normalized) {
  for (auto word : kReserved) {
    if (word == normalized) return true;
  }
  return false;
}

bool is_valid_identifier(std::string_view raw) {
  return well_formed(raw) && !is_reserved_word(fold(raw));
}

std::string normalize_identifier(std::string_view raw) {
  if (!well_formed(raw)) {
    throw PatchError(ErrorKind::MalformedIdentifier,
                     "malformed identifier '" + std::string(raw) + "'");
  }
  std::string folded = fold(raw);
  if (is_reserved_word(folded)) {
    throw PatchError(ErrorKind::MalformedIdentifier,
                     "'" + std::string(raw) + "' is a reserved word");
  }
  return folded;
}

}  // namespace patch
