#pragma once

#include <string>
#include <string_view>

namespace patch {

// Canonical (case-folded) form of a Patch identifier. Variable, field and
// module names are case insensitive, so every lookup goes through this.
// Throws PatchError(MalformedIdentifier) for empty text, a leading non-letter,
// characters outside [A-Za-z0-9_], or a reserved word.
std::string normalize_identifier(std::string_view raw);

bool is_valid_identifier(std::string_view raw);

// Words that the expression syntax claims for itself (TRUE, AND, in, ...).
bool is_reserved_word(std::string_view normalized);

}  // namespace patch
