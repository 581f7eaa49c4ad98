#pragma once

#include <string>
#include <vector>

namespace i2a {

/// Lowercases, maps punctuation to spaces, collapses whitespace runs.
std::string normalize_text(const std::string& text);

/// Whitespace tokens of the normalized text.
std::vector<std::string> tokenize(const std::string& text);

}  // namespace i2a
