#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// Minimal UTF-8 and case tables shared by the textprep sources.
namespace lobbylink::textprep::detail {

inline constexpr char32_t kInvalid = 0xFFFD;

/// Decodes one code point at `pos`, advancing it. Malformed input yields
/// kInvalid and advances by one byte.
char32_t decode_utf8(std::string_view s, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);

char32_t to_lower(char32_t cp);
inline bool is_upper(char32_t cp) { return to_lower(cp) != cp; }
bool is_alnum(char32_t cp);
bool is_space(char32_t cp);

/// ASCII base letters for Latin-1 and Latin Extended-A letters, or empty.
std::string_view strip_diacritic(char32_t lower_cp);

}  // namespace lobbylink::textprep::detail
