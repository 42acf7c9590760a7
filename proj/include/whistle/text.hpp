#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace whistle::text {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

/// Replaces Latin-1 / Latin Extended-A letters with their unaccented ASCII
/// base ("Dončić" -> "Doncic"). Other code points are copied through.
std::string fold_diacritics(std::string_view utf8);

/// Canonical person/team key: diacritics folded, lowercased, inner runs of
/// whitespace collapsed to one space, trimmed.
std::string normalize_key(std::string_view raw);

std::vector<std::string> split(std::string_view s, char sep);

bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);

}  // namespace whistle::text
