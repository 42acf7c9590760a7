#include "whistle/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

namespace whistle::text {

namespace {

using namespace std::literals;

// Base letters for U+00C0..U+017F; '\0' means "no single ASCII base".
// Two-letter bases (Æ, ß, Œ, ...) are handled separately.
constexpr std::string_view kLatin1 =
    "AAAAAA\0CEEEEIIII"    // C0
    "DNOOOOO\0OUUUUY\0\0"  // D0
    "aaaaaa\0ceeeeiiii"    // E0
    "dnooooo\0ouuuuy\0y"sv; // F0

constexpr std::string_view kLatinExtA =
    "AaAaAaCcCcCcCcDd"      // 100
    "DdEeEeEeEeEeGgGg"      // 110
    "GgGgHhHhIiIiIiIi"      // 120
    "Ii\0\0JjKkkLlLlLlL"    // 130
    "lLlNnNnNnnNnOoOo"      // 140
    "Oo\0\0RrRrRrSsSsSs"    // 150
    "SsTtTtTtUuUuUuUu"      // 160
    "UuUuWwYyYZzZzZzs"sv;   // 170

static_assert(kLatin1.size() == 0x40);
static_assert(kLatinExtA.size() == 0x80);

bool two_letter_base(char32_t cp, std::string& out) {
    switch (cp) {
        case 0xC6: out += "AE"; return true;
        case 0xE6: out += "ae"; return true;
        case 0xDF: out += "ss"; return true;
        case 0xDE: out += "Th"; return true;
        case 0xFE: out += "th"; return true;
        case 0x152: out += "OE"; return true;
        case 0x153: out += "oe"; return true;
        case 0x132: out += "IJ"; return true;
        case 0x133: out += "ij"; return true;
        default: return false;
    }
}

}  // namespace

std::string_view trim(std::string_view s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string fold_diacritics(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) {
        const auto lead = static_cast<unsigned char>(utf8[i]);
        if (lead < 0x80) {
            out += static_cast<char>(lead);
            ++i;
            continue;
        }
        // Only two-byte sequences can land in U+00C0..U+017F.
        if ((lead & 0xE0) == 0xC0 && i + 1 < utf8.size()) {
            const auto cont = static_cast<unsigned char>(utf8[i + 1]);
            if ((cont & 0xC0) == 0x80) {
                const char32_t cp = (char32_t(lead & 0x1F) << 6) | char32_t(cont & 0x3F);
                char base = '\0';
                if (cp >= 0xC0 && cp <= 0xFF) {
                    base = kLatin1[cp - 0xC0];
                } else if (cp >= 0x100 && cp <= 0x17F) {
                    base = kLatinExtA[cp - 0x100];
                }
                if (two_letter_base(cp, out)) {
                    i += 2;
                    continue;
                }
                if (base != '\0') {
                    out += base;
                    i += 2;
                    continue;
                }
                out.append(utf8.substr(i, 2));
                i += 2;
                continue;
            }
        }
        out += static_cast<char>(lead);
        ++i;
    }
    return out;
}

std::string normalize_key(std::string_view raw) {
    const std::string folded = to_lower_ascii(fold_diacritics(trim(raw)));
    std::string out;
    out.reserve(folded.size());
    bool pending_space = false;
    for (char c : folded) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            break;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

bool icontains(std::string_view haystack, std::string_view needle) {
    return to_lower_ascii(haystack).find(to_lower_ascii(needle)) != std::string::npos;
}

}  // namespace whistle::text
