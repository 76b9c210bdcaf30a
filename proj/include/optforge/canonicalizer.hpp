#pragma once

#include "optforge/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace optforge {

enum class Language { C, Cpp };

std::string_view to_string(Language language);
/// Accepts "C", "C++", "CPP" and "cpp" (case-insensitive for the latter two).
Language parse_language(std::string_view text);

struct SourceUnit {
    std::string id;
    Language language = Language::Cpp;
    std::string text;
};

struct StripResult {
    std::string text;
    std::size_t comments_removed = 0;
    /// Input ended inside `/* ...`; the remainder was consumed as comment.
    bool unterminated_block_comment = false;
    /// Input ended inside a raw string literal; the remainder was copied as is.
    bool unterminated_raw_string = false;
};

/// Replaces every `//` and `/* */` comment outside string, character and raw
/// string literals with a single space. Backslash-newline splices are honoured
/// both in comment delimiters and inside line comments. Literal bytes are
/// copied unchanged.
StripResult strip_comments(std::string_view src);

/// Number of comment tokens a lexical scan of `src` finds.
std::size_t count_comments(std::string_view src);

/// CRLF and lone CR become LF, each tab becomes two spaces, trailing
/// whitespace is trimmed, runs of blank lines collapse to one, and the text
/// ends with exactly one LF. Text without any non-blank line becomes "".
std::string normalize_format(std::string_view src);

struct Utf8Repair {
    std::string text;
    bool lossy = false;
};

/// Replaces every ill-formed UTF-8 sequence with U+FFFD.
Utf8Repair repair_utf8(std::string_view src);

enum class FormatterFailurePolicy { FallbackBuiltin, Abort };

struct FormatterConfig {
    /// argv of an external formatter; program text on stdin, result on stdout.
    /// Empty means the builtin normalizer only.
    std::vector<std::string> external_command;
    FormatterFailurePolicy on_failure = FormatterFailurePolicy::FallbackBuiltin;
};

class ExternalFormatterFailed : public Error {
public:
    using Error::Error;
};

struct CanonicalizeDiagnostics {
    bool unterminated_block_comment = false;
    bool lossy_utf8 = false;
    bool external_formatter_failed = false;
};

/// normalize_format(strip_comments(text)), with the external formatter (if
/// configured) run between the two steps. Throws ExternalFormatterFailed only
/// when the policy is Abort.
SourceUnit canonicalize(const SourceUnit& unit, const FormatterConfig& formatter = {},
                        CanonicalizeDiagnostics* diagnostics = nullptr);

} // namespace optforge
