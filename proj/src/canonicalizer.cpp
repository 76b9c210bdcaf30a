#include "optforge/canonicalizer.hpp"

#include "optforge/subprocess.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace optforge {

std::string_view to_string(Language language)
{
    return language == Language::C ? "C" : "C++";
}

Language parse_language(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "c")
        return Language::C;
    if (lower == "c++" || lower == "cpp" || lower == "cxx")
        return Language::Cpp;
    throw Error("unknown programming language '" + std::string(text) + "'");
}

namespace {

bool is_ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_digit(char c)
{
    return c >= '0' && c <= '9';
}

bool is_trailing_space(char c)
{
    return c == ' ' || c == '\t' || c == '\v' || c == '\f';
}

class CommentScanner {
public:
    explicit CommentScanner(std::string_view src) : src_(src) { out_.reserve(src.size()); }

    StripResult run()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '/' && try_comment())
                continue;
            if (c == '"') {
                if (raw_prefix_before() && try_raw_string())
                    continue;
                quoted('"');
                continue;
            }
            if (c == '\'') {
                if (in_number_) {
                    // C++14 digit separator
                    out_.push_back(c);
                    ++pos_;
                    continue;
                }
                quoted('\'');
                continue;
            }
            track_token(c);
            out_.push_back(c);
            ++pos_;
        }
        result_.text = std::move(out_);
        return std::move(result_);
    }

private:
    bool newline_at(std::size_t p) const
    {
        return p < src_.size() && (src_[p] == '\n' || src_[p] == '\r');
    }

    /// Length of a backslash-newline splice starting at p, 0 if none.
    /// Whitespace between the backslash and the newline is tolerated, and CR,
    /// CRLF and LF all count as newlines, so the scan sees the same tokens
    /// before and after normalize_format.
    std::size_t splice_at(std::size_t p) const
    {
        if (p >= src_.size() || src_[p] != '\\')
            return 0;
        std::size_t q = p + 1;
        while (q < src_.size() && is_trailing_space(src_[q]))
            ++q;
        if (q >= src_.size())
            return 0;
        if (src_[q] == '\r' && q + 1 < src_.size() && src_[q + 1] == '\n')
            return q + 2 - p;
        if (src_[q] == '\n' || src_[q] == '\r')
            return q + 1 - p;
        return 0;
    }

    std::size_t skip_splices(std::size_t p) const
    {
        while (std::size_t n = splice_at(p))
            p += n;
        return p;
    }

    bool try_comment()
    {
        std::size_t next = skip_splices(pos_ + 1);
        if (next >= src_.size())
            return false;
        if (src_[next] == '/') {
            std::size_t p = next + 1;
            while (p < src_.size()) {
                if (std::size_t n = splice_at(p)) {
                    p += n;
                    continue;
                }
                if (newline_at(p))
                    break;
                ++p;
            }
            emit_comment(p);
            return true;
        }
        if (src_[next] == '*') {
            std::size_t p = next + 1;
            std::size_t end = src_.size();
            while (p < src_.size()) {
                if (src_[p] == '*') {
                    std::size_t after = skip_splices(p + 1);
                    if (after < src_.size() && src_[after] == '/') {
                        end = after + 1;
                        break;
                    }
                }
                ++p;
            }
            if (p >= src_.size())
                result_.unterminated_block_comment = true;
            emit_comment(end);
            return true;
        }
        return false;
    }

    void emit_comment(std::size_t end)
    {
        out_.push_back(' ');
        pos_ = end;
        ++result_.comments_removed;
        reset_token();
    }

    /// The identifier immediately before the quote is a raw-string prefix.
    bool raw_prefix_before() const
    {
        if (!in_ident_)
            return false;
        std::string_view ident = src_.substr(ident_start_, pos_ - ident_start_);
        return ident == "R" || ident == "u8R" || ident == "uR" || ident == "UR" || ident == "LR";
    }

    bool try_raw_string()
    {
        constexpr std::size_t max_delimiter = 16;
        std::size_t p = pos_ + 1;
        while (p < src_.size() && p - pos_ - 1 <= max_delimiter && src_[p] != '(') {
            char c = src_[p];
            if (c == ' ' || c == ')' || c == '\\' || c == '\t' || c == '\v' || c == '\f' ||
                c == '\n' || c == '\r' || c == '"')
                return false;
            ++p;
        }
        if (p >= src_.size() || src_[p] != '(' || p - pos_ - 1 > max_delimiter)
            return false;

        std::string closing = ")";
        closing.append(src_.substr(pos_ + 1, p - pos_ - 1));
        closing.push_back('"');
        std::size_t close = src_.find(closing, p + 1);
        std::size_t end = src_.size();
        if (close == std::string_view::npos)
            result_.unterminated_raw_string = true;
        else
            end = close + closing.size();
        out_.append(src_.substr(pos_, end - pos_));
        pos_ = end;
        reset_token();
        return true;
    }

    /// Copies a string or character literal. An unescaped newline ends an
    /// unterminated literal without being consumed.
    void quoted(char quote)
    {
        out_.push_back(src_[pos_++]);
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::size_t n = splice_at(pos_)) {
                out_.append(src_.substr(pos_, n));
                pos_ += n;
                continue;
            }
            if (c == '\\') {
                out_.push_back(c);
                ++pos_;
                if (pos_ < src_.size())
                    out_.push_back(src_[pos_++]);
                continue;
            }
            if (newline_at(pos_))
                break;
            out_.push_back(c);
            ++pos_;
            if (c == quote)
                break;
        }
        reset_token();
    }

    void track_token(char c)
    {
        if (in_number_) {
            if (is_ident_char(c) || c == '.')
                return;
            char prev = pos_ > 0 ? src_[pos_ - 1] : '\0';
            if ((c == '+' || c == '-') &&
                (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P'))
                return;
            reset_token();
        }
        if (in_ident_) {
            if (is_ident_char(c))
                return;
            reset_token();
        }
        if (is_digit(c) ||
            (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
            in_number_ = true;
        } else if (is_ident_char(c)) {
            in_ident_ = true;
            ident_start_ = pos_;
        }
    }

    void reset_token()
    {
        in_ident_ = false;
        in_number_ = false;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::string out_;
    StripResult result_;
    bool in_ident_ = false;
    bool in_number_ = false;
    std::size_t ident_start_ = 0;
};

} // namespace

StripResult strip_comments(std::string_view src)
{
    return CommentScanner(src).run();
}

std::size_t count_comments(std::string_view src)
{
    return strip_comments(src).comments_removed;
}

std::string normalize_format(std::string_view src)
{
    std::string out;
    out.reserve(src.size() + 1);

    std::string line;
    bool pending_blank = false;
    bool any_line = false;

    auto flush_line = [&] {
        while (!line.empty() && is_trailing_space(line.back()))
            line.pop_back();
        if (line.empty()) {
            if (any_line)
                pending_blank = true;
            return;
        }
        if (pending_blank)
            out.push_back('\n');
        pending_blank = false;
        out.append(line);
        out.push_back('\n');
        any_line = true;
        line.clear();
    };

    for (std::size_t i = 0; i < src.size(); ++i) {
        char c = src[i];
        if (c == '\r') {
            if (i + 1 < src.size() && src[i + 1] == '\n')
                ++i;
            flush_line();
        } else if (c == '\n') {
            flush_line();
        } else if (c == '\t') {
            line.append("  ");
        } else {
            line.push_back(c);
        }
    }
    flush_line();
    return out;
}

Utf8Repair repair_utf8(std::string_view src)
{
    static constexpr std::string_view replacement = "\xEF\xBF\xBD";
    Utf8Repair result;
    result.text.reserve(src.size());

    std::size_t i = 0;
    while (i < src.size()) {
        auto byte = [&](std::size_t k) { return static_cast<unsigned char>(src[k]); };
        unsigned char lead = byte(i);
        if (lead < 0x80) {
            result.text.push_back(static_cast<char>(lead));
            ++i;
            continue;
        }
        std::size_t length = 0;
        unsigned char lo = 0x80;
        unsigned char hi = 0xBF;
        if (lead >= 0xC2 && lead <= 0xDF) {
            length = 2;
        } else if (lead >= 0xE0 && lead <= 0xEF) {
            length = 3;
            if (lead == 0xE0)
                lo = 0xA0;
            else if (lead == 0xED)
                hi = 0x9F;
        } else if (lead >= 0xF0 && lead <= 0xF4) {
            length = 4;
            if (lead == 0xF0)
                lo = 0x90;
            else if (lead == 0xF4)
                hi = 0x8F;
        }

        // Maximal subpart of an ill-formed sequence is replaced once.
        std::size_t consumed = 1;
        bool valid = length != 0;
        if (valid) {
            for (std::size_t k = 1; k < length; ++k) {
                if (i + k >= src.size()) {
                    valid = false;
                    break;
                }
                unsigned char b = byte(i + k);
                unsigned char min = k == 1 ? lo : 0x80;
                unsigned char max = k == 1 ? hi : 0xBF;
                if (b < min || b > max) {
                    valid = false;
                    break;
                }
                consumed = k + 1;
            }
        }
        if (valid) {
            result.text.append(src.substr(i, length));
            i += length;
        } else {
            result.text.append(replacement);
            result.lossy = true;
            i += consumed;
        }
    }
    return result;
}

SourceUnit canonicalize(const SourceUnit& unit, const FormatterConfig& formatter,
                        CanonicalizeDiagnostics* diagnostics)
{
    CanonicalizeDiagnostics local;
    Utf8Repair decoded = repair_utf8(unit.text);
    local.lossy_utf8 = decoded.lossy;

    StripResult stripped = strip_comments(decoded.text);
    local.unterminated_block_comment = stripped.unterminated_block_comment;

    std::string text = std::move(stripped.text);
    if (!formatter.external_command.empty()) {
        std::string failure;
        try {
            ProcessResult run = run_process(formatter.external_command, text);
            if (run.exit_code == 0)
                text = std::move(run.out);
            else
                failure = "exit status " + std::to_string(run.exit_code) + ": " + run.err;
        } catch (const ProcessError& e) {
            failure = e.what();
        }
        if (!failure.empty()) {
            local.external_formatter_failed = true;
            if (formatter.on_failure == FormatterFailurePolicy::Abort)
                throw ExternalFormatterFailed("external formatter failed on '" + unit.id +
                                              "': " + failure);
        }
    }

    if (diagnostics)
        *diagnostics = local;
    return SourceUnit{unit.id, unit.language, normalize_format(text)};
}

} // namespace optforge
