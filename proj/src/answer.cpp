#include "madlab/answer.hpp"

#include <algorithm>
#include <cctype>

namespace madlab {

namespace {

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_alnum(char c) {
    return is_digit(c) || is_alpha(c);
}

char upper(char c) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Content of the last \boxed{...} group, brace-aware; unbalanced groups take
// the remainder of the string.
std::optional<std::string> last_boxed(std::string_view s) {
    constexpr std::string_view needle = "\\boxed{";
    const std::size_t pos = s.rfind(needle);
    if (pos == std::string_view::npos) return std::nullopt;
    std::string out;
    int depth = 1;
    for (std::size_t i = pos + needle.size(); i < s.size(); ++i) {
        const char c = s[i];
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return out;
        }
        out.push_back(c);
    }
    return out;
}

// --- numeric -------------------------------------------------------------

// Canonical decimal: no sign on zero, no leading zeros, no trailing
// fractional zeros, no dangling point.
std::string canonical_decimal(bool negative, std::string int_digits, std::string frac_digits) {
    std::size_t lead = 0;
    while (lead + 1 < int_digits.size() && int_digits[lead] == '0') ++lead;
    int_digits.erase(0, lead);
    if (int_digits.empty()) int_digits = "0";
    while (!frac_digits.empty() && frac_digits.back() == '0') frac_digits.pop_back();

    const bool zero = int_digits == "0" && frac_digits.empty();
    std::string out;
    if (negative && !zero) out.push_back('-');
    out += int_digits;
    if (!frac_digits.empty()) {
        out.push_back('.');
        out += frac_digits;
    }
    return out;
}

// Parse a number token starting at i (expects a digit there), consuming
// thousands separators only when they join groups of exactly three digits.
std::string scan_number(std::string_view s, std::size_t& i, bool negative) {
    std::string int_digits;
    while (i < s.size() && is_digit(s[i])) int_digits.push_back(s[i++]);
    while (i < s.size() && s[i] == ',' && i + 3 < s.size() && is_digit(s[i + 1]) &&
           is_digit(s[i + 2]) && is_digit(s[i + 3]) &&
           (i + 4 >= s.size() || !is_digit(s[i + 4]))) {
        int_digits += s.substr(i + 1, 3);
        i += 4;
    }
    std::string frac_digits;
    if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
        ++i;
        while (i < s.size() && is_digit(s[i])) frac_digits.push_back(s[i++]);
    }
    return canonical_decimal(negative, std::move(int_digits), std::move(frac_digits));
}

// Last number in the string, in canonical decimal form.
std::optional<std::string> last_number(std::string_view s) {
    std::optional<std::string> found;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        const char prev = i > 0 ? s[i - 1] : '\0';
        if (is_digit(c) && !is_alpha(prev)) {
            bool negative = false;
            if ((prev == '-' || prev == '+') && (i < 2 || !is_alnum(s[i - 2]))) {
                negative = prev == '-';
            }
            found = scan_number(s, i, negative);
            continue;
        }
        // ".5" with no integer part
        if (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]) && !is_alnum(prev) &&
            prev != '.') {
            ++i;
            std::string frac;
            while (i < s.size() && is_digit(s[i])) frac.push_back(s[i++]);
            found = canonical_decimal(false, "0", std::move(frac));
            continue;
        }
        ++i;
    }
    return found;
}

// --- multiple choice -------------------------------------------------------

// "D", "d.", "(C)", "B)" at the very start of the (trimmed) text.
std::optional<std::string> leading_option_letter(std::string_view text) {
    std::string_view t = trim(text);
    if (t.empty()) return std::nullopt;
    std::size_t i = 0;
    if (t[i] == '(') ++i;
    if (i >= t.size() || !is_alpha(t[i])) return std::nullopt;
    const char letter = upper(t[i]);
    ++i;
    if (i == t.size()) return std::string(1, letter);
    if (t[i] == '.' || t[i] == ')' || t[i] == ':') return std::string(1, letter);
    return std::nullopt;
}

// Last "answer is X" / "answer: X" / "option is X" style statement.
std::optional<std::string> stated_option_letter(std::string_view text) {
    std::string folded(text);
    std::transform(folded.begin(), folded.end(), folded.begin(), lower);
    static const std::string_view markers[] = {"answer is", "answer:", "option is",
                                               "choice is"};
    std::optional<std::string> found;
    for (const auto marker : markers) {
        std::size_t from = 0;
        std::size_t pos;
        while ((pos = folded.find(marker, from)) != std::string::npos) {
            std::size_t i = pos + marker.size();
            while (i < text.size() &&
                   (text[i] == ' ' || text[i] == '*' || text[i] == '(' || text[i] == '"' ||
                    text[i] == '\''))
                ++i;
            if (i < text.size() && is_alpha(text[i]) &&
                (i + 1 == text.size() || !is_alnum(text[i + 1]))) {
                found = std::string(1, upper(text[i]));
            }
            from = pos + marker.size();
        }
    }
    return found;
}

NormalizedAnswer normalize_multiple_choice(std::string_view raw) {
    if (auto boxed = last_boxed(raw)) {
        if (auto letter = leading_option_letter(*boxed)) return NormalizedAnswer(*letter);
    }
    if (auto letter = stated_option_letter(raw)) return NormalizedAnswer(*letter);
    if (auto letter = leading_option_letter(raw)) return NormalizedAnswer(*letter);
    return NormalizedAnswer::none();
}

// --- boolean ---------------------------------------------------------------

// Last standalone true/false/yes/no (case-insensitive).
std::optional<bool> last_truth_word(std::string_view text) {
    std::string folded(text);
    std::transform(folded.begin(), folded.end(), folded.begin(), lower);
    static const std::pair<std::string_view, bool> words[] = {
        {"true", true}, {"false", false}, {"yes", true}, {"no", false}};
    std::optional<bool> found;
    std::size_t best_pos = 0;
    for (const auto& [word, value] : words) {
        std::size_t from = 0;
        std::size_t pos;
        while ((pos = folded.find(word, from)) != std::string::npos) {
            const bool left_ok = pos == 0 || !is_alpha(folded[pos - 1]);
            const std::size_t end = pos + word.size();
            const bool right_ok = end >= folded.size() || !is_alpha(folded[end]);
            if (left_ok && right_ok && (!found || pos >= best_pos)) {
                found = value;
                best_pos = pos;
            }
            from = pos + 1;
        }
    }
    return found;
}

NormalizedAnswer normalize_boolean(std::string_view raw) {
    if (auto boxed = last_boxed(raw)) {
        if (auto value = last_truth_word(*boxed))
            return NormalizedAnswer(*value ? "True" : "False");
    }
    if (auto value = last_truth_word(raw)) return NormalizedAnswer(*value ? "True" : "False");
    return NormalizedAnswer::none();
}

// --- free text ---------------------------------------------------------------

NormalizedAnswer normalize_free_text(std::string_view raw) {
    std::string_view t = trim(raw);
    if (t.empty()) return NormalizedAnswer::none();
    std::string out;
    bool in_space = false;
    for (const char c : t) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return NormalizedAnswer(std::move(out));
}

}  // namespace

const char* to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::Numeric: return "numeric";
        case TaskKind::MultipleChoice: return "multiple_choice";
        case TaskKind::Boolean: return "boolean";
        case TaskKind::FreeText: return "free_text";
    }
    return "unknown";
}

std::optional<TaskKind> task_kind_from_string(std::string_view s) {
    if (s == "numeric") return TaskKind::Numeric;
    if (s == "multiple_choice") return TaskKind::MultipleChoice;
    if (s == "boolean") return TaskKind::Boolean;
    if (s == "free_text") return TaskKind::FreeText;
    return std::nullopt;
}

NormalizedAnswer normalize_answer(std::string_view raw, TaskKind kind) {
    switch (kind) {
        case TaskKind::Numeric: {
            if (auto boxed = last_boxed(raw)) {
                if (auto num = last_number(*boxed)) return NormalizedAnswer(*num);
            }
            if (auto num = last_number(raw)) return NormalizedAnswer(*num);
            return NormalizedAnswer::none();
        }
        case TaskKind::MultipleChoice:
            return normalize_multiple_choice(raw);
        case TaskKind::Boolean:
            return normalize_boolean(raw);
        case TaskKind::FreeText: {
            if (auto boxed = last_boxed(raw)) return normalize_free_text(*boxed);
            return normalize_free_text(raw);
        }
    }
    return NormalizedAnswer::none();
}

}  // namespace madlab
