#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace madlab {

enum class TaskKind { Numeric, MultipleChoice, Boolean, FreeText };

const char* to_string(TaskKind kind);
std::optional<TaskKind> task_kind_from_string(std::string_view s);

/// Canonical form of an extracted answer. The absent value ("None") marks an
/// unparseable response; it orders before and never equals any present value,
/// but does equal another None so it can serve as a score-dictionary key.
class NormalizedAnswer {
public:
    NormalizedAnswer() = default;  // None
    explicit NormalizedAnswer(std::string value) : value_(std::move(value)) {}

    static NormalizedAnswer none() { return NormalizedAnswer{}; }

    bool is_none() const { return !value_.has_value(); }
    const std::string& value() const { return *value_; }

    // "None" for the absent value; for printing and CSV/JSON keys only.
    std::string display() const { return value_ ? *value_ : std::string("None"); }

    friend bool operator==(const NormalizedAnswer&, const NormalizedAnswer&) = default;
    friend std::strong_ordering operator<=>(const NormalizedAnswer&,
                                            const NormalizedAnswer&) = default;

private:
    std::optional<std::string> value_;
};

/// Extract the canonical answer from raw model output.
///   numeric          last boxed/stated number, separators stripped, canonical decimal
///   multiple_choice  single uppercase option letter
///   boolean          "True" or "False"
///   free_text        trimmed, internal whitespace collapsed
/// Unparseable input maps to None. Idempotent: canonical forms map to themselves.
NormalizedAnswer normalize_answer(std::string_view raw, TaskKind kind);

}  // namespace madlab
