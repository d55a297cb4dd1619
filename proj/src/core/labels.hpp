#pragma once

#include <string>
#include <string_view>

#include "error.hpp"

namespace cq {

/// Four-way message quality label. good <=> (!missing_why && !missing_what).
enum class QualityLabel { WhyAndWhat, NoWhy, NoWhat, Neither };

inline bool missing_why(QualityLabel label) {
    return label == QualityLabel::NoWhy || label == QualityLabel::Neither;
}

inline bool missing_what(QualityLabel label) {
    return label == QualityLabel::NoWhat || label == QualityLabel::Neither;
}

inline bool is_good(QualityLabel label) {
    return label == QualityLabel::WhyAndWhat;
}

/// Which binary target a classifier is trained on.
enum class PositiveClass { missing_why, missing_what, good };

inline bool binary_target(QualityLabel label, PositiveClass positive) {
    switch (positive) {
    case PositiveClass::missing_why: return missing_why(label);
    case PositiveClass::missing_what: return missing_what(label);
    case PositiveClass::good: return is_good(label);
    }
    return false;
}

inline std::string_view quality_label_name(QualityLabel label) {
    switch (label) {
    case QualityLabel::WhyAndWhat: return "why_and_what";
    case QualityLabel::NoWhy: return "no_why";
    case QualityLabel::NoWhat: return "no_what";
    case QualityLabel::Neither: return "neither";
    }
    return "neither";
}

inline QualityLabel quality_label_from_name(std::string_view name) {
    if (name == "why_and_what")
        return QualityLabel::WhyAndWhat;
    if (name == "no_why")
        return QualityLabel::NoWhy;
    if (name == "no_what")
        return QualityLabel::NoWhat;
    if (name == "neither")
        return QualityLabel::Neither;
    throw ParseError("unknown quality label: " + std::string(name));
}

inline std::string_view positive_class_name(PositiveClass positive) {
    switch (positive) {
    case PositiveClass::missing_why: return "missing_why";
    case PositiveClass::missing_what: return "missing_what";
    case PositiveClass::good: return "good";
    }
    return "good";
}

inline PositiveClass positive_class_from_name(std::string_view name) {
    if (name == "missing_why" || name == "why")
        return PositiveClass::missing_why;
    if (name == "missing_what" || name == "what")
        return PositiveClass::missing_what;
    if (name == "good")
        return PositiveClass::good;
    throw ParseError("unknown positive class: " + std::string(name));
}

} // namespace cq
