#include "tmprob/oracle.hpp"

#include <cctype>

namespace tmprob {

const char* oracle_kind_name(OracleKind k) {
    switch (k) {
        case OracleKind::ExactText: return "exact-text";
        case OracleKind::NormalizedText: return "normalized-text";
        case OracleKind::BoundedSpecEquivalence: return "bounded-spec";
    }
    return "?";
}

std::optional<OracleKind> oracle_kind_from_name(const std::string& name) {
    if (name == "exact-text" || name == "exact") return OracleKind::ExactText;
    if (name == "normalized-text" || name == "normalized") return OracleKind::NormalizedText;
    if (name == "bounded-spec" || name == "bounded") return OracleKind::BoundedSpecEquivalence;
    return std::nullopt;
}

namespace {

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::string normalize_spec_text(const std::string& text) {
    // Collapse whitespace runs to a single space.
    std::string collapsed;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!collapsed.empty() && collapsed.back() != ' ') collapsed.push_back(' ');
        } else {
            collapsed.push_back(c);
        }
    }
    // Keep a space only between two word characters; drop the rest.
    std::string out;
    for (size_t i = 0; i < collapsed.size(); ++i) {
        char c = collapsed[i];
        if (c == ' ') {
            bool keep = !out.empty() && word_char(out.back()) && i + 1 < collapsed.size() &&
                        word_char(collapsed[i + 1]);
            if (keep) out.push_back(' ');
        } else if (c == ';') {
            if (out.empty() || out.back() != ';') out.push_back(';');
        } else {
            out.push_back(c);
        }
    }
    while (!out.empty() && out.back() == ';') out.pop_back();
    return out;
}

bool Oracle::equivalent(const OutputSample& a, const OutputSample& b) const {
    switch (kind_) {
        case OracleKind::ExactText:
            return a.raw_text == b.raw_text;
        case OracleKind::NormalizedText:
            return normalize_spec_text(a.raw_text) == normalize_spec_text(b.raw_text);
        case OracleKind::BoundedSpecEquivalence: {
            if (!a.valid() || !b.valid())
                throw OracleError(
                    "bounded spec equivalence requires two syntactically valid samples");
            if (!sig_)
                throw OracleError("bounded spec equivalence requires a signature");
            return spec::equivalent_bounded(*a.spec_pair(), *b.spec_pair(), *sig_, bounds_);
        }
    }
    return false;
}

}  // namespace tmprob
