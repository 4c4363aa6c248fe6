#pragma once

// Pluggable equivalence relations on TM outputs, used both for clustering and
// for correctness against groundtruth.

#include <optional>
#include <string>

#include "tmprob/distribution.hpp"
#include "tmprob/spec_lang.hpp"

namespace tmprob {

enum class OracleKind { ExactText, NormalizedText, BoundedSpecEquivalence };

const char* oracle_kind_name(OracleKind k);
std::optional<OracleKind> oracle_kind_from_name(const std::string& name);

// Canonical form used by the NormalizedText oracle: trimmed, whitespace
// collapsed (kept only between word characters), semicolon runs collapsed and
// a trailing semicolon dropped.
std::string normalize_spec_text(const std::string& text);

class Oracle {
   public:
    explicit Oracle(OracleKind kind, spec::EvaluationBounds bounds = {},
                    std::optional<spec::Signature> sig = std::nullopt)
        : kind_(kind), bounds_(bounds), sig_(std::move(sig)) {}

    OracleKind kind() const { return kind_; }
    const spec::EvaluationBounds& bounds() const { return bounds_; }

    // BoundedSpecEquivalence requires both samples Valid and a signature;
    // violating that throws OracleError. Callers must route Invalid samples
    // to singleton classes before invoking the spec oracle.
    bool equivalent(const OutputSample& a, const OutputSample& b) const;

    bool operator()(const OutputSample& a, const OutputSample& b) const {
        return equivalent(a, b);
    }

   private:
    OracleKind kind_;
    spec::EvaluationBounds bounds_;
    std::optional<spec::Signature> sig_;
};

}  // namespace tmprob
