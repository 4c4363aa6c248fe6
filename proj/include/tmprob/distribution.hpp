#pragma once

// Meaning-class clustering of sampled TM outputs and classification of the
// resulting empirical distributions by alignment and concentration.

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tmprob/spec_lang.hpp"

namespace tmprob {

// One raw TM output. parse_status holds the typechecked spec when the text
// parsed, otherwise the (non-empty) parse error message.
struct OutputSample {
    int sample_index = 0;
    std::string raw_text;
    std::variant<spec::SpecPair, std::string> parse_status;
    int retries_used = 0;
    std::string backend_id;

    bool valid() const { return std::holds_alternative<spec::SpecPair>(parse_status); }
    const spec::SpecPair* spec_pair() const {
        return std::get_if<spec::SpecPair>(&parse_status);
    }
    const std::string& parse_error_message() const { return std::get<std::string>(parse_status); }
};

OutputSample make_valid_sample(int sample_index, std::string raw_text, spec::SpecPair sp,
                               int retries_used = 0, std::string backend_id = {});
OutputSample make_invalid_sample(int sample_index, std::string raw_text, std::string error,
                                 int retries_used = 0, std::string backend_id = {});

struct MeaningClass {
    int class_id = 0;
    OutputSample representative;
    std::set<int> member_indices;
    bool is_valid = true;
};

struct ClassCount {
    MeaningClass meaning;
    int count = 0;
};

struct EmpiricalDistribution {
    std::string input_id;
    std::vector<ClassCount> classes;
    int total_samples = 0;
};

enum class Alignment { Aligned, MisalignedCorrectGenerated, CorrectNotGenerated };
enum class Concentration { Concentrated, NotConcentrated };

const char* alignment_name(Alignment a);
const char* concentration_name(Concentration c);

struct Verdict {
    Alignment alignment = Alignment::CorrectNotGenerated;
    Concentration concentration = Concentration::NotConcentrated;
    int winning_class_id = 0;
    bool winner_tied = false;
};

// Equivalence oracle over samples. Must be reflexive, symmetric, and
// transitive on valid samples; may throw OracleError.
using EquivFn = std::function<bool(const OutputSample&, const OutputSample&)>;

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Clustering failure wrapping an oracle error with the offending pair.
struct ClusteringError : std::runtime_error {
    ClusteringError(int index_a, int index_b, const std::string& reason);
    int index_a;
    int index_b;
};

// Greedy meaning-class construction: each valid sample is compared against
// one representative per existing valid class; invalid samples become
// singleton classes and are never merged, even on identical text.
std::vector<MeaningClass> cluster(const std::vector<OutputSample>& samples,
                                  const EquivFn& oracle);

EmpiricalDistribution distribution(const std::string& input_id,
                                   const std::vector<MeaningClass>& classes);

// True iff the winning class holds at least half the mass:
// 2 * max_count >= total. Throws std::invalid_argument on an empty
// distribution.
bool is_concentrated(const EmpiricalDistribution& d);

// A class is correct iff its representative is oracle-equivalent to the
// groundtruth sample; at most one class can be correct under a transitive
// oracle.
Alignment alignment_status(const EmpiricalDistribution& d, const OutputSample& groundtruth,
                           const EquivFn& oracle);

Verdict verdict(const EmpiricalDistribution& d, const OutputSample& groundtruth,
                const EquivFn& oracle);

// Shannon entropy of counts/N in nats, with 0*ln(0) = 0.
double entropy(const EmpiricalDistribution& d);

}  // namespace tmprob
