#include "tmprob/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tmprob {

const char* alignment_name(Alignment a) {
    switch (a) {
        case Alignment::Aligned: return "aligned";
        case Alignment::MisalignedCorrectGenerated: return "misaligned_correct_generated";
        case Alignment::CorrectNotGenerated: return "correct_not_generated";
    }
    return "?";
}

const char* concentration_name(Concentration c) {
    return c == Concentration::Concentrated ? "concentrated" : "not_concentrated";
}

OutputSample make_valid_sample(int sample_index, std::string raw_text, spec::SpecPair sp,
                               int retries_used, std::string backend_id) {
    OutputSample s;
    s.sample_index = sample_index;
    s.raw_text = std::move(raw_text);
    s.parse_status = std::move(sp);
    s.retries_used = retries_used;
    s.backend_id = std::move(backend_id);
    return s;
}

OutputSample make_invalid_sample(int sample_index, std::string raw_text, std::string error,
                                 int retries_used, std::string backend_id) {
    if (error.empty()) throw std::invalid_argument("invalid sample requires an error message");
    OutputSample s;
    s.sample_index = sample_index;
    s.raw_text = std::move(raw_text);
    s.parse_status = std::move(error);
    s.retries_used = retries_used;
    s.backend_id = std::move(backend_id);
    return s;
}

namespace {

std::string pair_message(int a, int b, const std::string& reason) {
    std::ostringstream os;
    os << "equivalence oracle failed on samples " << a << " and " << b << ": " << reason;
    return os.str();
}

}  // namespace

ClusteringError::ClusteringError(int a, int b, const std::string& reason)
    : std::runtime_error(pair_message(a, b, reason)), index_a(a), index_b(b) {}

std::vector<MeaningClass> cluster(const std::vector<OutputSample>& samples,
                                  const EquivFn& oracle) {
    std::vector<MeaningClass> classes;
    for (const OutputSample& s : samples) {
        if (!s.valid()) {
            MeaningClass mc;
            mc.class_id = static_cast<int>(classes.size());
            mc.representative = s;
            mc.member_indices.insert(s.sample_index);
            mc.is_valid = false;
            classes.push_back(std::move(mc));
            continue;
        }
        bool placed = false;
        for (MeaningClass& mc : classes) {
            if (!mc.is_valid) continue;
            bool eq;
            try {
                eq = oracle(mc.representative, s);
            } catch (const std::exception& ex) {
                throw ClusteringError(mc.representative.sample_index, s.sample_index, ex.what());
            }
            if (eq) {
                mc.member_indices.insert(s.sample_index);
                placed = true;
                break;
            }
        }
        if (!placed) {
            MeaningClass mc;
            mc.class_id = static_cast<int>(classes.size());
            mc.representative = s;
            mc.member_indices.insert(s.sample_index);
            mc.is_valid = true;
            classes.push_back(std::move(mc));
        }
    }
    return classes;
}

EmpiricalDistribution distribution(const std::string& input_id,
                                   const std::vector<MeaningClass>& classes) {
    EmpiricalDistribution d;
    d.input_id = input_id;
    for (const MeaningClass& mc : classes) {
        d.classes.push_back(ClassCount{mc, static_cast<int>(mc.member_indices.size())});
        d.total_samples += static_cast<int>(mc.member_indices.size());
    }
    return d;
}

namespace {

int max_count(const EmpiricalDistribution& d) {
    int m = 0;
    for (const auto& cc : d.classes) m = std::max(m, cc.count);
    return m;
}

// class_id of the class equivalent to groundtruth, or -1. At most one class
// can match under a transitive oracle.
int find_correct_class(const EmpiricalDistribution& d, const OutputSample& groundtruth,
                       const EquivFn& oracle) {
    for (const auto& cc : d.classes) {
        if (!cc.meaning.is_valid) continue;
        bool eq;
        try {
            eq = oracle(cc.meaning.representative, groundtruth);
        } catch (const std::exception& ex) {
            throw ClusteringError(cc.meaning.representative.sample_index,
                                  groundtruth.sample_index, ex.what());
        }
        if (eq) return cc.meaning.class_id;
    }
    return -1;
}

Alignment classify(const EmpiricalDistribution& d, int correct_id, int m) {
    if (correct_id < 0) return Alignment::CorrectNotGenerated;
    for (const auto& cc : d.classes)
        if (cc.meaning.class_id == correct_id && cc.count == m) return Alignment::Aligned;
    return Alignment::MisalignedCorrectGenerated;
}

}  // namespace

bool is_concentrated(const EmpiricalDistribution& d) {
    if (d.total_samples < 1) throw std::invalid_argument("empty distribution");
    return 2 * max_count(d) >= d.total_samples;
}

Alignment alignment_status(const EmpiricalDistribution& d, const OutputSample& groundtruth,
                           const EquivFn& oracle) {
    return classify(d, find_correct_class(d, groundtruth, oracle), max_count(d));
}

Verdict verdict(const EmpiricalDistribution& d, const OutputSample& groundtruth,
                const EquivFn& oracle) {
    int m = max_count(d);
    int correct_id = find_correct_class(d, groundtruth, oracle);

    Verdict v;
    v.alignment = classify(d, correct_id, m);
    v.concentration =
        is_concentrated(d) ? Concentration::Concentrated : Concentration::NotConcentrated;

    int ties = 0;
    int first_argmax = -1;
    for (const auto& cc : d.classes) {
        if (cc.count != m) continue;
        ++ties;
        if (first_argmax < 0) first_argmax = cc.meaning.class_id;
    }
    v.winner_tied = ties > 1;
    // Winner: the correct argmax class when aligned, otherwise the argmax
    // class with the smallest class_id.
    v.winning_class_id = v.alignment == Alignment::Aligned ? correct_id : first_argmax;
    return v;
}

double entropy(const EmpiricalDistribution& d) {
    if (d.total_samples < 1) throw std::invalid_argument("empty distribution");
    double n = static_cast<double>(d.total_samples);
    double h = 0.0;
    for (const auto& cc : d.classes) {
        if (cc.count == 0) continue;
        double p = cc.count / n;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace tmprob
