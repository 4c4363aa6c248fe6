#pragma once

// Dataset loading, campaign execution over a TM, report persistence,
// alignment/concentration summary grids, mistake breakdowns, and the
// pointwise-improvement comparison between two campaign reports.

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmprob/distribution.hpp"
#include "tmprob/oracle.hpp"
#include "tmprob/tm_runtime.hpp"

namespace tmprob {

struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CompareError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON array of {id, docstring, signature, groundtruth: {requires, ensures}}.
// Groundtruth specs are parsed eagerly; duplicate ids and parse failures are
// rejected with diagnostics naming the offending case.
std::vector<InputCase> load_dataset(const std::string& path);
std::vector<InputCase> load_dataset_text(const std::string& text, const std::string& origin);

// Content-derived identity: a hash of the sorted case ids. Reports carry it
// so compare() can reject mismatched datasets.
std::string dataset_id(const std::vector<InputCase>& dataset);

struct OracleSpec {
    OracleKind kind = OracleKind::BoundedSpecEquivalence;
    spec::EvaluationBounds bounds;

    bool operator==(const OracleSpec&) const = default;
};

// 3x2 verdict grid; rows by Alignment, columns by Concentration.
using VerdictGrid = std::array<std::array<int, 2>, 3>;

struct ReportClass {
    int class_id = 0;
    int count = 0;
    bool is_valid = true;
    std::vector<int> members;
    std::string representative_text;
};

struct PerInputReport {
    std::vector<ReportClass> classes;
    int total_samples = 0;
    Verdict verdict;
    double entropy = 0.0;
    std::optional<spec::Diagnosis> mistake;  // present for misaligned inputs
    std::optional<std::string> error;        // present for incomplete inputs

    bool complete() const { return !error.has_value(); }
};

struct CampaignReport {
    int schema_version = 1;
    std::string tm_id;
    std::string dataset;  // dataset_id
    SamplingParams sampling;
    OracleSpec oracle;
    std::map<std::string, PerInputReport> per_input;
    VerdictGrid grid{};
    std::map<spec::MistakeLabel, std::array<int, 2>> breakdown;
    std::vector<std::string> incomplete;

    std::string to_json_text() const;  // deterministic: sorted keys, sorted inputs
    static CampaignReport from_json_text(const std::string& text);
    void save(const std::string& path) const;
    static CampaignReport load(const std::string& path);
};

// Samples every input, clusters, computes verdicts/entropy, diagnoses the
// winning class of misaligned inputs, and aggregates the grid and breakdown.
// Per-input failures are recorded, not thrown. jobs > 1 distributes inputs
// across worker threads; results are independent of the schedule.
CampaignReport run_campaign(const TMConfig& config, const std::vector<InputCase>& dataset,
                            const OracleSpec& oracle, int jobs = 1);

// Per-label misalignment counts split by concentration.
std::map<spec::MistakeLabel, std::array<int, 2>> mistake_breakdown(const CampaignReport& report);

struct ImprovementReport {
    std::vector<std::string> ac_base, ac_new;  // aligned and concentrated
    std::vector<std::string> cm_base, cm_new;  // concentrated and misaligned
    std::vector<std::string> regressions;      // aligned in base, not aligned in new
    bool improves = false;
    bool strictly_improves = false;
    // Set-inclusion diagnostics: the improvement relation uses AC inclusion
    // but only cardinality reduction for CM, so CM_new ⊆ CM_base is reported
    // separately rather than required.
    bool ac_inclusion = false;
    bool cm_inclusion = false;

    std::string to_json_text() const;
    std::string render_text() const;
};

// Pointwise improvement of `next` over `base`: AC_base ⊆ AC_next, |CM_next| <=
// |CM_base|, and no base-aligned input loses alignment. Requires matching
// dataset and oracle.
ImprovementReport compare(const CampaignReport& base, const CampaignReport& next);

enum class TableFormat { Text, Csv, Json };

std::string summarize(const CampaignReport& report, TableFormat format);
std::string render_breakdown(const CampaignReport& report, TableFormat format);

}  // namespace tmprob
