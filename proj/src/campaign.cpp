#include "tmprob/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace tmprob {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

namespace {

std::string assemble_spec_text(const json& gt) {
    std::vector<std::string> lines;
    if (gt.contains("requires"))
        for (const auto& r : gt["requires"])
            lines.push_back("requires " + r.get<std::string>() + ";");
    if (gt.contains("ensures"))
        for (const auto& e : gt["ensures"])
            lines.push_back("ensures " + e.get<std::string>() + ";");
    std::string out;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

}  // namespace

std::vector<InputCase> load_dataset_text(const std::string& text, const std::string& origin) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DatasetError(origin + ": not valid JSON");
    if (!j.is_array()) throw DatasetError(origin + ": dataset must be a JSON array");

    std::vector<InputCase> out;
    std::set<std::string> ids;
    for (const auto& item : j) {
        if (!item.contains("id"))
            throw DatasetError(origin + ": case without an id field");
        InputCase c;
        c.id = item["id"].get<std::string>();
        if (!ids.insert(c.id).second)
            throw DatasetError(origin + ": duplicate case id '" + c.id + "'");
        if (!item.contains("docstring"))
            throw DatasetError(origin + ": case '" + c.id + "': missing docstring");
        c.docstring = item["docstring"].get<std::string>();
        if (!item.contains("signature"))
            throw DatasetError(origin + ": case '" + c.id + "': missing signature");
        c.signature_text = item["signature"].get<std::string>();
        auto sig = spec::parse_signature(c.signature_text);
        if (auto* err = std::get_if<spec::ParseError>(&sig))
            throw DatasetError(origin + ": case '" + c.id + "': signature: " + err->render());
        c.signature = std::get<spec::Signature>(std::move(sig));
        if (item.contains("groundtruth") && !item["groundtruth"].is_null()) {
            c.groundtruth_text = assemble_spec_text(item["groundtruth"]);
            auto parsed = spec::parse_spec(*c.groundtruth_text, c.signature);
            if (auto* err = std::get_if<spec::ParseError>(&parsed))
                throw DatasetError(origin + ": case '" + c.id + "': groundtruth: " +
                                   err->render());
            c.groundtruth = std::get<spec::SpecPair>(std::move(parsed));
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<InputCase> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open dataset: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_dataset_text(ss.str(), path);
}

std::string dataset_id(const std::vector<InputCase>& dataset) {
    std::vector<std::string> ids;
    ids.reserve(dataset.size());
    for (const auto& c : dataset) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    std::uint64_t h = 14695981039346656037ULL;
    for (const auto& id : ids) {
        h = rng::fnv1a64(id, h);
        h = rng::fnv1a64("\x1f", h);
    }
    std::ostringstream os;
    os << "ds-" << std::hex << h << "-" << std::dec << dataset.size();
    return os.str();
}

// ---------------------------------------------------------------------------
// Campaign execution
// ---------------------------------------------------------------------------

namespace {

int alignment_row(Alignment a) {
    switch (a) {
        case Alignment::Aligned: return 0;
        case Alignment::MisalignedCorrectGenerated: return 1;
        case Alignment::CorrectNotGenerated: return 2;
    }
    return 2;
}

int concentration_col(Concentration c) {
    return c == Concentration::Concentrated ? 0 : 1;
}

// Memoizes the oracle on raw-text pairs; sound because every oracle kind is a
// deterministic function of the texts (given one signature).
struct MemoOracle {
    const Oracle& oracle;
    mutable std::map<std::pair<std::string, std::string>, bool> memo;

    bool operator()(const OutputSample& a, const OutputSample& b) const {
        auto key = a.raw_text <= b.raw_text ? std::make_pair(a.raw_text, b.raw_text)
                                            : std::make_pair(b.raw_text, a.raw_text);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool eq = oracle.equivalent(a, b);
        memo.emplace(std::move(key), eq);
        return eq;
    }
};

PerInputReport analyze_input(const TMRuntime& runtime, const InputCase& input,
                             const OracleSpec& ospec) {
    PerInputReport r;
    try {
        if (!input.groundtruth)
            throw DatasetError("case '" + input.id + "' has no groundtruth spec");
        std::vector<OutputSample> samples = runtime.sample_tm(input);

        Oracle oracle(ospec.kind, ospec.bounds, input.signature);
        MemoOracle memo{oracle, {}};
        EquivFn fn = [&memo](const OutputSample& a, const OutputSample& b) {
            return memo(a, b);
        };

        auto classes = cluster(samples, fn);
        EmpiricalDistribution dist = distribution(input.id, classes);

        OutputSample gt = make_valid_sample(-1, *input.groundtruth_text, *input.groundtruth);
        r.verdict = verdict(dist, gt, fn);
        r.entropy = entropy(dist);
        r.total_samples = dist.total_samples;
        for (const auto& cc : dist.classes) {
            ReportClass rc;
            rc.class_id = cc.meaning.class_id;
            rc.count = cc.count;
            rc.is_valid = cc.meaning.is_valid;
            rc.members.assign(cc.meaning.member_indices.begin(),
                              cc.meaning.member_indices.end());
            rc.representative_text = cc.meaning.representative.raw_text;
            r.classes.push_back(std::move(rc));
        }

        if (r.verdict.alignment != Alignment::Aligned) {
            const MeaningClass* winner = nullptr;
            for (const auto& cc : dist.classes)
                if (cc.meaning.class_id == r.verdict.winning_class_id) winner = &cc.meaning;
            spec::SpecParseResult candidate = spec::ParseError{};
            if (winner && winner->representative.valid())
                candidate = *winner->representative.spec_pair();
            else if (winner)
                candidate = spec::ParseError{spec::ErrorCategory::Syntax, 1, 1,
                                             winner->representative.parse_error_message()};
            r.mistake =
                spec::diagnose(candidate, *input.groundtruth, input.signature, ospec.bounds);
        }
    } catch (const std::exception& ex) {
        r.error = ex.what();
    }
    return r;
}

void aggregate(CampaignReport& report) {
    report.grid = VerdictGrid{};
    report.breakdown.clear();
    report.incomplete.clear();
    for (const auto& [id, r] : report.per_input) {
        if (!r.complete()) {
            report.incomplete.push_back(id);
            continue;
        }
        report.grid[alignment_row(r.verdict.alignment)]
                   [concentration_col(r.verdict.concentration)] += 1;
        if (r.mistake) {
            auto& cell = report.breakdown[r.mistake->primary];
            cell[concentration_col(r.verdict.concentration)] += 1;
        }
    }
}

}  // namespace

CampaignReport run_campaign(const TMConfig& config, const std::vector<InputCase>& dataset,
                            const OracleSpec& oracle, int jobs) {
    TMRuntime runtime(config);

    std::vector<const InputCase*> ordered;
    ordered.reserve(dataset.size());
    for (const auto& c : dataset) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const InputCase* a, const InputCase* b) { return a->id < b->id; });

    std::vector<PerInputReport> results(ordered.size());
    if (jobs <= 1) {
        for (size_t i = 0; i < ordered.size(); ++i)
            results[i] = analyze_input(runtime, *ordered[i], oracle);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= ordered.size()) return;
                results[i] = analyze_input(runtime, *ordered[i], oracle);
            }
        };
        std::vector<std::thread> pool;
        int n = std::min<int>(jobs, static_cast<int>(ordered.size()));
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    CampaignReport report;
    report.tm_id = config.tm_id;
    report.dataset = dataset_id(dataset);
    report.sampling = config.sampling;
    report.oracle = oracle;
    for (size_t i = 0; i < ordered.size(); ++i)
        report.per_input.emplace(ordered[i]->id, std::move(results[i]));
    aggregate(report);
    return report;
}

std::map<spec::MistakeLabel, std::array<int, 2>> mistake_breakdown(
    const CampaignReport& report) {
    return report.breakdown;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

namespace {

bool aligned(const PerInputReport& r) {
    return r.complete() && r.verdict.alignment == Alignment::Aligned;
}

bool concentrated(const PerInputReport& r) {
    return r.complete() && r.verdict.concentration == Concentration::Concentrated;
}

bool subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

ImprovementReport compare(const CampaignReport& base, const CampaignReport& next) {
    if (base.dataset != next.dataset)
        throw CompareError("reports cover different datasets: " + base.dataset + " vs " +
                           next.dataset);
    if (!(base.oracle == next.oracle))
        throw CompareError("reports used different oracles");

    ImprovementReport out;
    for (const auto& [id, r] : base.per_input) {
        if (aligned(r) && concentrated(r)) out.ac_base.push_back(id);
        if (!aligned(r) && concentrated(r)) out.cm_base.push_back(id);
    }
    for (const auto& [id, r] : next.per_input) {
        if (aligned(r) && concentrated(r)) out.ac_new.push_back(id);
        if (!aligned(r) && concentrated(r)) out.cm_new.push_back(id);
    }
    for (const auto& [id, r] : base.per_input) {
        if (!aligned(r)) continue;
        auto it = next.per_input.find(id);
        if (it == next.per_input.end() || !aligned(it->second))
            out.regressions.push_back(id);
    }

    out.ac_inclusion = subset(out.ac_base, out.ac_new);
    out.cm_inclusion = subset(out.cm_new, out.cm_base);
    out.improves = out.ac_inclusion && out.cm_new.size() <= out.cm_base.size() &&
                   out.regressions.empty();
    out.strictly_improves =
        out.improves &&
        (out.ac_new.size() > out.ac_base.size() || out.cm_new.size() < out.cm_base.size());
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

const char* mistake_json_name(spec::MistakeLabel m) {
    switch (m) {
        case spec::MistakeLabel::Equivalent: return "equivalent";
        case spec::MistakeLabel::SyntaxError: return "syntax_error";
        case spec::MistakeLabel::WeakPre: return "weak_pre";
        case spec::MistakeLabel::StrongPre: return "strong_pre";
        case spec::MistakeLabel::IncorrectPre: return "incorrect_pre";
        case spec::MistakeLabel::WeakPost: return "weak_post";
        case spec::MistakeLabel::StrongPost: return "strong_post";
        case spec::MistakeLabel::IncorrectPost: return "incorrect_post";
    }
    return "?";
}

spec::MistakeLabel mistake_from_json_name(const std::string& s) {
    for (auto m : {spec::MistakeLabel::Equivalent, spec::MistakeLabel::SyntaxError,
                   spec::MistakeLabel::WeakPre, spec::MistakeLabel::StrongPre,
                   spec::MistakeLabel::IncorrectPre, spec::MistakeLabel::WeakPost,
                   spec::MistakeLabel::StrongPost, spec::MistakeLabel::IncorrectPost})
        if (s == mistake_json_name(m)) return m;
    throw CompareError("unknown mistake label in report: " + s);
}

Alignment alignment_from_name(const std::string& s) {
    if (s == "aligned") return Alignment::Aligned;
    if (s == "misaligned_correct_generated") return Alignment::MisalignedCorrectGenerated;
    if (s == "correct_not_generated") return Alignment::CorrectNotGenerated;
    throw CompareError("unknown alignment in report: " + s);
}

json grid_to_json(const VerdictGrid& g) {
    json out;
    const char* rows[3] = {"aligned", "misaligned_correct_generated", "correct_not_generated"};
    for (int r = 0; r < 3; ++r) {
        out[rows[r]]["concentrated"] = g[r][0];
        out[rows[r]]["not_concentrated"] = g[r][1];
    }
    return out;
}

VerdictGrid grid_from_json(const json& j) {
    VerdictGrid g{};
    const char* rows[3] = {"aligned", "misaligned_correct_generated", "correct_not_generated"};
    for (int r = 0; r < 3; ++r) {
        g[r][0] = j.at(rows[r]).at("concentrated").get<int>();
        g[r][1] = j.at(rows[r]).at("not_concentrated").get<int>();
    }
    return g;
}

json sampling_to_json(const SamplingParams& s) {
    json out;
    out["temperature"] = s.temperature;
    out["top_k"] = s.top_k;
    out["top_p"] = s.top_p;
    out["n_samples"] = s.n_samples;
    out["seed"] = s.seed;
    return out;
}

SamplingParams sampling_from_json(const json& j) {
    SamplingParams s;
    s.temperature = j.value("temperature", 0.7);
    s.top_k = j.value("top_k", 40);
    s.top_p = j.value("top_p", 0.95);
    s.n_samples = j.value("n_samples", 30);
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
}

json oracle_to_json(const OracleSpec& o) {
    json out;
    out["kind"] = oracle_kind_name(o.kind);
    out["bounds"]["int_bound"] = o.bounds.int_bound;
    out["bounds"]["max_seq_len"] = o.bounds.max_seq_len;
    out["bounds"]["quantifier_lo"] = o.bounds.quantifier_lo;
    out["bounds"]["quantifier_hi"] = o.bounds.quantifier_hi;
    if (o.kind == OracleKind::BoundedSpecEquivalence) out["watermark"] = "bounded";
    return out;
}

OracleSpec oracle_from_json(const json& j) {
    OracleSpec o;
    auto kind = oracle_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) throw CompareError("unknown oracle kind in report");
    o.kind = *kind;
    const json& b = j.at("bounds");
    o.bounds.int_bound = b.at("int_bound").get<long long>();
    o.bounds.max_seq_len = b.at("max_seq_len").get<long long>();
    o.bounds.quantifier_lo = b.at("quantifier_lo").get<long long>();
    o.bounds.quantifier_hi = b.at("quantifier_hi").get<long long>();
    return o;
}

}  // namespace

std::string CampaignReport::to_json_text() const {
    json j;
    j["schema_version"] = schema_version;
    j["tm_id"] = tm_id;
    j["dataset_id"] = dataset;
    j["sampling"] = sampling_to_json(sampling);
    j["oracle"] = oracle_to_json(oracle);
    j["grid"] = grid_to_json(grid);

    json breakdown_json = json::object();
    for (const auto& [label, cells] : breakdown) {
        breakdown_json[mistake_json_name(label)]["concentrated"] = cells[0];
        breakdown_json[mistake_json_name(label)]["not_concentrated"] = cells[1];
    }
    j["mistake_breakdown"] = breakdown_json;

    json inputs = json::object();
    for (const auto& [id, r] : per_input) {
        json ji;
        if (r.error) {
            ji["error"] = *r.error;
        } else {
            json classes = json::array();
            for (const auto& c : r.classes) {
                json jc;
                jc["class_id"] = c.class_id;
                jc["count"] = c.count;
                jc["is_valid"] = c.is_valid;
                jc["members"] = c.members;
                jc["representative"] = c.representative_text;
                classes.push_back(std::move(jc));
            }
            ji["classes"] = std::move(classes);
            ji["total_samples"] = r.total_samples;
            ji["verdict"]["alignment"] = alignment_name(r.verdict.alignment);
            ji["verdict"]["concentration"] = concentration_name(r.verdict.concentration);
            ji["verdict"]["winning_class_id"] = r.verdict.winning_class_id;
            ji["verdict"]["winner_tied"] = r.verdict.winner_tied;
            ji["entropy"] = r.entropy;
            if (r.mistake) {
                ji["mistake"]["primary"] = mistake_json_name(r.mistake->primary);
                json labels = json::array();
                for (auto m : r.mistake->labels) labels.push_back(mistake_json_name(m));
                ji["mistake"]["labels"] = std::move(labels);
            }
        }
        inputs[id] = std::move(ji);
    }
    j["per_input"] = std::move(inputs);
    j["incomplete"] = incomplete;
    return j.dump(2) + "\n";
}

CampaignReport CampaignReport::from_json_text(const std::string& text) {
    json j = json::parse(text);
    CampaignReport r;
    r.schema_version = j.value("schema_version", 1);
    r.tm_id = j.value("tm_id", "");
    r.dataset = j.value("dataset_id", "");
    r.sampling = sampling_from_json(j.at("sampling"));
    r.oracle = oracle_from_json(j.at("oracle"));
    r.grid = grid_from_json(j.at("grid"));
    if (j.contains("mistake_breakdown"))
        for (const auto& [name, cells] : j["mistake_breakdown"].items())
            r.breakdown[mistake_from_json_name(name)] = {
                cells.at("concentrated").get<int>(), cells.at("not_concentrated").get<int>()};
    for (const auto& [id, ji] : j.at("per_input").items()) {
        PerInputReport pir;
        if (ji.contains("error")) {
            pir.error = ji["error"].get<std::string>();
        } else {
            for (const auto& jc : ji.at("classes")) {
                ReportClass c;
                c.class_id = jc.at("class_id").get<int>();
                c.count = jc.at("count").get<int>();
                c.is_valid = jc.at("is_valid").get<bool>();
                c.members = jc.at("members").get<std::vector<int>>();
                c.representative_text = jc.at("representative").get<std::string>();
                pir.classes.push_back(std::move(c));
            }
            pir.total_samples = ji.at("total_samples").get<int>();
            pir.verdict.alignment =
                alignment_from_name(ji.at("verdict").at("alignment").get<std::string>());
            pir.verdict.concentration =
                ji.at("verdict").at("concentration").get<std::string>() == "concentrated"
                    ? Concentration::Concentrated
                    : Concentration::NotConcentrated;
            pir.verdict.winning_class_id = ji.at("verdict").at("winning_class_id").get<int>();
            pir.verdict.winner_tied = ji.at("verdict").at("winner_tied").get<bool>();
            pir.entropy = ji.at("entropy").get<double>();
            if (ji.contains("mistake")) {
                spec::Diagnosis d;
                d.primary =
                    mistake_from_json_name(ji["mistake"].at("primary").get<std::string>());
                for (const auto& m : ji["mistake"].at("labels"))
                    d.labels.push_back(mistake_from_json_name(m.get<std::string>()));
                pir.mistake = std::move(d);
            }
        }
        r.per_input.emplace(id, std::move(pir));
    }
    if (j.contains("incomplete"))
        r.incomplete = j["incomplete"].get<std::vector<std::string>>();
    return r;
}

void CampaignReport::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot write report: " + path);
    out << to_json_text();
}

CampaignReport CampaignReport::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open report: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ImprovementReport::to_json_text() const {
    json j;
    j["ac_base"] = ac_base;
    j["ac_new"] = ac_new;
    j["cm_base"] = cm_base;
    j["cm_new"] = cm_new;
    j["regressions"] = regressions;
    j["improves"] = improves;
    j["strictly_improves"] = strictly_improves;
    j["ac_inclusion"] = ac_inclusion;
    j["cm_inclusion"] = cm_inclusion;
    return j.dump(2) + "\n";
}

std::string ImprovementReport::render_text() const {
    std::ostringstream os;
    os << "AC (aligned & concentrated): " << ac_base.size() << " -> " << ac_new.size() << "\n";
    os << "CM (concentrated & misaligned): " << cm_base.size() << " -> " << cm_new.size()
       << "\n";
    os << "regressions: " << regressions.size();
    for (const auto& id : regressions) os << " " << id;
    os << "\n";
    os << "AC_base subset of AC_new: " << (ac_inclusion ? "yes" : "no") << "\n";
    os << "CM_new subset of CM_base: " << (cm_inclusion ? "yes" : "no") << "\n";
    os << "improves: " << (improves ? "yes" : "no") << "\n";
    os << "strictly improves: " << (strictly_improves ? "yes" : "no") << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

namespace {

const char* kRowLabels[3] = {"Aligned", "Correct class gen. but misaligned distr.",
                             "Correct class not generated"};

}  // namespace

std::string summarize(const CampaignReport& report, TableFormat format) {
    const VerdictGrid& g = report.grid;
    switch (format) {
        case TableFormat::Json:
            return grid_to_json(g).dump(2) + "\n";
        case TableFormat::Csv: {
            std::ostringstream os;
            os << "alignment,concentrated,not_concentrated\n";
            for (int r = 0; r < 3; ++r)
                os << "\"" << kRowLabels[r] << "\"," << g[r][0] << "," << g[r][1] << "\n";
            return os.str();
        }
        case TableFormat::Text: {
            std::ostringstream os;
            os << std::left << std::setw(44) << "Alignment/Concentration" << std::right
               << std::setw(14) << "Concentrated" << std::setw(18) << "Not Concentrated"
               << "\n";
            for (int r = 0; r < 3; ++r)
                os << std::left << std::setw(44) << kRowLabels[r] << std::right
                   << std::setw(14) << g[r][0] << std::setw(18) << g[r][1] << "\n";
            return os.str();
        }
    }
    return {};
}

std::string render_breakdown(const CampaignReport& report, TableFormat format) {
    const auto& b = report.breakdown;
    int total_c = 0, total_n = 0;
    for (const auto& [_, cells] : b) {
        total_c += cells[0];
        total_n += cells[1];
    }
    switch (format) {
        case TableFormat::Json: {
            json j = json::object();
            for (const auto& [label, cells] : b) {
                j[mistake_json_name(label)]["concentrated"] = cells[0];
                j[mistake_json_name(label)]["not_concentrated"] = cells[1];
            }
            j["total"]["concentrated"] = total_c;
            j["total"]["not_concentrated"] = total_n;
            return j.dump(2) + "\n";
        }
        case TableFormat::Csv: {
            std::ostringstream os;
            os << "mistake,concentrated,not_concentrated\n";
            for (const auto& [label, cells] : b)
                os << mistake_json_name(label) << "," << cells[0] << "," << cells[1] << "\n";
            os << "total," << total_c << "," << total_n << "\n";
            return os.str();
        }
        case TableFormat::Text: {
            std::ostringstream os;
            os << std::left << std::setw(28) << "Formalization Mistakes" << std::right
               << std::setw(14) << "Concentrated" << std::setw(18) << "Not Concentrated"
               << "\n";
            for (const auto& [label, cells] : b)
                os << std::left << std::setw(28) << spec::mistake_label_name(label)
                   << std::right << std::setw(14) << cells[0] << std::setw(18) << cells[1]
                   << "\n";
            os << std::left << std::setw(28) << "Total" << std::right << std::setw(14)
               << total_c << std::setw(18) << total_n << "\n";
            return os.str();
        }
    }
    return {};
}

}  // namespace tmprob
