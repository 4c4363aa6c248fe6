// tmprob command-line interface: run sampling campaigns over a dataset,
// re-render report tables, compare two campaign reports, and work with the
// spec mini-language directly (check/equiv/diagnose).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tmprob/campaign.hpp"
#include "tmprob/oracle.hpp"
#include "tmprob/spec_lang.hpp"
#include "tmprob/tm_runtime.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Spec arguments may name a file or be inline text.
std::string file_or_literal(const std::string& arg) {
    if (std::filesystem::exists(arg)) return read_file(arg);
    return arg;
}

tmprob::TableFormat parse_format(const std::string& f) {
    if (f == "text") return tmprob::TableFormat::Text;
    if (f == "csv") return tmprob::TableFormat::Csv;
    if (f == "json") return tmprob::TableFormat::Json;
    throw UsageError("unknown format: " + f);
}

tmprob::spec::Signature parse_signature_arg(const std::string& text) {
    auto sig = tmprob::spec::parse_signature(file_or_literal(text));
    if (auto* err = std::get_if<tmprob::spec::ParseError>(&sig))
        throw UsageError("signature: " + err->render());
    return std::get<tmprob::spec::Signature>(std::move(sig));
}

struct RunArgs {
    std::string dataset_path;
    std::string config_path;
    std::string out_path = "report.json";
    std::string oracle_name = "bounded-spec";
    std::string format = "text";
    int samples = 0;       // 0 = keep config value
    std::uint64_t seed = 0;
    bool seed_given = false;
    long long int_bound = 2;
    long long len_bound = 2;
    int jobs = 1;
};

int cmd_run(const RunArgs& args) {
    auto dataset = tmprob::load_dataset(args.dataset_path);
    auto config = tmprob::TMConfig::load(args.config_path);
    if (args.samples > 0) config.sampling.n_samples = args.samples;
    if (args.seed_given) config.sampling.seed = args.seed;

    tmprob::OracleSpec oracle;
    auto kind = tmprob::oracle_kind_from_name(args.oracle_name);
    if (!kind) throw UsageError("unknown oracle kind: " + args.oracle_name);
    oracle.kind = *kind;
    oracle.bounds = tmprob::spec::EvaluationBounds::from(args.int_bound, args.len_bound);

    auto report = tmprob::run_campaign(config, dataset, oracle, args.jobs);
    report.save(args.out_path);
    std::cout << tmprob::summarize(report, parse_format(args.format));
    if (!report.incomplete.empty()) {
        std::cerr << report.incomplete.size() << " input(s) incomplete:";
        for (const auto& id : report.incomplete) std::cerr << " " << id;
        std::cerr << "\n";
    }
    return kExitOk;
}

int cmd_analyze(const std::string& report_path, const std::string& format) {
    auto report = tmprob::CampaignReport::load(report_path);
    tmprob::TableFormat f = parse_format(format);
    std::cout << tmprob::summarize(report, f);
    if (f == tmprob::TableFormat::Text) std::cout << "\n";
    std::cout << tmprob::render_breakdown(report, f);
    return kExitOk;
}

int cmd_compare(const std::string& base_path, const std::string& new_path,
                const std::string& format, bool fail_on_regression) {
    auto base = tmprob::CampaignReport::load(base_path);
    auto next = tmprob::CampaignReport::load(new_path);
    auto result = tmprob::compare(base, next);
    if (format == "json")
        std::cout << result.to_json_text();
    else
        std::cout << result.render_text();
    if (fail_on_regression && !result.regressions.empty()) return kExitDomain;
    return kExitOk;
}

int cmd_diagnose(const std::string& signature, const std::string& groundtruth_arg,
                 const std::string& candidate_arg, long long int_bound, long long len_bound,
                 const std::string& format) {
    auto sig = parse_signature_arg(signature);
    auto bounds = tmprob::spec::EvaluationBounds::from(int_bound, len_bound);

    auto gt = tmprob::spec::parse_spec(file_or_literal(groundtruth_arg), sig);
    if (auto* err = std::get_if<tmprob::spec::ParseError>(&gt))
        throw UsageError("groundtruth: " + err->render());

    auto candidate = tmprob::spec::parse_spec(file_or_literal(candidate_arg), sig);
    auto diag = tmprob::spec::diagnose(candidate, std::get<tmprob::spec::SpecPair>(gt), sig,
                                       bounds);
    if (format == "json") {
        nlohmann::json j;
        j["primary"] = tmprob::spec::mistake_label_name(diag.primary);
        nlohmann::json labels = nlohmann::json::array();
        for (auto m : diag.labels) labels.push_back(tmprob::spec::mistake_label_name(m));
        j["labels"] = labels;
        j["watermark"] = "bounded";
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << tmprob::spec::mistake_label_name(diag.primary) << "\n";
        if (diag.labels.size() > 1) {
            std::cout << "all labels:";
            for (auto m : diag.labels) std::cout << " " << tmprob::spec::mistake_label_name(m);
            std::cout << "\n";
        }
    }
    return kExitOk;
}

int cmd_equiv(const std::string& signature, const std::string& a_arg, const std::string& b_arg,
              long long int_bound, long long len_bound, const std::string& smtlib_path,
              const std::string& format) {
    auto sig = parse_signature_arg(signature);
    auto bounds = tmprob::spec::EvaluationBounds::from(int_bound, len_bound);

    auto pa = tmprob::spec::parse_spec(file_or_literal(a_arg), sig);
    if (auto* err = std::get_if<tmprob::spec::ParseError>(&pa))
        throw UsageError("spec A: " + err->render());
    auto pb = tmprob::spec::parse_spec(file_or_literal(b_arg), sig);
    if (auto* err = std::get_if<tmprob::spec::ParseError>(&pb))
        throw UsageError("spec B: " + err->render());

    const auto& sa = std::get<tmprob::spec::SpecPair>(pa);
    const auto& sb = std::get<tmprob::spec::SpecPair>(pb);
    bool eq = tmprob::spec::equivalent_bounded(sa, sb, sig, bounds);

    if (!smtlib_path.empty()) {
        std::ofstream out(smtlib_path);
        if (!out) throw UsageError("cannot write SMT-LIB script: " + smtlib_path);
        out << tmprob::spec::to_smtlib(sa, sb, sig);
    }
    if (format == "json") {
        nlohmann::json j;
        j["equivalent"] = eq;
        j["watermark"] = "bounded";
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (eq ? "equivalent (bounded)" : "not equivalent (bounded)") << "\n";
    }
    return kExitOk;
}

int cmd_check(const std::string& signature, const std::string& spec_arg,
              const std::string& format) {
    auto sig = parse_signature_arg(signature);
    auto parsed = tmprob::spec::parse_spec(file_or_literal(spec_arg), sig);
    if (auto* err = std::get_if<tmprob::spec::ParseError>(&parsed)) {
        if (format == "json") {
            nlohmann::json j;
            j["ok"] = false;
            j["error"] = err->render();
            j["line"] = err->line;
            j["col"] = err->col;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << err->render() << "\n";
        }
        return kExitDomain;
    }
    const auto& sp = std::get<tmprob::spec::SpecPair>(parsed);
    if (format == "json") {
        nlohmann::json j;
        j["ok"] = true;
        j["canonical"] = tmprob::spec::to_string(sp);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "ok\n" << tmprob::spec::to_string(sp) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic analysis of LLM transference models"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run a sampling campaign over a dataset");
    run->add_option("--dataset", run_args.dataset_path, "dataset JSON file")->required();
    run->add_option("--tm-config", run_args.config_path, "TM config JSON file")->required();
    run->add_option("--samples", run_args.samples, "samples per input (default 30)");
    auto* seed_opt = run->add_option("--seed", run_args.seed, "PRNG seed");
    run->add_option("--oracle", run_args.oracle_name,
                    "equivalence oracle: exact | normalized | bounded-spec");
    run->add_option("--int-bound", run_args.int_bound, "bounded-domain integer radius");
    run->add_option("--len-bound", run_args.len_bound, "bounded-domain max sequence length");
    run->add_option("--out", run_args.out_path, "report output path");
    run->add_option("--jobs", run_args.jobs, "worker threads across inputs");
    run->add_option("--format", run_args.format, "stdout table format: text | csv | json");

    std::string analyze_report, analyze_format = "text";
    auto* analyze = app.add_subcommand("analyze", "Render tables from an existing report");
    analyze->add_option("--report", analyze_report, "campaign report JSON")->required();
    analyze->add_option("--format", analyze_format, "text | csv | json");

    std::string cmp_base, cmp_new, cmp_format = "text";
    bool fail_on_regression = false;
    auto* cmp = app.add_subcommand("compare", "Compare two campaign reports");
    cmp->add_option("base", cmp_base, "baseline report JSON")->required();
    cmp->add_option("new", cmp_new, "candidate report JSON")->required();
    cmp->add_option("--format", cmp_format, "text | json");
    cmp->add_flag("--fail-on-regression", fail_on_regression,
                  "exit 1 when any base-aligned input loses alignment");

    std::string diag_sig, diag_gt, diag_cand, diag_format = "text";
    long long diag_b = 2, diag_l = 2;
    auto* diag = app.add_subcommand("diagnose", "Classify a candidate spec against groundtruth");
    diag->add_option("--signature", diag_sig, "method signature (text or file)")->required();
    diag->add_option("--groundtruth", diag_gt, "groundtruth spec (text or file)")->required();
    diag->add_option("--candidate", diag_cand, "candidate spec (text or file)")->required();
    diag->add_option("--int-bound", diag_b, "bounded-domain integer radius");
    diag->add_option("--len-bound", diag_l, "bounded-domain max sequence length");
    diag->add_option("--format", diag_format, "text | json");

    std::string eq_sig, eq_a, eq_b, eq_smtlib, eq_format = "text";
    long long eq_ib = 2, eq_lb = 2;
    auto* equiv = app.add_subcommand("equiv", "Decide bounded equivalence of two specs");
    equiv->add_option("--signature", eq_sig, "method signature (text or file)")->required();
    equiv->add_option("a", eq_a, "first spec (text or file)")->required();
    equiv->add_option("b", eq_b, "second spec (text or file)")->required();
    equiv->add_option("--int-bound", eq_ib, "bounded-domain integer radius");
    equiv->add_option("--len-bound", eq_lb, "bounded-domain max sequence length");
    equiv->add_option("--emit-smtlib", eq_smtlib, "also write the SMT-LIB 2 query here");
    equiv->add_option("--format", eq_format, "text | json");

    std::string chk_sig, chk_spec, chk_format = "text";
    auto* check = app.add_subcommand("check", "Parse and typecheck a spec");
    check->add_option("--signature", chk_sig, "method signature (text or file)")->required();
    check->add_option("spec", chk_spec, "spec to check (text or file)")->required();
    check->add_option("--format", chk_format, "text | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        run_args.seed_given = seed_opt->count() > 0;
        if (run->parsed()) return cmd_run(run_args);
        if (analyze->parsed()) return cmd_analyze(analyze_report, analyze_format);
        if (cmp->parsed()) return cmd_compare(cmp_base, cmp_new, cmp_format, fail_on_regression);
        if (diag->parsed())
            return cmd_diagnose(diag_sig, diag_gt, diag_cand, diag_b, diag_l, diag_format);
        if (equiv->parsed())
            return cmd_equiv(eq_sig, eq_a, eq_b, eq_ib, eq_lb, eq_smtlib, eq_format);
        if (check->parsed()) return cmd_check(chk_sig, chk_spec, chk_format);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tmprob::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tmprob::DatasetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tmprob::CompareError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
