#pragma once

// Stochastic transference-model execution: prompt construction with few-shot
// retrieval, generation through pluggable backends, syntax validation, and a
// bounded corrective-retry loop driven by parse errors.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmprob/distribution.hpp"
#include "tmprob/spec_lang.hpp"

namespace tmprob {

struct SamplingParams {
    double temperature = 0.7;
    int top_k = 40;
    double top_p = 0.95;
    int n_samples = 30;
    std::uint64_t seed = 0;
};

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Counter-based deterministic randomness: a draw is a pure function of its
// key, so samples can run in any order or concurrency schedule.
namespace rng {
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 14695981039346656037ULL);
std::uint64_t splitmix64(std::uint64_t x);
// uniform in [0, 1)
double unit_double(std::uint64_t x);
std::uint64_t draw_key(std::uint64_t seed, std::string_view lookup_key, int sample_index,
                       int retry);
}  // namespace rng

// ---------------------------------------------------------------------------
// Few-shot retrieval
// ---------------------------------------------------------------------------

struct FewShotEntry {
    std::string docstring;
    std::string signature;
    std::string spec;
};

// Token-frequency cosine retrieval over entry docstrings. Ties keep entry
// order; k larger than the store returns everything.
class FewShotStore {
   public:
    FewShotStore() = default;
    static FewShotStore from_entries(std::vector<FewShotEntry> entries);
    static FewShotStore load(const std::string& path);

    std::vector<FewShotEntry> retrieve(const std::string& query_docstring, int k) const;
    size_t size() const { return entries_.size(); }

   private:
    std::vector<FewShotEntry> entries_;
    std::vector<std::map<std::string, double>> index_;
    std::vector<double> norms_;
};

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

struct InputCase {
    std::string id;
    std::string docstring;
    spec::Signature signature;
    std::string signature_text;
    std::optional<std::string> groundtruth_text;
    std::optional<spec::SpecPair> groundtruth;
};

// ---------------------------------------------------------------------------
// Record/replay cache (append-only JSON lines)
// ---------------------------------------------------------------------------

struct CacheLine {
    std::string key;
    std::string prompt;
    std::string response;
    std::int64_t timestamp = 0;
};

std::string cache_key(const std::string& backend_id, const std::string& prompt,
                      const SamplingParams& sampling, int sample_index, int retry);

std::map<std::string, CacheLine> load_cache(const std::string& path);
void append_cache(const std::string& path, const CacheLine& line);

// ---------------------------------------------------------------------------
// Generation backends
// ---------------------------------------------------------------------------

class GenerationBackend {
   public:
    virtual ~GenerationBackend() = default;
    virtual std::string id() const = 0;
    // lookup_key identifies the logical generation slot (the input id, or a
    // derived key for preprocessing classification calls); simulated backends
    // resolve their tables and PRNG draws with it.
    virtual std::string generate(const std::string& prompt, const SamplingParams& sampling,
                                 const std::string& lookup_key, int sample_index,
                                 int retry) const = 0;
};

// One simulated table entry; exactly one mode is used, checked in this order:
//   script     — indexed by retry (clamped to the last entry)
//   cycle      — indexed by sample_index modulo the length
//   candidates — weighted categorical draw via the keyed PRNG
struct SimEntry {
    std::vector<std::pair<std::string, double>> candidates;
    std::vector<std::string> cycle;
    std::vector<std::string> script;
};

struct BackendConfig {
    enum class Type { Simulated, Replay, HttpChat };
    Type type = Type::Simulated;
    std::string id = "simulated";
    // simulated
    std::map<std::string, SimEntry> table;
    std::optional<SimEntry> fallback;
    // replay + http
    std::string cache_path;
    // http
    std::string url;
    std::string model;
};

std::unique_ptr<GenerationBackend> make_backend(const BackendConfig& config);

// ---------------------------------------------------------------------------
// TM configuration and pipeline
// ---------------------------------------------------------------------------

enum class Preprocessing { None, StructuredDocstring };

struct TMConfig {
    std::string tm_id;
    BackendConfig backend;
    std::string prompt_template;
    std::string corrective_template;
    std::string classify_template;
    int max_corrective_retries = 2;
    int fewshot_k = 3;
    std::optional<std::string> fewshot_store_path;
    SamplingParams sampling;
    Preprocessing preprocessing = Preprocessing::None;

    // Parses a config JSON file; relative cache/store paths resolve against
    // the file's directory. Throws ConfigError.
    static TMConfig load(const std::string& path);
    static TMConfig from_json_text(const std::string& text, const std::string& base_dir = ".");
};

// Deterministic placeholder substitution; any "{name}" must be a key of
// vars, otherwise a ConfigError is thrown.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& vars);

// Sentence boundaries: '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::string> split_sentences(const std::string& text);

enum class SentenceLabel { PreCondition, PostCondition, None };
SentenceLabel parse_sentence_label(const std::string& backend_response);

class TMRuntime {
   public:
    explicit TMRuntime(TMConfig config);

    const TMConfig& config() const { return config_; }
    const FewShotStore& fewshot_store() const { return store_; }

    // One full pipeline run: optional preprocessing, few-shot retrieval,
    // prompt rendering, generation, parsing, and bounded corrective retries.
    // Parse failures are data (an Invalid sample); backend failures throw.
    OutputSample run_pipeline(const InputCase& input, int sample_index) const;

    // n_samples independent pipeline runs, deterministic under a fixed seed.
    std::vector<OutputSample> sample_tm(const InputCase& input) const;

    // Re-assembles the docstring into Preconditions/Postconditions/Context
    // blocks using one backend classification call per sentence.
    std::string preprocess_docstring(const InputCase& input, int sample_index) const;

    std::string render_examples_block(const InputCase& input) const;

   private:
    TMConfig config_;
    std::unique_ptr<GenerationBackend> backend_;
    FewShotStore store_;
};

}  // namespace tmprob
