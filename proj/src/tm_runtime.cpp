#include "tmprob/tm_runtime.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace tmprob {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

namespace rng {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97f4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double unit_double(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

std::uint64_t draw_key(std::uint64_t seed, std::string_view lookup_key, int sample_index,
                       int retry) {
    std::uint64_t h = 14695981039346656037ULL;
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((seed >> (8 * i)) & 0xFF);
    h = fnv1a64(std::string_view(buf, 8), h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(lookup_key, h);
    h = fnv1a64("\x1f", h);
    for (int i = 0; i < 8; ++i)
        buf[i] = static_cast<char>((static_cast<std::uint64_t>(sample_index) >> (8 * i)) & 0xFF);
    h = fnv1a64(std::string_view(buf, 8), h);
    for (int i = 0; i < 8; ++i)
        buf[i] = static_cast<char>((static_cast<std::uint64_t>(retry) >> (8 * i)) & 0xFF);
    h = fnv1a64(std::string_view(buf, 8), h);
    return splitmix64(h);
}

}  // namespace rng

// ---------------------------------------------------------------------------
// Few-shot retrieval
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, double> token_frequencies(const std::string& text) {
    std::map<std::string, double> tf;
    std::string token;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            token.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!token.empty()) {
            tf[token] += 1.0;
            token.clear();
        }
    }
    if (!token.empty()) tf[token] += 1.0;
    return tf;
}

double vector_norm(const std::map<std::string, double>& tf) {
    double s = 0.0;
    for (const auto& [_, v] : tf) s += v * v;
    return std::sqrt(s);
}

double cosine(const std::map<std::string, double>& a, double na,
              const std::map<std::string, double>& b, double nb) {
    if (na == 0.0 || nb == 0.0) return 0.0;
    double dot = 0.0;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if (it != b.end()) dot += v * it->second;
    }
    return dot / (na * nb);
}

}  // namespace

FewShotStore FewShotStore::from_entries(std::vector<FewShotEntry> entries) {
    FewShotStore s;
    s.entries_ = std::move(entries);
    for (const auto& e : s.entries_) {
        s.index_.push_back(token_frequencies(e.docstring));
        s.norms_.push_back(vector_norm(s.index_.back()));
    }
    return s;
}

FewShotStore FewShotStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open few-shot store: " + path);
    json j = json::parse(in, nullptr, true, false);
    if (!j.is_array()) throw ConfigError("few-shot store must be a JSON array: " + path);
    std::vector<FewShotEntry> entries;
    for (const auto& item : j) {
        FewShotEntry e;
        e.docstring = item.at("docstring").get<std::string>();
        e.signature = item.at("signature").get<std::string>();
        e.spec = item.at("spec").get<std::string>();
        entries.push_back(std::move(e));
    }
    return from_entries(std::move(entries));
}

std::vector<FewShotEntry> FewShotStore::retrieve(const std::string& query_docstring,
                                                 int k) const {
    if (k <= 0 || entries_.empty()) return {};
    auto qtf = token_frequencies(query_docstring);
    double qn = vector_norm(qtf);
    std::vector<std::pair<double, size_t>> scored;
    scored.reserve(entries_.size());
    for (size_t i = 0; i < entries_.size(); ++i)
        scored.emplace_back(cosine(qtf, qn, index_[i], norms_[i]), i);
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<FewShotEntry> out;
    for (size_t i = 0; i < scored.size() && static_cast<int>(i) < k; ++i)
        out.push_back(entries_[scored[i].second]);
    return out;
}

// ---------------------------------------------------------------------------
// Record/replay cache
// ---------------------------------------------------------------------------

std::string cache_key(const std::string& backend_id, const std::string& prompt,
                      const SamplingParams& sampling, int sample_index, int retry) {
    std::ostringstream canon;
    canon << backend_id << '\x1f' << prompt << '\x1f' << sampling.temperature << '\x1f'
          << sampling.top_k << '\x1f' << sampling.top_p << '\x1f' << sampling.seed << '\x1f'
          << sampling.n_samples << '\x1f' << sample_index << '\x1f' << retry;
    std::uint64_t h = rng::fnv1a64(canon.str());
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

namespace {
std::mutex g_cache_mutex;
}

std::map<std::string, CacheLine> load_cache(const std::string& path) {
    std::map<std::string, CacheLine> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        CacheLine cl;
        cl.key = j.value("key", "");
        cl.prompt = j.value("prompt", "");
        cl.response = j.value("response", "");
        cl.timestamp = j.value("timestamp", std::int64_t{0});
        out[cl.key] = std::move(cl);
    }
    return out;
}

void append_cache(const std::string& path, const CacheLine& line) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    std::ofstream out(path, std::ios::app);
    if (!out) throw BackendError("cannot append to cache file: " + path);
    json j;
    j["key"] = line.key;
    j["prompt"] = line.prompt;
    j["response"] = line.response;
    j["timestamp"] = line.timestamp;
    out << j.dump() << '\n';
}

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

namespace {

class SimulatedBackend final : public GenerationBackend {
   public:
    explicit SimulatedBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

    std::string id() const override { return cfg_.id; }

    std::string generate(const std::string&, const SamplingParams& sampling,
                         const std::string& lookup_key, int sample_index,
                         int retry) const override {
        const SimEntry* entry = nullptr;
        auto it = cfg_.table.find(lookup_key);
        if (it != cfg_.table.end())
            entry = &it->second;
        else if (cfg_.fallback)
            entry = &*cfg_.fallback;
        if (!entry)
            throw BackendError("simulated backend has no entry for key '" + lookup_key + "'");

        if (!entry->script.empty()) {
            size_t i = std::min(static_cast<size_t>(retry), entry->script.size() - 1);
            return entry->script[i];
        }
        if (!entry->cycle.empty())
            return entry->cycle[static_cast<size_t>(sample_index) % entry->cycle.size()];
        if (entry->candidates.empty())
            throw BackendError("simulated entry for key '" + lookup_key + "' is empty");

        double total = 0.0;
        for (const auto& [_, w] : entry->candidates) total += w;
        double u = rng::unit_double(
                       rng::draw_key(sampling.seed, lookup_key, sample_index, retry)) *
                   total;
        double cum = 0.0;
        for (const auto& [text, w] : entry->candidates) {
            cum += w;
            if (u < cum) return text;
        }
        return entry->candidates.back().first;
    }

   private:
    BackendConfig cfg_;
};

class ReplayBackend final : public GenerationBackend {
   public:
    explicit ReplayBackend(BackendConfig cfg)
        : cfg_(std::move(cfg)), cache_(load_cache(cfg_.cache_path)) {}

    std::string id() const override { return cfg_.id; }

    std::string generate(const std::string& prompt, const SamplingParams& sampling,
                         const std::string&, int sample_index, int retry) const override {
        std::string key = cache_key(cfg_.id, prompt, sampling, sample_index, retry);
        auto it = cache_.find(key);
        if (it == cache_.end())
            throw BackendError("replay cache miss for key " + key + " (sample " +
                               std::to_string(sample_index) + ", retry " +
                               std::to_string(retry) + ")");
        return it->second.response;
    }

   private:
    BackendConfig cfg_;
    std::map<std::string, CacheLine> cache_;
};

class HttpChatBackend final : public GenerationBackend {
   public:
    explicit HttpChatBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
        auto scheme_end = cfg_.url.find("://");
        if (scheme_end == std::string::npos)
            throw ConfigError("http backend url must include a scheme: " + cfg_.url);
        auto path_start = cfg_.url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base_ = cfg_.url;
            path_ = "/";
        } else {
            base_ = cfg_.url.substr(0, path_start);
            path_ = cfg_.url.substr(path_start);
        }
    }

    std::string id() const override { return cfg_.id; }

    std::string generate(const std::string& prompt, const SamplingParams& sampling,
                         const std::string&, int sample_index, int retry) const override {
        json body;
        body["model"] = cfg_.model;
        body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
        body["temperature"] = sampling.temperature;
        body["top_p"] = sampling.top_p;
        const std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt < kTransportRetries; ++attempt) {
            httplib::Client client(base_);
            client.set_read_timeout(60, 0);
            httplib::Headers headers;
            if (const char* key = std::getenv("TMPROB_API_KEY"))
                headers.emplace("Authorization", std::string("Bearer ") + key);
            auto res = client.Post(path_, headers, payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "http status " + std::to_string(res->status);
                continue;
            }
            json reply = json::parse(res->body, nullptr, false);
            if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty())
                throw BackendError("malformed chat-completions response: " + res->body);
            std::string text = reply["choices"][0]["message"]["content"].get<std::string>();

            CacheLine cl;
            cl.key = cache_key(cfg_.id, prompt, sampling, sample_index, retry);
            cl.prompt = prompt;
            cl.response = text;
            cl.timestamp = std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();
            append_cache(cfg_.cache_path, cl);
            return text;
        }
        throw BackendError("http backend failed after " + std::to_string(kTransportRetries) +
                           " attempts: " + last_error);
    }

   private:
    static constexpr int kTransportRetries = 3;
    BackendConfig cfg_;
    std::string base_;
    std::string path_;
};

}  // namespace

std::unique_ptr<GenerationBackend> make_backend(const BackendConfig& config) {
    switch (config.type) {
        case BackendConfig::Type::Simulated:
            return std::make_unique<SimulatedBackend>(config);
        case BackendConfig::Type::Replay:
            return std::make_unique<ReplayBackend>(config);
        case BackendConfig::Type::HttpChat:
            return std::make_unique<HttpChatBackend>(config);
    }
    throw ConfigError("unknown backend type");
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

const char* kDefaultPromptTemplate =
    "Translate the docstring into requires/ensures clauses for the method.\n"
    "\n"
    "Signature: {signature}\n"
    "\n"
    "{examples}"
    "Docstring: {docstring}\n"
    "\n"
    "Specification:";

const char* kDefaultCorrectiveTemplate =
    "The previous specification failed to parse.\n"
    "\n"
    "Error: {feedback}\n"
    "\n"
    "Signature: {signature}\n"
    "\n"
    "{examples}"
    "Docstring: {docstring}\n"
    "\n"
    "Corrected specification:";

const char* kDefaultClassifyTemplate =
    "Classify this docstring sentence as 'pre-condition', 'post-condition', or 'none'.\n"
    "\n"
    "Sentence: {sentence}\n"
    "\n"
    "Label:";

void validate_template(const std::string& tmpl, const std::vector<std::string>& allowed,
                       const std::string& which) {
    size_t pos = 0;
    while ((pos = tmpl.find('{', pos)) != std::string::npos) {
        size_t end = tmpl.find('}', pos);
        if (end == std::string::npos)
            throw ConfigError(which + ": unterminated placeholder");
        std::string name = tmpl.substr(pos + 1, end - pos - 1);
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
            throw ConfigError(which + ": unknown placeholder {" + name + "}");
        pos = end + 1;
    }
}

SimEntry parse_sim_entry(const json& j) {
    SimEntry e;
    if (j.contains("script"))
        for (const auto& s : j["script"]) e.script.push_back(s.get<std::string>());
    if (j.contains("cycle"))
        for (const auto& s : j["cycle"]) e.cycle.push_back(s.get<std::string>());
    if (j.contains("candidates"))
        for (const auto& c : j["candidates"])
            e.candidates.emplace_back(c.at("text").get<std::string>(),
                                      c.at("weight").get<double>());
    if (e.script.empty() && e.cycle.empty() && e.candidates.empty())
        throw ConfigError("simulated entry needs one of: script, cycle, candidates");
    return e;
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return p;
    return (std::filesystem::path(base_dir) / fp).string();
}

}  // namespace

TMConfig TMConfig::from_json_text(const std::string& text, const std::string& base_dir) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("TM config is not valid JSON");

    TMConfig c;
    c.tm_id = j.value("tm_id", "tm");
    c.prompt_template = j.value("prompt_template", kDefaultPromptTemplate);
    c.corrective_template = j.value("corrective_template", kDefaultCorrectiveTemplate);
    c.classify_template = j.value("classify_template", kDefaultClassifyTemplate);
    c.max_corrective_retries = j.value("max_corrective_retries", 2);
    if (c.max_corrective_retries < 0)
        throw ConfigError("max_corrective_retries must be nonnegative");
    c.fewshot_k = j.value("fewshot_k", 3);
    if (j.contains("fewshot_store"))
        c.fewshot_store_path = resolve_path(base_dir, j["fewshot_store"].get<std::string>());

    if (j.contains("sampling")) {
        const json& s = j["sampling"];
        c.sampling.temperature = s.value("temperature", 0.7);
        c.sampling.top_k = s.value("top_k", 40);
        c.sampling.top_p = s.value("top_p", 0.95);
        c.sampling.n_samples = s.value("n_samples", 30);
        c.sampling.seed = s.value("seed", std::uint64_t{0});
        if (c.sampling.n_samples < 1) throw ConfigError("n_samples must be >= 1");
    }

    std::string prep = j.value("preprocessing", "none");
    if (prep == "none")
        c.preprocessing = Preprocessing::None;
    else if (prep == "structured-docstring" || prep == "structured_docstring")
        c.preprocessing = Preprocessing::StructuredDocstring;
    else
        throw ConfigError("unknown preprocessing mode: " + prep);

    if (!j.contains("backend")) throw ConfigError("TM config requires a backend section");
    const json& b = j["backend"];
    std::string type = b.value("type", "simulated");
    if (type == "simulated") {
        c.backend.type = BackendConfig::Type::Simulated;
        c.backend.id = b.value("id", "simulated");
        if (b.contains("table"))
            for (const auto& [key, entry] : b["table"].items())
                c.backend.table[key] = parse_sim_entry(entry);
        if (b.contains("default")) c.backend.fallback = parse_sim_entry(b["default"]);
    } else if (type == "replay") {
        c.backend.type = BackendConfig::Type::Replay;
        c.backend.id = b.value("id", "replay");
        c.backend.cache_path = resolve_path(base_dir, b.at("cache").get<std::string>());
    } else if (type == "http") {
        c.backend.type = BackendConfig::Type::HttpChat;
        c.backend.id = b.value("id", "http");
        c.backend.url = b.at("url").get<std::string>();
        c.backend.model = b.value("model", "default");
        c.backend.cache_path = resolve_path(base_dir, b.at("cache").get<std::string>());
    } else {
        throw ConfigError("unknown backend type: " + type);
    }

    validate_template(c.prompt_template, {"docstring", "signature", "examples"},
                      "prompt_template");
    validate_template(c.corrective_template,
                      {"docstring", "signature", "examples", "feedback"},
                      "corrective_template");
    validate_template(c.classify_template, {"sentence"}, "classify_template");
    return c;
}

TMConfig TMConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open TM config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& vars) {
    std::string out;
    size_t pos = 0;
    while (pos < tmpl.size()) {
        size_t open = tmpl.find('{', pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        size_t close = tmpl.find('}', open);
        if (close == std::string::npos) throw ConfigError("unterminated placeholder");
        std::string name = tmpl.substr(open + 1, close - open - 1);
        auto it = vars.find(name);
        if (it == vars.end()) throw ConfigError("unknown placeholder {" + name + "}");
        out.append(it->second);
        pos = close + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sentence handling
// ---------------------------------------------------------------------------

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        current.push_back(c);
        bool terminator = (c == '.' || c == '!' || c == '?');
        bool boundary = terminator && (i + 1 >= text.size() ||
                                       std::isspace(static_cast<unsigned char>(text[i + 1])));
        if (boundary) {
            // trim
            size_t b = current.find_first_not_of(" \t\n\r");
            size_t e = current.find_last_not_of(" \t\n\r");
            if (b != std::string::npos) out.push_back(current.substr(b, e - b + 1));
            current.clear();
        }
    }
    size_t b = current.find_first_not_of(" \t\n\r");
    if (b != std::string::npos) {
        size_t e = current.find_last_not_of(" \t\n\r");
        out.push_back(current.substr(b, e - b + 1));
    }
    return out;
}

SentenceLabel parse_sentence_label(const std::string& backend_response) {
    std::string lc;
    for (char c : backend_response)
        lc.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lc.find("post") != std::string::npos) return SentenceLabel::PostCondition;
    if (lc.find("pre") != std::string::npos) return SentenceLabel::PreCondition;
    return SentenceLabel::None;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

TMRuntime::TMRuntime(TMConfig config)
    : config_(std::move(config)), backend_(make_backend(config_.backend)) {
    if (config_.fewshot_store_path) store_ = FewShotStore::load(*config_.fewshot_store_path);
}

std::string TMRuntime::render_examples_block(const InputCase& input) const {
    auto entries = store_.retrieve(input.docstring, config_.fewshot_k);
    std::string block;
    for (const auto& e : entries) {
        block += "Docstring: " + e.docstring + "\n";
        block += "Signature: " + e.signature + "\n";
        block += "Specification: " + e.spec + "\n\n";
    }
    return block;
}

std::string TMRuntime::preprocess_docstring(const InputCase& input, int sample_index) const {
    std::vector<std::string> pre, post, context;
    auto sentences = split_sentences(input.docstring);
    for (size_t i = 0; i < sentences.size(); ++i) {
        std::string prompt = render_template(config_.classify_template,
                                             {{"sentence", sentences[i]}});
        std::string key = input.id + "#classify#" + std::to_string(i);
        std::string response =
            backend_->generate(prompt, config_.sampling, key, sample_index, 0);
        switch (parse_sentence_label(response)) {
            case SentenceLabel::PreCondition: pre.push_back(sentences[i]); break;
            case SentenceLabel::PostCondition: post.push_back(sentences[i]); break;
            case SentenceLabel::None: context.push_back(sentences[i]); break;
        }
    }
    std::vector<std::string> lines;
    lines.push_back("Preconditions:");
    if (pre.empty())
        lines.push_back("");
    else
        lines.insert(lines.end(), pre.begin(), pre.end());
    lines.push_back("Postconditions:");
    if (post.empty())
        lines.push_back("");
    else
        lines.insert(lines.end(), post.begin(), post.end());
    if (!context.empty()) {
        lines.push_back("Context:");
        lines.insert(lines.end(), context.begin(), context.end());
    }
    std::string out;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

OutputSample TMRuntime::run_pipeline(const InputCase& input, int sample_index) const {
    std::string docstring = config_.preprocessing == Preprocessing::StructuredDocstring
                                ? preprocess_docstring(input, sample_index)
                                : input.docstring;
    std::string examples = render_examples_block(input);
    std::map<std::string, std::string> vars = {
        {"docstring", docstring},
        {"signature", input.signature_text},
        {"examples", examples},
    };
    std::string prompt = render_template(config_.prompt_template, vars);

    std::string text;
    spec::SpecParseResult parsed = spec::ParseError{};
    for (int attempt = 0;; ++attempt) {
        text = backend_->generate(prompt, config_.sampling, input.id, sample_index, attempt);
        parsed = spec::parse_spec(text, input.signature);
        if (std::holds_alternative<spec::SpecPair>(parsed))
            return make_valid_sample(sample_index, text,
                                     std::get<spec::SpecPair>(std::move(parsed)), attempt,
                                     backend_->id());
        const auto& err = std::get<spec::ParseError>(parsed);
        if (attempt >= config_.max_corrective_retries)
            return make_invalid_sample(sample_index, text, err.render(), attempt,
                                       backend_->id());
        vars["feedback"] = err.render();
        prompt = render_template(config_.corrective_template, vars);
    }
}

std::vector<OutputSample> TMRuntime::sample_tm(const InputCase& input) const {
    std::vector<OutputSample> samples;
    samples.reserve(static_cast<size_t>(config_.sampling.n_samples));
    for (int i = 0; i < config_.sampling.n_samples; ++i)
        samples.push_back(run_pipeline(input, i));
    return samples;
}

}  // namespace tmprob
