#include "streamst/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "streamst/errors.hpp"
#include "streamst/text.hpp"

namespace streamst {

using nlohmann::json;

std::int64_t Fixture::duration_ms() const {
    if (duration_ms_field) return *duration_ms_field;
    std::int64_t last = 0;
    if (!src_words.empty()) last = src_words.back().end_ms;
    for (const auto& span : sentence_spans) last = std::max(last, span.end_ms);
    if (chunk_ms <= 0) return last;
    const std::int64_t chunks = (last + chunk_ms - 1) / chunk_ms;
    return std::max<std::int64_t>(1, chunks) * chunk_ms;
}

int Fixture::total_chunks(std::int64_t chunk) const {
    const std::int64_t dur = duration_ms();
    return static_cast<int>(std::max<std::int64_t>(1, (dur + chunk - 1) / chunk));
}

int Fixture::src_words_heard(std::int64_t t_ms) const {
    int n = 0;
    while (n < static_cast<int>(src_words.size()) && src_words[n].end_ms <= t_ms) ++n;
    return n;
}

int Fixture::eligible_targets(std::int64_t t_ms) const {
    const int heard = src_words_heard(t_ms);
    int e = 0;
    while (e < static_cast<int>(alignment.size()) && alignment[e] <= heard) ++e;
    return e;
}

std::vector<int> Fixture::proportional_alignment(int src_count, int tgt_count) {
    std::vector<int> a(static_cast<std::size_t>(std::max(0, tgt_count)));
    for (int j = 1; j <= tgt_count; ++j)
        a[j - 1] = static_cast<int>((static_cast<long>(j) * src_count + tgt_count - 1) / tgt_count);
    return a;
}

void Fixture::validate() const {
    if (source_id.empty()) throw ParseError("fixture missing source_id");
    if (chunk_ms <= 0) throw ParseError(source_id + ": chunk_ms must be positive");
    std::int64_t prev_end = 0;
    for (const auto& w : src_words) {
        if (w.token.empty()) throw ParseError(source_id + ": empty source token");
        if (w.end_ms < w.start_ms) throw ParseError(source_id + ": word ends before it starts");
        if (w.end_ms < prev_end) throw ParseError(source_id + ": end_ms must be nondecreasing");
        prev_end = w.end_ms;
    }
    std::vector<std::string> toks;
    toks.reserve(src_words.size());
    for (const auto& w : src_words) toks.push_back(w.token);
    if (!transcript.empty() && transcript != text::join(toks))
        throw ParseError(source_id + ": transcript does not match joined src_words");
    if (alignment.size() != ref_translation_words.size())
        throw ParseError(source_id + ": alignment length must match target length");
    int prev_a = 1;
    for (int a : alignment) {
        if (a < prev_a || a > static_cast<int>(src_words.size()))
            throw ParseError(source_id + ": alignment must be nondecreasing within 1..|src|");
        prev_a = a;
    }
    std::int64_t prev_span_end = 0;
    for (const auto& span : sentence_spans) {
        if (span.end_ms <= span.start_ms) throw ParseError(source_id + ": empty sentence span");
        if (span.start_ms < prev_span_end)
            throw ParseError(source_id + ": sentence spans must be sorted and non-overlapping");
        prev_span_end = span.end_ms;
    }
}

std::string Fixture::ref_translation_text() const {
    return text::join(ref_translation_words);
}

Fixture fixture_from_json(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": bad fixture json: " + e.what());
    }
    Fixture f;
    try {
        f.source_id = j.at("source_id").get<std::string>();
        f.chunk_ms = j.at("chunk_ms").get<std::int64_t>();
        for (const auto& w : j.value("src_words", json::array()))
            f.src_words.push_back({w.at("token").get<std::string>(),
                                   w.value("start_ms", std::int64_t{0}),
                                   w.at("end_ms").get<std::int64_t>()});
        if (j.contains("transcript")) f.transcript = j["transcript"].get<std::string>();
        f.ref_translation_words =
            j.value("ref_translation_words", std::vector<std::string>{});
        if (j.contains("alignment"))
            f.alignment = j["alignment"].get<std::vector<int>>();
        else
            f.alignment = Fixture::proportional_alignment(
                static_cast<int>(f.src_words.size()),
                static_cast<int>(f.ref_translation_words.size()));
        for (const auto& s : j.value("sentence_spans", json::array()))
            f.sentence_spans.push_back({s.at("start_ms").get<std::int64_t>(),
                                        s.at("end_ms").get<std::int64_t>(),
                                        s.at("ref").get<std::string>()});
        if (j.contains("duration_ms")) f.duration_ms_field = j["duration_ms"].get<std::int64_t>();
        f.target_lang = j.value("target_lang", std::string{"English"});
    } catch (const json::exception& e) {
        throw ParseError(origin + ": bad fixture field: " + e.what());
    }
    if (f.transcript.empty()) {
        std::vector<std::string> toks;
        for (const auto& w : f.src_words) toks.push_back(w.token);
        f.transcript = text::join(toks);
    }
    f.validate();
    return f;
}

std::string fixture_to_json(const Fixture& fixture) {
    json words = json::array();
    for (const auto& w : fixture.src_words)
        words.push_back({{"token", w.token}, {"start_ms", w.start_ms}, {"end_ms", w.end_ms}});
    json spans = json::array();
    for (const auto& s : fixture.sentence_spans)
        spans.push_back({{"start_ms", s.start_ms}, {"end_ms", s.end_ms}, {"ref", s.ref}});
    json j = {{"source_id", fixture.source_id},
              {"chunk_ms", fixture.chunk_ms},
              {"src_words", words},
              {"transcript", fixture.transcript},
              {"ref_translation_words", fixture.ref_translation_words},
              {"alignment", fixture.alignment}};
    if (!fixture.sentence_spans.empty()) j["sentence_spans"] = spans;
    if (fixture.duration_ms_field) j["duration_ms"] = *fixture.duration_ms_field;
    if (!fixture.target_lang.empty()) j["target_lang"] = fixture.target_lang;
    return j.dump(2);
}

Fixture load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fixture: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return fixture_from_json(buf.str(), path.string());
}

std::vector<std::filesystem::path> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path.string());
    const auto base = path.parent_path();
    std::vector<std::filesystem::path> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = text::trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        std::string entry;
        if (trimmed[0] == '"' || trimmed[0] == '{') {
            json j;
            try {
                j = json::parse(trimmed);
            } catch (const json::parse_error& e) {
                throw ParseError(path.string() + ": " + e.what(), line_no);
            }
            if (j.is_string())
                entry = j.get<std::string>();
            else if (j.is_object() && j.contains("path"))
                entry = j["path"].get<std::string>();
            else
                throw ParseError(path.string() + ": manifest entry needs a path", line_no);
        } else {
            entry = trimmed;  // bare path
        }
        std::filesystem::path p(entry);
        out.push_back(p.is_absolute() ? p : base / p);
    }
    return out;
}

SpeechStream make_stream(const Fixture& fixture, std::int64_t chunk_ms) {
    if (chunk_ms <= 0) chunk_ms = fixture.chunk_ms;
    SpeechStream stream;
    stream.source_id = fixture.source_id;
    stream.chunk_ms = chunk_ms;
    const int n = fixture.total_chunks(chunk_ms);
    stream.chunks.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) stream.chunks.push_back({i, chunk_ms, ""});
    return stream;
}

void FixtureStore::add(Fixture fixture) {
    fixture.validate();
    fixtures_[fixture.source_id] = std::move(fixture);
}

void FixtureStore::load_manifest_file(const std::filesystem::path& manifest) {
    for (const auto& p : load_manifest(manifest)) add(load_fixture(p));
}

const Fixture& FixtureStore::get(const std::string& source_id) const {
    auto it = fixtures_.find(source_id);
    if (it == fixtures_.end()) throw ConfigError("unknown source_id: " + source_id);
    return it->second;
}

bool FixtureStore::contains(const std::string& source_id) const {
    return fixtures_.count(source_id) != 0;
}

std::vector<std::string> FixtureStore::source_ids() const {
    std::vector<std::string> ids;
    ids.reserve(fixtures_.size());
    for (const auto& [id, _] : fixtures_) ids.push_back(id);
    return ids;
}

}  // namespace streamst
