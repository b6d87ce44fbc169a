#include "ekb/keyring.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ekb/armor.hpp"
#include "ekb/error.hpp"
#include "json.hpp"

namespace ekb::keyring {

namespace detail {
extern const std::string_view kEmbeddedWordList;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

bool is_list_word(std::string_view w)
{
    return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

} // namespace

WordList::WordList(std::vector<std::string> even, std::vector<std::string> odd)
    : even_(std::move(even)), odd_(std::move(odd))
{
    if (even_.size() != kListSize || odd_.size() != kListSize) {
        throw Error(Errc::CorruptWordList, "each word list must hold exactly 256 words");
    }
    for (const auto& w : even_) {
        if (!is_list_word(w) || !lookup_.emplace(w, Parity::Even).second) {
            throw Error(Errc::CorruptWordList, "bad or duplicate even word: " + w);
        }
    }
    for (const auto& w : odd_) {
        if (!is_list_word(w) || !lookup_.emplace(w, Parity::Odd).second) {
            throw Error(Errc::CorruptWordList, "bad word or overlap with even list: " + w);
        }
    }
}

const std::string& WordList::word(Parity parity, std::uint8_t index) const
{
    return parity == Parity::Even ? even_[index] : odd_[index];
}

std::optional<Parity> WordList::classify(std::string_view word) const
{
    auto it = lookup_.find(std::string(word));
    if (it == lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

WordList parse_wordlist(std::string_view resource)
{
    const auto newline = resource.find('\n');
    if (newline == std::string_view::npos) {
        throw Error(Errc::CorruptWordList, "word list resource has no checksum line");
    }
    const std::string_view header = resource.substr(0, newline);
    const std::string_view body = resource.substr(newline + 1);

    constexpr std::string_view kPrefix = "sha256 ";
    if (!header.starts_with(kPrefix)) {
        throw Error(Errc::CorruptWordList, "word list checksum line malformed");
    }
    if (header.substr(kPrefix.size()) != to_hex_lower(sha256(as_bytes(body)))) {
        throw Error(Errc::CorruptWordList, "word list checksum mismatch");
    }

    auto lines = split_lines(body);
    if (lines.size() != 2 * kListSize) {
        throw Error(Errc::CorruptWordList, "word list must contain 512 words");
    }
    std::vector<std::string> even(lines.begin(), lines.begin() + kListSize);
    std::vector<std::string> odd(lines.begin() + kListSize, lines.end());
    return WordList(std::move(even), std::move(odd));
}

const WordList& load_wordlist()
{
    static const WordList list = parse_wordlist(detail::kEmbeddedWordList);
    return list;
}

std::string_view embedded_wordlist_resource() noexcept { return detail::kEmbeddedWordList; }

Fingerprint generate_fingerprint(ByteView public_key, const WordList& wl)
{
    if (public_key.empty()) {
        throw Error(Errc::InvalidArgument, "public key must not be empty");
    }
    const auto digest = sha256(public_key);
    std::array<std::string, kFingerprintWords> words;
    for (std::size_t i = 0; i < kFingerprintWords; ++i) {
        words[i] = wl.word(parity_of(i), digest[i]);
    }
    return Fingerprint(std::move(words));
}

std::string normalize_word(std::string_view word)
{
    std::string out;
    out.reserve(word.size());
    for (char c : word) {
        const auto u = static_cast<unsigned char>(c);
        if (std::ispunct(u) || std::isspace(u)) {
            continue;
        }
        out.push_back(static_cast<char>(std::tolower(u)));
    }
    return out;
}

Transcript Transcript::from_text(std::string_view text, std::string source)
{
    Transcript t;
    t.source = std::move(source);
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
        auto w = normalize_word(token);
        if (!w.empty()) {
            t.words.push_back(std::move(w));
        }
    }
    return t;
}

std::string_view to_string(FindingKind kind) noexcept
{
    switch (kind) {
    case FindingKind::UnknownWord: return "UnknownWord";
    case FindingKind::ParityViolation: return "ParityViolation";
    case FindingKind::LengthError: return "LengthError";
    }
    return "?";
}

std::size_t ValidationReport::count(FindingKind kind) const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [kind](const Finding& f) { return f.kind == kind; }));
}

ValidationReport validate_recitation(std::span<const std::string> words, const WordList& wl)
{
    ValidationReport report;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto normalized = normalize_word(words[i]);
        const auto parity = wl.classify(normalized);
        if (!parity) {
            report.findings.push_back({FindingKind::UnknownWord, i, words[i]});
        } else if (*parity != parity_of(i)) {
            report.findings.push_back({FindingKind::ParityViolation, i, words[i]});
        }
    }
    if (words.size() != kFingerprintWords) {
        report.findings.push_back({FindingKind::LengthError, words.size(), {}});
    }
    return report;
}

VerificationResult verify_fingerprint(ByteView public_key, const Transcript& transcript, const WordList& wl)
{
    const auto expected = generate_fingerprint(public_key, wl).words();
    VerificationResult result;
    const std::size_t n = std::max(expected.size(), transcript.words.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::string want = i < expected.size() ? expected[i] : std::string{};
        std::string got = i < transcript.words.size() ? normalize_word(transcript.words[i]) : std::string{};
        if (want != got) {
            result.differences.push_back({i, std::move(want), std::move(got)});
        }
    }
    result.match = result.differences.empty();
    return result;
}

Transcript MockTranscriber::transcribe(ByteView audio) const
{
    if (std::find(audio.begin(), audio.end(), std::uint8_t{0}) != audio.end()) {
        throw Error(Errc::TranscriptionFailed, "manifest contains NUL bytes; not a word manifest");
    }
    std::string_view text(reinterpret_cast<const char*>(audio.data()), audio.size());
    auto t = Transcript::from_text(text, "mock");
    if (t.words.empty()) {
        throw Error(Errc::TranscriptionFailed, "manifest contains no words");
    }
    return t;
}

Transcript ErrorInjectingTranscriber::transcribe(ByteView audio) const
{
    Transcript t = inner_->transcribe(audio);
    for (const auto& inj : injections_) {
        if (inj.position >= t.words.size()) {
            throw Error(Errc::TranscriptionFailed,
                        "injection position " + std::to_string(inj.position) + " out of range");
        }
        auto at = t.words.begin() + static_cast<std::ptrdiff_t>(inj.position);
        switch (inj.kind) {
        case Injection::Kind::Omit: t.words.erase(at); break;
        case Injection::Kind::Duplicate: t.words.insert(at, *at); break;
        case Injection::Kind::Substitute: *at = normalize_word(inj.replacement); break;
        }
    }
    t.source = "error-injecting(" + t.source + ")";
    return t;
}

const Contact& ContactStore::add_contact(std::string name, Bytes public_key)
{
    if (name.empty()) {
        throw Error(Errc::InvalidArgument, "contact name must not be empty");
    }
    if (public_key.empty()) {
        throw Error(Errc::InvalidArgument, "public key must not be empty");
    }
    auto it = std::find_if(contacts_.begin(), contacts_.end(), [&](const Contact& c) { return c.name == name; });
    if (it != contacts_.end()) {
        throw Error(Errc::DuplicateContact, "contact already exists: " + name);
    }
    contacts_.push_back(Contact{std::move(name), std::move(public_key), false, false, std::nullopt});
    return contacts_.back();
}

Contact& ContactStore::find(std::string_view name)
{
    auto it = std::find_if(contacts_.begin(), contacts_.end(), [&](const Contact& c) { return c.name == name; });
    if (it == contacts_.end()) {
        throw Error(Errc::UnknownContact, "unknown contact: " + std::string(name));
    }
    return *it;
}

const Contact& ContactStore::get(std::string_view name) const
{
    return const_cast<ContactStore*>(this)->find(name);
}

VerificationResult ContactStore::verify_contact(std::string_view name, const Transcript& transcript,
                                                const WordList& wl, bool speaker_attested)
{
    Contact& c = find(name);
    auto result = verify_fingerprint(c.public_key, transcript, wl);
    const bool recited_cleanly = validate_recitation(transcript.words, wl).valid();
    if (result.match && recited_cleanly) {
        c.fingerprint_verified = true;
        c.speaker_attested = speaker_attested;
    }
    return result;
}

void ContactStore::set_shared_key(std::string_view name, const SecretKey& key)
{
    Contact& c = find(name);
    if (!c.fingerprint_verified) {
        throw Error(Errc::UnverifiedContact,
                    "contact " + c.name + " has not verified a fingerprint; refusing to attach a key");
    }
    c.shared_key = key;
}

const SecretKey& ContactStore::get_shared_key(std::string_view name) const
{
    const Contact& c = get(name);
    if (!c.shared_key) {
        throw Error(Errc::NoSharedKey, "no shared key set for contact " + c.name);
    }
    return *c.shared_key;
}

std::string ContactStore::to_json() const
{
    nlohmann::ordered_json doc;
    doc["version"] = kVersion;
    doc["contacts"] = nlohmann::ordered_json::array();
    for (const auto& c : contacts_) {
        nlohmann::ordered_json rec;
        rec["name"] = c.name;
        rec["public_key_hex"] = to_hex_lower(c.public_key);
        rec["fingerprint_verified"] = c.fingerprint_verified;
        rec["speaker_attested"] = c.speaker_attested;
        if (c.shared_key) {
            rec["shared_key_hex"] = c.shared_key->to_hex();
        }
        doc["contacts"].push_back(std::move(rec));
    }
    return doc.dump(2) + "\n";
}

ContactStore ContactStore::from_json(std::string_view text)
{
    ContactStore store;
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("version").get<int>() != kVersion) {
            throw Error(Errc::StoreCorrupt, "unsupported contact store version");
        }
        for (const auto& rec : doc.at("contacts")) {
            Contact c;
            c.name = rec.at("name").get<std::string>();
            c.public_key = armor::decode_strict(rec.at("public_key_hex").get<std::string>());
            c.fingerprint_verified = rec.at("fingerprint_verified").get<bool>();
            c.speaker_attested = rec.at("speaker_attested").get<bool>();
            if (rec.contains("shared_key_hex")) {
                if (!c.fingerprint_verified) {
                    throw Error(Errc::StoreCorrupt, "contact " + c.name + " has a key but is not verified");
                }
                c.shared_key = SecretKey::from_hex(rec.at("shared_key_hex").get<std::string>());
            }
            if (c.name.empty() || c.public_key.empty()) {
                throw Error(Errc::StoreCorrupt, "contact record missing name or public key");
            }
            for (const auto& existing : store.contacts_) {
                if (existing.name == c.name) {
                    throw Error(Errc::StoreCorrupt, "duplicate contact " + c.name);
                }
            }
            store.contacts_.push_back(std::move(c));
        }
    } catch (const Error& e) {
        if (e.code() == Errc::StoreCorrupt) {
            throw;
        }
        throw Error(Errc::StoreCorrupt, std::string("contact store: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::StoreCorrupt, std::string("contact store: ") + e.what());
    }
    return store;
}

void ContactStore::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::Io, "cannot write contact store " + path.string());
    }
    out << to_json();
    if (!out) {
        throw Error(Errc::Io, "failed writing contact store " + path.string());
    }
}

ContactStore ContactStore::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot read contact store " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

} // namespace ekb::keyring
