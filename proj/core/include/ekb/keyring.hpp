#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ekb/crypto.hpp"

namespace ekb::keyring {

inline constexpr std::size_t kListSize = 256;
inline constexpr std::size_t kFingerprintWords = 32;

enum class Parity { Even, Odd };

inline constexpr Parity parity_of(std::size_t position) noexcept
{
    return position % 2 == 0 ? Parity::Even : Parity::Odd;
}

// The two disjoint 256-word PGP lists. Even positions use the two-syllable
// list, odd positions the three-syllable list.
class WordList {
public:
    WordList(std::vector<std::string> even, std::vector<std::string> odd);

    const std::string& word(Parity parity, std::uint8_t index) const;
    std::span<const std::string> even() const noexcept { return even_; }
    std::span<const std::string> odd() const noexcept { return odd_; }

    // Which list a (normalized) word belongs to, if any.
    std::optional<Parity> classify(std::string_view word) const;

private:
    std::vector<std::string> even_;
    std::vector<std::string> odd_;
    std::unordered_map<std::string, Parity> lookup_;
};

// Resource layout: "sha256 <hex of the remaining text>", then 256 even words,
// then 256 odd words, one per line. Throws Error(CorruptWordList).
WordList parse_wordlist(std::string_view resource);

// The embedded standard list. Parsed once.
const WordList& load_wordlist();

std::string_view embedded_wordlist_resource() noexcept;

class Fingerprint {
public:
    explicit Fingerprint(std::array<std::string, kFingerprintWords> words) : words_(std::move(words)) {}

    const std::array<std::string, kFingerprintWords>& words() const noexcept { return words_; }
    std::vector<std::string> to_vector() const { return {words_.begin(), words_.end()}; }

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

private:
    std::array<std::string, kFingerprintWords> words_;
};

// words[i] = list(i)[SHA-256(public_key)[i]]. Throws InvalidArgument on an
// empty key.
Fingerprint generate_fingerprint(ByteView public_key, const WordList& wl);

// Lowercase, punctuation removed.
std::string normalize_word(std::string_view word);

struct Transcript {
    std::vector<std::string> words;
    std::string source;

    // Splits on whitespace and normalizes; empty tokens are dropped.
    static Transcript from_text(std::string_view text, std::string source = "text");
};

enum class FindingKind { UnknownWord, ParityViolation, LengthError };

std::string_view to_string(FindingKind kind) noexcept;

struct Finding {
    FindingKind kind;
    // For LengthError this is the received word count.
    std::size_t position;
    std::string word;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool valid() const noexcept { return findings.empty(); }
    std::size_t count(FindingKind kind) const noexcept;
};

ValidationReport validate_recitation(std::span<const std::string> words, const WordList& wl);

struct WordDiff {
    std::size_t position;
    std::string expected;  // empty past the end of the fingerprint
    std::string actual;    // empty past the end of the transcript
};

struct VerificationResult {
    bool match = false;
    std::vector<WordDiff> differences;
};

VerificationResult verify_fingerprint(ByteView public_key, const Transcript& transcript, const WordList& wl);

// Speech-to-text stand-in.
class Transcriber {
public:
    virtual ~Transcriber() = default;
    virtual Transcript transcribe(ByteView audio) const = 0;
};

// Treats the blob as a UTF-8 manifest of whitespace-separated words.
class MockTranscriber final : public Transcriber {
public:
    Transcript transcribe(ByteView audio) const override;
};

struct Injection {
    enum class Kind { Omit, Duplicate, Substitute };
    Kind kind;
    std::size_t position;
    std::string replacement;  // Substitute only
};

// Applies injections in order to the wrapped transcriber's output.
class ErrorInjectingTranscriber final : public Transcriber {
public:
    ErrorInjectingTranscriber(std::shared_ptr<const Transcriber> inner, std::vector<Injection> injections)
        : inner_(std::move(inner)), injections_(std::move(injections)) {}

    Transcript transcribe(ByteView audio) const override;

private:
    std::shared_ptr<const Transcriber> inner_;
    std::vector<Injection> injections_;
};

struct Contact {
    std::string name;
    Bytes public_key;
    bool fingerprint_verified = false;
    bool speaker_attested = false;
    std::optional<SecretKey> shared_key;

    friend bool operator==(const Contact&, const Contact&) = default;
};

// Single-writer contact store, persisted as a versioned JSON document.
class ContactStore {
public:
    static constexpr int kVersion = 1;

    const Contact& add_contact(std::string name, Bytes public_key);

    // Marks the contact verified when the transcript matches the fingerprint
    // of its stored public key and recites cleanly. Speaker attestation is the
    // operator's own judgement and is recorded as given.
    VerificationResult verify_contact(std::string_view name, const Transcript& transcript,
                                      const WordList& wl, bool speaker_attested);

    void set_shared_key(std::string_view name, const SecretKey& key);
    const SecretKey& get_shared_key(std::string_view name) const;

    const Contact& get(std::string_view name) const;
    const std::vector<Contact>& contacts() const noexcept { return contacts_; }

    std::string to_json() const;
    static ContactStore from_json(std::string_view text);

    void save(const std::filesystem::path& path) const;
    static ContactStore load(const std::filesystem::path& path);

    friend bool operator==(const ContactStore&, const ContactStore&) = default;

private:
    Contact& find(std::string_view name);

    std::vector<Contact> contacts_;
};

} // namespace ekb::keyring
