#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ekb {

enum class Errc {
    BadMagic,
    BadLength,
    BadPadding,
    BadMediaTag,
    BadKey,
    OddLength,
    IllegalCharacter,
    CorruptWordList,
    TranscriptionFailed,
    UnknownContact,
    UnverifiedContact,
    NoSharedKey,
    DuplicateContact,
    StoreCorrupt,
    FrameUnavailable,
    MalformedImage,
    NoCiphertextFound,
    ImageTooSmall,
    ConfigInvalid,
    InvalidParams,
    ParamsNotDivisible,
    TooLargeForExact,
    InvalidArgument,
    Io,
};

std::string_view to_string(Errc code) noexcept;

// All library failures are reported through this type; `code()` is stable
// and is what the CLI maps to exit codes.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Carries the offending index for IllegalCharacter.
class ArmorError : public Error {
public:
    ArmorError(Errc code, const std::string& what, std::size_t position)
        : Error(code, what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

} // namespace ekb
