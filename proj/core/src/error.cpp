#include "ekb/error.hpp"

namespace ekb {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadLength: return "BadLength";
    case Errc::BadPadding: return "BadPadding";
    case Errc::BadMediaTag: return "BadMediaTag";
    case Errc::BadKey: return "BadKey";
    case Errc::OddLength: return "OddLength";
    case Errc::IllegalCharacter: return "IllegalCharacter";
    case Errc::CorruptWordList: return "CorruptWordList";
    case Errc::TranscriptionFailed: return "TranscriptionFailed";
    case Errc::UnknownContact: return "UnknownContact";
    case Errc::UnverifiedContact: return "UnverifiedContact";
    case Errc::NoSharedKey: return "NoSharedKey";
    case Errc::DuplicateContact: return "DuplicateContact";
    case Errc::StoreCorrupt: return "StoreCorrupt";
    case Errc::FrameUnavailable: return "FrameUnavailable";
    case Errc::MalformedImage: return "MalformedImage";
    case Errc::NoCiphertextFound: return "NoCiphertextFound";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::ParamsNotDivisible: return "ParamsNotDivisible";
    case Errc::TooLargeForExact: return "TooLargeForExact";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

} // namespace ekb
