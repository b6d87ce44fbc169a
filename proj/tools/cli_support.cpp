#include "cli_support.hpp"

#include <charconv>
#include <fstream>
#include <iterator>

#include "json.hpp"

namespace ekb::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

CliConfig CliConfig::parse(std::string_view text)
{
    CliConfig cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::ConfigInvalid, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (value.empty()) {
            throw Error(Errc::ConfigInvalid, "line " + std::to_string(line_no) + ": empty value");
        }
        if (key == "store_path") {
            cfg.store_path = std::string(value);
        } else if (key == "capture_path") {
            cfg.capture_path = std::string(value);
        } else if (key == "scanner_db_path") {
            cfg.scanner_db_path = std::string(value);
        } else if (key == "seed") {
            std::uint64_t seed = 0;
            const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
            if (ec != std::errc{} || end != value.data() + value.size()) {
                throw Error(Errc::ConfigInvalid, "line " + std::to_string(line_no) + ": seed must be an unsigned integer");
            }
            cfg.seed = seed;
        } else {
            throw Error(Errc::ConfigInvalid, "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

CliConfig CliConfig::load(const std::filesystem::path& path)
{
    return parse(read_text(path));
}

int exit_code_for(Errc code) noexcept
{
    switch (code) {
    case Errc::BadMagic:
    case Errc::BadLength:
    case Errc::BadPadding:
    case Errc::BadMediaTag:
    case Errc::BadKey:
    case Errc::OddLength:
    case Errc::IllegalCharacter:
    case Errc::NoCiphertextFound:
        return kCrypto;
    case Errc::UnverifiedContact:
        return kMismatch;
    case Errc::Io:
    case Errc::StoreCorrupt:
    case Errc::FrameUnavailable:
    case Errc::MalformedImage:
    case Errc::ImageTooSmall:
    case Errc::CorruptWordList:
    case Errc::TranscriptionFailed:
        return kIo;
    case Errc::UnknownContact:
    case Errc::DuplicateContact:
    case Errc::NoSharedKey:
    case Errc::ConfigInvalid:
    case Errc::InvalidParams:
    case Errc::ParamsNotDivisible:
    case Errc::TooLargeForExact:
    case Errc::InvalidArgument:
        return kUsage;
    }
    return kUsage;
}

std::string error_line(std::string_view kind, int exit_code, std::string_view message)
{
    nlohmann::json j;
    j["error"] = kind;
    j["exit_code"] = exit_code;
    j["message"] = message;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Bytes read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot open " + path.string());
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(Errc::Io, "read failed: " + path.string());
    }
    return data;
}

std::string read_text(const std::filesystem::path& path)
{
    const auto data = read_file(path);
    return {data.begin(), data.end()};
}

void write_file(const std::filesystem::path& path, ByteView data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw Error(Errc::Io, "write failed: " + path.string());
    }
}

} // namespace ekb::cli
