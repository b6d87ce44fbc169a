#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ekb/crypto.hpp"
#include "ekb/error.hpp"

namespace ekb::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kCrypto = 2,
    kMismatch = 3,
    kBlocked = 4,
    kIo = 5,
};

struct CliConfig {
    std::optional<std::filesystem::path> store_path;
    std::optional<std::filesystem::path> capture_path;
    std::optional<std::filesystem::path> scanner_db_path;
    std::optional<std::uint64_t> seed;

    // Line-based "key = value"; '#' starts a comment. Throws ConfigInvalid.
    static CliConfig parse(std::string_view text);
    static CliConfig load(const std::filesystem::path& path);
};

int exit_code_for(Errc code) noexcept;

// One JSON object per line, for scripts.
std::string error_line(std::string_view kind, int exit_code, std::string_view message);

Bytes read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView data);

} // namespace ekb::cli
