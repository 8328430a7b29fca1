#pragma once

#include <filesystem>
#include <string>

#include "unitrace/cli/config.hpp"

namespace unitrace::cli {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitIoOrConfig = 1,
    kExitHypothesis = 2,
    kExitVerificationFailed = 3,
};

enum class ScanKind { Abel, Phases, Newton };

ScanKind parse_scan_kind(const std::string& what);

// Each command writes its artifact into `out_dir` and returns an exit code.
// Library errors are mapped by run_guarded, not here.

/// crossings.json
int cmd_find_crossings(const RunConfig& config, const std::filesystem::path& out_dir);
/// verify_report.json; kExitVerificationFailed unless every test function passes.
int cmd_verify(const RunConfig& config, const std::filesystem::path& out_dir);
/// scan_<what>.csv
int cmd_scan(const RunConfig& config, ScanKind what, const std::filesystem::path& out_dir);
/// crystalline.json
int cmd_crystalline(const RunConfig& config, int m_max, const std::filesystem::path& out_dir);

/// Runs `body`, reporting library errors on stderr and translating them into exit codes.
template <class Body>
int run_guarded(Body&& body);

int exit_code_for_current_exception();

template <class Body>
int run_guarded(Body&& body) {
    try {
        return body();
    } catch (...) {
        return exit_code_for_current_exception();
    }
}

}  // namespace unitrace::cli
