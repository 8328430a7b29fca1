#include <cstdlib>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "unitrace/cli/commands.hpp"
#include "unitrace/cli/config.hpp"

namespace {

void configure_logging() {
    auto logger = spdlog::stderr_logger_mt("unitrace");
    logger->set_pattern("unitrace: [%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("UNITRACE_LOG")) {
        const std::string level(env);
        if (level == "error") spdlog::set_level(spdlog::level::err);
        else if (level == "warn") spdlog::set_level(spdlog::level::warn);
        else if (level == "info") spdlog::set_level(spdlog::level::info);
        else if (level == "debug") spdlog::set_level(spdlog::level::debug);
        else spdlog::warn("ignoring UNITRACE_LOG='{}' (expected error, warn, info or debug)", level);
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace unitrace::cli;
    configure_logging();

    CLI::App app{"unitrace: trace formula for one-parameter unitary families"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string what = "phases";
    int m_max = 3;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (default: output_dir from the config)");
    };
    auto* find = app.add_subcommand("find-crossings", "locate k0 with U(k0) having eigenvalue 1");
    add_common(find);
    auto* verify = app.add_subcommand("verify", "compare the Abel-summed and atomic sides of the trace formula");
    add_common(verify);
    auto* scan = app.add_subcommand("scan", "emit a curve over the k grid as CSV");
    add_common(scan);
    scan->add_option("--what", what, "abel | phases | newton")->check(CLI::IsMember({"abel", "phases", "newton"}));
    auto* crystal = app.add_subcommand("crystalline", "expand the Fourier side into exponential sums");
    add_common(crystal);
    crystal->add_option("--m-max", m_max, "largest power |m| of U in the expansion");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitIoOrConfig;
    }

    return run_guarded([&] {
        const RunConfig config = load_config(config_path);
        const std::filesystem::path out = out_dir.empty() ? config.output_dir : std::filesystem::path(out_dir);
        if (*find) return cmd_find_crossings(config, out);
        if (*verify) return cmd_verify(config, out);
        if (*scan) return cmd_scan(config, parse_scan_kind(what), out);
        return cmd_crystalline(config, m_max, out);
    });
}
