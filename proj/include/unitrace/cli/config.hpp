#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "unitrace/family.hpp"
#include "unitrace/measure.hpp"

namespace unitrace::cli {

/// One run, parsed from a single JSON document.
///
/// {
///   "family":      {"variant": "diag_phase", "lengths": [...], "s": {"re": [[...]], "im": [[...]]}}
///                  {"variant": "exp_path", "h": <matrix>, "u0": <matrix>}
///                  {"variant": "scalar", "omega": 1.0},
///   "observable":  {"variant": "identity" | "derivative" | "constant", "a": <matrix>},
///   "k_range":     [k_min, k_max],
///   "step":        "auto" | positive number,
///   "t_schedule":  [0.9, 0.99, 0.999],
///   "test_functions": [{"center": c, "width": s, "amplitude": 1.0 | [re, im]}],
///   "output_dir":  "out",
///   "seed":        0,
///   "newton_terms": 100
/// }
///
/// A <matrix> is {"re": rows, "im": rows} ("im" optional), or one of the
/// strings "identity", "random_unitary", "random_hermitian"; random matrices
/// are drawn from `seed` in document order.
struct RunConfig {
    UnitaryFamily family = UnitaryFamily::scalar(1.0);
    ObservableFamily observable = IdentityObservable{};
    nlohmann::ordered_json family_json;      // with random matrices resolved
    nlohmann::ordered_json observable_json;  // with random matrices resolved
    double k_min = 0.0;
    double k_max = 1.0;
    std::optional<double> step;  // nullopt = auto
    std::vector<double> t_schedule{0.9, 0.99, 0.999};
    std::vector<GaussianTestFunction> test_functions;
    std::filesystem::path output_dir = ".";
    std::uint64_t seed = 0;
    int newton_terms = 100;

    double resolved_step() const;
};

/// Throws ConfigError describing the first problem found.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace unitrace::cli
