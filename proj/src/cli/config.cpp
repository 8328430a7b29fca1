#include "unitrace/cli/config.hpp"

#include <fstream>
#include <sstream>

#include "unitrace/errors.hpp"
#include "unitrace/export.hpp"
#include "unitrace/random.hpp"
#include "unitrace/spectral_flow.hpp"

namespace unitrace::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json matrix_to_json(const ComplexMatrix& m) {
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        ordered_json rr = ordered_json::array(), ri = ordered_json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) {
            rr.push_back(format_real(m(i, j).real()));
            ri.push_back(format_real(m(i, j).imag()));
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return ordered_json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix parse_rows(const json& re, const json* im) {
    if (!re.is_array() || re.empty()) throw ConfigError("matrix: 're' must be a non-empty array of rows");
    const std::size_t n = re.size();
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!re[i].is_array() || re[i].size() != n) throw ConfigError("matrix: rows must form a square matrix");
        for (std::size_t j = 0; j < n; ++j) m(i, j) = parse_real(re[i][j]);
    }
    if (im != nullptr) {
        if (!im->is_array() || im->size() != n) throw ConfigError("matrix: 'im' must match 're' in shape");
        for (std::size_t i = 0; i < n; ++i) {
            if (!(*im)[i].is_array() || (*im)[i].size() != n) throw ConfigError("matrix: 'im' must match 're' in shape");
            for (std::size_t j = 0; j < n; ++j) m(i, j) += Complex(0.0, parse_real((*im)[i][j]));
        }
    }
    if (!m.all_finite()) throw ConfigError("matrix: entries must be finite");
    return m;
}

ComplexMatrix parse_matrix(const json& j, std::size_t dim_hint, Rng& rng, const char* what) {
    if (j.is_string()) {
        const auto kind = j.get<std::string>();
        if (dim_hint == 0) throw ConfigError(std::string(what) + ": cannot infer dimension for '" + kind + "'");
        if (kind == "identity") return ComplexMatrix::identity(dim_hint);
        if (kind == "random_unitary") return random_unitary(dim_hint, rng);
        if (kind == "random_hermitian") return random_hermitian(dim_hint, rng);
        throw ConfigError(std::string(what) + ": unknown matrix generator '" + kind + "'");
    }
    if (!j.is_object() || !j.contains("re")) throw ConfigError(std::string(what) + ": expected {\"re\": ..., \"im\": ...}");
    const json* im = j.contains("im") ? &j.at("im") : nullptr;
    ComplexMatrix m = parse_rows(j.at("re"), im);
    if (dim_hint != 0 && m.dim() != dim_hint) {
        throw ConfigError(std::string(what) + ": expected a " + std::to_string(dim_hint) + "x" +
                          std::to_string(dim_hint) + " matrix");
    }
    return m;
}

std::string variant_name(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("variant") || !j.at("variant").is_string()) {
        throw ConfigError(std::string(what) + ": missing string field 'variant'");
    }
    return j.at("variant").get<std::string>();
}

void parse_family(const json& j, Rng& rng, RunConfig& cfg) {
    const std::string variant = variant_name(j, "family");
    if (variant == "diag_phase") {
        std::vector<double> lengths;
        for (const auto& l : j.at("lengths")) lengths.push_back(parse_real(l));
        ComplexMatrix s = parse_matrix(j.at("s"), lengths.size(), rng, "family.s");
        ordered_json lj = ordered_json::array();
        for (double l : lengths) lj.push_back(format_real(l));
        cfg.family_json = ordered_json{{"variant", "diag_phase"}, {"lengths", std::move(lj)}, {"s", matrix_to_json(s)}};
        cfg.family = UnitaryFamily::diag_phase(std::move(lengths), std::move(s));
    } else if (variant == "exp_path") {
        const std::size_t dim = j.contains("dim") ? j.at("dim").get<std::size_t>() : 0;
        ComplexMatrix h = parse_matrix(j.at("h"), dim, rng, "family.h");
        ComplexMatrix u0 = j.contains("u0") ? parse_matrix(j.at("u0"), h.dim(), rng, "family.u0")
                                            : ComplexMatrix::identity(h.dim());
        cfg.family_json = ordered_json{{"variant", "exp_path"}, {"h", matrix_to_json(h)}, {"u0", matrix_to_json(u0)}};
        cfg.family = UnitaryFamily::exp_path(std::move(h), std::move(u0));
    } else if (variant == "scalar") {
        const double omega = parse_real(j.at("omega"));
        cfg.family_json = ordered_json{{"variant", "scalar"}, {"omega", format_real(omega)}};
        cfg.family = UnitaryFamily::scalar(omega);
    } else {
        throw ConfigError("family: unknown variant '" + variant + "' (expected diag_phase, exp_path or scalar)");
    }
}

void parse_observable(const json& j, Rng& rng, RunConfig& cfg) {
    const std::string variant = variant_name(j, "observable");
    if (variant == "identity") {
        cfg.observable = IdentityObservable{};
        cfg.observable_json = ordered_json{{"variant", "identity"}};
    } else if (variant == "derivative" || variant == "derivative_of_u") {
        cfg.observable = DerivativeOfU{};
        cfg.observable_json = ordered_json{{"variant", "derivative"}};
    } else if (variant == "constant") {
        ComplexMatrix a = parse_matrix(j.at("a"), cfg.family.dim(), rng, "observable.a");
        cfg.observable_json = ordered_json{{"variant", "constant"}, {"a", matrix_to_json(a)}};
        cfg.observable = ConstantObservable{std::move(a)};
    } else {
        throw ConfigError("observable: unknown variant '" + variant + "' (expected identity, derivative or constant)");
    }
}

GaussianTestFunction parse_gaussian(const json& j) {
    GaussianTestFunction g;
    g.center = parse_real(j.at("center"));
    g.width = parse_real(j.at("width"));
    if (j.contains("amplitude")) {
        const auto& a = j.at("amplitude");
        if (a.is_array()) {
            if (a.size() != 2) throw ConfigError("test function amplitude must be a number or [re, im]");
            g.amplitude = Complex(parse_real(a[0]), parse_real(a[1]));
        } else {
            g.amplitude = parse_real(a);
        }
    }
    if (!(g.width > 0.0)) throw ConfigError("test function width must be > 0");
    return g;
}

}  // namespace

double RunConfig::resolved_step() const { return step.value_or(default_step(family)); }

RunConfig parse_config(const json& doc) {
    RunConfig cfg;
    try {
        if (!doc.is_object()) throw ConfigError("config: top level must be an object");
        if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
        Rng rng(cfg.seed);
        parse_family(doc.at("family"), rng, cfg);
        if (doc.contains("observable")) {
            parse_observable(doc.at("observable"), rng, cfg);
        } else {
            cfg.observable_json = ordered_json{{"variant", "identity"}};
        }

        const auto& range = doc.at("k_range");
        if (!range.is_array() || range.size() != 2) throw ConfigError("k_range must be [k_min, k_max]");
        cfg.k_min = parse_real(range[0]);
        cfg.k_max = parse_real(range[1]);
        if (!(cfg.k_min < cfg.k_max)) throw ConfigError("k_range must satisfy k_min < k_max");

        if (doc.contains("step")) {
            const auto& s = doc.at("step");
            if (!(s.is_string() && s.get<std::string>() == "auto")) {
                cfg.step = parse_real(s);
                if (!(*cfg.step > 0.0)) throw ConfigError("step must be positive or \"auto\"");
            }
        }
        if (doc.contains("t_schedule")) {
            cfg.t_schedule.clear();
            for (const auto& t : doc.at("t_schedule")) cfg.t_schedule.push_back(parse_real(t));
        }
        if (cfg.t_schedule.empty()) throw ConfigError("t_schedule must not be empty");
        for (std::size_t i = 0; i < cfg.t_schedule.size(); ++i) {
            const double t = cfg.t_schedule[i];
            if (!(t > 0.0 && t < 1.0) || (i > 0 && !(t > cfg.t_schedule[i - 1]))) {
                throw ConfigError("t_schedule must increase strictly inside (0, 1)");
            }
        }
        if (doc.contains("test_functions")) {
            for (const auto& g : doc.at("test_functions")) cfg.test_functions.push_back(parse_gaussian(g));
        }
        if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
        if (doc.contains("newton_terms")) {
            cfg.newton_terms = doc.at("newton_terms").get<int>();
            if (cfg.newton_terms < 0) throw ConfigError("newton_terms must be non-negative");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

}  // namespace unitrace::cli
