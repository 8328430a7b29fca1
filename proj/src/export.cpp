#include "unitrace/export.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "unitrace/errors.hpp"

namespace unitrace {

using nlohmann::ordered_json;

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_real_string(const std::string& s) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    // ERANGE on underflow still yields the correctly rounded subnormal; only overflow is an error
    const bool overflow = errno == ERANGE && std::abs(v) == HUGE_VAL;
    if (s.empty() || end == s.c_str() || *end != '\0' || overflow) {
        throw ConfigError("not a real number: '" + s + "'");
    }
    return v;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

ordered_json measure_to_json(const AtomicMeasure& mu, std::span<const ExpSumTerm> terms,
                             const ordered_json& metadata) {
    ordered_json doc;
    doc["k_range"] = {format_real(mu.k_min), format_real(mu.k_max)};
    ordered_json atoms = ordered_json::array();
    for (const auto& a : mu.atoms) {
        atoms.push_back({format_real(a.position), format_real(a.weight.real()), format_real(a.weight.imag())});
    }
    doc["atoms"] = std::move(atoms);
    ordered_json jt = ordered_json::array();
    for (const auto& t : terms) {
        jt.push_back({format_real(t.freq), format_real(t.coeff.real()), format_real(t.coeff.imag()), t.multi_index,
                      t.order});
    }
    doc["terms"] = std::move(jt);
    doc["metadata"] = metadata;
    return doc;
}

void export_measure(const AtomicMeasure& mu, std::span<const ExpSumTerm> terms, const std::filesystem::path& path,
                    const ordered_json& metadata) {
    write_file_atomic(path, measure_to_json(mu, terms, metadata).dump(2) + "\n");
}

MeasureDocument import_measure(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ordered_json doc;
    try {
        doc = ordered_json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed measure document " + path.string() + ": " + e.what());
    }
    MeasureDocument out;
    try {
        const auto& range = doc.at("k_range");
        out.measure.k_min = parse_real(range.at(0));
        out.measure.k_max = parse_real(range.at(1));
        for (const auto& a : doc.at("atoms")) {
            Atom atom;
            atom.position = parse_real(a.at(0));
            atom.weight = Complex(parse_real(a.at(1)), parse_real(a.at(2)));
            out.measure.atoms.push_back(atom);
        }
        for (const auto& t : doc.at("terms")) {
            ExpSumTerm term;
            term.freq = parse_real(t.at(0));
            term.coeff = Complex(parse_real(t.at(1)), parse_real(t.at(2)));
            term.multi_index = t.at(3).get<std::vector<int>>();
            term.order = t.at(4).get<int>();
            out.terms.push_back(std::move(term));
        }
        if (doc.contains("metadata")) out.metadata = doc["metadata"];
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed measure document " + path.string() + ": " + e.what());
    }
    return out;
}

}  // namespace unitrace
