#include "unitrace/cli/commands.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include <spdlog/spdlog.h>

#include "unitrace/errors.hpp"
#include "unitrace/export.hpp"
#include "unitrace/newton.hpp"
#include "unitrace/spectral_flow.hpp"
#include "unitrace/trace_formula.hpp"

namespace unitrace::cli {

using nlohmann::ordered_json;

namespace {

ordered_json complex_json(Complex z) { return ordered_json::array({format_real(z.real()), format_real(z.imag())}); }

ordered_json run_header(const RunConfig& config, const char* command) {
    ordered_json j;
    j["command"] = command;
    j["family"] = config.family_json;
    j["observable"] = config.observable_json;
    j["k_range"] = {format_real(config.k_min), format_real(config.k_max)};
    j["step"] = format_real(config.resolved_step());
    j["seed"] = config.seed;
    return j;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
    ensure_dir(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
    write_file_atomic(path, j.dump(2) + "\n");
    spdlog::info("wrote {}", path.string());
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
    const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / step - 1e-9)));
    std::vector<double> grid(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        grid[i] = (i == intervals) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(intervals);
    }
    return grid;
}

}  // namespace

ScanKind parse_scan_kind(const std::string& what) {
    if (what == "abel") return ScanKind::Abel;
    if (what == "phases") return ScanKind::Phases;
    if (what == "newton") return ScanKind::Newton;
    throw ConfigError("--what must be one of abel, phases, newton (got '" + what + "')");
}

int cmd_find_crossings(const RunConfig& config, const std::filesystem::path& out_dir) {
    const auto crossings = find_crossings(config.family, config.k_min, config.k_max, config.resolved_step());
    spdlog::info("found {} crossings on [{}, {}]", crossings.size(), config.k_min, config.k_max);
    ordered_json doc = run_header(config, "find-crossings");
    ordered_json list = ordered_json::array();
    for (const auto& c : crossings) {
        ordered_json item;
        item["k0"] = format_real(c.k0);
        item["track"] = c.track_index;
        item["speed"] = complex_json(c.speed);
        item["residual"] = format_real(c.residual);
        item["weight"] = complex_json(crossing_weight(config.family, config.observable, c));
        list.push_back(std::move(item));
    }
    doc["crossings"] = std::move(list);
    write_json(out_dir / "crossings.json", doc);
    return kExitOk;
}

int cmd_verify(const RunConfig& config, const std::filesystem::path& out_dir) {
    if (config.test_functions.empty()) throw ConfigError("verify: config lists no test_functions");
    ordered_json doc = run_header(config, "verify");
    ordered_json ts = ordered_json::array();
    for (double t : config.t_schedule) ts.push_back(format_real(t));
    doc["t_schedule"] = std::move(ts);

    bool all_pass = true;
    ordered_json reports = ordered_json::array();
    for (const auto& g : config.test_functions) {
        const VerificationReport r = verify_trace_formula(config.family, config.observable, g, config.t_schedule);
        all_pass = all_pass && r.pass;
        spdlog::info("test function at {} (width {}): relative error {:.3e}, tolerance {:.3e} -> {}", g.center,
                     g.width, r.relative_error, r.tolerance, r.pass ? "PASS" : "FAIL");
        ordered_json item;
        item["test_function"] = {{"center", format_real(g.center)},
                                 {"width", format_real(g.width)},
                                 {"amplitude", complex_json(g.amplitude)}};
        item["atoms"] = r.measure.atoms.size();
        ordered_json rows = ordered_json::array();
        for (const auto& row : r.rows) {
            rows.push_back({{"t", format_real(row.t)},
                            {"lhs", complex_json(row.lhs)},
                            {"rhs", complex_json(row.rhs)},
                            {"error", format_real(row.error)}});
        }
        item["rows"] = std::move(rows);
        item["lhs_limit_estimate"] = r.lhs_limit_estimate ? complex_json(*r.lhs_limit_estimate) : ordered_json();
        item["scale"] = format_real(r.scale);
        item["relative_error"] = format_real(r.relative_error);
        item["tolerance"] = format_real(r.tolerance);
        item["errors_non_increasing"] = r.errors_non_increasing;
        item["result"] = r.pass ? "PASS" : "FAIL";
        reports.push_back(std::move(item));
    }
    doc["reports"] = std::move(reports);
    doc["result"] = all_pass ? "PASS" : "FAIL";
    write_json(out_dir / "verify_report.json", doc);
    return all_pass ? kExitOk : kExitVerificationFailed;
}

int cmd_scan(const RunConfig& config, ScanKind what, const std::filesystem::path& out_dir) {
    std::ostringstream csv;
    const std::size_t n = config.family.dim();
    std::string name;
    switch (what) {
        case ScanKind::Abel: {
            name = "scan_abel.csv";
            const double t = config.t_schedule.back();
            csv << "k,value_re,value_im\n";
            for (double k : uniform_grid(config.k_min, config.k_max, config.resolved_step())) {
                const Complex v = abel_kernel_eval(config.family, config.observable, k, t);
                csv << format_real(k) << ',' << format_real(v.real()) << ',' << format_real(v.imag()) << '\n';
            }
            break;
        }
        case ScanKind::Phases: {
            name = "scan_phases.csv";
            const PhaseTrack track = scan_eigenphases(config.family, config.k_min, config.k_max, config.resolved_step());
            csv << "k";
            for (std::size_t j = 1; j <= n; ++j) csv << ",theta_" << j;
            csv << ",abs_det\n";
            for (std::size_t i = 0; i < track.grid.size(); ++i) {
                const double k = track.grid[i];
                csv << format_real(k);
                for (double th : track.phases[i]) csv << ',' << format_real(th);
                const double det =
                    std::abs(determinant(config.family.evaluate(k) - ComplexMatrix::identity(n)));
                csv << ',' << format_real(det) << '\n';
            }
            break;
        }
        case ScanKind::Newton: {
            name = "scan_newton.csv";
            csv << "k,partial_sum_re,partial_sum_im,remainder_re,remainder_im,abs_h1\n";
            for (double k : uniform_grid(config.k_min, config.k_max, config.resolved_step())) {
                const PartialSum p = partial_sum_terms(config.family.evaluate(k), config.newton_terms);
                csv << format_real(k) << ',' << format_real(p.partial_sum.real()) << ','
                    << format_real(p.partial_sum.imag()) << ',' << format_real(p.remainder.real()) << ','
                    << format_real(p.remainder.imag()) << ',' << format_real(std::abs(p.h_at_one)) << '\n';
            }
            break;
        }
    }
    ensure_dir(out_dir);
    write_file_atomic(out_dir / name, csv.str());
    spdlog::info("wrote {}", (out_dir / name).string());
    return kExitOk;
}

int cmd_crystalline(const RunConfig& config, int m_max, const std::filesystem::path& out_dir) {
    if (!config.family.is_diag_phase() && !std::holds_alternative<Scalar>(config.family.description())) {
        spdlog::error("crystalline: the exponential-sum expansion needs a diag_phase or scalar family");
        return kExitHypothesis;
    }
    ObservableFamily constant;
    if (const auto* c = std::get_if<ConstantObservable>(&config.observable)) {
        constant = *c;
    } else if (std::holds_alternative<IdentityObservable>(config.observable)) {
        constant = ConstantObservable{ComplexMatrix::identity(config.family.dim())};
    } else {
        spdlog::error("crystalline: the exponential-sum expansion needs a constant observable");
        return kExitHypothesis;
    }
    if (m_max < 0) throw ConfigError("crystalline: --m-max must be non-negative");

    const auto terms = crystalline_expand(config.family, constant, m_max);
    const AtomicMeasure mu = build_measure(config.family, constant, config.k_min, config.k_max, config.resolved_step());

    // Both sides of the expansion at a few k: each order against tr(U^m A),
    // and the Abel-weighted total against the direct Abel sum.
    const double t = config.t_schedule.back();
    const ComplexMatrix& amat = std::get<ConstantObservable>(constant).a;
    double max_order_error = 0.0;
    double max_abel_error = 0.0;
    for (double k : uniform_grid(config.k_min, config.k_max, (config.k_max - config.k_min) / 16.0)) {
        const ComplexMatrix u = config.family.evaluate(k);
        ComplexMatrix forward = amat;
        ComplexMatrix backward = amat;
        max_order_error = std::max(max_order_error, std::abs(exp_sum(terms, k, 0) - amat.trace()));
        for (int m = 1; m <= m_max; ++m) {
            forward = matmul(u, forward);
            backward = matmul(u.adjoint(), backward);
            max_order_error = std::max(max_order_error, std::abs(exp_sum(terms, k, m) - forward.trace()));
            max_order_error = std::max(max_order_error, std::abs(exp_sum(terms, k, -m) - backward.trace()));
        }
        const Complex direct = kTwoPi * abel_sum_direct(config.family, constant, k, AbelParams{t, m_max});
        max_abel_error = std::max(max_abel_error, std::abs(abel_exp_sum(terms, k, t) - direct));
    }

    ordered_json meta = run_header(config, "crystalline");
    meta["m_max"] = m_max;
    meta["tolerances"] = {{"term_drop", format_real(1e-15)}, {"atom_drop", format_real(1e-14)}};
    meta["consistency"] = {{"max_order_error", format_real(max_order_error)},
                           {"abel_t", format_real(t)},
                           {"max_abel_error", format_real(max_abel_error)}};
    ensure_dir(out_dir);
    export_measure(mu, terms, out_dir / "crystalline.json", meta);
    spdlog::info("crystalline: {} terms, {} atoms, consistency {:.3e}", terms.size(), mu.atoms.size(), max_order_error);
    return kExitOk;
}

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const DegenerateCrossingError& e) {
        spdlog::error("hypothesis violated (tracks {} and {}): {}", e.track_a(), e.track_b(), e.what());
        return kExitHypothesis;
    } catch (const HypothesisError& e) {
        spdlog::error("hypothesis violated: {}", e.what());
        return kExitHypothesis;
    } catch (const NumericalError& e) {
        spdlog::error("numerical failure: {}", e.what());
        return kExitHypothesis;
    } catch (const NotUnitaryError& e) {
        spdlog::error("numerical failure: {}", e.what());
        return kExitHypothesis;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return kExitIoOrConfig;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitIoOrConfig;
    }
}

}  // namespace unitrace::cli
