// realpos: numerical ranges, fractional powers and verification suites.
//
// Exit codes: 0 ok, 1 suite failure, 2 input or flag error, 3 numeric
// failure, 4 precondition failure, 5 method disagreement.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "realpos/calculus.hpp"
#include "realpos/io.hpp"
#include "realpos/suites.hpp"

namespace {

using namespace realpos;

enum Exit { ok = 0, suite_failure = 1, input_error = 2, numeric_error = 3, precondition_error = 4, disagreement = 5 };

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InputError(what + ": '" + s + "' is not a number");
    }
    if (pos != s.size() || !std::isfinite(v)) throw InputError(what + ": '" + s + "' is not a finite number");
    return v;
}

/// REALPOS_DEFAULT_TOL sets eq_tol; each --tol name=value then overrides.
Tolerances resolve_tolerances(const std::vector<std::string>& overrides) {
    Tolerances t;
    if (const char* env = std::getenv("REALPOS_DEFAULT_TOL"); env && *env) {
        t.eq_tol = parse_double(env, "REALPOS_DEFAULT_TOL");
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw InputError("--tol expects name=value, got '" + o + "'");
        const std::string name = o.substr(0, eq);
        const double v = parse_double(o.substr(eq + 1), "--tol " + name);
        if (name == "eq_tol") {
            t.eq_tol = v;
        } else if (name == "psd_tol") {
            t.psd_tol = v;
        } else if (name == "conv_tol") {
            t.conv_tol = v;
        } else {
            throw InputError("--tol: unknown tolerance '" + name + "' (expected eq_tol, psd_tol or conv_tol)");
        }
    }
    t.validate();
    return t;
}

std::string joined_command(int argc, char** argv) {
    std::string s = "realpos";
    for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
    return s;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

// ---------------------------------------------------------------------------

struct NrangeArgs {
    std::string input;
    int angles = default_sweep;
    std::string svg, csv;
};

int cmd_nrange(const NrangeArgs& a) {
    if (a.angles < 3) throw InputError("--angles must be at least 3");
    const CMatrix x = read_matrix_file(a.input);
    const RangeBoundary rb = boundary(x, a.angles);
    if (!a.csv.empty()) write_text_file(a.csv, boundary_csv(rb));
    if (!a.svg.empty()) write_text_file(a.svg, boundary_svg(rb));
    if (a.csv.empty() && a.svg.empty()) std::cout << boundary_csv(rb);
    return ok;
}

struct PowerArgs {
    std::string input;
    double r = 0.5;
    std::string method = "cross";
    std::string out, report;
    std::vector<std::string> tol;
};

int cmd_power(const PowerArgs& a, const std::string& command) {
    const Tolerances tol = resolve_tolerances(a.tol);
    const PowerMethod method = parse_power_method(a.method);
    const CMatrix x = read_matrix_file(a.input);
    const auto ctx = AmbientContext::full(x.rows());

    VerificationReport rep;
    rep.suite = "power";
    rep.inputs_digest = digest(x);
    rep.values["r"] = a.r;
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&]() {
        rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!a.report.empty()) write_text_file(a.report, report_file(command, std::nullopt, tol, {rep}).dump(2) + "\n");
    };

    CMatrix y;
    try {
        if (method == PowerMethod::cross) {
            const CrossValidatedPower cv = power_cross(x, a.r, ctx, {}, tol);
            y = cv.value;
            for (const auto& [name, dev] : cv.deviations) rep.check("deviation " + name, dev, cv.tolerance);
            for (const auto& note : cv.notes) rep.info(note, true);
        } else {
            y = power(x, a.r, ctx, method, {}, tol);
        }
    } catch (const MethodDisagreementError& e) {
        const auto& c = e.candidates();
        const double scale = 1e-6 * (1.0 + spectral_norm(x));
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                rep.check("deviation " + c[i].first + "-" + c[j].first, spectral_norm(c[i].second - c[j].second), scale);
            }
        }
        finish();
        throw;
    }
    // r = 1/k: the k-th power must give back x.
    const double k = std::round(1.0 / a.r);
    if (k >= 1 && std::abs(k * a.r - 1.0) < 1e-12) {
        CMatrix back = y;
        for (int j = 1; j < static_cast<int>(k); ++j) back = back * y;
        rep.check("y^" + std::to_string(static_cast<int>(k)) + " = x", spectral_norm(back - x),
                  1e-6 * (1.0 + spectral_norm(x)));
    }
    finish();
    emit(a.out, matrix_to_json(y).dump(2) + "\n");
    return rep.passed() ? ok : numeric_error;
}

struct VerifyArgs {
    std::string suite;
    std::uint64_t seed = 0;
    int count = 10;
    int n = 4;
    std::string fixture;
    std::string report;
    std::vector<std::string> tol;
};

int cmd_verify(const VerifyArgs& a, const std::string& command) {
    SuiteOptions opt;
    opt.seed = a.seed;
    opt.count = a.count;
    opt.n = a.n;
    opt.fixture = a.fixture;
    opt.tol = resolve_tolerances(a.tol);
    if (a.suite != "all") suite_instance(a.suite);  // validates the name before running anything
    const auto reports = run_suite(a.suite, opt);
    if (!a.report.empty()) write_text_file(a.report, report_file(command, a.seed, opt.tol, reports).dump(2) + "\n");

    std::map<std::string, std::pair<int, int>> tally;  // suite -> (passed, total)
    std::vector<std::string> order;
    bool all_ok = true;
    for (const auto& r : reports) {
        if (!tally.count(r.suite)) order.push_back(r.suite);
        auto& t = tally[r.suite];
        ++t.second;
        if (r.passed()) {
            ++t.first;
        } else {
            all_ok = false;
            for (const auto& c : r.conditions) {
                if (c.kind == Condition::Kind::check && !c.passed) {
                    std::cerr << r.suite << " instance " << r.values.at("instance") << ": " << c.name << " (residual "
                              << c.residual << " > " << c.tolerance << ")" << (c.note.empty() ? "" : ": " + c.note)
                              << "\n";
                }
            }
        }
    }
    for (const auto& s : order) std::cout << s << ": " << tally[s].first << "/" << tally[s].second << " passed\n";
    return all_ok ? ok : suite_failure;
}

struct RandomArgs {
    std::string kind;
    int n = 4;
    std::uint64_t seed = 0;
    std::string out;
};

/// Random block-diagonal algebra in a random orthonormal frame.
SubalgebraBasis random_algebra(Eigen::Index n, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<Eigen::Index> sizes;
    for (Eigen::Index left = n; left > 0;) {
        const auto k = static_cast<Eigen::Index>(std::uniform_int_distribution<long>(1, left)(rng));
        sizes.push_back(k);
        left -= k;
    }
    const CMatrix u = random_unitary(n, rng);
    const auto block = SubalgebraBasis::block_diagonal(sizes);
    std::vector<CMatrix> basis;
    for (const auto& b : block.basis()) basis.push_back(u * b * u.adjoint());
    return SubalgebraBasis::make(AmbientContext::full(n), std::move(basis), identity(n));
}

int cmd_random(const RandomArgs& a) {
    if (a.n < 1 || a.n > 64) throw InputError("--n must lie in [1, 64]");
    std::string text;
    if (a.kind == "accretive") {
        text = matrix_to_json(random_accretive(a.n, a.seed)).dump(2);
    } else if (a.kind == "contraction") {
        text = matrix_to_json(random_contraction(a.n, a.seed)).dump(2);
    } else if (a.kind == "idempotent") {
        text = matrix_to_json(random_idempotent(a.n, a.seed)).dump(2);
    } else if (a.kind == "algebra") {
        text = algebra_to_json(random_algebra(a.n, a.seed)).dump(2);
    } else {
        throw InputError("unknown kind '" + a.kind + "' (expected accretive, contraction, idempotent or algebra)");
    }
    emit(a.out, text + "\n");
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"realpos: accretive matrices, fractional powers and verification suites"};
    app.require_subcommand(1);

    NrangeArgs na;
    auto* nrange = app.add_subcommand("nrange", "Numerical range boundary as CSV and/or SVG");
    nrange->add_option("input", na.input, "Matrix JSON file")->required();
    nrange->add_option("--angles", na.angles, "Number of support directions")->capture_default_str();
    nrange->add_option("--svg", na.svg, "Write an SVG plot");
    nrange->add_option("--csv", na.csv, "Write the boundary CSV");

    PowerArgs pa;
    auto* power_cmd = app.add_subcommand("power", "Principal fractional power x^r");
    power_cmd->add_option("input", pa.input, "Matrix JSON file")->required();
    power_cmd->add_option("--r", pa.r, "Exponent in (0, 1]")->required();
    power_cmd->add_option("--method", pa.method, "series | shifted | balakrishnan | cross")->capture_default_str();
    power_cmd->add_option("--out", pa.out, "Result matrix file (default stdout)");
    power_cmd->add_option("--report", pa.report, "Report JSON path");
    power_cmd->add_option("--tol", pa.tol, "Tolerance override name=value")->take_all();

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run a seeded verification suite");
    verify->add_option("suite", va.suite, "Suite name or 'all'")->required();
    verify->add_option("--seed", va.seed, "Base seed")->capture_default_str();
    verify->add_option("--count", va.count, "Instances per suite")->capture_default_str();
    verify->add_option("--n", va.n, "Matrix dimension")->capture_default_str();
    verify->add_option("--fixture", va.fixture, "Suite-specific fixture (rcp: transpose2)");
    verify->add_option("--report", va.report, "Report JSON path");
    verify->add_option("--tol", va.tol, "Tolerance override name=value")->take_all();

    RandomArgs ra;
    auto* random = app.add_subcommand("random", "Seeded random matrices and algebras");
    random->add_option("kind", ra.kind, "accretive | contraction | idempotent | algebra")->required();
    random->add_option("--n", ra.n, "Dimension")->capture_default_str();
    random->add_option("--seed", ra.seed, "Seed")->capture_default_str();
    random->add_option("--out", ra.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return input_error;
    }

    const std::string command = joined_command(argc, argv);
    try {
        if (*nrange) return cmd_nrange(na);
        if (*power_cmd) return cmd_power(pa, command);
        if (*verify) return cmd_verify(va, command);
        if (*random) return cmd_random(ra);
    } catch (const MethodDisagreementError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return disagreement;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return precondition_error;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numeric_error;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return input_error;
    } catch (const UnsupportedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return input_error;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return input_error;
    }
    return input_error;
}
