// qcascade command line front end: symplectic decompositions and cascade
// realization of linear quantum stochastic systems from JSON matrix/system
// files, with machine-readable run reports.

#include "qcascade/io.hpp"
#include "qcascade/linalg.hpp"
#include "qcascade/qsys.hpp"
#include "qcascade/real_jordan.hpp"
#include "qcascade/symplectic_qr.hpp"
#include "qcascade/symplectic_schur.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace {

using namespace qcascade;
using nlohmann::json;

// exit codes: 0 success, 1 IO/parse/usage, 2 QR rank failure,
// 3 non-admissible/defective, 4 non-realizable, 5 verification failure
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitRank = 2;
constexpr int kExitAdmissibility = 3;
constexpr int kExitRealizability = 4;
constexpr int kExitVerification = 5;

struct CommonFlags {
    double tol = -1.0;
    double zero_tol = 1e-7;
    std::uint64_t seed = 0;
    int max_attempts = 64;
    std::string basis_override;
    std::string freqs;
    std::string output;
    std::string format = "text";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool search_flags) {
    cmd->add_option("--tol", f.tol, "rank tolerance (default: 1e-10 x dimension)");
    cmd->add_option("--output", f.output, "write the JSON run report to this path");
    cmd->add_option("--format", f.format, "stdout format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    if (search_flags) {
        cmd->add_option("--seed", f.seed, "random seed for the basis search");
        cmd->add_option("--max-attempts", f.max_attempts, "basis search budget")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--basis-override", f.basis_override,
                        "matrix file pinning the Jordan basis");
        cmd->add_option("--zero-tol", f.zero_tol,
                        "relative hard-zero threshold above the block diagonal");
    }
}

SearchOptions options_from(const CommonFlags& f) {
    SearchOptions opts;
    opts.rank_tol = f.tol;
    opts.seed = f.seed;
    opts.max_attempts = f.max_attempts;
    opts.zero_tol = f.zero_tol;
    if (!f.basis_override.empty()) opts.basis_override = read_matrix_file(f.basis_override);
    return opts;
}

std::vector<Complex> parse_freqs(const std::string& list) {
    std::vector<Complex> freqs;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            freqs.emplace_back(0.0, std::stod(tok));
        } catch (const std::exception&) {
            throw ParseError("--freqs: cannot parse '" + tok + "' as a frequency");
        }
    }
    if (freqs.empty()) throw ParseError("--freqs: no frequencies given");
    return freqs;
}

json base_report(const std::string& command, const std::string& input_path,
                 const CommonFlags& f) {
    json rep;
    rep["schema_version"] = 1;
    rep["command"] = command;
    rep["inputs"] = {{"path", input_path}, {"digest", file_digest(input_path)}};
    rep["params"] = {{"tol", f.tol},
                     {"zero_tol", f.zero_tol},
                     {"seed", f.seed},
                     {"max_attempts", f.max_attempts}};
    return rep;
}

void emit(const json& rep, const CommonFlags& f, const std::string& text_summary) {
    if (f.format == "json")
        std::cout << rep.dump(2) << "\n";
    else
        std::cout << text_summary;
    if (!f.output.empty()) write_text_file(f.output, rep.dump(2) + "\n");
}

std::string format_matrix(const RealMatrix& m) {
    std::ostringstream out;
    Eigen::IOFormat fmt(6, 0, "  ", "\n", "  [", "]");
    out << m.format(fmt) << "\n";
    return out.str();
}

std::string format_matrix(const ComplexMatrix& m) {
    std::ostringstream out;
    for (Index r = 0; r < m.rows(); ++r) {
        out << "  [";
        for (Index c = 0; c < m.cols(); ++c) {
            out << m(r, c).real() << (m(r, c).imag() >= 0 ? "+" : "-")
                << std::abs(m(r, c).imag()) << "i";
            if (c + 1 < m.cols()) out << "  ";
        }
        out << "]\n";
    }
    return out.str();
}

int run_sqr(const std::string& path, const CommonFlags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const RealMatrix v = read_matrix_file(path);
    json rep = base_report("sqr", path, f);
    QrResult qr = symplectic_qr(v, f.tol);

    const double recon = max_abs(RealMatrix(qr.S * qr.Y - v)) / std::max(max_abs(v), 1e-300);
    const Index n = v.rows() / 2;
    const double symp =
        max_abs(RealMatrix(qr.S.transpose() * form_times(qr.S) - symplectic_form_matrix(n)));
    rep["outputs"] = {{"S", real_matrix_to_json(qr.S)},
                      {"Y", real_matrix_to_json(qr.Y)},
                      {"mus", qr.mus},
                      {"alphas", qr.alphas}};
    rep["residuals"] = {{"reconstruction_rel", recon}, {"symplecticity", symp}};
    rep["pass"] = true;
    rep["wall_ms"] = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();

    std::ostringstream text;
    text << "symplectic QR of " << path << " (" << v.rows() << "x" << v.cols() << ")\n";
    text << "S =\n" << format_matrix(qr.S);
    text << "Y =\n" << format_matrix(qr.Y);
    text << "mu =";
    for (double mu : qr.mus) text << " " << mu;
    text << "\nreconstruction residual (relative): " << recon << "\n";
    text << "symplecticity residual: " << symp << "\n";
    emit(rep, f, text.str());
    return kExitOk;
}

int run_schur(const std::string& path, const CommonFlags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const RealMatrix a = read_matrix_file(path);
    json rep = base_report("schur", path, f);
    SearchOptions opts = options_from(f);
    SchurResult schur = symplectic_schur(a, opts);

    const RealMatrix p = block_reversal_permutation(a.rows() / 2);
    const RealMatrix s_inv = schur.S1 * p.transpose();
    const double resid =
        max_abs(RealMatrix(schur.S * a * s_inv - schur.U)) / std::max(max_abs(a), 1e-300);
    const double symp = max_abs(RealMatrix(schur.S.transpose() * form_times(schur.S) -
                                           symplectic_form_matrix(a.rows() / 2)));
    rep["outputs"] = {{"S", real_matrix_to_json(schur.S)},
                      {"U", real_matrix_to_json(schur.U)},
                      {"S1", real_matrix_to_json(schur.S1)},
                      {"Y", real_matrix_to_json(schur.Y)},
                      {"jordan_V", real_matrix_to_json(schur.jordan.V)},
                      {"jordan_J", real_matrix_to_json(schur.jordan.J)}};
    rep["residuals"] = {{"triangularization_rel", resid}, {"symplecticity", symp}};
    rep["pass"] = true;
    rep["wall_ms"] = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();

    std::ostringstream text;
    text << "symplectic Schur decomposition of " << path << "\n";
    text << "S =\n" << format_matrix(schur.S);
    text << "U (lower 2x2 block triangular) =\n" << format_matrix(schur.U);
    text << "residual (relative): " << resid << ", symplecticity: " << symp << "\n";
    emit(rep, f, text.str());
    return kExitOk;
}

QuadSystem load_quadrature(const std::string& path) {
    SystemVariant sys = read_system_file(path);
    if (std::holds_alternative<QuadSystem>(sys)) return std::get<QuadSystem>(sys);
    return sdh_to_quadrature(std::get<SdhSystem>(sys));
}

int run_realize(const std::string& path, const CommonFlags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const QuadSystem g = load_quadrature(path);
    json rep = base_report("realize", path, f);
    SearchOptions opts = options_from(f);

    CascadeRealization cascade = cascade_realize(g, opts);
    if (!f.freqs.empty())
        cascade.verification = verify_cascade(g, cascade, parse_freqs(f.freqs), opts.verify_tol);

    rep["outputs"] = cascade_to_json(cascade, g.n, g.m);
    json ver;
    ver["tol"] = cascade.verification.tol;
    ver["max_deviation"] = cascade.verification.max_deviation;
    ver["pass"] = cascade.verification.pass;
    json rows = json::array();
    for (std::size_t i = 0; i < cascade.verification.freqs.size(); ++i) {
        const Complex s = cascade.verification.freqs[i];
        rows.push_back({{"s", {s.real(), s.imag()}},
                        {"deviation", cascade.verification.deviations[i]},
                        {"skipped", static_cast<bool>(cascade.verification.skipped[i])}});
    }
    ver["table"] = std::move(rows);
    rep["verification"] = std::move(ver);
    rep["pass"] = cascade.verification.pass;
    rep["wall_ms"] = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();

    std::ostringstream text;
    text << "cascade realization of " << path << " (" << g.n << " modes, " << g.m
         << " channels)\n";
    text << "T =\n" << format_matrix(cascade.T);
    for (std::size_t k = 0; k < cascade.subsystems.size(); ++k) {
        const auto& sub = cascade.subsystems[k];
        text << "subsystem " << (k + 1) << ":\n";
        text << " scattering =\n" << format_matrix(sub.scattering);
        text << " K =\n" << format_matrix(sub.K);
        text << " R =\n" << format_matrix(sub.R);
    }
    text << "verification: max relative deviation " << cascade.verification.max_deviation
         << " over " << cascade.verification.freqs.size() << " frequencies -> "
         << (cascade.verification.pass ? "pass" : "FAIL") << "\n";
    emit(rep, f, text.str());
    return cascade.verification.pass ? kExitOk : kExitVerification;
}

int run_verify(const std::string& system_path, const std::string& cascade_path,
               const CommonFlags& f, double verify_tol) {
    const auto t0 = std::chrono::steady_clock::now();
    const QuadSystem g = load_quadrature(system_path);
    json rep = base_report("verify", system_path, f);
    json cj = json::parse(read_text_file(cascade_path));
    if (cj.contains("outputs")) cj = cj["outputs"];  // accept a realize report
    CascadeRealization cascade = cascade_from_json(cj);

    std::vector<Complex> freqs =
        f.freqs.empty() ? default_frequency_grid(g) : parse_freqs(f.freqs);
    VerificationReport ver = verify_cascade(g, cascade, freqs, verify_tol);

    rep["verification"] = {{"tol", ver.tol},
                           {"max_deviation", ver.max_deviation},
                           {"pass", ver.pass}};
    rep["pass"] = ver.pass;
    rep["wall_ms"] = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    std::ostringstream text;
    text << "verification of " << cascade_path << " against " << system_path << ": max relative "
         << "deviation " << ver.max_deviation << " -> " << (ver.pass ? "pass" : "FAIL") << "\n";
    emit(rep, f, text.str());
    return ver.pass ? kExitOk : kExitVerification;
}

int run_survey(Index n, long trials, const CommonFlags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(f.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    long successes = 0;
    std::map<long, long> attempt_hist;
    for (long t = 0; t < trials; ++t) {
        RealMatrix a(2 * n, 2 * n);
        for (Index r = 0; r < 2 * n; ++r)
            for (Index c = 0; c < 2 * n; ++c) a(r, c) = gauss(rng);
        SearchOptions opts;
        opts.max_attempts = f.max_attempts;
        opts.seed = f.seed + static_cast<std::uint64_t>(t) + 1;
        opts.rank_tol = f.tol;
        AdmissibilityReport arep;
        try {
            admissible_basis_search(a, opts, &arep);
            ++successes;
            ++attempt_hist[arep.attempts];
        } catch (const NotAdmissible&) {
        } catch (const DefectiveMatrix&) {
        }
    }
    const double fraction = static_cast<double>(successes) / static_cast<double>(trials);

    json rep;
    rep["schema_version"] = 1;
    rep["command"] = "survey";
    rep["params"] = {{"n", n}, {"trials", trials}, {"seed", f.seed},
                     {"max_attempts", f.max_attempts}};
    rep["outputs"] = {{"successes", successes}, {"fraction", fraction}};
    json hist = json::object();
    for (const auto& [attempts, count] : attempt_hist) hist[std::to_string(attempts)] = count;
    rep["outputs"]["attempt_histogram"] = std::move(hist);
    rep["wall_ms"] = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();

    std::ostringstream text;
    text << "admissibility survey: n=" << n << ", trials=" << trials << ", seed=" << f.seed
         << "\n";
    text << "success fraction: " << fraction << " (" << successes << "/" << trials << ")\n";
    text << "attempts histogram:";
    for (const auto& [attempts, count] : attempt_hist)
        text << " " << attempts << ":" << count;
    text << "\n";
    emit(rep, f, text.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symplectic decompositions and cascade realization of linear quantum "
                 "stochastic systems"};
    app.require_subcommand(1);

    CommonFlags f_sqr, f_schur, f_realize, f_verify, f_survey;
    std::string sqr_file, schur_file, realize_file, verify_system, verify_cascade_file;
    Index survey_n = 1;
    long survey_trials = 100;
    double verify_tol = 1e-6;

    CLI::App* sqr = app.add_subcommand("sqr", "symplectic QR decomposition of a matrix file");
    sqr->add_option("matrix", sqr_file, "JSON matrix file")->required();
    add_common(sqr, f_sqr, false);

    CLI::App* schur = app.add_subcommand("schur", "symplectic Schur decomposition");
    schur->add_option("matrix", schur_file, "JSON matrix file")->required();
    add_common(schur, f_schur, true);

    CLI::App* realize = app.add_subcommand("realize", "cascade realization of a system file");
    realize->add_option("system", realize_file, "JSON system file")->required();
    add_common(realize, f_realize, true);
    realize->add_option("--freqs", f_realize.freqs,
                        "comma-separated verification frequencies (s = i w)");

    CLI::App* verify = app.add_subcommand("verify", "re-verify a cascade against a system");
    verify->add_option("system", verify_system, "JSON system file")->required();
    verify->add_option("cascade", verify_cascade_file, "cascade JSON (realize report)")
        ->required();
    add_common(verify, f_verify, false);
    verify->add_option("--freqs", f_verify.freqs, "comma-separated frequencies");
    verify->add_option("--verify-tol", verify_tol, "pass threshold on the relative deviation");

    CLI::App* survey = app.add_subcommand("survey", "admissibility statistics on random matrices");
    survey->add_option("--n", survey_n, "degrees of freedom")->required()->check(
        CLI::PositiveNumber);
    survey->add_option("--trials", survey_trials, "number of sampled matrices")
        ->required()
        ->check(CLI::PositiveNumber);
    add_common(survey, f_survey, false);
    survey->add_option("--seed", f_survey.seed, "random seed");
    survey->add_option("--max-attempts", f_survey.max_attempts, "basis search budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitIo;
    }

    try {
        if (sqr->parsed()) return run_sqr(sqr_file, f_sqr);
        if (schur->parsed()) return run_schur(schur_file, f_schur);
        if (realize->parsed()) return run_realize(realize_file, f_realize);
        if (verify->parsed())
            return run_verify(verify_system, verify_cascade_file, f_verify, verify_tol);
        if (survey->parsed()) return run_survey(survey_n, survey_trials, f_survey);
    } catch (const RankDeficientPrefix& e) {
        std::cerr << "error: " << e.what() << " (prefix " << e.prefix << ")\n";
        return kExitRank;
    } catch (const NotAdmissible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAdmissibility;
    } catch (const DefectiveMatrix& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAdmissibility;
    } catch (const TriangularizationResidual& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAdmissibility;
    } catch (const NotRealizable& e) {
        std::cerr << "error: " << e.what() << " (r1=" << e.report.r1 << ", r2=" << e.report.r2
                  << ", r3=" << e.report.r3 << ")\n";
        return kExitRealizability;
    } catch (const VerificationFailed& e) {
        std::cerr << "error: " << e.what() << " (max deviation " << e.deviation << ")\n";
        return kExitVerification;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitIo;
}
