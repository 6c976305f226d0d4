// verify: command-line harness around the identity registry and the
// individual special-function evaluators.
//
//   verify run  --suite core|audit|all [grid flags] [--out report.json]
//   verify eval --fn NAME [value flags]
//
// Exit codes: 0 all selected identities pass (audit failures only count with
// --strict-audit), 1 core failure, 2 configuration error, 3 numeric abort.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "qbessel/verify.hpp"

using namespace qbessel;

namespace {

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    auto dots = s.find("..");
    if (dots != std::string::npos) {
        int lo = std::stoi(s.substr(0, dots));
        int hi = std::stoi(s.substr(dots + 2));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

Complex parse_complex(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) return Complex(std::stod(s), 0.0);
    return Complex(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
}

int run_command(const std::string& suite, const std::string& qlist, const std::string& dimlist,
                const std::string& deglist, int trials, uint64_t seed, double tol,
                const std::string& format, const std::string& out_path, bool strict_audit,
                const std::string& replay, int threads) {
    if (!replay.empty()) {
        ordered_json desc = ordered_json::parse(replay);
        std::cout << replay_descriptor(desc);
        return 0;
    }
    VerifyConfig cfg;
    cfg.suite = suite;
    if (!qlist.empty()) cfg.q_values = parse_double_list(qlist);
    if (!dimlist.empty()) cfg.dims = parse_int_list(dimlist);
    if (!deglist.empty()) cfg.degrees = parse_int_list(deglist);
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.tolerance = tol;
    cfg.format = format;
    cfg.strict_audit = strict_audit;
    cfg.threads = threads;
    cfg.output_path = out_path;
    cfg.validate();

    VerifyReport rep = run_suite(cfg);
    std::string rendered = (cfg.format == "json") ? report_to_json(rep).dump(2) + "\n"
                                                  : report_to_text(rep);
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw NumericError(errc::config, "cannot open output path " + out_path);
        f << rendered;
    } else {
        std::cout << rendered;
    }

    bool bad = false;
    for (const auto& r : rep.results) {
        if (r.verdict != "fail") continue;
        if (r.category == "core" || strict_audit) bad = true;
    }
    return bad ? 1 : 0;
}

int eval_command(const std::string& fn, double q, const std::string& zs, int n, int m, int r,
                 const std::string& ss, const std::string& xs, const std::string& ys,
                 const std::string& a_arg, const std::string& b_arg, const std::string& e_arg) {
    QContext ctx(q);
    Complex z = zs.empty() ? Complex(0.0) : parse_complex(zs);
    Complex s = ss.empty() ? Complex(2.0) : parse_complex(ss);
    Complex x = xs.empty() ? Complex(0.1) : parse_complex(xs);
    Complex y = ys.empty() ? Complex(0.2) : parse_complex(ys);
    auto need = [&](const std::string& arg, const char* name) {
        if (arg.empty())
            throw NumericError(errc::config, std::string("eval: --") + name + " is required");
        return parse_matrix_arg(arg);
    };
    CMatrix out;
    if (fn == "qbmp") {
        CMatrix a = need(a_arg, "A");
        out = qbmp(QBesselParams{n, a, ctx}, z);
    } else if (fn == "phi21") {
        CMatrix a = need(a_arg, "A"), b = need(b_arg, "B");
        CMatrix e = e_arg.empty() ? CMatrix::zero(a.dim()) : parse_matrix_arg(e_arg);
        out = phi21(a, b, e, z, ctx);
    } else if (fn == "horn_h6") {
        CMatrix a = need(a_arg, "A"), e = need(e_arg, "E");
        out = horn_h6(a, e, x, y, ctx);
    } else if (fn == "horn_phi1") {
        CMatrix a = need(a_arg, "A"), b = need(b_arg, "B"), e = need(e_arg, "E");
        out = horn_phi1(HornParams{a, b, e, x, y}, ctx);
    } else if (fn == "q_gamma") {
        out = q_gamma(need(a_arg, "A"), ctx);
    } else if (fn == "q_beta") {
        out = q_beta(need(a_arg, "A"), need(b_arg, "B"), ctx);
    } else if (fn == "q_exp_big") {
        out = q_exp_big(need(a_arg, "A"), ctx);
    } else if (fn == "q_exp_small") {
        out = q_exp_small(need(a_arg, "A"), ctx);
    } else if (fn == "q_poch") {
        out = q_poch(need(a_arg, "A"), n, ctx);
    } else if (fn == "q_poch_inf") {
        out = q_poch_inf(need(a_arg, "A"), ctx);
    } else if (fn == "q_bracket") {
        out = q_bracket(need(a_arg, "A"), ctx);
    } else if (fn == "mat_exp") {
        out = mat_exp(need(a_arg, "A"));
    } else if (fn == "qbmp_laplace_closed") {
        std::optional<int> mw;
        if (m > 0) mw = m;
        out = qbmp_laplace_closed(n, need(a_arg, "A"), s, mw, ctx);
    } else if (fn == "qbmp_integral_rep") {
        out = qbmp_integral_rep(QBesselParams{n, need(a_arg, "A"), ctx}, z);
    } else {
        throw NumericError(errc::config, "eval: unknown --fn " + fn);
    }
    (void)r;
    std::cout << format_matrix(out) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical q-Bessel matrix polynomial identity harness"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run an identity suite over the sampling grid");
    std::string suite = "core", qlist, dimlist, deglist, format = "json", out_path, replay;
    int trials = 20, threads = 0;
    uint64_t seed = 42;
    double tol = 1e-8;
    bool strict_audit = false;
    run->add_option("--suite", suite, "core|audit|all");
    run->add_option("--q", qlist, "comma-separated q values, e.g. 0.3,0.5,0.7,0.9");
    run->add_option("--dims", dimlist, "comma-separated dimensions, e.g. 1,2,3");
    run->add_option("--degrees", deglist, "degree grid, e.g. 1..6 or 1,2,3");
    run->add_option("--trials", trials, "trials per identity per grid point");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--tol", tol, "base tolerance");
    run->add_option("--format", format, "json|text");
    run->add_option("--out", out_path, "write the report here instead of stdout");
    run->add_flag("--strict-audit", strict_audit, "audit failures also affect the exit code");
    run->add_option("--replay", replay, "re-evaluate one dumped trial descriptor (JSON)");
    run->add_option("--threads", threads, "worker pool size (0 = hardware)");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a single function");
    std::string fn, zs, ss, xs, ys, a_arg, b_arg, e_arg;
    double q = 0.5;
    int n = 0, m = 0, r = 0;
    ev->add_option("--fn", fn, "qbmp|phi21|horn_h6|horn_phi1|q_gamma|q_beta|q_exp_big|"
                               "q_exp_small|q_poch|q_poch_inf|q_bracket|mat_exp|"
                               "qbmp_laplace_closed|qbmp_integral_rep")
        ->required();
    ev->add_option("--q", q, "base q in (0,1)");
    ev->add_option("--z", zs, "scalar argument, re or re,im");
    ev->add_option("--n", n, "degree / Pochhammer count");
    ev->add_option("--m", m, "weight exponent (transforms)");
    ev->add_option("--r", r, "derivative order");
    ev->add_option("--s", ss, "transform variable");
    ev->add_option("--x", xs, "first Horn argument");
    ev->add_option("--y", ys, "second Horn argument");
    ev->add_option("--A", a_arg, "matrix: file path or inline [[...]]");
    ev->add_option("--B", b_arg, "matrix: file path or inline [[...]]");
    ev->add_option("--E", e_arg, "matrix: file path or inline [[...]]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed())
            return run_command(suite, qlist, dimlist, deglist, trials, seed, tol, format,
                               out_path, strict_audit, replay, threads);
        return eval_command(fn, q, zs, n, m, r, ss, xs, ys, a_arg, b_arg, e_arg);
    } catch (const NumericError& e) {
        std::cerr << "error (" << errc_name(e.kind()) << "): " << e.what() << "\n";
        return e.kind() == errc::config ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return run->parsed() ? 2 : 3;
    }
}
