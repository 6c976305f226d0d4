#pragma once

#include <atomic>
#include <iomanip>
#include <thread>

#include "identities.hpp"
#include "matrix_io.hpp"

namespace qbessel {

struct VerifyConfig {
    std::string suite = "core"; // core | audit | all
    std::vector<double> q_values{0.3, 0.5, 0.7, 0.9};
    std::vector<int> dims{1, 2, 3};
    std::vector<int> degrees{1, 2, 3, 4, 5, 6};
    int trials = 20;
    uint64_t master_seed = 42;
    double tolerance = 1e-8;
    std::string output_path;
    std::string format = "json"; // json | text
    bool strict_audit = false;
    int threads = 0; // 0 = hardware concurrency

    void validate() const {
        if (suite != "core" && suite != "audit" && suite != "all")
            throw NumericError(errc::config, "suite must be core|audit|all");
        if (q_values.empty() || dims.empty() || degrees.empty() || trials < 1)
            throw NumericError(errc::config, "empty grid or trials < 1");
        for (double q : q_values)
            if (!(q > 0.0 && q < 1.0))
                throw NumericError(errc::config, "q values must lie in (0,1)");
        for (int d : dims)
            if (d < 1 || d > 4) throw NumericError(errc::config, "dims must lie in 1..4");
        if (!(tolerance > 0.0)) throw NumericError(errc::config, "tolerance must be > 0");
        if (format != "json" && format != "text")
            throw NumericError(errc::config, "format must be json|text");
    }
};

// Lattice-truncation-limited comparisons get one decade of slack, matching
// the per-identity tolerances the acceptance criteria pin down.
inline double tolerance_factor(const std::string& id) {
    if (id == "eq2.30" || id == "eq2.31" || id == "eq2.32" || id == "eq2.35" ||
        id == "eq2.36" || id == "eq2.37" || id == "eq1.12vs1.13")
        return 10.0;
    return 1.0;
}

struct IdentityResult {
    std::string id;
    std::string category;
    std::string statement;
    int trials = 0;
    int inconclusive_count = 0;
    double max_rel_residual = 0.0;
    double tolerance = 0.0;
    std::string verdict; // pass | fail
    ordered_json counterexample; // null unless the identity failed
};

struct VerifyReport {
    VerifyConfig config;
    std::vector<IdentityResult> results;
    int passed = 0, failed = 0, audited = 0;
};

namespace detail {

inline ordered_json config_to_json(const VerifyConfig& c) {
    ordered_json j;
    j["suite"] = c.suite;
    j["q_values"] = c.q_values;
    j["dims"] = c.dims;
    j["degrees"] = c.degrees;
    j["trials_per_identity"] = c.trials;
    j["master_seed"] = c.master_seed;
    j["tolerance"] = c.tolerance;
    j["format"] = c.format;
    j["strict_audit"] = c.strict_audit;
    return j;
}

inline VerifyConfig config_from_json(const ordered_json& j) {
    VerifyConfig c;
    c.suite = j.at("suite").get<std::string>();
    c.q_values = j.at("q_values").get<std::vector<double>>();
    c.dims = j.at("dims").get<std::vector<int>>();
    c.degrees = j.at("degrees").get<std::vector<int>>();
    c.trials = j.at("trials_per_identity").get<int>();
    c.master_seed = j.at("master_seed").get<uint64_t>();
    c.tolerance = j.at("tolerance").get<double>();
    c.format = j.at("format").get<std::string>();
    c.strict_audit = j.at("strict_audit").get<bool>();
    return c;
}

inline ordered_json descriptor_json(const std::string& id, const TrialInput& in,
                                    int grid_index, int trial_index, uint64_t master_seed) {
    ordered_json d;
    d["id"] = id;
    d["grid_index"] = grid_index;
    d["trial_index"] = trial_index;
    d["master_seed"] = master_seed;
    d["dim"] = in.dim;
    d["q"] = in.q;
    d["n"] = in.n;
    d["m"] = in.m;
    d["mu"] = in.mu;
    d["nu"] = in.nu;
    d["r"] = in.r;
    d["z"] = in.z;
    d["s"] = in.s;
    d["x"] = in.x;
    d["y"] = in.y;
    d["beta"] = in.beta;
    d["shift"] = in.shift;
    d["family_seed"] = in.family_seed;
    return d;
}

inline TrialInput trial_from_descriptor(const ordered_json& d) {
    TrialInput in;
    in.dim = d.at("dim").get<int>();
    in.q = d.at("q").get<double>();
    in.n = d.at("n").get<int>();
    in.m = d.at("m").get<int>();
    in.mu = d.at("mu").get<int>();
    in.nu = d.at("nu").get<int>();
    in.r = d.at("r").get<int>();
    in.z = d.at("z").get<double>();
    in.s = d.at("s").get<double>();
    in.x = d.at("x").get<double>();
    in.y = d.at("y").get<double>();
    in.beta = d.at("beta").get<double>();
    in.shift = d.at("shift").get<double>();
    in.family_seed = d.at("family_seed").get<uint64_t>();
    return in;
}

} // namespace detail

inline std::vector<const IdentityDef*> select_suite(const std::string& suite) {
    std::vector<const IdentityDef*> sel;
    for (const auto& d : registry()) {
        if (suite == "all" || (suite == "core" && d.category == Category::core) ||
            (suite == "audit" && d.category == Category::audit))
            sel.push_back(&d);
    }
    return sel;
}

// Runs every selected identity over the grid. Trials execute in a worker
// pool; each (identity, grid, trial) cell is independent and lands in a
// preallocated slot, so the report is bit-identical whatever the pool size.
inline VerifyReport run_suite(const VerifyConfig& cfg) {
    cfg.validate();
    VerifyReport rep;
    rep.config = cfg;

    SampleSpace space;
    space.dims = cfg.dims;
    space.qs = cfg.q_values;
    space.degrees = cfg.degrees;

    const auto sel = select_suite(cfg.suite);
    const int grid = static_cast<int>(cfg.dims.size() * cfg.q_values.size());
    const int per_ident = grid * cfg.trials;
    const int total = per_ident * static_cast<int>(sel.size());

    struct Cell {
        TrialInput in;
        TrialOutcome out;
    };
    std::vector<Cell> cells(static_cast<size_t>(total));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int idx = next.fetch_add(1);
            if (idx >= total) return;
            int iid = idx / per_ident;
            int rem = idx % per_ident;
            int gi = rem / cfg.trials;
            int ti = rem % cfg.trials;
            Cell& c = cells[static_cast<size_t>(idx)];
            c.in = make_trial(*sel[static_cast<size_t>(iid)], space, cfg.master_seed, gi, ti);
            c.out = run_trial(*sel[static_cast<size_t>(iid)], c.in);
        }
    };
    int nthreads = cfg.threads > 0 ? cfg.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (size_t iid = 0; iid < sel.size(); ++iid) {
        const IdentityDef& def = *sel[iid];
        IdentityResult res;
        res.id = def.id;
        res.category = def.category == Category::core ? "core" : "audit";
        res.statement = def.statement;
        res.trials = per_ident;
        res.tolerance = cfg.tolerance * tolerance_factor(def.id);

        int best_fail = -1; // flat index of the preferred counterexample
        for (int k = 0; k < per_ident; ++k) {
            const Cell& c = cells[iid * static_cast<size_t>(per_ident) + static_cast<size_t>(k)];
            if (!c.out.conclusive) {
                ++res.inconclusive_count;
                continue;
            }
            res.max_rel_residual = std::max(res.max_rel_residual, c.out.residual);
            if (c.out.residual > res.tolerance) {
                if (best_fail < 0) {
                    best_fail = k;
                } else {
                    const Cell& b = cells[iid * static_cast<size_t>(per_ident) +
                                          static_cast<size_t>(best_fail)];
                    // prefer scalar counterexamples, then the smallest degree
                    auto rank = [](const Cell& x) {
                        return std::make_pair(x.in.dim, x.in.n);
                    };
                    if (rank(c) < rank(b)) best_fail = k;
                }
            }
        }
        bool pass = res.max_rel_residual <= res.tolerance &&
                    res.inconclusive_count < res.trials;
        res.verdict = pass ? "pass" : "fail";
        if (!pass) {
            if (best_fail >= 0) {
                const Cell& c = cells[iid * static_cast<size_t>(per_ident) +
                                      static_cast<size_t>(best_fail)];
                int gi = best_fail / cfg.trials, ti = best_fail % cfg.trials;
                ordered_json ce;
                ce["descriptor"] = detail::descriptor_json(def.id, c.in, gi, ti, cfg.master_seed);
                ce["residual"] = c.out.residual;
                ce["lhs"] = matrix_to_json(c.out.lhs);
                ce["rhs"] = matrix_to_json(c.out.rhs);
                if (!c.out.note.empty()) ce["note"] = c.out.note;
                res.counterexample = std::move(ce);
            } else {
                // failed purely through inconclusive trials
                for (int k = 0; k < per_ident; ++k) {
                    const Cell& c = cells[iid * static_cast<size_t>(per_ident) +
                                          static_cast<size_t>(k)];
                    if (!c.out.conclusive) {
                        ordered_json ce;
                        int gi = k / cfg.trials, ti = k % cfg.trials;
                        ce["descriptor"] =
                            detail::descriptor_json(def.id, c.in, gi, ti, cfg.master_seed);
                        ce["note"] = c.out.note;
                        res.counterexample = std::move(ce);
                        break;
                    }
                }
            }
        }
        if (res.verdict == "pass") ++rep.passed;
        else ++rep.failed;
        if (def.category == Category::audit) ++rep.audited;
        rep.results.push_back(std::move(res));
    }
    return rep;
}

inline ordered_json report_to_json(const VerifyReport& rep) {
    ordered_json j;
    j["config"] = detail::config_to_json(rep.config);
    ordered_json results = ordered_json::array();
    for (const auto& r : rep.results) {
        ordered_json e;
        e["id"] = r.id;
        e["category"] = r.category;
        e["trials"] = r.trials;
        e["inconclusive_count"] = r.inconclusive_count;
        e["max_rel_residual"] = r.max_rel_residual;
        e["tolerance"] = r.tolerance;
        e["verdict"] = r.verdict;
        if (!r.counterexample.is_null()) e["counterexample"] = r.counterexample;
        results.push_back(std::move(e));
    }
    j["results"] = std::move(results);
    j["summary"] = {{"passed", rep.passed}, {"failed", rep.failed}, {"audited", rep.audited}};
    return j;
}

inline std::string report_to_text(const VerifyReport& rep) {
    std::ostringstream os;
    os << std::left << std::setw(14) << "id" << std::setw(7) << "cat" << std::right
       << std::setw(7) << "trials" << std::setw(7) << "incl" << std::setw(14) << "max_resid"
       << std::setw(10) << "tol" << std::setw(8) << "verdict" << "\n";
    os << std::string(67, '-') << "\n";
    for (const auto& r : rep.results) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", r.max_rel_residual);
        char tb[32];
        std::snprintf(tb, sizeof tb, "%.0e", r.tolerance);
        os << std::left << std::setw(14) << r.id << std::setw(7) << r.category << std::right
           << std::setw(7) << r.trials << std::setw(7) << r.inconclusive_count << std::setw(14)
           << buf << std::setw(10) << tb << std::setw(8) << r.verdict << "\n";
    }
    os << std::string(67, '-') << "\n";
    os << "passed " << rep.passed << "  failed " << rep.failed << "  audited " << rep.audited
       << "\n";
    return os.str();
}

// Re-evaluates one trial from a dumped descriptor and renders both sides.
inline std::string replay_descriptor(const ordered_json& desc) {
    const std::string id = desc.at("id").get<std::string>();
    const IdentityDef* def = lookup(id);
    if (!def) throw NumericError(errc::config, "replay: unknown identity id " + id);
    TrialInput in = detail::trial_from_descriptor(desc);
    TrialOutcome out = run_trial(*def, in);
    std::ostringstream os;
    os << id << "  dim=" << in.dim << " q=" << in.q << " n=" << in.n << " z=" << in.z << "\n";
    os << "conclusive: " << (out.conclusive ? "yes" : "no") << "\n";
    if (!out.note.empty()) os << "note: " << out.note << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", out.residual);
    os << "residual: " << buf << "\n";
    if (out.conclusive) {
        os << "lhs =\n" << format_matrix(out.lhs) << "\n";
        os << "rhs =\n" << format_matrix(out.rhs) << "\n";
    }
    return os.str();
}

} // namespace qbessel
