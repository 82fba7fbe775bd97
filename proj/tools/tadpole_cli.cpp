// tadpole — command-line front end for the tadpole-graph standing-wave
// toolkit.
//
// Commands:
//   solve    one stationary wave (branch + omega), profile CSV + summary
//   sweep    continuation + L-spectra + stability over an omega range
//   evans    root Lambda0 of the half-line Evans function
//   counts   negative/zero eigenvalue table of L_minus / L_plus
//   figures  CSV datasets behind the five reference figures
//
// Configuration comes from an optional JSON file (--config) with flag
// overrides; every artifact embeds the config hash and grid parameters in
// '#' header lines, and numbers are printed with 15 significant digits so
// identical configurations produce byte-identical files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tadpole/graph.hpp"
#include "tadpole/io.hpp"
#include "tadpole/scalar_waves.hpp"
#include "tadpole/spectra.hpp"
#include "tadpole/stability.hpp"
#include "tadpole/stationary.hpp"

using json = nlohmann::json;
using namespace tadpole;

namespace {

struct OmegaRange {
    double start = -0.2;
    double end = -2.0;
    int steps = 20;
};

struct RunConfig {
    double p = 1.0;
    double L = M_PI;
    double L_inf = 2.0 * M_PI;
    int n_ring = 100;
    std::vector<Branch> branches;
    std::optional<double> omega;
    OmegaRange range;
    double newton_tol = 1e-10;
    double zero_tol = -1.0;  // <0: default 10 h^2
    double tol_re = -1.0;
    double tol_im = -1.0;
    std::string out_dir = "out";
    int workers = 1;
    int which_figure = 1;

    std::string canonical() const {
        std::ostringstream os;
        os << "p=" << format_number(p) << ";L=" << format_number(L)
           << ";L_inf=" << format_number(L_inf) << ";n_ring=" << n_ring << ";branches=";
        for (const Branch& b : branches) os << b.label() << ",";
        os << ";omega=" << (omega ? format_number(*omega) : "none") << ";range="
           << format_number(range.start) << ":" << format_number(range.end) << ":" << range.steps
           << ";newton_tol=" << format_number(newton_tol) << ";zero_tol=" << format_number(zero_tol)
           << ";tol_re=" << format_number(tol_re) << ";tol_im=" << format_number(tol_im)
           << ";which=" << which_figure;
        return os.str();
    }
};

Branch parse_branch(const std::string& s) {
    if (s == "primary") return Branch::primary();
    const auto first = s.find(':');
    const auto second = s.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw CLI::ValidationError("--branch", "expected kind:n:sign, e.g. vanishing_tail:1:+");
    const std::string kind = s.substr(0, first);
    const int n = std::stoi(s.substr(first + 1, second - first - 1));
    const std::string sg = s.substr(second + 1);
    const int sign = (sg == "-" ? -1 : +1);
    if (n < 1) throw CLI::ValidationError("--branch", "node index must be >= 1");
    if (kind == "vanishing_tail") return Branch::vanishing_tail(n, sign);
    if (kind == "higher") return Branch::higher(n, sign);
    throw CLI::ValidationError("--branch", "unknown branch kind '" + kind + "'");
}

void validate(const RunConfig& cfg) {
    if (!(cfg.newton_tol > 0.0)) throw CLI::ValidationError("--newton-tol", "must be positive");
    if (cfg.zero_tol == 0.0) throw CLI::ValidationError("--zero-tol", "must be positive");
    if (!(cfg.p > 0.0)) throw CLI::ValidationError("--p", "power must be positive");
    for (const Branch& b : cfg.branches) {
        const double wn = omega_n_threshold(b.n, cfg.L);
        const double upper = (b.kind == BranchKind::vanishing_tail) ? wn : 0.0;
        if (cfg.omega && !(*cfg.omega < upper))
            throw CLI::ValidationError("--omega", "branch " + b.label() + " requires omega < " +
                                                      format_number(upper));
        if (!cfg.omega && !(cfg.range.start < upper))
            throw CLI::ValidationError("--omega-range", "branch " + b.label() +
                                                            " requires omega < " +
                                                            format_number(upper));
    }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw CLI::ValidationError("--config", path + ": " + e.what());
    }
    if (j.contains("p")) cfg.p = j["p"].get<double>();
    if (j.contains("L")) cfg.L = j["L"].get<double>();
    if (j.contains("L_inf")) cfg.L_inf = j["L_inf"].get<double>();
    if (j.contains("n_ring")) cfg.n_ring = j["n_ring"].get<int>();
    if (j.contains("branches"))
        for (const auto& b : j["branches"]) cfg.branches.push_back(parse_branch(b.get<std::string>()));
    if (j.contains("omega")) {
        if (j["omega"].is_number()) cfg.omega = j["omega"].get<double>();
        else {
            cfg.range.start = j["omega"]["start"].get<double>();
            cfg.range.end = j["omega"]["end"].get<double>();
            cfg.range.steps = j["omega"]["steps"].get<int>();
        }
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (t.contains("newton_tol")) cfg.newton_tol = t["newton_tol"].get<double>();
        if (t.contains("zero_tol")) cfg.zero_tol = t["zero_tol"].get<double>();
        if (t.contains("tol_re")) cfg.tol_re = t["tol_re"].get<double>();
        if (t.contains("tol_im")) cfg.tol_im = t["tol_im"].get<double>();
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
}

std::vector<std::string> artifact_header(const RunConfig& cfg, const std::string& command,
                                         const TadpoleGrid& g) {
    return {"schema: 1",
            "command: " + command,
            "config_hash: " + fnv1a_hex(cfg.canonical()),
            "p: " + format_number(cfg.p),
            "L: " + format_number(g.L),
            "L_inf: " + format_number(g.L_inf),
            "n_ring: " + std::to_string(g.n_ring),
            "n_tail: " + std::to_string(g.n_tail),
            "h: " + format_number(g.h)};
}

json grid_json(const TadpoleGrid& g) {
    return {{"L", g.L},       {"L_inf", g.L_inf},   {"h", g.h},
            {"n_ring", g.n_ring}, {"n_tail", g.n_tail}, {"unknowns", g.n_unknowns()}};
}

// Coupled branches at large |omega| are reached by continuation from the
// edge-bifurcation regime; direct seeding is reliable only for eps <= 0.5.
StationaryWave obtain_wave(const Branch& branch, double omega, double p, const TadpoleGrid& g,
                           const NewtonOptions& opts) {
    if (branch.kind == BranchKind::vanishing_tail)
        return newton_solve(make_vanishing_tail_seed(branch.n, branch.sign, omega, p, g), omega, p,
                            opts);
    const double anchor = -0.25;
    if (omega >= anchor) return newton_solve(make_seed(branch, std::sqrt(-omega), p, g), omega, p, opts);
    const int steps = std::max(8, static_cast<int>(std::ceil((anchor - omega) / 0.1)) + 1);
    std::vector<StationaryWave> path = continue_branch(branch, anchor, omega, steps, p, g, opts);
    return path.back();
}

void write_profile_csv(const std::filesystem::path& path, const RunConfig& cfg,
                       const std::string& command, const StationaryWave& w) {
    const TadpoleGrid& g = *w.profile.grid;
    std::vector<std::string> meta = artifact_header(cfg, command, g);
    meta.push_back("branch: " + w.branch.label());
    meta.push_back("omega: " + format_number(w.omega));
    meta.push_back("residual_norm: " + format_number(w.residual_norm));
    CsvWriter csv(path, meta, {"x", "value", "segment"});
    for (int j = 0; j <= g.n_ring; ++j)
        csv.row({format_number(g.ring_x(j)), format_number(w.profile.ring_value(j)), "ring"});
    for (int i = 0; i <= g.n_tail; ++i)
        csv.row({format_number(g.tail_x(i)), format_number(w.profile.tail_value(i)), "tail"});
}

void write_spectra_csv(CsvWriter& csv, double omega, const SpectrumReport& rep, int k = 6) {
    std::vector<std::string> row{format_number(omega), rep.operator_tag};
    for (int i = 0; i < k; ++i)
        row.push_back(i < static_cast<int>(rep.eigenvalues.size())
                          ? format_number(rep.eigenvalues[i])
                          : "");
    row.push_back(std::to_string(rep.n_neg));
    row.push_back(std::to_string(rep.n_zero));
    csv.row(row);
}

std::string lambda_class(const StabilityReport& rep, const linalg::cdouble& lam) {
    const double re = std::fabs(lam.real()), im = std::fabs(lam.imag());
    if (re <= rep.tol.tol_re && im <= rep.tol.tol_im) return "zero";
    if (im <= rep.tol.tol_im && re > rep.tol.tol_re) return "real_pair";
    if (re <= rep.tol.tol_re) {
        if (im >= -rep.omega - rep.tol.zero_tol) return "continuum";
        return "imag_pair";
    }
    return "quartet";
}

void write_stability_rows(CsvWriter& csv, const StabilityReport& rep) {
    // deterministic order: sort by (Re, Im)
    std::vector<linalg::cdouble> lams = rep.lambda_set;
    std::sort(lams.begin(), lams.end(), [](const linalg::cdouble& a, const linalg::cdouble& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    for (const auto& lam : lams)
        csv.row({format_number(rep.omega), format_number(lam.real()), format_number(lam.imag()),
                 lambda_class(rep, lam)});
}

json stability_json(const StabilityReport& rep) {
    return {{"n_real_pairs", rep.n_real_pairs},
            {"n_imag_pairs", rep.n_imag_pairs},
            {"n_quartets", rep.n_quartets},
            {"n_zero_modes", rep.n_zero_modes},
            {"n_continuum", static_cast<int>(rep.continuum.size())},
            {"verdict", verdict_name(rep.verdict)}};
}

json counts_json(const SpectrumReport& rep) {
    return {{"n_neg", rep.n_neg}, {"n_zero", rep.n_zero}};
}

void write_summary(const std::filesystem::path& dir, const RunConfig& cfg,
                   const std::string& command, const TadpoleGrid& g, json results,
                   const json& extra_top = json::object()) {
    json out;
    out["schema"] = 1;
    out["command"] = command;
    out["config_hash"] = fnv1a_hex(cfg.canonical());
    out["grid"] = grid_json(g);
    out["p"] = cfg.p;
    out["results"] = std::move(results);
    for (auto it = extra_top.begin(); it != extra_top.end(); ++it) out[it.key()] = it.value();
    std::ofstream f(dir / "summary.json");
    f << out.dump(2) << "\n";
}

StabilityTolerances tolerances_for(const RunConfig& cfg, const TadpoleGrid& g) {
    StabilityTolerances tol = default_stability_tolerances(g);
    if (cfg.tol_re > 0.0) tol.tol_re = cfg.tol_re;
    if (cfg.tol_im > 0.0) tol.tol_im = cfg.tol_im;
    if (cfg.zero_tol > 0.0) tol.zero_tol = cfg.zero_tol;
    return tol;
}

int cmd_solve(const RunConfig& cfg) {
    const TadpoleGrid g = build_grid(cfg.L, cfg.L_inf, cfg.n_ring);
    const double omega = cfg.omega.value_or(-1.0);
    const NewtonOptions opts{cfg.newton_tol, 50, 8};
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    json results;
    int exit_code = 0;
    for (const Branch& b : cfg.branches) {
        json entry;
        try {
            StationaryWave w = obtain_wave(b, omega, cfg.p, g, opts);
            if (b.kind != BranchKind::generic && w.profile.sup_norm() < 1e3 * cfg.newton_tol) {
                entry["error"] =
                    "collapsed to the zero solution; omega too close to the bifurcation "
                    "point for this grid";
                exit_code = 2;
            } else {
                const std::string name = cfg.branches.size() == 1
                                             ? "profiles.csv"
                                             : "profiles_" + b.label() + ".csv";
                write_profile_csv(dir / name, cfg, "solve", w);
                entry["omega"] = w.omega;
                entry["residual_norm"] = w.residual_norm;
                entry["flux_residual"] = w.flux_residual;
                entry["mass"] = w.mass;
                entry["ring_mass"] = w.ring_mass;
                entry["tail_mass"] = w.tail_mass;
                entry["iterations"] = w.iterations;
                entry["junction_value"] = w.profile.junction();
                if (w.branch.kind != BranchKind::vanishing_tail && w.omega < 0.0) {
                    try {
                        Shifts sh = extract_shifts(w);
                        entry["tail_shift_a"] = sh.a;
                        if (w.branch.kind == BranchKind::higher) entry["ring_shift_b"] = sh.b;
                    } catch (const Error& e) {
                        entry["shift_error"] = e.what();
                    }
                }
            }
        } catch (const ContinuationStalled& e) {
            entry["error"] = e.what();
            exit_code = 2;
        } catch (const NewtonDiverged& e) {
            entry["error"] = e.what();
            exit_code = 2;
        } catch (const SingularJacobian& e) {
            entry["error"] = std::string(e.what()) + " (bifurcation-point ill-conditioning)";
            exit_code = 2;
        }
        results[b.label()] = std::move(entry);
    }
    write_summary(dir, cfg, "solve", g, std::move(results));
    return exit_code;
}

int cmd_counts(const RunConfig& cfg) {
    const TadpoleGrid g = build_grid(cfg.L, cfg.L_inf, cfg.n_ring);
    const double omega = cfg.omega.value_or(-1.0);
    const NewtonOptions opts{cfg.newton_tol, 50, 8};
    const double ztol = cfg.zero_tol > 0.0 ? cfg.zero_tol : default_zero_tol(g);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    CsvWriter csv(dir / "spectra.csv", artifact_header(cfg, "counts", g),
                  {"omega", "operator", "lam1", "lam2", "lam3", "lam4", "lam5", "lam6", "n_neg",
                   "n_zero"});
    json results;
    json top = json::object();
    int exit_code = 0;
    for (const Branch& b : cfg.branches) {
        json entry;
        try {
            StationaryWave w = obtain_wave(b, omega, cfg.p, g, opts);
            SpectrumReport Lm = operator_spectrum(w, WhichOperator::minus, ztol);
            SpectrumReport Lp = operator_spectrum(w, WhichOperator::plus, ztol);
            write_spectra_csv(csv, omega, Lm);
            write_spectra_csv(csv, omega, Lp);
            entry["L_minus"] = counts_json(Lm);
            entry["L_plus"] = counts_json(Lp);
            entry["zero_tol"] = ztol;
            if (cfg.branches.size() == 1) {
                top["L_minus"] = entry["L_minus"];
                top["L_plus"] = entry["L_plus"];
            }
        } catch (const Error& e) {
            entry["error"] = e.what();
            exit_code = 2;
        }
        results[b.label()] = std::move(entry);
    }
    write_summary(dir, cfg, "counts", g, std::move(results), top);
    return exit_code;
}

int cmd_evans(const RunConfig& cfg) {
    const TadpoleGrid g = build_grid(cfg.L, cfg.L_inf, cfg.n_ring);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    const double lam0 = find_Lambda0(cfg.p);
    CsvWriter csv(dir / "evans.csv", artifact_header(cfg, "evans", g), {"Lambda", "F"});
    const double lo = std::min(2.0 * lam0, -1.0), hi = -1e-3;
    const int samples = 60;
    for (int i = 0; i <= samples; ++i) {
        const double lam = lo + (hi - lo) * i / samples;
        csv.row({format_number(lam), format_number(evans_F(lam, cfg.p))});
    }
    json results;
    results["Lambda0"] = lam0;
    results["p"] = cfg.p;
    write_summary(dir, cfg, "evans", g, std::move(results), {{"Lambda0", lam0}});
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    const TadpoleGrid g = build_grid(cfg.L, cfg.L_inf, cfg.n_ring);
    const NewtonOptions opts{cfg.newton_tol, 50, 8};
    const StabilityTolerances tol = tolerances_for(cfg, g);
    const double ztol = cfg.zero_tol > 0.0 ? cfg.zero_tol : default_zero_tol(g);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::vector<double> grid_omega(cfg.range.steps);
    for (int i = 0; i < cfg.range.steps; ++i)
        grid_omega[i] =
            cfg.range.start + (cfg.range.end - cfg.range.start) * i / (cfg.range.steps - 1);

    CsvWriter stab_csv(dir / "stability.csv", artifact_header(cfg, "sweep", g),
                       {"branch", "omega", "re_lambda", "im_lambda", "class"});
    CsvWriter spec_csv(dir / "spectra.csv", artifact_header(cfg, "sweep", g),
                       {"omega", "operator", "lam1", "lam2", "lam3", "lam4", "lam5", "lam6",
                        "n_neg", "n_zero"});
    json results;
    int exit_code = 0;
    for (const Branch& b : cfg.branches) {
        // sequential continuation pass
        std::vector<StationaryWave> waves;
        std::vector<std::string> failures(grid_omega.size());
        {
            Seed seed = (b.kind == BranchKind::vanishing_tail)
                            ? make_vanishing_tail_seed(b.n, b.sign, grid_omega.front(), cfg.p, g)
                            : make_seed(b, std::sqrt(-grid_omega.front()), cfg.p, g);
            for (size_t i = 0; i < grid_omega.size(); ++i) {
                try {
                    StationaryWave w = newton_solve(seed, grid_omega[i], cfg.p, opts);
                    seed.phi = w.profile;
                    waves.push_back(std::move(w));
                } catch (const Error& e) {
                    failures[i] = e.what();
                    exit_code = 2;
                }
            }
        }
        // parallel spectra + stability per sample
        std::vector<StabilityReport> reports(waves.size());
        std::vector<SpectrumReport> lmins(waves.size()), lpluses(waves.size());
        parallel_for(static_cast<int>(waves.size()), cfg.workers, [&](int i) {
            reports[i] = stability_spectrum(waves[i], tol);
            lmins[i] = operator_spectrum(waves[i], WhichOperator::minus, ztol);
            lpluses[i] = operator_spectrum(waves[i], WhichOperator::plus, ztol);
        });
        json samples = json::array();
        std::optional<double> omega_star;
        int prev_q = -1;
        json transitions = json::array();
        for (size_t i = 0; i < waves.size(); ++i) {
            write_stability_rows(stab_csv, reports[i]);
            write_spectra_csv(spec_csv, waves[i].omega, lmins[i]);
            write_spectra_csv(spec_csv, waves[i].omega, lpluses[i]);
            json s = stability_json(reports[i]);
            s["omega"] = waves[i].omega;
            s["mass"] = waves[i].mass;
            s["L_minus"] = counts_json(lmins[i]);
            s["L_plus"] = counts_json(lpluses[i]);
            samples.push_back(std::move(s));
            if (reports[i].n_quartets > 0) omega_star = waves[i].omega;
            if (prev_q >= 0 && reports[i].n_quartets != prev_q)
                transitions.push_back({{"omega_before", waves[i - 1].omega},
                                       {"omega_after", waves[i].omega},
                                       {"quartets_before", prev_q},
                                       {"quartets_after", reports[i].n_quartets}});
            prev_q = reports[i].n_quartets;
        }
        json entry;
        entry["samples"] = std::move(samples);
        entry["transitions"] = std::move(transitions);
        if (omega_star) entry["omega_star_last_quartet"] = *omega_star;
        json fail = json::array();
        for (size_t i = 0; i < failures.size(); ++i)
            if (!failures[i].empty())
                fail.push_back({{"omega", grid_omega[i]}, {"error", failures[i]}});
        if (!fail.empty()) entry["failures"] = std::move(fail);
        results[b.label()] = std::move(entry);
    }
    write_summary(dir, cfg, "sweep", g, std::move(results));
    return exit_code;
}

int cmd_figures(const RunConfig& cfg) {
    RunConfig c = cfg;  // figures pin the reference geometry defaults
    const TadpoleGrid g = build_grid(c.L, c.L_inf, c.n_ring);
    const NewtonOptions opts{c.newton_tol, 50, 8};
    const std::filesystem::path dir(c.out_dir);
    std::filesystem::create_directories(dir);
    const StabilityTolerances tol = tolerances_for(c, g);

    auto omega_grid = [](double a, double b, int n) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
        return v;
    };

    switch (c.which_figure) {
        case 1: {  // ring-wave profiles at omega = -1
            for (int n : {1, 2}) {
                StationaryWave w =
                    obtain_wave(Branch::vanishing_tail(n, +1), -1.0, c.p, g, opts);
                write_profile_csv(dir / ("fig1_n" + std::to_string(n) + ".csv"), c, "figures", w);
            }
            break;
        }
        case 2:    // L-+- eigenvalues vs omega, vanishing-tail branches
        case 3: {  // same for the higher branches
            const bool vanishing = c.which_figure == 2;
            // the higher branches carry a soliton tail ~ e^{-eps(x-L)}; the
            // truncation distance scales like 14/eps at the smallest |omega|
            const std::vector<double> omegas =
                vanishing ? omega_grid(-0.05, -1.0, 39) : omega_grid(-0.1, -1.0, 37);
            const TadpoleGrid gf =
                vanishing ? g
                          : build_grid_tail_length(c.L, c.n_ring,
                                                   14.0 / std::sqrt(-omegas.front()));
            const double zf = c.zero_tol > 0.0 ? c.zero_tol : default_zero_tol(gf);
            for (int n : {1, 2}) {
                const Branch b =
                    vanishing ? Branch::vanishing_tail(n, +1) : Branch::higher(n, +1);
                CsvWriter csv(dir / ("fig" + std::to_string(c.which_figure) + "_n" +
                                     std::to_string(n) + ".csv"),
                              artifact_header(c, "figures", gf),
                              {"omega", "operator", "lam1", "lam2", "lam3", "lam4", "lam5",
                               "lam6", "n_neg", "n_zero"});
                Seed seed = vanishing ? make_vanishing_tail_seed(n, +1, omegas.front(), c.p, gf)
                                      : make_seed(b, std::sqrt(-omegas.front()), c.p, gf);
                std::vector<StationaryWave> waves;
                for (double w0 : omegas) {
                    StationaryWave w = newton_solve(seed, w0, c.p, opts);
                    seed.phi = w.profile;
                    waves.push_back(std::move(w));
                }
                std::vector<SpectrumReport> lm(waves.size()), lp(waves.size());
                parallel_for(static_cast<int>(waves.size()), c.workers, [&](int i) {
                    lm[i] = operator_spectrum(waves[i], WhichOperator::minus, zf);
                    lp[i] = operator_spectrum(waves[i], WhichOperator::plus, zf);
                });
                for (size_t i = 0; i < waves.size(); ++i) {
                    write_spectra_csv(csv, waves[i].omega, lm[i]);
                    write_spectra_csv(csv, waves[i].omega, lp[i]);
                }
            }
            break;
        }
        case 4: {  // stability spectra on the complex plane at omega = -1
            for (int n : {1, 2}) {
                StationaryWave w =
                    obtain_wave(Branch::vanishing_tail(n, +1), -1.0, c.p, g, opts);
                StabilityReport rep = stability_spectrum(w, tol);
                CsvWriter csv(dir / ("fig4_n" + std::to_string(n) + ".csv"),
                              artifact_header(c, "figures", g),
                              {"omega", "re_lambda", "im_lambda", "class"});
                write_stability_rows(csv, rep);
            }
            break;
        }
        case 5: {  // unstable eigenvalues vs omega
            for (int n : {1, 2}) {
                CsvWriter csv(dir / ("fig5_n" + std::to_string(n) + ".csv"),
                              artifact_header(c, "figures", g),
                              {"omega", "re_lambda", "im_lambda", "class"});
                std::vector<double> omegas = omega_grid(-0.2, -6.0, 60);
                Seed seed = make_vanishing_tail_seed(n, +1, omegas.front(), c.p, g);
                std::vector<StationaryWave> waves;
                for (double w0 : omegas) {
                    StationaryWave w = newton_solve(seed, w0, c.p, opts);
                    seed.phi = w.profile;
                    waves.push_back(std::move(w));
                }
                std::vector<StabilityReport> reports(waves.size());
                parallel_for(static_cast<int>(waves.size()), c.workers,
                             [&](int i) { reports[i] = stability_spectrum(waves[i], tol); });
                for (const StabilityReport& rep : reports) write_stability_rows(csv, rep);
            }
            break;
        }
        default:
            std::cerr << "figures: --which must be 1..5\n";
            return 1;
    }
    json results;
    results["which"] = c.which_figure;
    write_summary(dir, c, "figures", g, std::move(results));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Standing waves of the power NLS equation on the tadpole graph"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::vector<std::string> branch_specs;
    std::string omega_range_spec;
    double omega_flag = std::numeric_limits<double>::quiet_NaN();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--p", cfg.p, "nonlinearity power");
        sub->add_option("--L", cfg.L, "ring half-length");
        sub->add_option("--L-inf", cfg.L_inf, "tail truncation coordinate");
        sub->add_option("--n-ring", cfg.n_ring, "ring subintervals");
        sub->add_option("--branch", branch_specs, "branch spec kind:n:sign (repeatable)");
        sub->add_option("--omega", omega_flag, "frequency");
        sub->add_option("--omega-range", omega_range_spec, "a:b:steps");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--workers", cfg.workers, "worker pool size for sweeps");
        sub->add_option("--zero-tol", cfg.zero_tol, "zero-eigenvalue threshold (default 10 h^2)");
        sub->add_option("--newton-tol", cfg.newton_tol, "Newton residual tolerance");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve one stationary wave");
    CLI::App* sweep = app.add_subcommand("sweep", "continuation + spectra + stability");
    CLI::App* evans = app.add_subcommand("evans", "Evans function root Lambda0");
    CLI::App* counts = app.add_subcommand("counts", "L_minus / L_plus eigenvalue counts");
    CLI::App* figures = app.add_subcommand("figures", "emit figure datasets");
    for (CLI::App* sub : {solve, sweep, evans, counts, figures}) add_common(sub);
    figures->add_option("--which", cfg.which_figure, "figure number 1..5");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) load_config_file(config_path, cfg);
        for (const std::string& s : branch_specs) cfg.branches.push_back(parse_branch(s));
        if (cfg.branches.empty()) cfg.branches.push_back(Branch::primary());
        if (!std::isnan(omega_flag)) cfg.omega = omega_flag;
        if (!omega_range_spec.empty()) {
            const auto a = omega_range_spec.find(':');
            const auto b = omega_range_spec.find(':', a + 1);
            if (a == std::string::npos || b == std::string::npos)
                throw CLI::ValidationError("--omega-range", "expected a:b:steps");
            cfg.range.start = std::stod(omega_range_spec.substr(0, a));
            cfg.range.end = std::stod(omega_range_spec.substr(a + 1, b - a - 1));
            cfg.range.steps = std::stoi(omega_range_spec.substr(b + 1));
            cfg.omega.reset();
        }
        if (const char* env_out = std::getenv("TADPOLE_OUT")) cfg.out_dir = env_out;
        validate(cfg);

        if (*solve) return cmd_solve(cfg);
        if (*sweep) return cmd_sweep(cfg);
        if (*evans) return cmd_evans(cfg);
        if (*counts) return cmd_counts(cfg);
        if (*figures) return cmd_figures(cfg);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidGeometry& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NonCommensurateTail& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
