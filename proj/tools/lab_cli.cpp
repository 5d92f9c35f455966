// eulerlab command-line front end: configuration, ensemble orchestration,
// persistence, and verification reports.
//
// Verbs: simulate | wild | select | norms | verify | defaults
// Exit codes: 0 ok, 2 config error, 3 check failure, 4 numeric abort.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "euler/config.hpp"
#include "euler/convexint.hpp"
#include "euler/dissipative.hpp"
#include "euler/galerkin.hpp"
#include "euler/paths.hpp"
#include "euler/selection.hpp"
#include "euler/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace euler;

namespace {

struct CommonFlags {
    std::string config_path;
    int64_t seed = -1;
    std::string out;
    int jobs = 0;
};

RunConfig resolve_config(const CommonFlags& f) {
    RunConfig cfg = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
    if (f.seed >= 0) cfg.seed = uint64_t(f.seed);
    if (!f.out.empty()) cfg.out = f.out;
    cfg.validate();
#ifdef _OPENMP
    if (f.jobs > 0) omp_set_num_threads(f.jobs);
#endif
    return cfg;
}

NoiseCoefficient noise_from(const RunConfig& cfg) {
    if (cfg.c_g <= 0.0 || cfg.noise_cutoff <= 0) return NoiseCoefficient{};
    return NoiseCoefficient::spectral(cfg.noise_cutoff, cfg.c_g, cfg.gamma, cfg.sigma);
}

void write_json(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

json report_to_json(const VerificationReport& rep) {
    return json::parse(report_json(rep));
}

std::string l_tag(double l) {
    if (std::isinf(l)) return "linf";
    std::ostringstream os;
    os << "l" << l;
    return os.str();
}

EnsembleLaw law_from_dir(const fs::path& dir) {
    EnsembleLaw law;
    law.name = dir.filename().string();
    std::vector<fs::path> members;
    if (fs::exists(dir / "manifest.json")) {
        members.push_back(dir);
    } else {
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_directory() && fs::exists(e.path() / "manifest.json"))
                members.push_back(e.path());
        std::sort(members.begin(), members.end());
    }
    if (members.empty())
        throw std::invalid_argument("select: no trajectories under " + dir.string());
    for (const auto& m : members) law.members.push_back(load_trajectory(m.string()));
    law.normalize();
    return law;
}

int cmd_simulate(const RunConfig& cfg) {
    SolverConfig sc;
    sc.lat = WaveLattice(cfg.N);
    sc.n = cfg.n_cutoff;
    sc.nu_override = cfg.nu_override;
    sc.dt = cfg.dt;
    sc.T = cfg.T;
    sc.noise = noise_from(cfg);
    sc.u0 = random_velocity(sc.lat, cfg.seed);
    sc.u0 *= 0.3;
    sc.validate();  // rejects bad dt before any stepping

    json paths = json::array();
    bool all_pass = true;
    for (int p = 0; p < cfg.ensemble; ++p) {
        sc.seed = cfg.seed + uint64_t(p);
        DissipativeTrajectory tr = simulate(sc);
        char name[32];
        std::snprintf(name, sizeof(name), "sim_%04d", p);
        const fs::path dir = fs::path(cfg.out) / name;
        save_trajectory(dir.string(), tr);
        VerificationReport rep = check_M3(tr);
        all_pass = all_pass && rep.pass();
        json entry;
        entry["path"] = dir.string();
        entry["seed"] = sc.seed;
        entry["checks"] = report_to_json(rep);
        paths.push_back(entry);
    }
    json report;
    report["command"] = "simulate";
    report["ensemble"] = cfg.ensemble;
    report["pass"] = all_pass;
    report["paths"] = paths;
    write_json(fs::path(cfg.out) / "report.json", report);
    std::cout << (all_pass ? "simulate: all checks passed\n" : "simulate: CHECK FAILURE\n");
    return all_pass ? 0 : 3;
}

int cmd_wild(const RunConfig& cfg) {
    const WaveLattice lat(cfg.N);
    const NoiseCoefficient g = noise_from(cfg);
    const int steps = int(std::llround(cfg.T / cfg.dt));
    json report;
    report["command"] = "wild";
    json per_l = json::array();
    bool all_pass = true;
    std::vector<double> mean_slopes;

    for (double l : cfg.l_list) {
        WildOptions wo;
        wo.K = cfg.K;
        wo.one_over_l = std::isinf(l) ? 0.0 : 1.0 / l;
        wo.L = cfg.L;
        wo.delta_stop = cfg.delta;
        wo.beta_stop = cfg.beta;
        wo.p_stop = cfg.p_exp;
        json entry;
        entry["l"] = l_tag(l);
        json alphas = json::array();
        double slope_acc = 0.0;
        for (int p = 0; p < cfg.ensemble; ++p) {
            WienerPath driver = WienerPath::sample(g, lat, cfg.seed + uint64_t(p), cfg.dt, steps);
            DissipativeTrajectory tr = wild_generate(driver, wo);
            char name[32];
            std::snprintf(name, sizeof(name), "traj_%03d", p);
            const fs::path dir = fs::path(cfg.out) / ("wild_" + l_tag(l)) / name;
            save_trajectory(dir.string(), tr);
            VerificationReport rep = check_M3(tr);
            all_pass = all_pass && rep.pass();

            const double t_l = tr.metadata.at("T_L");
            int j_l = 0;
            while (j_l + 1 < tr.times() && tr.t[j_l + 1] <= t_l + 1e-12) ++j_l;
            if (j_l > 0) slope_acc += (tr.z[j_l] - tr.z[0]) / tr.t[j_l];

            if (p == 0) {
                for (int k = 0; k <= cfg.K; ++k)
                    alphas.push_back(tr.metadata.at("alpha_" + std::to_string(k)));
                entry["I_eps_path"] = tr.metadata.count("I_eps_path")
                                          ? tr.metadata.at("I_eps_path")
                                          : 0.0;
                // seam-audited concatenation past the stopping time
                const double tau = tr.t[j_l];
                ExtendConfig ec;
                ec.seed = cfg.seed + 9000;
                DissipativeTrajectory ext = extend_beyond(tr, tau, g, ec);
                save_trajectory((fs::path(cfg.out) / ("wild_" + l_tag(l)) / "concat_000").string(),
                                ext);
                int js = 0;
                while (js + 1 < ext.times() && ext.t[js + 1] <= tau + 1e-12) ++js;
                const double seam_jump = std::abs(ext.z[js] - tr.z[j_l]);
                VerificationReport erep = check_M3(ext);
                all_pass = all_pass && erep.pass() && seam_jump < 1e-10;
                entry["seam_jump"] = seam_jump;
                entry["concat_checks"] = report_to_json(erep);
            }
        }
        entry["alpha"] = alphas;
        entry["mean_z_slope_before_TL"] = slope_acc / cfg.ensemble;
        mean_slopes.push_back(slope_acc / cfg.ensemble);
        per_l.push_back(entry);
    }
    if (mean_slopes.size() >= 2) {
        json diffs = json::array();
        for (size_t i = 0; i + 1 < mean_slopes.size(); ++i)
            diffs.push_back(mean_slopes[i + 1] - mean_slopes[i]);
        report["slope_differences"] = diffs;
        report["hs_norm_sq"] = g.hs_norm_sq(0.0);
    }
    report["laws"] = per_l;
    report["pass"] = all_pass;
    write_json(fs::path(cfg.out) / "wild_report.json", report);
    std::cout << (all_pass ? "wild: all checks passed\n" : "wild: CHECK FAILURE\n");
    return all_pass ? 0 : 3;
}

int cmd_select(const RunConfig& cfg) {
    if (cfg.candidates.empty())
        throw std::invalid_argument("select: config key run.candidates is required");
    std::vector<fs::path> law_dirs;
    if (!fs::is_directory(cfg.candidates))
        throw std::invalid_argument("select: not a directory: " + cfg.candidates);
    for (const auto& e : fs::directory_iterator(cfg.candidates))
        if (e.is_directory()) law_dirs.push_back(e.path());
    std::sort(law_dirs.begin(), law_dirs.end());
    if (law_dirs.empty())
        throw std::invalid_argument("select: empty candidate directory " + cfg.candidates);

    std::vector<EnsembleLaw> laws;
    double sup_trace = 0.0, sup_kin = 0.0;
    for (const auto& d : law_dirs) {
        laws.push_back(law_from_dir(d));
        for (const auto& m : laws.back().members)
            for (int j = 0; j < m.times(); ++j) {
                sup_trace = std::max(sup_trace, std::abs(m.trace_y[j]));
                sup_kin = std::max(sup_kin, 0.5 * m.xnorm_sq[j]);
            }
    }
    // dissipation-first chain with declared bounds covering the data
    std::vector<DiscountedFunctional> chain = {
        make_functional("neg_trace_y", cfg.lambda, 1.01 * sup_trace + 1.0),
        make_functional("kinetic_energy", cfg.lambda, 1.01 * sup_kin + 1.0)};
    SelectionResult res = krylov_select(laws, chain);
    fs::create_directories(cfg.out);
    {
        std::ofstream out(fs::path(cfg.out) / "decision_log.json");
        out << res.decision_log << "\n";
    }
    std::cout << "select: chose " << res.law.name << "\n";
    return 0;
}

int cmd_norms(const RunConfig& cfg, const std::string& path,
              const std::vector<double>& exponents) {
    json report;
    report["command"] = "norms";
    if (!path.empty()) {
        DissipativeTrajectory tr = load_trajectory(path);
        ScalarPath zp, kp;
        zp.t = tr.t;
        zp.v = tr.z;
        kp.t = tr.t;
        kp.v = tr.xnorm_sq;
        json per_exp = json::array();
        for (double a : exponents) {
            json e;
            e["alpha"] = a;
            e["holder_z"] = holder_seminorm(zp, a);
            e["holder_xnorm"] = holder_seminorm(kp, a);
            per_exp.push_back(e);
        }
        report["path"] = path;
        report["seminorms"] = per_exp;
    } else {
        const WaveLattice lat(cfg.N);
        const NoiseCoefficient g = noise_from(cfg);
        const int steps = int(std::llround(cfg.T / cfg.dt));
        WienerPath b = WienerPath::sample(g, lat, cfg.seed, cfg.dt, steps);
        PathStop stop = stopping_time_TL(b, cfg.L, cfg.delta, cfg.beta, cfg.p_exp);
        report["T_L"] = stop.time;
        report["censored"] = stop.censored;
        report["which"] = stop.which;
        report["norms"] = {stop.norms[0], stop.norms[1], stop.norms[2]};
        json per_exp = json::array();
        ScalarPath ii = iterated_integral(b);
        for (double a : exponents) {
            json e;
            e["alpha"] = a;
            e["holder_iterated_integral"] = holder_seminorm(ii, a);
            per_exp.push_back(e);
        }
        report["seminorms"] = per_exp;
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_verify(const std::vector<std::string>& paths) {
    if (paths.empty()) throw std::invalid_argument("verify: at least one trajectory directory");
    bool all_pass = true;
    json report = json::array();
    for (const auto& p : paths) {
        DissipativeTrajectory tr = load_trajectory(p);
        VerificationReport rep = check_M3(tr);
        json entry;
        entry["path"] = p;
        entry["checks"] = report_to_json(rep);
        DefectSeries ds = compute_defect(tr);
        entry["defect_degenerate"] = ds.degenerate;
        if (!ds.degenerate) {
            double worst = 0.0;
            for (double me : ds.min_eig) worst = std::min(worst, me);
            entry["min_defect_eigenvalue"] = worst;
        }
        report.push_back(entry);
        all_pass = all_pass && rep.pass();
    }
    std::cout << report.dump(2) << "\n";
    return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eulerlab: stochastic Euler laboratory"};
    app.require_subcommand(1);
    CommonFlags flags;
    std::string norms_path;
    std::vector<double> exponents{0.25, 0.45};
    std::vector<std::string> verify_paths;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "configuration file");
        sub->add_option("--seed", flags.seed, "base seed override");
        sub->add_option("--out", flags.out, "output directory override");
        sub->add_option("--jobs", flags.jobs, "worker threads");
    };
    CLI::App* sim = app.add_subcommand("simulate", "viscous ensemble with checks");
    add_common(sim);
    CLI::App* wild = app.add_subcommand("wild", "energy-defective solutions per l");
    add_common(wild);
    CLI::App* sel = app.add_subcommand("select", "argmax selection over stored laws");
    add_common(sel);
    CLI::App* nor = app.add_subcommand("norms", "path seminorms and stopping time");
    add_common(nor);
    nor->add_option("path", norms_path, "stored trajectory directory (optional)");
    nor->add_option("--exponents", exponents, "Holder exponents");
    CLI::App* ver = app.add_subcommand("verify", "re-check stored trajectories");
    add_common(ver);
    ver->add_option("paths", verify_paths, "trajectory directories");
    CLI::App* def = app.add_subcommand("defaults", "print the default configuration");
    add_common(def);

    CLI11_PARSE(app, argc, argv);
    try {
        if (def->parsed()) {
            RunConfig cfg;
            if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
            std::cout << emit_config(cfg);
            return 0;
        }
        if (ver->parsed()) return cmd_verify(verify_paths);
        const RunConfig cfg = resolve_config(flags);
        if (sim->parsed()) return cmd_simulate(cfg);
        if (wild->parsed()) return cmd_wild(cfg);
        if (sel->parsed()) return cmd_select(cfg);
        if (nor->parsed()) return cmd_norms(cfg, norms_path, exponents);
    } catch (const NumericAbort& e) {
        std::cerr << "numeric abort: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
