#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"

#include "qms/coupled_dipole.hpp"
#include "qms/defects_mc.hpp"
#include "qms/eit.hpp"
#include "qms/errors.hpp"
#include "qms/geometry.hpp"
#include "qms/io.hpp"
#include "qms/mode_selective.hpp"
#include "qms/protocols.hpp"

namespace {

using nlohmann::json;
using qms::format_g12;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kUnitsLine =
    "# units: lengths in lambda, rates in gamma, wavevectors in k0\n";

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(unsigned(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw qms::ValidationError(std::string(what) + ": bad number \"" + item +
                                       "\"");
        }
    }
    if (out.empty())
        throw qms::ValidationError(std::string(what) + ": empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    for (double v : parse_double_list(text, what)) {
        if (v != std::floor(v))
            throw qms::ValidationError(std::string(what) + ": expected integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::vector<std::pair<int, int>> parse_edge_list(const std::string& text) {
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
            throw qms::ValidationError("--edges: expected u-v pairs, got \"" + item +
                                       "\"");
        try {
            out.emplace_back(std::stoi(item.substr(0, dash)),
                             std::stoi(item.substr(dash + 1)));
        } catch (const std::exception&) {
            throw qms::ValidationError("--edges: bad vertex in \"" + item + "\"");
        }
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qms::ValidationError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Per-run knobs shared by every scenario. Threads and the output path stay
// out of the digested config: by contract they never change the numbers.
struct CommonOpts {
    std::string output;
    bool dry_run = false;
    int threads = 0;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("-o,--output", c.output,
                    "data file path (stdout when omitted)");
    cmd->add_flag("--dry-run", c.dry_run,
                  "validate, print the resolved config, compute nothing");
    cmd->add_option("--threads", c.threads,
                    "worker cap (0 = library default; env QMS_THREADS)");
    cmd->add_option("--seed", c.seed, "master seed for sampled scenarios");
}

void apply_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("QMS_THREADS")) {
            threads = std::atoi(env);
        }
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Shared scenario driver: digest + dry-run + manifest plumbing. `extra_out`
// lets a scenario print a summary line (protocol verification) on top of
// writing its data file.
int run_scenario(const std::string& scenario, const CommonOpts& c, json config,
                 const std::function<std::string()>& compute,
                 const std::string& extra_out = "") {
    config["scenario"] = scenario;
    config["seed"] = c.seed;
    const std::string digest = qms::hex64(qms::fnv1a64(config.dump()));
    if (c.dry_run) {
        json resolved = config;
        resolved["config_digest"] = digest;
        std::fputs((resolved.dump(2) + "\n").c_str(), stdout);
        return 0;
    }
    apply_threads(c.threads);

    const auto t0 = std::chrono::steady_clock::now();
    const std::string data = compute();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!extra_out.empty()) std::fputs(extra_out.c_str(), stdout);
    if (c.output.empty()) {
        if (extra_out.empty()) std::fputs(data.c_str(), stdout);
        return 0;
    }
    qms::write_text_file(c.output, data);

    json manifest;
    manifest["scenario"] = scenario;
    manifest["config"] = config;
    manifest["config_digest"] = digest;
    manifest["seed"] = c.seed;
    manifest["versions"] = {
        {"qms", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"cli11", CLI11_VERSION},
    };
    manifest["wall_time_s"] = wall;
    qms::write_text_file(c.output + ".manifest.json", manifest.dump(2) + "\n");
    // run timestamp lives outside the manifest so identical runs can be
    // compared file-for-file
    qms::write_text_file(c.output + ".stamp", utc_timestamp() + "\n");
    return 0;
}

void append_response_row(std::string& s, double delta, const qms::OpticalResponse& r) {
    s += format_g12(delta) + "," + format_g12(r.r.real()) + "," +
         format_g12(r.r.imag()) + "," + format_g12(std::abs(r.r)) + "," +
         format_g12(r.t.real()) + "," + format_g12(r.t.imag()) + "," +
         format_g12(r.scattered_weight) + "," + format_g12(r.fit_residual) + "\n";
}

// ---- scatter ----------------------------------------------------------

struct ScatterOpts {
    CommonOpts common;
    int nx = 0, ny = 0;
    double spacing = 0.2;
    std::string drive = "plane";
    double waist = 1.56;
    double kx = 0.0, ky = 0.0;
    std::string deltas;  // empty: locate the collective resonance
};

int run_scatter(const ScatterOpts& o) {
    if (o.drive != "plane" && o.drive != "gaussian")
        throw qms::ValidationError("--drive must be plane or gaussian");
    std::vector<double> deltas;
    if (!o.deltas.empty()) deltas = parse_double_list(o.deltas, "--deltas");

    json cfg{{"nx", o.nx},           {"ny", o.ny}, {"spacing", o.spacing},
             {"drive", o.drive},     {"kx", o.kx}, {"ky", o.ky},
             {"resonance", deltas.empty()}};
    if (o.drive == "gaussian") cfg["waist"] = o.waist;
    if (!deltas.empty()) cfg["deltas"] = deltas;

    return run_scenario("scatter", o.common, cfg, [&] {
        const qms::LatticeGeometry geom =
            qms::build_square_lattice(o.nx, o.ny, o.spacing);
        auto drive_at = [&](double delta) {
            return o.drive == "plane"
                       ? qms::plane_wave(delta, Eigen::Vector2d(o.kx, o.ky))
                       : qms::gaussian_beam(o.waist, delta);
        };
        std::string s = kUnitsLine;
        s += "delta,re_r,im_r,abs_r,re_t,im_t,scattered_weight,fit_residual\n";
        if (deltas.empty()) {
            const qms::ResonanceResult res =
                qms::find_collective_resonance(geom, drive_at(0.0));
            append_response_row(s, res.delta_star, res.response);
        } else {
            for (double d : deltas) {
                const qms::OpticalResponse r = qms::reflection_transmission(
                    geom, qms::uniform_alpha(geom, d), drive_at(d));
                append_response_row(s, d, r);
            }
        }
        return s;
    });
}

// ---- eit-scan ---------------------------------------------------------

struct EitOpts {
    CommonOpts common;
    std::string V = "0";
    double delta = 0.0, Delta = 0.0, Gamma = 0.0;
    double deltar = 0.0, gammar = 0.0, omegap = 1.0;
};

int run_eit(const EitOpts& o) {
    const std::vector<double> vs = parse_double_list(o.V, "--V");
    json cfg{{"V", vs},           {"delta", o.delta},   {"Delta", o.Delta},
             {"Gamma", o.Gamma},  {"deltar", o.deltar}, {"gammar", o.gammar},
             {"omegap", o.omegap}};
    return run_scenario("eit-scan", o.common, cfg, [&] {
        std::string s = kUnitsLine;
        s += "V,re_r,im_r,abs_r\n";
        for (double v : vs) {
            qms::EitParameters p;
            p.delta = o.delta;
            p.Delta = o.Delta;
            p.Gamma = o.Gamma;
            p.delta_r = o.deltar;
            p.gamma_r = o.gammar;
            p.omega_p = o.omegap;
            p.V = v;
            const std::complex<double> r = qms::reflection_coefficient(p);
            s += format_g12(v) + "," + format_g12(r.real()) + "," +
                 format_g12(r.imag()) + "," + format_g12(std::abs(r)) + "\n";
        }
        return s;
    });
}

// ---- fidelity-size ----------------------------------------------------

struct SizeOpts {
    CommonOpts common;
    std::string sizes = "5,7,9,11,13,15,17,19,21,23";
    double spacing = 0.2;
    double waist = 1.56;
    double alpha2 = 9.0;
};

int run_size(const SizeOpts& o) {
    const std::vector<int> sizes = parse_int_list(o.sizes, "--sizes");
    json cfg{{"sizes", sizes},
             {"spacing", o.spacing},
             {"waist", o.waist},
             {"alpha2", o.alpha2}};
    return run_scenario("fidelity-size", o.common, cfg, [&] {
        qms::SizeScanConfig sc;
        sc.sizes.clear();
        for (int s : sizes) sc.sizes.emplace_back(s, s);
        sc.spacing = o.spacing;
        sc.waist = o.waist;
        sc.alpha = std::sqrt(o.alpha2);
        return qms::scan_result_csv(qms::fidelity_vs_size(sc), "side_length");
    });
}

// ---- fidelity-defects -------------------------------------------------

struct DefectOpts {
    CommonOpts common;
    int nx = 23, ny = 23;
    double spacing = 0.2;
    double waist = 1.56;
    double alpha2 = 9.0;
    std::string fractions = "0,0.02,0.05,0.1";
    double stderr_tol = 0.002;
    int min_realizations = 50;
    int max_realizations = 400;
};

int run_defects(const DefectOpts& o) {
    const std::vector<double> fractions =
        parse_double_list(o.fractions, "--fractions");
    json cfg{{"nx", o.nx},
             {"ny", o.ny},
             {"spacing", o.spacing},
             {"waist", o.waist},
             {"alpha2", o.alpha2},
             {"fractions", fractions},
             {"stderr_tol", o.stderr_tol},
             {"min_realizations", o.min_realizations},
             {"max_realizations", o.max_realizations}};
    return run_scenario("fidelity-defects", o.common, cfg, [&] {
        qms::DefectScanConfig dc;
        dc.base = qms::build_square_lattice(o.nx, o.ny, o.spacing);
        dc.alpha = std::sqrt(o.alpha2);
        dc.waist = o.waist;
        dc.fractions = fractions;
        dc.seed = o.common.seed;
        dc.stderr_tol = o.stderr_tol;
        dc.min_realizations = o.min_realizations;
        dc.max_realizations = o.max_realizations;
        return qms::scan_result_csv(qms::fidelity_vs_defects(dc), "defect_fraction");
    });
}

// ---- mode-spectrum ----------------------------------------------------

struct SpectrumOpts {
    CommonOpts common;
    int nx = 51, ny = 51;
    double spacing = 0.1;
    double Kx = 0.4, Ky = 0.0;
    double alpha_delta = -5.0;
    std::string method = "both";
    double kmax = 0.7;
    int kpoints = 15;
};

void append_spectrum_rows(std::string& s, const qms::ReflectivitySpectrum& spec) {
    const char* name = spec.method == qms::SpectrumMethod::RealSpace
                           ? "real-space"
                           : "eigenmode";
    for (size_t i = 0; i < spec.r2.size(); ++i) {
        s += format_g12(spec.k_perp_grid[i].x()) + "," +
             format_g12(spec.k_perp_grid[i].y()) + "," + format_g12(spec.r2[i]) +
             "," + name + "\n";
    }
}

int run_spectrum(const SpectrumOpts& o) {
    if (o.method != "both" && o.method != "real-space" && o.method != "eigenmode")
        throw qms::ValidationError("--method must be real-space, eigenmode or both");
    if (o.kpoints < 2) throw qms::ValidationError("--kpoints must be at least 2");
    if (!(o.kmax > 0.0 && o.kmax < 1.0))
        throw qms::ValidationError("--kmax must sit inside the light cone (0, 1)");

    json cfg{{"nx", o.nx},         {"ny", o.ny},
             {"spacing", o.spacing}, {"Kx", o.Kx},
             {"Ky", o.Ky},         {"alpha_delta", o.alpha_delta},
             {"method", o.method}, {"kmax", o.kmax},
             {"kpoints", o.kpoints}};
    return run_scenario("mode-spectrum", o.common, cfg, [&] {
        const qms::LatticeGeometry geom =
            qms::build_square_lattice(o.nx, o.ny, o.spacing);
        const Eigen::Vector2d K(o.Kx, o.Ky);
        const std::complex<double> alpha0 =
            -3.0 * M_PI / std::complex<double>(o.alpha_delta, 0.5);
        const qms::PermittivityProfile profile =
            qms::periodic_profile(geom, K, alpha0);

        // momentum cut along the modulation axis (x when K_a = 0)
        const Eigen::Vector2d khat =
            K.norm() > 0.0 ? Eigen::Vector2d(K / K.norm())
                           : Eigen::Vector2d(1.0, 0.0);
        std::vector<Eigen::Vector2d> grid;
        for (int i = 0; i < o.kpoints; ++i) {
            const double t = -o.kmax + 2.0 * o.kmax * i / (o.kpoints - 1);
            grid.push_back(t * khat);
        }

        std::string s = kUnitsLine;
        std::string rows;
        if (o.method != "eigenmode") {
            append_spectrum_rows(
                rows, qms::reflectivity_spectrum_realspace(geom, profile, grid));
        }
        if (o.method != "real-space") {
            const qms::ReflectivitySpectrum em =
                qms::reflectivity_spectrum_eigenmode(geom, profile, grid);
            s += "# offdiag_discarded: " + format_g12(em.offdiag_discarded) + "\n";
            append_spectrum_rows(rows, em);
        }
        s += "kx,ky,r2,method\n";
        s += rows;
        return s;
    });
}

// ---- protocol ---------------------------------------------------------

struct ProtocolOpts {
    CommonOpts common;
    std::string preset;
    std::string script_path;
    int m = 6;
    int b1 = 6, b2 = 5;
    bool verify = false;
    std::string edges;
};

int run_protocol_cmd(const ProtocolOpts& o, bool m_given) {
    if (o.preset.empty() == o.script_path.empty())
        throw qms::ValidationError("pass exactly one of --preset or --script");

    qms::ProtocolScript script;
    std::vector<std::pair<int, int>> edges;
    bool ghz_checks = false;
    json cfg;
    if (!o.preset.empty()) {
        cfg["preset"] = o.preset;
        if (o.preset == "ghz") {
            script = qms::ghz_script(o.m);
            ghz_checks = true;
            cfg["m"] = o.m;
        } else if (o.preset == "cluster1d") {
            script = qms::cluster1d_script(o.m);
            edges = qms::path_edges(o.m);
            cfg["m"] = o.m;
        } else if (o.preset == "tree") {
            if (m_given)
                throw qms::ValidationError("tree preset takes --b1/--b2, not --m");
            script = qms::tree_script(o.b1, o.b2);
            edges = qms::tree_edges(o.b1, o.b2);
            cfg["b1"] = o.b1;
            cfg["b2"] = o.b2;
        } else {
            throw qms::ValidationError("--preset must be ghz, cluster1d or tree");
        }
        if (!o.edges.empty()) edges = parse_edge_list(o.edges);
    } else {
        script = qms::script_from_json(read_file(o.script_path));
        cfg["script"] = o.script_path;
        if (o.verify) {
            if (o.edges.empty())
                throw qms::ValidationError(
                    "--verify on a custom script needs --edges u-v,...");
            edges = parse_edge_list(o.edges);
        }
    }
    cfg["verify"] = o.verify;
    if (!o.edges.empty()) cfg["edges"] = o.edges;

    std::string line;
    return run_scenario(
        "protocol", o.common, cfg,
        [&]() -> std::string {
            const qms::ProtocolResult res = qms::run_protocol(script);
            json report;
            report["source"] = !o.preset.empty() ? o.preset : "script";
            report["photons"] = script.photons;
            report["steps"] = json::parse(qms::script_to_json(script));
            report["record"] = {
                {"ancilla_outcome", res.record.ancilla_outcome},
                {"z_frame", res.record.z_frame},
                {"local_hadamards", res.record.local_hadamards}};
            if (o.verify) {
                const qms::GraphCheckReport rep =
                    ghz_checks ? qms::ghz_stabilizer_check(res.photonic)
                               : qms::verify_graph_state(res.photonic, edges,
                                                         script.photons);
                report["verify"] = {{"ok", rep.ok},
                                    {"passed", rep.checks_passed},
                                    {"total", rep.checks_total},
                                    {"violating", rep.violating}};
                char buf[64];
                std::snprintf(buf, sizeof(buf), "stabilizers: %d/%d %s\n",
                              rep.checks_passed, rep.checks_total,
                              rep.ok ? "OK" : "FAIL");
                line = buf;
            }
            return report.dump(2) + "\n";
        },
        line);  // bound by reference; compute fills it before it is printed
}

// ---- config file expansion ---------------------------------------------

// --config file.json mirrors flags: each key becomes --key unless the flag
// is already present on the command line (explicit flags win). A "scenario"
// key supplies the subcommand when none is given.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw qms::ValidationError("--config needs a file path");
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;

    json cfg;
    try {
        cfg = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw qms::ValidationError(std::string("config file is not valid json: ") +
                                   e.what());
    }
    if (!cfg.is_object())
        throw qms::ValidationError("config file must hold a json object");

    size_t sub_pos = 0;
    std::string subcommand;
    for (; sub_pos < args.size(); ++sub_pos) {
        if (!args[sub_pos].empty() && args[sub_pos][0] != '-') {
            subcommand = args[sub_pos];
            break;
        }
    }
    if (subcommand.empty()) {
        if (!cfg.contains("scenario") || !cfg["scenario"].is_string())
            throw qms::ValidationError(
                "no subcommand given and config has no \"scenario\"");
        subcommand = cfg["scenario"].get<std::string>();
        args.insert(args.begin(), subcommand);
        sub_pos = 0;
    } else if (cfg.contains("scenario") &&
               cfg["scenario"].get<std::string>() != subcommand) {
        throw qms::ValidationError("config scenario \"" +
                                   cfg["scenario"].get<std::string>() +
                                   "\" conflicts with subcommand " + subcommand);
    }

    std::vector<std::string> injected;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "scenario") continue;
        const std::string flag = "--" + key;
        bool overridden = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) overridden = true;
        if (overridden) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) injected.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                if (!joined.empty()) joined += ",";
                joined += v.is_string() ? v.get<std::string>() : v.dump();
            }
            injected.push_back(flag);
            injected.push_back(joined);
        } else if (value.is_string()) {
            injected.push_back(flag);
            injected.push_back(value.get<std::string>());
        } else {
            injected.push_back(flag);
            injected.push_back(value.dump());
        }
    }
    args.insert(args.begin() + sub_pos + 1, injected.begin(), injected.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum metasurface scattering and protocol toolkit"};
    app.set_version_flag("--version", std::string("qms ") + kVersion);
    app.require_subcommand(1);

    ScatterOpts sc;
    CLI::App* scatter = app.add_subcommand(
        "scatter", "array reflection/transmission at the collective resonance");
    scatter->add_option("--nx", sc.nx, "atoms along x")->required();
    scatter->add_option("--ny", sc.ny, "atoms along y")->required();
    scatter->add_option("--spacing", sc.spacing, "lattice constant (lambda)");
    scatter->add_option("--drive", sc.drive, "plane or gaussian");
    scatter->add_option("--waist", sc.waist, "gaussian waist (lambda)");
    scatter->add_option("--kx", sc.kx, "plane-wave transverse kx (k0)");
    scatter->add_option("--ky", sc.ky, "plane-wave transverse ky (k0)");
    scatter->add_option("--deltas", sc.deltas,
                        "comma detuning list (omit to locate the resonance)");
    add_common(scatter, sc.common);

    EitOpts eo;
    CLI::App* eit = app.add_subcommand(
        "eit-scan", "cascade-EIT reflection coefficient against the Rydberg shift");
    eit->add_option("--V", eo.V, "comma list of Rydberg shifts (gamma)");
    eit->add_option("--delta", eo.delta, "probe detuning (gamma)");
    eit->add_option("--Delta", eo.Delta, "cooperative shift (gamma)");
    eit->add_option("--Gamma", eo.Gamma, "cooperative broadening (gamma)");
    eit->add_option("--deltar", eo.deltar, "control detuning (gamma)");
    eit->add_option("--gammar", eo.gammar, "Rydberg dephasing (gamma)");
    eit->add_option("--omegap", eo.omegap, "control Rabi amplitude (gamma)");
    add_common(eit, eo.common);

    SizeOpts so;
    CLI::App* fsize = app.add_subcommand(
        "fidelity-size", "defect-free cat fidelity against array size");
    fsize->add_option("--sizes", so.sizes, "comma list of square sides");
    fsize->add_option("--spacing", so.spacing, "lattice constant (lambda)");
    fsize->add_option("--waist", so.waist, "drive waist (lambda)");
    fsize->add_option("--alpha2", so.alpha2, "|alpha|^2 of the probe");
    add_common(fsize, so.common);

    DefectOpts dfo;
    CLI::App* fdef = app.add_subcommand(
        "fidelity-defects", "Monte Carlo cat fidelity against defect fraction");
    fdef->add_option("--nx", dfo.nx, "atoms along x");
    fdef->add_option("--ny", dfo.ny, "atoms along y");
    fdef->add_option("--spacing", dfo.spacing, "lattice constant (lambda)");
    fdef->add_option("--waist", dfo.waist, "drive waist (lambda)");
    fdef->add_option("--alpha2", dfo.alpha2, "|alpha|^2 of the probe");
    fdef->add_option("--fractions", dfo.fractions, "comma defect fractions");
    fdef->add_option("--stderr-tol", dfo.stderr_tol, "target standard error");
    fdef->add_option("--min-realizations", dfo.min_realizations,
                     "samples before the stderr gate");
    fdef->add_option("--max-realizations", dfo.max_realizations,
                     "sampling budget per fraction");
    add_common(fdef, dfo.common);

    SpectrumOpts spo;
    CLI::App* spec = app.add_subcommand(
        "mode-spectrum", "reflectivity against transverse momentum for a "
                         "modulated polarizability profile");
    spec->add_option("--nx", spo.nx, "atoms along x");
    spec->add_option("--ny", spo.ny, "atoms along y");
    spec->add_option("--spacing", spo.spacing, "lattice constant (lambda)");
    spec->add_option("--Kx", spo.Kx, "modulation wavevector x (k0)");
    spec->add_option("--Ky", spo.Ky, "modulation wavevector y (k0)");
    spec->add_option("--alpha-delta", spo.alpha_delta,
                     "detuning fixing the bare polarizability (gamma)");
    spec->add_option("--method", spo.method, "real-space, eigenmode or both");
    spec->add_option("--kmax", spo.kmax, "scan half-range along K_a (k0)");
    spec->add_option("--kpoints", spo.kpoints, "grid points across [-kmax, kmax]");
    add_common(spec, spo.common);

    ProtocolOpts po;
    CLI::App* proto = app.add_subcommand(
        "protocol", "run a scripted metasurface protocol and report the "
                    "photonic register");
    proto->add_option("--preset", po.preset, "ghz, cluster1d or tree");
    proto->add_option("--script", po.script_path, "protocol script json file");
    CLI::Option* m_opt = proto->add_option("--m", po.m, "photon count for ghz/cluster1d");
    proto->add_option("--b1", po.b1, "tree: children of the root");
    proto->add_option("--b2", po.b2, "tree: children of the first child");
    proto->add_flag("--verify", po.verify, "check the stabilizers and print a verdict");
    proto->add_option("--edges", po.edges,
                      "target graph edges u-v,... (custom scripts)");
    add_common(proto, po.common);

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::vector<const char*> cargv;
        cargv.push_back(argv[0]);
        for (const auto& a : args) cargv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(cargv.size()), cargv.data());
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e);
            std::fprintf(stderr, "ERR 2: %s\n", e.what());
            return 2;
        }

        if (scatter->parsed()) return run_scatter(sc);
        if (eit->parsed()) return run_eit(eo);
        if (fsize->parsed()) return run_size(so);
        if (fdef->parsed()) return run_defects(dfo);
        if (spec->parsed()) return run_spectrum(spo);
        if (proto->parsed()) return run_protocol_cmd(po, m_opt->count() > 0);
        std::fprintf(stderr, "ERR 2: no subcommand\n");
        return 2;
    } catch (const qms::ValidationError& e) {
        std::fprintf(stderr, "ERR 2: %s\n", e.what());
        return 2;
    } catch (const qms::InvalidArgument& e) {
        std::fprintf(stderr, "ERR 2: %s\n", e.what());
        return 2;
    } catch (const qms::Error& e) {
        // numerical / convergence / singularity
        std::fprintf(stderr, "ERR 3: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERR 3: %s\n", e.what());
        return 3;
    }
}
