#include "qms/defects_mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <utility>

#include "qms/coupled_dipole.hpp"
#include "qms/io.hpp"
#include "qms/photonic.hpp"

namespace qms {

namespace {

// Compensated accumulation so the reduction result does not depend on how
// the additions would associate under different worker counts (they run
// sequentially in index order regardless).
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

std::pair<double, double> mean_stderr(const std::vector<double>& v) {
    KahanSum s;
    for (double x : v) s.add(x);
    const double mean = s.sum / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    KahanSum q;
    for (double x : v) q.add((x - mean) * (x - mean));
    const double var = q.sum / static_cast<double>(v.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

// Scores one optical response: the unconditioned branch passes the probe
// untouched, the conditioned branch applies the fitted (r, t). The branch
// overlap keeps only the fitted mode amplitudes; power that leaves the
// drive mode already lowers |r| and |t| and is not charged a second time
// as an orthogonal which-path record.
double conditional_mode_fidelity(const OpticalResponse& resp,
                                 std::complex<double> alpha) {
    ConditionalState cond = conditional_scatter(0.0, 1.0, resp.r, resp.t,
                                                TwoModeCoherent{alpha, 0.0});
    cond.sc_amp_u = 0.0;
    cond.sc_amp_c = 0.0;
    return cat_fidelity(cond, alpha).fidelity;
}

std::string size_tag(int nx, int ny) {
    return "size " + std::to_string(nx) + "x" + std::to_string(ny);
}

std::string complex_key(std::complex<double> z) {
    return format_g12(z.real()) + "," + format_g12(z.imag());
}

std::string config_string(const SizeScanConfig& cfg) {
    std::string s = "fidelity_vs_size;spacing=" + format_g12(cfg.spacing) +
                    ";waist=" + format_g12(cfg.waist) +
                    ";alpha=" + complex_key(cfg.alpha) + ";sizes=";
    for (const auto& [nx, ny] : cfg.sizes) {
        s += std::to_string(nx) + "x" + std::to_string(ny) + ";";
    }
    return s;
}

std::string config_string(const DefectScanConfig& cfg) {
    std::string s = "fidelity_vs_defects;nx=" + std::to_string(cfg.base.nx) +
                    ";ny=" + std::to_string(cfg.base.ny) +
                    ";spacing=" + format_g12(cfg.base.spacing) +
                    ";waist=" + format_g12(cfg.waist) +
                    ";alpha=" + complex_key(cfg.alpha) +
                    ";seed=" + std::to_string(cfg.seed) +
                    ";tol=" + format_g12(cfg.stderr_tol) +
                    ";min=" + std::to_string(cfg.min_realizations) +
                    ";max=" + std::to_string(cfg.max_realizations) +
                    ";fractions=";
    for (double f : cfg.fractions) s += format_g12(f) + ";";
    return s;
}

double defect_realization(const LatticeGeometry& base, double fraction,
                          std::uint64_t seed, const DriveField& probe,
                          std::complex<double> alpha) {
    const LatticeGeometry geom = apply_defects(base, fraction, seed);
    const OpticalResponse resp = reflection_transmission(
        geom, uniform_alpha(geom, probe.detuning), probe);
    return conditional_mode_fidelity(resp, alpha);
}

}  // namespace

ScanResult fidelity_vs_size(const SizeScanConfig& cfg) {
    if (cfg.sizes.empty()) throw InvalidArgument("fidelity_vs_size: empty size list");

    ScanResult out;
    out.config_digest = hex64(fnv1a64(config_string(cfg)));
    const DriveField drive = gaussian_beam(cfg.waist, 0.0);

    for (const auto& [nx, ny] : cfg.sizes) {
        try {
            const LatticeGeometry geom = build_square_lattice(nx, ny, cfg.spacing);
            const ResonanceResult res = find_collective_resonance(geom, drive);
            out.abscissa.push_back((std::max(nx, ny) - 1) * cfg.spacing);
            out.fidelity_mean.push_back(
                conditional_mode_fidelity(res.response, cfg.alpha));
            out.fidelity_stderr.push_back(res.response.fit_residual);
            out.realizations_used.push_back(1);
        } catch (const NumericalFailure& e) {
            throw NumericalFailure(size_tag(nx, ny) + ": " + e.what(), e.estimate());
        } catch (const ConvergenceFailure& e) {
            throw ConvergenceFailure(size_tag(nx, ny) + ": " + e.what(), e.estimate());
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(size_tag(nx, ny) + ": " + e.what());
        }
    }
    return out;
}

ScanResult fidelity_vs_defects(const DefectScanConfig& cfg) {
    if (cfg.fractions.empty())
        throw InvalidArgument("fidelity_vs_defects: empty fraction list");
    for (double f : cfg.fractions) {
        if (!(f >= 0.0 && f <= 1.0))
            throw InvalidArgument("fidelity_vs_defects: fraction outside [0, 1]: " +
                                  format_g12(f));
    }
    if (cfg.min_realizations < 2)
        throw InvalidArgument("fidelity_vs_defects: need min_realizations >= 2");
    if (cfg.max_realizations < cfg.min_realizations)
        throw InvalidArgument("fidelity_vs_defects: max_realizations < min_realizations");
    if (!(cfg.stderr_tol > 0.0))
        throw InvalidArgument("fidelity_vs_defects: stderr_tol must be positive");

    const DriveField search = gaussian_beam(cfg.waist, 0.0);
    // The operating point is frozen at the defect-free resonance; defected
    // realizations are probed there rather than re-tuned per draw.
    const ResonanceResult res0 = find_collective_resonance(cfg.base, search);
    const DriveField probe = gaussian_beam(cfg.waist, res0.delta_star);

    ScanResult out;
    out.config_digest = hex64(fnv1a64(config_string(cfg)));

    for (std::size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
        const double fraction = cfg.fractions[fi];
        if (fraction == 0.0) {
            out.abscissa.push_back(0.0);
            out.fidelity_mean.push_back(
                conditional_mode_fidelity(res0.response, cfg.alpha));
            out.fidelity_stderr.push_back(0.0);
            out.realizations_used.push_back(1);
            continue;
        }

        // Per-fraction master seed; realization k inside the fraction is
        // pinned to counter k regardless of how far the loop runs.
        const std::uint64_t frac_master = split_seed(cfg.seed, fi);

        std::vector<double> fids;
        double mean = 0.0;
        double se = std::numeric_limits<double>::infinity();
        constexpr int kBatch = 10;
        while (true) {
            const int have = static_cast<int>(fids.size());
            const int target = std::min(
                cfg.max_realizations,
                have == 0 ? cfg.min_realizations : have + kBatch);
            fids.resize(static_cast<std::size_t>(target));

            std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
            for (int k = have; k < target; ++k) {
                try {
                    fids[static_cast<std::size_t>(k)] = defect_realization(
                        cfg.base, fraction,
                        split_seed(frac_master, static_cast<std::uint64_t>(k)),
                        probe, cfg.alpha);
                } catch (...) {
#pragma omp critical(qms_defect_scan_err)
                    if (!err) err = std::current_exception();
                }
            }
            if (err) std::rethrow_exception(err);

            std::tie(mean, se) = mean_stderr(fids);
            if (se < cfg.stderr_tol &&
                static_cast<int>(fids.size()) >= cfg.min_realizations) {
                break;
            }
            if (static_cast<int>(fids.size()) >= cfg.max_realizations) {
                ScanResult partial = out;
                partial.abscissa.push_back(fraction);
                partial.fidelity_mean.push_back(mean);
                partial.fidelity_stderr.push_back(se);
                partial.realizations_used.push_back(static_cast<int>(fids.size()));
                throw ScanConvergenceFailure(
                    "fidelity_vs_defects: fraction " + format_g12(fraction) +
                        " still at stderr " + format_g12(se) + " after " +
                        std::to_string(fids.size()) + " realizations",
                    se, std::move(partial));
            }
        }

        out.abscissa.push_back(fraction);
        out.fidelity_mean.push_back(mean);
        out.fidelity_stderr.push_back(se);
        out.realizations_used.push_back(static_cast<int>(fids.size()));
    }
    return out;
}

double depolarization_fidelity(double eps_per_atom, int n_atoms,
                               double light_fidelity) {
    if (!(eps_per_atom >= 0.0 && eps_per_atom <= 1.0))
        throw InvalidArgument("depolarization_fidelity: eps outside [0, 1]");
    if (n_atoms < 0)
        throw InvalidArgument("depolarization_fidelity: negative atom count");
    if (!(light_fidelity >= 0.0 && light_fidelity <= 1.0))
        throw InvalidArgument("depolarization_fidelity: fidelity outside [0, 1]");
    return std::pow(1.0 - eps_per_atom, n_atoms) * light_fidelity;
}

namespace {

void check_rows(const ScanResult& r) {
    const std::size_t n = r.abscissa.size();
    if (r.fidelity_mean.size() != n || r.fidelity_stderr.size() != n ||
        r.realizations_used.size() != n) {
        throw InvalidArgument("scan result columns have mismatched lengths");
    }
}

}  // namespace

std::string scan_result_csv(const ScanResult& result,
                            const std::string& abscissa_name) {
    check_rows(result);
    std::string s;
    s += "# units: lengths in lambda, rates in gamma, wavevectors in k0\n";
    s += "# config: " + result.config_digest + "\n";
    s += abscissa_name + ",fidelity_mean,fidelity_stderr,realizations\n";
    for (std::size_t i = 0; i < result.abscissa.size(); ++i) {
        s += format_g12(result.abscissa[i]) + "," +
             format_g12(result.fidelity_mean[i]) + "," +
             format_g12(result.fidelity_stderr[i]) + "," +
             std::to_string(result.realizations_used[i]) + "\n";
    }
    return s;
}

std::string scan_result_json(const ScanResult& result,
                             const std::string& abscissa_name) {
    check_rows(result);
    std::string s;
    s += "{\n";
    s += "  \"abscissa_name\": \"" + abscissa_name + "\",\n";
    s += "  \"units\": \"lengths in lambda, rates in gamma, wavevectors in k0\",\n";
    s += "  \"config_digest\": \"" + result.config_digest + "\",\n";
    s += "  \"rows\": [\n";
    for (std::size_t i = 0; i < result.abscissa.size(); ++i) {
        s += "    {\"abscissa\": " + format_g12(result.abscissa[i]) +
             ", \"fidelity_mean\": " + format_g12(result.fidelity_mean[i]) +
             ", \"fidelity_stderr\": " + format_g12(result.fidelity_stderr[i]) +
             ", \"realizations\": " + std::to_string(result.realizations_used[i]) +
             (i + 1 < result.abscissa.size() ? "},\n" : "}\n");
    }
    s += "  ]\n";
    s += "}\n";
    return s;
}

}  // namespace qms
