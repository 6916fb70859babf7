#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qms/errors.hpp"
#include "qms/geometry.hpp"

namespace qms {

// One fidelity scan, abscissa either array side length or defect fraction.
// All vectors share indexing. config_digest fingerprints every knob that
// influenced the numbers, so an output file is traceable to its inputs.
struct ScanResult {
    std::vector<double> abscissa;
    std::vector<double> fidelity_mean;
    std::vector<double> fidelity_stderr;
    std::vector<int> realizations_used;
    std::string config_digest;
};

// Thrown when a Monte Carlo point exhausts its realization budget before
// reaching the target standard error. Rows finished so far (including the
// unconverged one) remain accessible.
class ScanConvergenceFailure : public ConvergenceFailure {
  public:
    ScanConvergenceFailure(const std::string& msg, double achieved_stderr,
                           ScanResult partial)
        : ConvergenceFailure(msg, achieved_stderr), partial_(std::move(partial)) {}

    const ScanResult& partial() const { return partial_; }

  private:
    ScanResult partial_;
};

struct SizeScanConfig {
    std::vector<std::pair<int, int>> sizes;  // (nx, ny) per scan point
    double spacing = 0.2;                    // lambda
    double waist = 1.56;                     // lambda
    std::complex<double> alpha{3.0, 0.0};    // cat amplitude on the R port
};

// Deterministic defect-free ladder: per size, locate the collective
// resonance and score the conditional cat against the ideal branch pair.
// abscissa holds the array side length (max dim - 1) * spacing; the stderr
// column carries the off-mode fit residual as a quality proxy, since there
// is no sampling noise. Solver errors propagate with the failing size
// prefixed to the message.
ScanResult fidelity_vs_size(const SizeScanConfig& cfg);

struct DefectScanConfig {
    LatticeGeometry base;                    // defect-free template
    std::complex<double> alpha{3.0, 0.0};
    double waist = 1.56;
    std::vector<double> fractions;           // each in [0, 1]
    std::uint64_t seed = 0;
    double stderr_tol = 0.002;
    int min_realizations = 50;
    int max_realizations = 400;
};

// Monte Carlo over random defect placements, probed at the frozen
// defect-free resonance of the base array. Realization k draws its
// geometry from a counter-split seed, so adding realizations (or changing
// the worker count) never reshuffles earlier draws, and the mean/stderr
// reduction runs in fixed index order. Each fraction accumulates until
// stderr < stderr_tol with at least min_realizations samples; fraction 0
// runs a single realization (nothing to sample). Exceeding
// max_realizations throws ScanConvergenceFailure.
ScanResult fidelity_vs_defects(const DefectScanConfig& cfg);

// Ground-state dephasing budget: each of n_atoms contributes an
// independent factor (1 - eps_per_atom) on top of the optical fidelity.
double depolarization_fidelity(double eps_per_atom, int n_atoms,
                               double light_fidelity);

// CSV with a units comment, the config digest, and %.12g data columns
// (abscissa, mean, stderr, n). Byte-stable for identical inputs.
std::string scan_result_csv(const ScanResult& result,
                            const std::string& abscissa_name);
std::string scan_result_json(const ScanResult& result,
                             const std::string& abscissa_name);

}  // namespace qms
