#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qms/protocols.hpp"
#include "qms/stabilizer.hpp"

namespace qms::test {

// Brute-force state vector over n qubits (bit q of the index is qubit q).
// Only meant for protocol cross-checks, so n stays small.
class DenseState {
public:
    explicit DenseState(int qubits) : n_(qubits), amp_(size_t(1) << qubits, 0.0) {
        amp_[0] = 1.0;
    }

    int qubits() const { return n_; }

    void apply_h(int q) {
        const uint64_t bit = uint64_t(1) << q;
        const double s = 1.0 / std::sqrt(2.0);
        for (uint64_t i = 0; i < amp_.size(); ++i) {
            if (i & bit) continue;
            const auto a = amp_[i];
            const auto b = amp_[i | bit];
            amp_[i] = s * (a + b);
            amp_[i | bit] = s * (a - b);
        }
    }

    void apply_x(int q) {
        const uint64_t bit = uint64_t(1) << q;
        for (uint64_t i = 0; i < amp_.size(); ++i)
            if (!(i & bit)) std::swap(amp_[i], amp_[i | bit]);
    }

    void apply_z(int q) {
        const uint64_t bit = uint64_t(1) << q;
        for (uint64_t i = 0; i < amp_.size(); ++i)
            if (i & bit) amp_[i] = -amp_[i];
    }

    void apply_cnot(int control, int target) {
        const uint64_t cb = uint64_t(1) << control;
        const uint64_t tb = uint64_t(1) << target;
        for (uint64_t i = 0; i < amp_.size(); ++i)
            if ((i & cb) && !(i & tb)) std::swap(amp_[i], amp_[i | tb]);
    }

    // projects onto (|0> + s|1>)/sqrt(2) on qubit q, returns branch weight
    double project_x(int q, bool plus) {
        const uint64_t bit = uint64_t(1) << q;
        const double sgn = plus ? 1.0 : -1.0;
        double weight = 0.0;
        for (uint64_t i = 0; i < amp_.size(); ++i) {
            if (i & bit) continue;
            const auto c = 0.5 * (amp_[i] + sgn * amp_[i | bit]);
            amp_[i] = c;
            amp_[i | bit] = sgn * c;
            weight += 2.0 * std::norm(c);
        }
        if (weight < 1e-14) throw std::runtime_error("projected onto a zero branch");
        const double inv = 1.0 / std::sqrt(weight);
        for (auto& c : amp_) c *= inv;
        return weight;
    }

    // drops qubit q; valid when the state factors across it
    DenseState traced_out(int q) const {
        const uint64_t bit = uint64_t(1) << q;
        DenseState out(n_ - 1);
        // pick the dominant slice so this also works right after project_x
        double w0 = 0.0, w1 = 0.0;
        for (uint64_t i = 0; i < amp_.size(); ++i)
            ((i & bit) ? w1 : w0) += std::norm(amp_[i]);
        const bool keep_one = w1 > w0;
        const double inv = 1.0 / std::sqrt(keep_one ? w1 : w0);
        for (uint64_t i = 0; i < amp_.size(); ++i) {
            if (((i & bit) != 0) != keep_one) continue;
            const uint64_t low = i & (bit - 1);
            const uint64_t high = (i >> (q + 1)) << q;
            out.amp_[high | low] = amp_[i] * inv;
        }
        return out;
    }

    // <psi| P |psi> for the Pauli mask with sign (-1)^r
    std::complex<double> pauli_expectation(const std::vector<unsigned char>& x,
                                           const std::vector<unsigned char>& z,
                                           int sign) const {
        std::complex<double> acc = 0.0;
        for (uint64_t i = 0; i < amp_.size(); ++i) {
            uint64_t j = i;
            std::complex<double> phase = double(sign);
            for (int q = 0; q < n_; ++q) {
                const uint64_t bit = uint64_t(1) << q;
                const bool one = (i & bit) != 0;
                if (x[q] && z[q]) {
                    // Y = iXZ
                    phase *= one ? std::complex<double>(0.0, 1.0)
                                 : std::complex<double>(0.0, -1.0);
                    j ^= bit;
                } else if (x[q]) {
                    j ^= bit;
                } else if (z[q] && one) {
                    phase = -phase;
                }
            }
            acc += std::conj(amp_[j]) * phase * amp_[i];
        }
        return acc;
    }

private:
    int n_;
    std::vector<std::complex<double>> amp_;
};

// Replays a protocol script on the dense simulator, mirroring run_protocol.
inline DenseState dense_run_protocol(const ProtocolScript& script) {
    DenseState psi(script.photons + 1);
    for (size_t i = 0; i + 1 < script.steps.size(); ++i) {
        const ProtocolStep& step = script.steps[i];
        switch (step.op) {
            case StepOp::Scatter:
            case StepOp::Rescatter:
                for (int j : step.targets) psi.apply_cnot(0, j);
                break;
            case StepOp::HadamardQms:
                psi.apply_h(0);
                break;
            case StepOp::Rotate:
                if (step.gate == 'H') psi.apply_h(step.targets[0]);
                else if (step.gate == 'X') psi.apply_x(step.targets[0]);
                else psi.apply_z(step.targets[0]);
                break;
            case StepOp::MeasureQms:
                break;
        }
    }
    psi.project_x(0, script.steps.back().basis > 0);
    return psi.traced_out(0);
}

// Every tableau stabilizer must have expectation exactly +1 in |psi>.
inline double max_stabilizer_deviation(const StabilizerTableau& t, const DenseState& psi) {
    double worst = 0.0;
    for (int i = 0; i < t.qubits(); ++i) {
        const PauliRow& row = t.stabilizer(i);
        const auto e = psi.pauli_expectation(row.x, row.z, row.r ? -1 : +1);
        worst = std::max(worst, std::abs(e - std::complex<double>(1.0, 0.0)));
    }
    return worst;
}

}  // namespace qms::test
