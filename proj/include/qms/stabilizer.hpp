#pragma once

#include <optional>
#include <vector>

namespace qms {

// One Pauli string with sign, P = (-1)^r * prod_q X_q^{x[q]} Z_q^{z[q]}.
// The x&z overlap encodes Y up to the phase convention of the tableau row
// product; signs stay real because every gate used here is a real Clifford.
struct PauliRow {
    std::vector<unsigned char> x;
    std::vector<unsigned char> z;
    unsigned char r = 0;
};

// Aaronson-Gottesman tableau: rows 0..n-1 destabilizers, rows n..2n-1
// stabilizers. Constructed in |0...0> (stabilizers Z_q, destabilizers X_q).
class StabilizerTableau {
public:
    explicit StabilizerTableau(int qubits);

    int qubits() const { return n_; }

    void apply_h(int q);
    void apply_x(int q);
    void apply_z(int q);
    void apply_cnot(int control, int target);

    // Forced X-basis measurement, projecting onto (|0> + s|1>)/sqrt(2) with
    // s = +/-1. Throws ValidationError when the outcome is already
    // determined and disagrees with the requested branch.
    void measure_x_forced(int q, bool plus);

    // Removes a qubit whose state is a local X eigenstate after
    // measure_x_forced: its stabilizer generator is eliminated from the
    // others and the column dropped. Destabilizers are rebuilt by symplectic
    // completion.
    StabilizerTableau traced_out(int q) const;

    // Sign of the group element matching the given Pauli mask, +1/-1, or
    // nullopt when the mask is not in the stabilizer group.
    std::optional<int> stabilizer_sign(const std::vector<unsigned char>& x,
                                       const std::vector<unsigned char>& z) const;

    // Generator bookkeeping invariants: stabilizers commute pairwise,
    // destabilizer i anticommutes with stabilizer i only.
    bool is_valid() const;

    const PauliRow& stabilizer(int i) const { return rows_[n_ + i]; }
    const PauliRow& destabilizer(int i) const { return rows_[i]; }

private:
    StabilizerTableau() = default;

    void row_mult(PauliRow& into, const PauliRow& other) const;
    void check_qubit(int q) const;

    int n_ = 0;
    std::vector<PauliRow> rows_;
};

bool pauli_commute(const PauliRow& a, const PauliRow& b);

}  // namespace qms
