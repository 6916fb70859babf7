#include "qms/stabilizer.hpp"

#include <algorithm>
#include <string>

#include "qms/errors.hpp"

namespace qms {

namespace {

// Phase exponent (power of i) contributed by multiplying single-qubit Paulis
// (x1,z1)*(x2,z2), per the Aaronson-Gottesman g function.
int phase_g(int x1, int z1, int x2, int z2) {
    if (x1 == 0 && z1 == 0) return 0;
    if (x1 == 1 && z1 == 1) return z2 - x2;
    if (x1 == 1 && z1 == 0) return z2 * (2 * x2 - 1);
    return x2 * (1 - 2 * z2);
}

}  // namespace

bool pauli_commute(const PauliRow& a, const PauliRow& b) {
    int acc = 0;
    for (size_t q = 0; q < a.x.size(); ++q)
        acc ^= (a.x[q] & b.z[q]) ^ (a.z[q] & b.x[q]);
    return acc == 0;
}

StabilizerTableau::StabilizerTableau(int qubits) : n_(qubits) {
    if (qubits < 1) throw InvalidArgument("tableau needs at least one qubit");
    rows_.assign(2 * static_cast<size_t>(n_), PauliRow{});
    for (auto& row : rows_) {
        row.x.assign(n_, 0);
        row.z.assign(n_, 0);
    }
    for (int q = 0; q < n_; ++q) {
        rows_[q].x[q] = 1;        // destabilizer X_q
        rows_[n_ + q].z[q] = 1;   // stabilizer Z_q
    }
}

void StabilizerTableau::check_qubit(int q) const {
    if (q < 0 || q >= n_)
        throw InvalidArgument("tableau qubit index " + std::to_string(q) +
                              " out of range for " + std::to_string(n_) + " qubits");
}

void StabilizerTableau::row_mult(PauliRow& into, const PauliRow& other) const {
    int phase = 2 * into.r + 2 * other.r;
    for (size_t q = 0; q < into.x.size(); ++q)
        phase += phase_g(other.x[q], other.z[q], into.x[q], into.z[q]);
    phase = ((phase % 4) + 4) % 4;
    // products of commuting Hermitian Paulis stay Hermitian: phase 0 or 2
    into.r = static_cast<unsigned char>(phase / 2);
    for (size_t q = 0; q < into.x.size(); ++q) {
        into.x[q] ^= other.x[q];
        into.z[q] ^= other.z[q];
    }
}

void StabilizerTableau::apply_h(int q) {
    check_qubit(q);
    for (auto& row : rows_) {
        row.r ^= row.x[q] & row.z[q];
        std::swap(row.x[q], row.z[q]);
    }
}

void StabilizerTableau::apply_x(int q) {
    check_qubit(q);
    for (auto& row : rows_) row.r ^= row.z[q];
}

void StabilizerTableau::apply_z(int q) {
    check_qubit(q);
    for (auto& row : rows_) row.r ^= row.x[q];
}

void StabilizerTableau::apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw InvalidArgument("cnot control equals target");
    for (auto& row : rows_) {
        row.r ^= row.x[control] & row.z[target] & (row.x[target] ^ row.z[control] ^ 1);
        row.x[target] ^= row.x[control];
        row.z[control] ^= row.z[target];
    }
}

void StabilizerTableau::measure_x_forced(int q, bool plus) {
    check_qubit(q);
    // X-measurement = Z-measurement conjugated by H
    apply_h(q);
    const unsigned char want = plus ? 0 : 1;

    int anticommuting = -1;
    for (int i = n_; i < 2 * n_; ++i)
        if (rows_[i].x[q]) { anticommuting = i; break; }

    if (anticommuting >= 0) {
        // outcome is random; force the requested branch
        for (int i = 0; i < 2 * n_; ++i)
            if (i != anticommuting && rows_[i].x[q]) row_mult(rows_[i], rows_[anticommuting]);
        rows_[anticommuting - n_] = rows_[anticommuting];
        PauliRow& stab = rows_[anticommuting];
        std::fill(stab.x.begin(), stab.x.end(), 0);
        std::fill(stab.z.begin(), stab.z.end(), 0);
        stab.z[q] = 1;
        stab.r = want;
    } else {
        // deterministic: accumulate the implied sign from destabilizer rows
        PauliRow acc;
        acc.x.assign(n_, 0);
        acc.z.assign(n_, 0);
        for (int i = 0; i < n_; ++i)
            if (rows_[i].x[q]) row_mult(acc, rows_[n_ + i]);
        if (acc.r != want)
            throw ValidationError("measurement branch has zero probability");
    }
    apply_h(q);
}

StabilizerTableau StabilizerTableau::traced_out(int q) const {
    check_qubit(q);
    if (n_ == 1) throw InvalidArgument("cannot trace out the only qubit");

    // locate the +/-X_q (or +/-Z_q after measurement in either basis)
    // generator that carries the measured qubit alone
    std::vector<PauliRow> stab(rows_.begin() + n_, rows_.end());
    int lone = -1;
    for (int i = 0; i < n_; ++i) {
        bool only_q = (stab[i].x[q] | stab[i].z[q]) != 0;
        for (int p = 0; p < n_ && only_q; ++p)
            if (p != q && (stab[i].x[p] | stab[i].z[p])) only_q = false;
        if (only_q) { lone = i; break; }
    }
    if (lone < 0)
        throw InvalidArgument("traced qubit is still entangled with the register");

    for (int i = 0; i < n_; ++i) {
        if (i == lone) continue;
        // commuting rows can only share the lone generator's own Pauli on q
        if (stab[i].x[q] || stab[i].z[q]) row_mult(stab[i], stab[lone]);
        if (stab[i].x[q] || stab[i].z[q])
            throw InvalidArgument("traced qubit is still entangled with the register");
    }

    StabilizerTableau out;
    out.n_ = n_ - 1;
    out.rows_.assign(2 * static_cast<size_t>(out.n_), PauliRow{});
    for (auto& row : out.rows_) {
        row.x.assign(out.n_, 0);
        row.z.assign(out.n_, 0);
    }
    int dst = 0;
    for (int i = 0; i < n_; ++i) {
        if (i == lone) continue;
        PauliRow& row = out.rows_[out.n_ + dst];
        int col = 0;
        for (int p = 0; p < n_; ++p) {
            if (p == q) continue;
            row.x[col] = stab[i].x[p];
            row.z[col] = stab[i].z[p];
            ++col;
        }
        row.r = stab[i].r;
        ++dst;
    }

    // destabilizers by symplectic completion: row d_i anticommutes with
    // stabilizer i, commutes with the other stabilizers and with d_{j<i}
    const int m = out.n_;
    for (int i = 0; i < m; ++i) {
        // GF(2) system over the 2m bits of the candidate row; constraint
        // rows pair candidate x bits with z bits of the fixed row and vice
        // versa (symplectic product parity)
        std::vector<std::vector<unsigned char>> a;
        std::vector<unsigned char> b;
        auto push_constraint = [&](const PauliRow& row, unsigned char want) {
            std::vector<unsigned char> eq(2 * m, 0);
            for (int p = 0; p < m; ++p) {
                eq[p] = row.z[p];
                eq[m + p] = row.x[p];
            }
            a.push_back(std::move(eq));
            b.push_back(want);
        };
        for (int j = 0; j < m; ++j) push_constraint(out.rows_[m + j], j == i ? 1 : 0);
        for (int j = 0; j < i; ++j) push_constraint(out.rows_[j], 0);

        int rank = 0;
        std::vector<int> pivots;
        for (int col = 0; col < 2 * m && rank < static_cast<int>(a.size()); ++col) {
            int pr = -1;
            for (int row = rank; row < static_cast<int>(a.size()); ++row)
                if (a[row][col]) { pr = row; break; }
            if (pr < 0) continue;
            std::swap(a[pr], a[rank]);
            std::swap(b[pr], b[rank]);
            for (int row = 0; row < static_cast<int>(a.size()); ++row) {
                if (row != rank && a[row][col]) {
                    for (int c = 0; c < 2 * m; ++c) a[row][c] ^= a[rank][c];
                    b[row] ^= b[rank];
                }
            }
            pivots.push_back(col);
            ++rank;
        }
        for (int row = rank; row < static_cast<int>(a.size()); ++row)
            if (b[row]) throw NumericalFailure("destabilizer completion failed");

        PauliRow cand;
        cand.x.assign(m, 0);
        cand.z.assign(m, 0);
        for (int row = 0; row < rank; ++row) {
            if (!b[row]) continue;
            if (pivots[row] < m) cand.x[pivots[row]] = 1;
            else cand.z[pivots[row] - m] = 1;
        }
        out.rows_[i] = cand;
    }
    return out;
}

std::optional<int> StabilizerTableau::stabilizer_sign(
        const std::vector<unsigned char>& x,
        const std::vector<unsigned char>& z) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(z.size()) != n_)
        throw InvalidArgument("pauli mask length does not match qubit count");

    std::vector<PauliRow> work(rows_.begin() + n_, rows_.end());
    PauliRow acc;
    acc.x.assign(n_, 0);
    acc.z.assign(n_, 0);
    std::vector<unsigned char> tx = x, tz = z;

    int rank = 0;
    for (int col = 0; col < 2 * n_ && rank < n_; ++col) {
        const bool xpart = col < n_;
        const int q = xpart ? col : col - n_;
        int pr = -1;
        for (int i = rank; i < n_; ++i) {
            const unsigned char bit = xpart ? work[i].x[q] : work[i].z[q];
            if (bit) { pr = i; break; }
        }
        if (pr < 0) continue;
        std::swap(work[pr], work[rank]);
        for (int i = 0; i < n_; ++i) {
            if (i == rank) continue;
            const unsigned char bit = xpart ? work[i].x[q] : work[i].z[q];
            if (bit) row_mult(work[i], work[rank]);
        }
        const unsigned char tbit = xpart ? tx[q] : tz[q];
        if (tbit) {
            row_mult(acc, work[rank]);
            for (int p = 0; p < n_; ++p) {
                tx[p] ^= work[rank].x[p];
                tz[p] ^= work[rank].z[p];
            }
        }
        ++rank;
    }
    for (int p = 0; p < n_; ++p)
        if (tx[p] || tz[p]) return std::nullopt;
    return acc.r ? -1 : +1;
}

bool StabilizerTableau::is_valid() const {
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (!pauli_commute(rows_[n_ + i], rows_[n_ + j])) return false;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const bool commutes = pauli_commute(rows_[i], rows_[n_ + j]);
            if ((i == j) == commutes) return false;
        }
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (!pauli_commute(rows_[i], rows_[j])) return false;
    return true;
}

}  // namespace qms
