#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qms/stabilizer.hpp"

namespace qms {

// Scripted metasurface protocol. Qubit 0 is the metasurface ancilla (|U> =
// |0>, |C> = |1>), photonic qubits are 1..photons with |0>/|1> the
// right/left propagation modes. A photon reflecting off |C> flips direction
// (CNOT from the ancilla); the reflection sign r = -1 is not a stabilizer
// observable for these circuits and is reported as a Z frame instead.
enum class StepOp { Scatter, HadamardQms, MeasureQms, Rotate, Rescatter };

struct ProtocolStep {
    StepOp op;
    std::vector<int> targets;  // scatter/rescatter sets, rotate {qubit}
    char gate = 'H';           // rotate only: H, X or Z
    int basis = +1;            // measure_qms only: +1 or -1 branch
};

struct ProtocolScript {
    int photons = 0;
    std::vector<ProtocolStep> steps;
};

struct MeasurementRecord {
    int ancilla_outcome = +1;         // selected X-basis branch
    std::vector<int> z_frame;         // per-photon reflection-phase parity
    std::vector<int> local_hadamards; // photons needing an H to reach the
                                      // verified graph frame (empty here)
};

struct ProtocolResult {
    StabilizerTableau photonic;
    MeasurementRecord record;
};

// CNOT(0 -> j) for every j in targets; targets must not contain the control.
StabilizerTableau parallel_cnot(StabilizerTableau t, const std::vector<int>& targets);

// Anti-controlled flip: X on every register qubit when the ancilla (qubit 0)
// is in |0>; the |1> ancilla branch is left untouched.
StabilizerTableau ancilla_conditioned_flip(StabilizerTableau t);

ProtocolResult run_protocol(const ProtocolScript& script);

struct GraphCheckReport {
    bool ok = false;
    int checks_passed = 0;
    int checks_total = 0;
    std::vector<int> violating;  // 1-based vertex (or check) labels
};

// Graph-state test: K_v = X_v prod_{w in N(v)} Z_w must be a +1 stabilizer
// for every vertex. Vertices are 1-based photon labels.
GraphCheckReport verify_graph_state(const StabilizerTableau& photonic,
                                    const std::vector<std::pair<int, int>>& edges,
                                    int vertices);

// GHZ test: the global X string plus the cyclic Z_i Z_{i+1} parities.
GraphCheckReport ghz_stabilizer_check(const StabilizerTableau& photonic);

ProtocolScript ghz_script(int m);
ProtocolScript cluster1d_script(int m);
// Two-level tree: photon 1 bonded to root_branch children, the first of
// them (photon 2) bonded to second_branch more. Uses scatter/rescatter
// rounds with per-photon rotations; the ancilla ends in |0> so the closing
// measurement leaves no frame behind.
ProtocolScript tree_script(int root_branch = 6, int second_branch = 5);
std::vector<std::pair<int, int>> tree_edges(int root_branch = 6, int second_branch = 5);
std::vector<std::pair<int, int>> path_edges(int m);

ProtocolScript script_from_json(const std::string& text);
std::string script_to_json(const ProtocolScript& script);

}  // namespace qms
