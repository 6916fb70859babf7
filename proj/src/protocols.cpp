#include "qms/protocols.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

#include "qms/errors.hpp"

namespace qms {

namespace {

void validate_step(const ProtocolStep& step, int photons, int index) {
    switch (step.op) {
        case StepOp::Scatter:
        case StepOp::Rescatter: {
            std::set<int> seen;
            for (int t : step.targets) {
                if (t < 1 || t > photons)
                    throw ValidationError("scatter target out of photon range", index);
                if (!seen.insert(t).second)
                    throw ValidationError("scatter target repeated", index);
            }
            break;
        }
        case StepOp::Rotate:
            if (step.targets.size() != 1)
                throw ValidationError("rotate takes exactly one qubit", index);
            if (step.targets[0] < 0 || step.targets[0] > photons)
                throw ValidationError("rotate qubit out of range", index);
            if (step.gate != 'H' && step.gate != 'X' && step.gate != 'Z')
                throw ValidationError("rotate gate must be H, X or Z", index);
            break;
        case StepOp::HadamardQms:
            if (!step.targets.empty())
                throw ValidationError("hadamard_qms takes no targets", index);
            break;
        case StepOp::MeasureQms:
            if (step.basis != 1 && step.basis != -1)
                throw ValidationError("measurement basis must be +1 or -1", index);
            break;
    }
}

}  // namespace

StabilizerTableau parallel_cnot(StabilizerTableau t, const std::vector<int>& targets) {
    for (int j : targets)
        if (j == 0) throw InvalidArgument("parallel cnot control cannot be a target");
    for (int j : targets) t.apply_cnot(0, j);
    return t;
}

StabilizerTableau ancilla_conditioned_flip(StabilizerTableau t) {
    t.apply_x(0);
    for (int j = 1; j < t.qubits(); ++j) t.apply_cnot(0, j);
    t.apply_x(0);
    return t;
}

ProtocolResult run_protocol(const ProtocolScript& script) {
    if (script.photons < 1)
        throw ValidationError("script drives no photonic qubits");
    if (script.steps.empty())
        throw ValidationError("script has no steps");
    for (size_t i = 0; i < script.steps.size(); ++i) {
        validate_step(script.steps[i], script.photons, static_cast<int>(i));
        const bool last = i + 1 == script.steps.size();
        if ((script.steps[i].op == StepOp::MeasureQms) != last)
            throw ValidationError(last ? "final step must measure the metasurface qubit"
                                       : "measurement before the final step",
                                  static_cast<int>(i));
    }

    StabilizerTableau t(script.photons + 1);
    MeasurementRecord rec;
    rec.z_frame.assign(script.photons, 0);

    for (size_t i = 0; i + 1 < script.steps.size(); ++i) {
        const ProtocolStep& step = script.steps[i];
        switch (step.op) {
            case StepOp::Scatter:
            case StepOp::Rescatter:
                t = parallel_cnot(std::move(t), step.targets);
                for (int j : step.targets) rec.z_frame[j - 1] ^= 1;
                break;
            case StepOp::HadamardQms:
                t.apply_h(0);
                break;
            case StepOp::Rotate:
                if (step.gate == 'H') t.apply_h(step.targets[0]);
                else if (step.gate == 'X') t.apply_x(step.targets[0]);
                else t.apply_z(step.targets[0]);
                break;
            case StepOp::MeasureQms:
                break;
        }
    }

    const ProtocolStep& meas = script.steps.back();
    t.measure_x_forced(0, meas.basis > 0);
    rec.ancilla_outcome = meas.basis;
    return ProtocolResult{t.traced_out(0), rec};
}

GraphCheckReport verify_graph_state(const StabilizerTableau& photonic,
                                    const std::vector<std::pair<int, int>>& edges,
                                    int vertices) {
    if (vertices != photonic.qubits())
        throw InvalidArgument("adjacency vertex count does not match the register");
    std::vector<std::vector<int>> nbr(vertices + 1);
    for (const auto& [u, v] : edges) {
        if (u < 1 || u > vertices || v < 1 || v > vertices || u == v)
            throw InvalidArgument("graph edge out of range");
        nbr[u].push_back(v);
        nbr[v].push_back(u);
    }

    GraphCheckReport report;
    report.checks_total = vertices;
    for (int v = 1; v <= vertices; ++v) {
        std::vector<unsigned char> x(vertices, 0), z(vertices, 0);
        x[v - 1] = 1;
        for (int w : nbr[v]) z[w - 1] ^= 1;
        const auto sign = photonic.stabilizer_sign(x, z);
        if (sign && *sign == +1) ++report.checks_passed;
        else report.violating.push_back(v);
    }
    report.ok = report.checks_passed == report.checks_total;
    return report;
}

GraphCheckReport ghz_stabilizer_check(const StabilizerTableau& photonic) {
    const int m = photonic.qubits();
    GraphCheckReport report;
    report.checks_total = m >= 2 ? m + 1 : 1;

    std::vector<unsigned char> x(m, 1), z(m, 0);
    const auto xsign = photonic.stabilizer_sign(x, z);
    if (xsign && *xsign == +1) ++report.checks_passed;
    else report.violating.push_back(0);

    if (m >= 2) {
        for (int i = 1; i <= m; ++i) {
            std::vector<unsigned char> zx(m, 0), zz(m, 0);
            zz[i - 1] = 1;
            zz[i % m] = 1;
            const auto sign = photonic.stabilizer_sign(zx, zz);
            if (sign && *sign == +1) ++report.checks_passed;
            else report.violating.push_back(i);
        }
    }
    report.ok = report.checks_passed == report.checks_total;
    return report;
}

ProtocolScript ghz_script(int m) {
    if (m < 1) throw InvalidArgument("ghz needs at least one photon");
    ProtocolScript s;
    s.photons = m;
    s.steps.push_back({StepOp::HadamardQms, {}, 'H', +1});
    std::vector<int> all(m);
    for (int j = 0; j < m; ++j) all[j] = j + 1;
    s.steps.push_back({StepOp::Scatter, all, 'H', +1});
    s.steps.push_back({StepOp::MeasureQms, {}, 'H', +1});
    return s;
}

ProtocolScript cluster1d_script(int m) {
    if (m < 1) throw InvalidArgument("cluster needs at least one photon");
    ProtocolScript s;
    s.photons = m;
    for (int j = 1; j <= m; ++j) {
        s.steps.push_back({StepOp::HadamardQms, {}, 'H', +1});
        s.steps.push_back({StepOp::Scatter, {j}, 'H', +1});
    }
    s.steps.push_back({StepOp::MeasureQms, {}, 'H', +1});
    return s;
}

std::vector<std::pair<int, int>> path_edges(int m) {
    std::vector<std::pair<int, int>> e;
    for (int j = 1; j < m; ++j) e.emplace_back(j, j + 1);
    return e;
}

std::vector<std::pair<int, int>> tree_edges(int root_branch, int second_branch) {
    std::vector<std::pair<int, int>> e;
    for (int j = 0; j < root_branch; ++j) e.emplace_back(1, 2 + j);
    for (int j = 0; j < second_branch; ++j) e.emplace_back(2, 2 + root_branch + j);
    return e;
}

ProtocolScript tree_script(int root_branch, int second_branch) {
    if (root_branch < 1 || second_branch < 0)
        throw InvalidArgument("tree preset needs root_branch >= 1, second_branch >= 0");
    if (second_branch > 0 && root_branch < 1)
        throw InvalidArgument("second generation needs a first-generation photon to hang off");
    ProtocolScript s;
    s.photons = 1 + root_branch + second_branch;
    auto A = ProtocolStep{StepOp::HadamardQms, {}, 'H', +1};
    auto rot_h = [&s](int q) { s.steps.push_back({StepOp::Rotate, {q}, 'H', +1}); };
    auto scatter = [&s](int t) { s.steps.push_back({StepOp::Scatter, {t}, 'H', +1}); };
    auto rescatter = [&s](int t) { s.steps.push_back({StepOp::Rescatter, {t}, 'H', +1}); };

    // Two circuit identities drive the construction.  Scattering a fresh
    // photon and rotating it puts a controlled-phase bond between it and the
    // array's internal qubit.  Scattering a fresh photon, then re-scattering
    // it with Hadamards on both sides, moves the internal qubit's whole state
    // (bonds included) onto that photon and resets the array to its ground
    // state.  Build the second-generation star first, park it on photon 2,
    // then bond the remaining first-generation photons and park the hub on
    // photon 1.
    auto transfer_to = [&](int j) {
        scatter(j);
        s.steps.push_back(A);
        rot_h(j);
        rescatter(j);
        s.steps.push_back(A);
        rot_h(j);
    };
    if (second_branch > 0) {
        s.steps.push_back(A);
        for (int t = 2 + root_branch; t <= 1 + root_branch + second_branch; ++t) {
            scatter(t);
            rot_h(t);
        }
        transfer_to(2);
    }
    s.steps.push_back(A);
    if (second_branch > 0) {
        rot_h(2);
        rescatter(2);
        rot_h(2);
    } else {
        scatter(2);
        rot_h(2);
    }
    for (int t = 3; t <= 1 + root_branch; ++t) {
        scatter(t);
        rot_h(t);
    }
    transfer_to(1);
    s.steps.push_back({StepOp::MeasureQms, {}, 'H', +1});
    return s;
}

ProtocolScript script_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("script is not valid json: ") + e.what());
    }
    if (!doc.is_array()) throw ValidationError("script must be a json array of steps");

    ProtocolScript s;
    for (size_t i = 0; i < doc.size(); ++i) {
        const auto& rec = doc[i];
        const int index = static_cast<int>(i);
        if (!rec.is_object() || !rec.contains("op") || !rec["op"].is_string())
            throw ValidationError("step record needs an \"op\" string", index);
        const std::string op = rec["op"].get<std::string>();

        ProtocolStep step{StepOp::HadamardQms, {}, 'H', +1};
        if (rec.contains("targets")) {
            if (!rec["targets"].is_array())
                throw ValidationError("\"targets\" must be an array", index);
            for (const auto& t : rec["targets"]) {
                if (!t.is_number_integer())
                    throw ValidationError("targets must be integers", index);
                step.targets.push_back(t.get<int>());
            }
        }
        if (op == "scatter") step.op = StepOp::Scatter;
        else if (op == "rescatter") step.op = StepOp::Rescatter;
        else if (op == "hadamard_qms") step.op = StepOp::HadamardQms;
        else if (op == "rotate_h") { step.op = StepOp::Rotate; step.gate = 'H'; }
        else if (op == "rotate_x") { step.op = StepOp::Rotate; step.gate = 'X'; }
        else if (op == "rotate_z") { step.op = StepOp::Rotate; step.gate = 'Z'; }
        else if (op == "measure_qms") {
            step.op = StepOp::MeasureQms;
            if (rec.contains("basis")) {
                const auto& b = rec["basis"];
                if (b.is_string() && (b == "+" || b == "-"))
                    step.basis = b == "+" ? +1 : -1;
                else if (b.is_number_integer() && (b == 1 || b == -1))
                    step.basis = b.get<int>();
                else
                    throw ValidationError("basis must be \"+\", \"-\", 1 or -1", index);
            }
        } else {
            throw ValidationError("unknown op \"" + op + "\"", index);
        }
        for (int t : step.targets) s.photons = std::max(s.photons, t);
        s.steps.push_back(std::move(step));
    }
    return s;
}

std::string script_to_json(const ProtocolScript& script) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& step : script.steps) {
        nlohmann::json rec;
        switch (step.op) {
            case StepOp::Scatter: rec["op"] = "scatter"; break;
            case StepOp::Rescatter: rec["op"] = "rescatter"; break;
            case StepOp::HadamardQms: rec["op"] = "hadamard_qms"; break;
            case StepOp::Rotate:
                rec["op"] = step.gate == 'H' ? "rotate_h"
                          : step.gate == 'X' ? "rotate_x" : "rotate_z";
                break;
            case StepOp::MeasureQms:
                rec["op"] = "measure_qms";
                rec["basis"] = step.basis > 0 ? "+" : "-";
                break;
        }
        if (!step.targets.empty()) rec["targets"] = step.targets;
        doc.push_back(std::move(rec));
    }
    return doc.dump(2) + "\n";
}

}  // namespace qms
