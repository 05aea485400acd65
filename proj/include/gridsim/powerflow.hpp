#pragma once

#include <span>
#include <vector>

#include "gridsim/sequence.hpp"

namespace gridsim {

/// Net specified injection at a PQ bus, generation minus load, in per-unit.
struct BusInjection {
    int bus_id = 0;
    double p = 0.0;
    double q = 0.0;
};

struct BranchFlow {
    int from_bus = 0;
    int to_bus = 0;
    Complex s_from;  // power entering the branch at the from end
    Complex s_to;    // power entering the branch at the to end

    Complex loss() const { return s_from + s_to; }
};

struct PowerFlowSolution {
    std::vector<int> bus_ids;        // index order of `voltages`
    std::vector<Complex> voltages;   // p.u.
    std::vector<BranchFlow> branch_flows;
    Complex total_loss;
    Complex slack_power;             // injected at the slack bus
    int iterations = 0;
    double max_mismatch = 0.0;
    std::vector<double> mismatch_history;

    Complex voltage(int bus_id) const;
};

struct SolverOptions {
    double tolerance = 1e-8;
    int max_iterations = 30;
};

/// Sum of specified injections per matrix row. Throws DomainError if one targets the slack bus
/// or an unknown bus.
Eigen::VectorXcd injection_vector(const AdmittanceMatrix& y, std::span<const BusInjection> injections);

/// Complex power mismatch S_spec - V conj(Y V) at every row (slack row is reported as zero).
Eigen::VectorXcd power_mismatch(const AdmittanceMatrix& y, const Eigen::VectorXcd& s_spec,
                                const Eigen::VectorXcd& v);

/// Polar Jacobian of the stacked [dP; dQ] calculated injections w.r.t. [theta; |V|] over the
/// non-slack rows, in row order with the slack removed.
Eigen::MatrixXd power_jacobian(const AdmittanceMatrix& y, const Eigen::VectorXcd& v);

/// Polar Newton-Raphson from a flat start at the slack magnitude and angle. Stops once both the
/// largest bus mismatch and the summed mismatch fall below the tolerance.
/// Throws SolverError or NumericError.
PowerFlowSolution solve_newton(const AdmittanceMatrix& y, std::span<const BusInjection> injections,
                               Complex slack_v, const SolverOptions& options = {});

/// Backward/forward sweep on the radial branch list carried by `y`. Throws TopologyError if the
/// branches do not form a tree rooted at the slack bus.
PowerFlowSolution solve_sweep(const AdmittanceMatrix& y, std::span<const BusInjection> injections,
                              Complex slack_v, const SolverOptions& options = {});

PowerFlowSolution solve_sweep(const NetworkModel& net, const std::map<int, SequenceLineParams>& seq,
                              std::span<const BusInjection> injections, Complex slack_v,
                              const SolverOptions& options = {});

/// Per-branch pi-model flows and their total. Fills `branch_flows`, `total_loss` and `slack_power`.
void compute_branch_flows(const AdmittanceMatrix& y, PowerFlowSolution& solution);

}  // namespace gridsim
