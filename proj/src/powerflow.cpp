#include "gridsim/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridsim/errors.hpp"

namespace gridsim {

namespace {

std::vector<int> non_slack_rows(const AdmittanceMatrix& y) {
    std::vector<int> rows;
    rows.reserve(y.order());
    for (int i = 0; i < y.order(); ++i) {
        if (i != y.slack_index) rows.push_back(i);
    }
    return rows;
}

double mismatch_norm(const Eigen::VectorXcd& mis) {
    double worst = 0.0;
    for (const auto& m : mis) worst = std::max({worst, std::abs(m.real()), std::abs(m.imag())});
    return worst;
}

PowerFlowSolution make_solution(const AdmittanceMatrix& y, const Eigen::VectorXcd& v) {
    PowerFlowSolution sol;
    sol.bus_ids = y.bus_ids;
    sol.voltages.assign(v.data(), v.data() + v.size());
    return sol;
}

}  // namespace

Complex PowerFlowSolution::voltage(int bus_id) const {
    auto it = std::find(bus_ids.begin(), bus_ids.end(), bus_id);
    if (it == bus_ids.end()) {
        throw DomainError("bus " + std::to_string(bus_id) + " not in solution");
    }
    return voltages[static_cast<std::size_t>(it - bus_ids.begin())];
}

Eigen::VectorXcd injection_vector(const AdmittanceMatrix& y, std::span<const BusInjection> injections) {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(y.order());
    for (const auto& inj : injections) {
        const int i = y.index_of(inj.bus_id);
        if (i == y.slack_index) {
            throw DomainError("slack bus " + std::to_string(inj.bus_id) + " cannot carry a specified injection");
        }
        s(i) += Complex(inj.p, inj.q);
    }
    return s;
}

Eigen::VectorXcd power_mismatch(const AdmittanceMatrix& y, const Eigen::VectorXcd& s_spec,
                                const Eigen::VectorXcd& v) {
    Eigen::VectorXcd mis = s_spec - v.cwiseProduct((y.y * v).conjugate());
    mis(y.slack_index) = 0.0;
    return mis;
}

Eigen::MatrixXd power_jacobian(const AdmittanceMatrix& y, const Eigen::VectorXcd& v) {
    const Eigen::VectorXcd current = y.y * v;
    const Eigen::VectorXcd unit = v.cwiseQuotient(v.cwiseAbs().cast<Complex>());
    const Complex j(0.0, 1.0);

    // dS/dtheta = j diag(V) conj(diag(I) - Y diag(V))
    // dS/d|V|   = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
    Eigen::MatrixXcd ds_dtheta = -(y.y * v.asDiagonal());
    ds_dtheta.diagonal() += current;
    ds_dtheta = j * (v.asDiagonal() * ds_dtheta.conjugate());
    Eigen::MatrixXcd ds_dvm = v.asDiagonal() * (y.y * unit.asDiagonal()).conjugate();
    ds_dvm.diagonal() += current.conjugate().cwiseProduct(unit);

    const auto rows = non_slack_rows(y);
    const int m = static_cast<int>(rows.size());
    Eigen::MatrixXd jac(2 * m, 2 * m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            const Complex dt = ds_dtheta(rows[a], rows[b]);
            const Complex dv = ds_dvm(rows[a], rows[b]);
            jac(a, b) = dt.real();
            jac(a, m + b) = dv.real();
            jac(m + a, b) = dt.imag();
            jac(m + a, m + b) = dv.imag();
        }
    }
    return jac;
}

PowerFlowSolution solve_newton(const AdmittanceMatrix& y, std::span<const BusInjection> injections,
                               Complex slack_v, const SolverOptions& options) {
    if (!(options.tolerance > 0.0)) {
        throw DomainError("tolerance must be positive");
    }
    const int n = y.order();
    const Eigen::VectorXcd s_spec = injection_vector(y, injections);
    const auto rows = non_slack_rows(y);
    const int m = static_cast<int>(rows.size());

    Eigen::VectorXd angle = Eigen::VectorXd::Constant(n, std::arg(slack_v));
    Eigen::VectorXd magnitude = Eigen::VectorXd::Constant(n, std::abs(slack_v));
    auto phasors = [&] {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = std::polar(magnitude(i), angle(i));
        v(y.slack_index) = slack_v;
        return v;
    };

    std::vector<double> history;
    Eigen::VectorXcd v = phasors();
    for (int iter = 0;; ++iter) {
        const Eigen::VectorXcd mis = power_mismatch(y, s_spec, v);
        const double norm = mismatch_norm(mis);
        history.push_back(norm);
        if (!std::isfinite(norm)) {
            throw SolverError("power flow mismatch became non-finite", history);
        }
        // The summed mismatch is the slack-side balance error.
        if (norm < options.tolerance && std::abs(mis.sum()) < options.tolerance) {
            PowerFlowSolution sol = make_solution(y, v);
            sol.iterations = iter;
            sol.max_mismatch = norm;
            sol.mismatch_history = std::move(history);
            compute_branch_flows(y, sol);
            return sol;
        }
        if (iter == options.max_iterations) {
            throw SolverError("power flow did not converge in " + std::to_string(options.max_iterations) +
                                  " iterations",
                              history);
        }
        Eigen::VectorXd rhs(2 * m);
        for (int a = 0; a < m; ++a) {
            rhs(a) = mis(rows[a]).real();
            rhs(m + a) = mis(rows[a]).imag();
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(power_jacobian(y, v));
        if (!lu.isInvertible()) {
            throw NumericError("singular power flow Jacobian", norm);
        }
        const Eigen::VectorXd dx = lu.solve(rhs);
        if (!dx.allFinite()) {
            throw NumericError("non-finite Newton correction", norm);
        }
        for (int a = 0; a < m; ++a) {
            angle(rows[a]) += dx(a);
            magnitude(rows[a]) += dx(m + a);
        }
        v = phasors();
    }
}

PowerFlowSolution solve_sweep(const AdmittanceMatrix& y, std::span<const BusInjection> injections,
                              Complex slack_v, const SolverOptions& options) {
    if (!(options.tolerance > 0.0)) {
        throw DomainError("tolerance must be positive");
    }
    const int n = y.order();
    if (static_cast<int>(y.branches.size()) != n - 1) {
        throw TopologyError("sweep needs a radial network: " + std::to_string(y.branches.size()) +
                            " branches for " + std::to_string(n) + " buses");
    }
    // Orient every branch away from the slack bus.
    std::vector<std::vector<int>> incident(n);
    for (int b = 0; b < static_cast<int>(y.branches.size()); ++b) {
        incident[y.index_of(y.branches[b].from_bus)].push_back(b);
        incident[y.index_of(y.branches[b].to_bus)].push_back(b);
    }
    std::vector<int> order{y.slack_index};
    std::vector<int> parent(n, -1);
    std::vector<Complex> series(n);
    std::vector<bool> seen(n, false);
    seen[y.slack_index] = true;
    for (std::size_t head = 0; head < order.size(); ++head) {
        const int at = order[head];
        for (int b : incident[at]) {
            const auto& br = y.branches[b];
            const int other = y.index_of(br.from_bus) == at ? y.index_of(br.to_bus) : y.index_of(br.from_bus);
            if (other == parent[at]) continue;
            if (seen[other]) {
                throw TopologyError("network contains a loop through bus " + std::to_string(y.bus_ids[other]));
            }
            seen[other] = true;
            parent[other] = at;
            series[other] = br.y_series;
            order.push_back(other);
        }
    }
    if (static_cast<int>(order.size()) != n) {
        throw TopologyError("network is not connected to the slack bus");
    }

    const Eigen::VectorXcd s_spec = injection_vector(y, injections);
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, slack_v);
    std::vector<double> history;
    std::vector<Complex> subtree(n);
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        for (int i = 0; i < n; ++i) {
            subtree[i] = y.shunt(i) * v(i) - std::conj(s_spec(i) / v(i));
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            if (parent[*it] >= 0) subtree[parent[*it]] += subtree[*it];
        }
        double change = 0.0;
        for (int i : order) {
            if (parent[i] < 0) continue;
            const Complex updated = v(parent[i]) - subtree[i] / series[i];
            change = std::max(change, std::abs(updated - v(i)));
            v(i) = updated;
        }
        history.push_back(change);
        if (!std::isfinite(change)) {
            throw SolverError("sweep diverged", history);
        }
        if (change < options.tolerance) {
            PowerFlowSolution sol = make_solution(y, v);
            sol.iterations = iter;
            sol.max_mismatch = mismatch_norm(power_mismatch(y, s_spec, v));
            sol.mismatch_history = std::move(history);
            compute_branch_flows(y, sol);
            return sol;
        }
    }
    throw SolverError("sweep did not converge in " + std::to_string(options.max_iterations) + " iterations",
                      history);
}

PowerFlowSolution solve_sweep(const NetworkModel& net, const std::map<int, SequenceLineParams>& seq,
                              std::span<const BusInjection> injections, Complex slack_v,
                              const SolverOptions& options) {
    return solve_sweep(assemble_ybus(net, seq), injections, slack_v, options);
}

void compute_branch_flows(const AdmittanceMatrix& y, PowerFlowSolution& solution) {
    const auto& v = solution.voltages;
    solution.branch_flows.clear();
    solution.total_loss = 0.0;
    for (const auto& br : y.branches) {
        const Complex vi = v[y.index_of(br.from_bus)];
        const Complex vj = v[y.index_of(br.to_bus)];
        const Complex i_from = br.y_series * (vi - vj) + br.y_shunt_from * vi;
        const Complex i_to = br.y_series * (vj - vi) + br.y_shunt_to * vj;
        BranchFlow f{br.from_bus, br.to_bus, vi * std::conj(i_from), vj * std::conj(i_to)};
        solution.total_loss += f.loss();
        solution.branch_flows.push_back(f);
    }
    const int s = y.slack_index;
    Complex current = 0.0;
    for (int j = 0; j < y.order(); ++j) current += y.y(s, j) * v[j];
    solution.slack_power = v[s] * std::conj(current);
}

}  // namespace gridsim
