#include "gridsim/sequence.hpp"

#include <cmath>
#include <string>

#include "gridsim/errors.hpp"

namespace gridsim {

TransposedImpedance transpose_average(const Eigen::Matrix3cd& z) {
    TransposedImpedance out;
    out.z_self = (z(0, 0) + z(1, 1) + z(2, 2)) / 3.0;
    out.z_mutual = (z(0, 1) + z(0, 2) + z(1, 2)) / 3.0;
    return out;
}

double positive_sequence_shunt(const Eigen::Matrix3d& b) {
    double self = (b(0, 0) + b(1, 1) + b(2, 2)) / 3.0;
    double mutual = (b(0, 1) + b(0, 2) + b(1, 2)) / 3.0;
    return self - mutual;
}

SequenceLineParams reduce_config(const LineConfigMatrix& cfg) {
    auto t = transpose_average(cfg.z_phase);
    SequenceLineParams p;
    p.config_id = cfg.config_id;
    p.z_positive = positive_sequence(t.z_self, t.z_mutual);
    p.z_zero = zero_sequence(t.z_self, t.z_mutual);
    p.b_positive = positive_sequence_shunt(cfg.b_shunt);
    return p;
}

std::map<int, SequenceLineParams> reduce_configs(const std::map<int, LineConfigMatrix>& configs) {
    std::map<int, SequenceLineParams> out;
    for (const auto& [id, cfg] : configs) out.emplace(id, reduce_config(cfg));
    return out;
}

int AdmittanceMatrix::index_of(int bus_id) const {
    auto it = bus_index.find(bus_id);
    if (it == bus_index.end()) {
        throw DomainError("bus " + std::to_string(bus_id) + " not in admittance matrix");
    }
    return it->second;
}

std::vector<PiBranch> build_branches(const NetworkModel& net, const std::map<int, SequenceLineParams>& seq) {
    std::vector<PiBranch> out;
    out.reserve(net.segments.size() + net.transformers.size());
    for (const auto& s : net.segments) {
        auto it = seq.find(s.config_id);
        if (it == seq.end()) {
            throw DomainError("no sequence data for config " + std::to_string(s.config_id));
        }
        const double miles = s.length_miles();
        const Complex z_pu = it->second.z_positive * miles / net.base.z_base;
        if (!(std::abs(z_pu) > 0.0)) {
            throw DomainError("segment " + std::to_string(s.from_bus) + "-" + std::to_string(s.to_bus) +
                              " has zero impedance");
        }
        // uS/mile * miles -> S, then to per-unit
        const double b_total_pu = it->second.b_positive * 1e-6 * miles * net.base.z_base;
        PiBranch br;
        br.from_bus = s.from_bus;
        br.to_bus = s.to_bus;
        br.y_series = 1.0 / z_pu;
        br.y_shunt_from = Complex(0.0, b_total_pu / 2.0);
        br.y_shunt_to = br.y_shunt_from;
        out.push_back(br);
    }
    for (const auto& t : net.transformers) {
        PiBranch br;
        br.from_bus = t.from_bus;
        br.to_bus = t.to_bus;
        br.y_series = 1.0 / Complex(t.r_pu, 0.0);
        br.is_transformer = true;
        out.push_back(br);
    }
    return out;
}

AdmittanceMatrix assemble_ybus(const std::vector<int>& bus_ids, int slack_id, std::vector<PiBranch> branches) {
    AdmittanceMatrix a;
    a.bus_ids = bus_ids;
    for (int i = 0; i < static_cast<int>(bus_ids.size()); ++i) {
        if (!a.bus_index.emplace(bus_ids[i], i).second) {
            throw DomainError("duplicate bus " + std::to_string(bus_ids[i]));
        }
    }
    a.slack_index = a.index_of(slack_id);
    const int n = a.order();
    a.y = Eigen::MatrixXcd::Zero(n, n);
    a.shunt = Eigen::VectorXcd::Zero(n);
    for (const auto& br : branches) {
        if (!std::isfinite(std::abs(br.y_series)) || std::abs(br.y_series) == 0.0) {
            throw DomainError("branch " + std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus) +
                              " has singular series admittance");
        }
        const int i = a.index_of(br.from_bus);
        const int j = a.index_of(br.to_bus);
        a.y(i, i) += br.y_series + br.y_shunt_from;
        a.y(j, j) += br.y_series + br.y_shunt_to;
        a.y(i, j) -= br.y_series;
        a.y(j, i) -= br.y_series;
        a.shunt(i) += br.y_shunt_from;
        a.shunt(j) += br.y_shunt_to;
    }
    a.branches = std::move(branches);
    return a;
}

AdmittanceMatrix assemble_ybus(const NetworkModel& net, const std::map<int, SequenceLineParams>& seq) {
    std::vector<int> ids;
    ids.reserve(net.buses.size());
    for (const auto& b : net.buses) ids.push_back(b.id);
    return assemble_ybus(ids, net.slack_id(), build_branches(net, seq));
}

}  // namespace gridsim
