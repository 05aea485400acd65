#pragma once

#include <map>
#include <vector>

#include "gridsim/grid_model.hpp"

namespace gridsim {

/// Self/mutual impedance of an ideally transposed line.
struct TransposedImpedance {
    Complex z_self;
    Complex z_mutual;
};

/// Balanced single-phase line parameters for one configuration.
struct SequenceLineParams {
    int config_id = 0;
    Complex z_positive;  // ohm/mile
    Complex z_zero;      // ohm/mile, informational
    double b_positive = 0.0;  // uS/mile
};

/// Mean of the diagonal and mean of the upper-triangle entries (1,2), (1,3), (2,3).
TransposedImpedance transpose_average(const Eigen::Matrix3cd& z_phase);

inline Complex positive_sequence(Complex z_self, Complex z_mutual) { return z_self - z_mutual; }
inline Complex zero_sequence(Complex z_self, Complex z_mutual) { return z_self + 2.0 * z_mutual; }

/// Mean diagonal minus mean upper-triangle off-diagonal of the shunt matrix.
double positive_sequence_shunt(const Eigen::Matrix3d& b_shunt);

SequenceLineParams reduce_config(const LineConfigMatrix& cfg);
std::map<int, SequenceLineParams> reduce_configs(const std::map<int, LineConfigMatrix>& configs);

/// Pi-equivalent of one network branch in per-unit. Shunts are the half-line values at each end.
struct PiBranch {
    int from_bus = 0;
    int to_bus = 0;
    Complex y_series;
    Complex y_shunt_from;
    Complex y_shunt_to;
    bool is_transformer = false;
};

/// Nodal admittance matrix plus the branch data it was built from.
struct AdmittanceMatrix {
    Eigen::MatrixXcd y;
    std::vector<int> bus_ids;           // row index -> bus id
    std::map<int, int> bus_index;       // bus id -> row index
    std::vector<PiBranch> branches;
    Eigen::VectorXcd shunt;             // total shunt admittance per row
    int slack_index = 0;

    int order() const noexcept { return static_cast<int>(bus_ids.size()); }
    int index_of(int bus_id) const;
};

/// Per-unit pi-models for every segment and transformer link of the network.
std::vector<PiBranch> build_branches(const NetworkModel& net, const std::map<int, SequenceLineParams>& seq);

/// Assemble Y from explicit branches. Throws DomainError on a zero/infinite series admittance.
AdmittanceMatrix assemble_ybus(const std::vector<int>& bus_ids, int slack_id, std::vector<PiBranch> branches);

AdmittanceMatrix assemble_ybus(const NetworkModel& net, const std::map<int, SequenceLineParams>& seq);

}  // namespace gridsim
