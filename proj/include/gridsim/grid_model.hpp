#pragma once

#include <complex>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gridsim {

using Complex = std::complex<double>;

inline constexpr double kFeetPerMile = 5280.0;

/// Physical constants used by the diode model.
struct PhysicalConstants {
    static constexpr double boltzmann_k = 1.3806503e-23;       // J/K
    static constexpr double electron_charge_q = 1.60217646e-19;  // C
};

/// Phase-frame line data for one overhead/underground configuration.
struct LineConfigMatrix {
    int config_id = 0;
    Eigen::Matrix3cd z_phase = Eigen::Matrix3cd::Zero();  // ohm/mile
    Eigen::Matrix3d b_shunt = Eigen::Matrix3d::Zero();    // uS/mile

    /// Throws ValidationError on a non-positive self resistance or a non-uniform/non-diagonal shunt.
    void validate() const;

    friend bool operator==(const LineConfigMatrix& a, const LineConfigMatrix& b) {
        return a.config_id == b.config_id && a.z_phase == b.z_phase && a.b_shunt == b.b_shunt;
    }
};

/// The four configurations of the 4.8 kV feeder (721-724), in ohm/mile and uS/mile.
std::map<int, LineConfigMatrix> standard_line_configs();

enum class BusKind { slack, load };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::load;
    int pv_arrays = 0;

    bool has_pv() const noexcept { return pv_arrays > 0; }

    friend bool operator==(const Bus&, const Bus&) = default;
};

struct Segment {
    int from_bus = 0;
    int to_bus = 0;
    double length_ft = 0.0;
    int config_id = 0;

    double length_miles() const noexcept { return length_ft / kFeetPerMile; }

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Ideal 1:1 transformer, kept as a small resistive link so Y stays nonsingular.
struct TransformerLink {
    int from_bus = 0;
    int to_bus = 0;
    double r_pu = 1e-6;

    friend bool operator==(const TransformerLink&, const TransformerLink&) = default;
};

struct BaseSystem {
    double v_base = 0.0;  // V, line-to-neutral
    double s_base = 0.0;  // VA
    double z_base = 0.0;  // ohm
    double y_base = 0.0;  // S

    friend bool operator==(const BaseSystem&, const BaseSystem&) = default;
};

/// z_base = v^2 / s, y_base = 1 / z_base. Throws DomainError for nonpositive inputs.
BaseSystem make_base(double v_base, double s_base);

/// 4800 V line-to-line / sqrt(3), 2500 kVA.
BaseSystem default_base();

struct NetworkModel {
    std::string name;
    std::vector<Bus> buses;
    std::vector<Segment> segments;
    std::vector<TransformerLink> transformers;
    std::map<int, LineConfigMatrix> configs;
    BaseSystem base;

    const Bus& bus(int id) const;
    int slack_id() const;
    bool contains(int bus_id) const;

    /// Checks every invariant; throws ValidationError naming the first violation.
    void validate() const;

    friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

/// Parse and validate a network document.
NetworkModel load_network(const std::filesystem::path& path);
NetworkModel parse_network(const std::string& text, const std::string& source = "<memory>");

std::string serialize_network(const NetworkModel& model);
void save_network(const NetworkModel& model, const std::filesystem::path& path);

}  // namespace gridsim
