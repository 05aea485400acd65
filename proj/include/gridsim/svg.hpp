#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gridsim {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    std::filesystem::path output;

    /// Throws DomainError unless every series has matching x/y sizes and all share one length.
    void validate() const;
};

/// Line chart as a standalone SVG document. Output depends only on the spec.
std::string render_svg(const PlotSpec& spec);

/// Render and write to spec.output. Throws IoError if the path is not writable.
void emit_svg(const PlotSpec& spec);

}  // namespace gridsim
